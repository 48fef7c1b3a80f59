#include "msindex/index_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "msindex/kernels.hpp"
#include "scan.hpp"

namespace msi {

namespace {

using detail::golden_min;

bool same_crossings(const std::vector<KernelSolution>& a, const std::vector<KernelSolution>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i].s - b[i].s) > tol || a[i].dim != b[i].dim) return false;
    return true;
}

struct FlowCount {
    int index = 0;
    bool regular = true;
    std::vector<SCrossing> crossings;
    int intervals = 0;
};

// Crossings from indicator values f on the uniform grid s over [lo, hi].
std::vector<KernelSolution> crossings_from_values(const TwistedBvp& bvp, const std::vector<double>& s,
                                                  const std::vector<double>& f, const SpathOptions& opt) {
    const double lo = s.front(), hi = s.back(), L = hi - lo;
    auto scan = [&](double x) { return bvp.indicator(x, Accuracy::Scan); };
    auto fine = [&](double x) { return bvp.indicator(x, Accuracy::Fine); };

    // candidate intervals are resampled so that crossings closer than the grid spacing separate
    constexpr int kSub = 16;
    struct Bracket {
        double a, b, slope, spacing;
        int depth;
    };
    std::vector<Bracket> brackets;
    auto resample = [&](double a, double b, double fa, double fb, int depth) {
        std::vector<double> st(kSub - 1);
        for (int j = 1; j < kSub; ++j) st[j - 1] = a + (b - a) * j / kSub;
        const std::vector<double> inner = kernels::indicator_scan(bvp, st, Accuracy::Scan);
        std::vector<double> sx{a}, sv{fa};
        sx.insert(sx.end(), st.begin(), st.end());
        sv.insert(sv.end(), inner.begin(), inner.end());
        sx.push_back(b);
        sv.push_back(fb);
        double slope = 0.0;
        for (int j = 0; j < kSub; ++j) slope = std::max(slope, std::abs(sv[j + 1] - sv[j]) / (sx[j + 1] - sx[j]));
        for (int j = 0; j <= kSub; ++j) {
            if (!detail::local_min(sv, std::size_t(j), 0.0)) continue;
            brackets.push_back({sx[std::max(0, j - 1)], sx[std::min(kSub, j + 1)], slope, (b - a) / kSub, depth});
        }
    };
    for (std::size_t i : detail::candidate_intervals(s, f, 0.0)) resample(s[i], s[i + 1], f[i], f[i + 1], 0);

    std::vector<KernelSolution> out;
    for (std::size_t bi = 0; bi < brackets.size(); ++bi) {
        const auto [a, b, slope, spacing, depth] = brackets[bi];
        // twice the sampled slope as the Lipschitz bound; the search ends once a crossing is excluded
        const auto [x1, f1] = golden_min(scan, a, b, 1e-11 * L, 2.0 * slope, opt.near_miss);
        // the scan indicator is accurate to ~1e-9; anything well above is a near miss
        if (f1 > opt.near_miss) continue;
        // the scan root drifts from the fine one on long or stiff flows, so the fine window grows
        // until it reaches the root; it stays well below the spacing of distinct crossings
        double x2 = x1, f2 = INFINITY;
        for (double w = 1e-7 * L; w <= 1.01e-4 * L; w *= 10.0) {
            const double a = std::max(lo, x1 - w), b = std::min(hi, x1 + w);
            std::tie(x2, f2) = golden_min(fine, a, b, 1e-12 * L);
            // an interior minimum above tol is a genuine near miss
            const bool at_edge = (x2 - a < 0.05 * w && a > lo) || (b - x2 < 0.05 * w && b < hi);
            if (f2 < opt.crossing_tol || !at_edge) break;
        }
        if (f2 >= opt.crossing_tol) continue;
        // points joined by a stretch below tol are one crossing
        auto joined = [&](double x, double y) {
            return std::abs(x - y) <= 1e-12 * L || fine(0.5 * (x + y)) < opt.crossing_tol;
        };
        if (x2 - lo <= 1e-6 * L && fine(lo) < opt.crossing_tol && joined(lo, x2)) x2 = lo;
        if (hi - x2 <= 1e-6 * L && fine(hi) < opt.crossing_tol && joined(x2, hi)) x2 = hi;
        bool dup = false;
        for (const auto& k : out) dup = dup || (std::abs(k.s - x2) <= 1e-6 * L && joined(k.s, x2));
        if (dup) continue;
        out.push_back(bvp.kernel(x2, opt.kernel_tol));
        out.back().s = x2;
        // a second zero closer than the sub-sample spacing merges into this dip; the first
        // singular value past the kernel is then small, and a narrower window separates them
        const int k = out.back().dim;
        const Eigen::VectorXd svs = bvp.singular_values(x2, Accuracy::Scan);
        if (depth < 4 && k < svs.size() && svs(k) <= 4.0 * slope * spacing) {
            const double wa = std::max(lo, x2 - 2 * spacing), wb = std::min(hi, x2 + 2 * spacing);
            resample(wa, wb, scan(wa), scan(wb), depth + 1);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.s < q.s; });
    return out;
}

std::vector<double> uniform(double lo, double hi, int intervals) {
    std::vector<double> s(intervals + 1);
    for (int i = 0; i <= intervals; ++i) s[i] = lo + (hi - lo) * i / intervals;
    s.back() = hi;
    return s;
}

FlowCount count_flow(const TwistedBvp& bvp, double s0, const SpathOptions& opt) {
    int intervals = opt.initial_intervals;
    std::vector<double> s = uniform(0.0, s0, intervals);
    std::vector<double> f = kernels::indicator_scan(bvp, s, Accuracy::Scan);
    std::vector<KernelSolution> prev = crossings_from_values(bvp, s, f, opt);
    while (true) {
        if (2 * intervals > opt.max_intervals)
            throw BudgetError("s-crossings did not stabilise under grid doubling");
        // the doubled grid reuses every old value
        const std::vector<double> s2 = uniform(0.0, s0, 2 * intervals);
        std::vector<double> mids(intervals);
        for (int i = 0; i < intervals; ++i) mids[i] = s2[2 * i + 1];
        const std::vector<double> fm = kernels::indicator_scan(bvp, mids, Accuracy::Scan);
        std::vector<double> f2(2 * intervals + 1);
        for (int i = 0; i <= intervals; ++i) f2[2 * i] = f[i];
        for (int i = 0; i < intervals; ++i) f2[2 * i + 1] = fm[i];
        auto next = crossings_from_values(bvp, s2, f2, opt);
        intervals *= 2;
        s = s2;
        f = std::move(f2);
        const bool stable = same_crossings(prev, next, 1e-6 * s0);
        prev = std::move(next);
        if (stable) break;
    }
    FlowCount fc;
    fc.intervals = intervals;
    for (const auto& k : prev) {
        SCrossing c;
        c.s = k.s;
        c.kernel_dim = k.dim;
        c.signature = k.signature;
        c.regular = k.regular;
        fc.crossings.push_back(c);
        if (!k.regular) fc.regular = false;
        if (k.s >= s0) throw SpectralError("crossing at the right end of the s-interval");
        // start of the interval counts -n_-, interior counts the signature
        if (k.s == 0.0) fc.index -= k.signature.minus;
        else fc.index += k.signature.plus - k.signature.minus;
    }
    return fc;
}

}  // namespace

int nullity(const RMat& A, cplx omega, double tol) { return nullity(CMat(A.cast<cplx>()), omega, tol); }

std::vector<KernelSolution> scan_crossings(const TwistedBvp& bvp, double lo, double hi, int intervals,
                                           const SpathOptions& opt) {
    const std::vector<double> s = uniform(lo, hi, intervals);
    return crossings_from_values(bvp, s, kernels::indicator_scan(bvp, s, Accuracy::Scan), opt);
}

double find_s0(const MorseSturmSystem& sys, cplx omega, double c, const SpathOptions& opt) {
    const TwistedBvp probe(sys, omega, c);
    double s = std::max(1.0, 2.0 * std::abs(c) * probe.curvature_bound());
    while (s <= 1e6) {
        if (probe.indicator(s, Accuracy::Fine) > 1e-8 &&
            scan_crossings(probe, s, 2.0 * s, opt.initial_intervals, opt).empty())
            return 2.0 * s;
        s *= 2.0;
    }
    throw BudgetError("no nondegenerate s0 found below 1e6");
}

SpathResult spectral_index_spath_detailed(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt) {
    SpathResult res;
    res.s0 = find_s0(sys, omega, 1.0, opt);
    const FlowCount base = count_flow(TwistedBvp(sys, omega, 1.0), res.s0, opt);
    if (base.regular) {
        res.index = base.index;
        res.crossings = base.crossings;
        res.intervals = base.intervals;
        return res;
    }
    // Degenerate crossing forms: the family shifted by eps I has the same flow for small eps.
    const FlowCount f1 = count_flow(TwistedBvp(sys, omega, 1.0, opt.shift), res.s0, opt);
    const FlowCount f2 = count_flow(TwistedBvp(sys, omega, 1.0, 0.5 * opt.shift), res.s0, opt);
    if (!f1.regular || !f2.regular)
        throw DegeneratePathError("shifted s-family still has degenerate crossings");
    if (f1.index != f2.index)
        throw DegeneratePathError("shifted s-family: " + std::to_string(f1.index) + " at eps, " +
                                  std::to_string(f2.index) + " at eps/2");
    res.index = f1.index;
    res.crossings = f1.crossings;
    res.intervals = f1.intervals;
    res.shift = opt.shift;
    return res;
}

int spectral_index_spath(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt) {
    return spectral_index_spath_detailed(sys, omega, opt).index;
}

IotaResult geometric_index_detailed(const MorseSturmSystem& sys, cplx omega) {
    const FundamentalSolution psi = integrate_fundamental(sys, 1.0, 0.0);
    return iota_omega(psi, omega, sys.twist_lift().cast<cplx>());
}

int geometric_index(const MorseSturmSystem& sys, cplx omega) { return geometric_index_detailed(sys, omega).index; }

IndexReport theorem_A_check(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt) {
    IndexReport r;
    r.omega = omega;
    const IotaResult geo = geometric_index_detailed(sys, omega);
    r.i_geo = geo.index;
    r.i_geo_winding = geo.winding_check;
    r.geo_epsilon = geo.epsilon;
    r.t_crossings = geo.crossings;
    r.nullity = nullity(sys.A, omega);
    r.i_spec_thmA = r.i_geo - r.nullity;
    const SpathResult sp = spectral_index_spath_detailed(sys, omega, opt);
    r.i_spec_spath = sp.index;
    r.s0 = sp.s0;
    r.spath_shift = sp.shift;
    r.spath_intervals = sp.intervals;
    r.s_crossings = sp.crossings;
    r.routes_agree = sp.index == r.i_spec_thmA;
    return r;
}

Prop55Result prop55_check(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt) {
    Prop55Result r;
    r.s0 = find_s0(sys, omega, 0.0, opt);
    const FundamentalSolution psi = integrate_fundamental(sys, 0.0, r.s0);
    r.lhs = iota_omega(psi, omega, sys.twist_lift().cast<cplx>()).index;
    r.nullity = nullity(sys.A, omega);
    r.holds = r.lhs == r.nullity;
    return r;
}

bool block_fact_check(const CMat& B, double tol) {
    const Eigen::Index k = B.rows();
    if (B.cols() != k) throw DimensionError("block_fact_check: B must be square");
    CMat M = CMat::Zero(2 * k, 2 * k);
    M.topRightCorner(k, k) = B;
    M.bottomLeftCorner(k, k) = B.adjoint();
    const double thr = tol * std::max(1.0, norm2(B));
    const Signature s = hermitian_signature(M, thr);
    Eigen::JacobiSVD<CMat> svd(B);
    int ker = 0;
    for (double x : svd.singularValues())
        if (x <= thr) ++ker;
    return s.zero == 2 * ker && s.plus == s.minus;
}

std::vector<cplx> roots_of_unity(int m) {
    if (m < 1) throw DomainError("roots_of_unity: m must be positive");
    std::vector<cplx> w(m);
    for (int k = 0; k < m; ++k) {
        cplx z = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
        if (std::abs(z.real()) < 1e-15) z.real(0.0);
        if (std::abs(z.imag()) < 1e-15) z.imag(0.0);
        w[k] = z;
    }
    return w;
}

BottResult bott_check(const MorseSturmSystem& sys, int m) {
    if (m < 1 || m > 12) throw DomainError("bott_check: m must lie in 1..12");
    BottResult r;
    r.m = m;
    const auto roots = roots_of_unity(m);
    for (const cplx& w : roots) {
        const int v = spectral_index_spath(sys, w);
        r.per_omega.emplace_back(w, v);
        r.rhs += v;
        r.nullity_rhs += nullity(sys.A, w);
    }
    const MorseSturmSystem it = iterate(sys, m);
    r.lhs = m == 1 ? r.rhs : spectral_index_spath(it, 1.0);
    r.nullity_lhs = nullity(it.A, 1.0);
    r.equal = r.lhs == r.rhs;
    r.nullity_equal = r.nullity_lhs == r.nullity_rhs;
    return r;
}

}  // namespace msi
