#include "msindex/maslov.hpp"

#include "scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RMat block_diag(const RMat& a, const RMat& b) {
    RMat out = RMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
    std::vector<double> g(intervals + 1);
    for (int i = 0; i <= intervals; ++i) g[i] = a + (b - a) * i / intervals;
    g.back() = b;
    return g;
}

// smallest singular values of [Q0 | orth(Z)], ascending
Eigen::VectorXd stacked_sv(const CMat& Q0, const CMat& Z) {
    CMat S(Q0.rows(), Q0.cols() + Z.cols());
    S << Q0, orthonormal_columns(Z);
    Eigen::JacobiSVD<CMat> svd(S);
    Eigen::VectorXd sv = svd.singularValues();
    std::reverse(sv.begin(), sv.end());
    return sv;
}

using detail::golden_min;

CMat unitary_of(const SymplecticSpace& sp, const CMat& Z) {
    const CMat Zs = sp.darboux.transpose().cast<cplx>() * Z;
    const int k = sp.half();
    const CMat X = Zs.topRows(k), Y = Zs.bottomRows(k);
    const cplx I(0, 1);
    return (X + I * Y) * (X - I * Y).inverse();
}

}  // namespace

SymplecticSpace SymplecticSpace::from_form(const RMat& F) {
    SymplecticSpace s;
    s.form = F;
    s.darboux = darboux_basis(F);
    return s;
}

SymplecticSpace SymplecticSpace::standard(int k) { return from_form(standard_J(k)); }

SymplecticSpace SymplecticSpace::graph(int n) {
    const RMat J = standard_J(n);
    return from_form(block_diag(-J, J));
}

SymplecticSpace SymplecticSpace::direct_sum(const SymplecticSpace& a, const SymplecticSpace& b) {
    return from_form(block_diag(a.form, b.form));
}

double SymplecticSpace::isotropy_residual(const CMat& Z) const {
    return (Z.adjoint() * form.cast<cplx>() * Z).norm() / std::max(1.0, Z.squaredNorm());
}

LagrangianPath::LagrangianPath(SymplecticSpace space, double a, double b, FrameFn frame, std::vector<double> grid)
    : space_(std::move(space)), a_(a), b_(b), frame_(std::move(frame)), grid_(std::move(grid)) {
    if (!(b > a)) throw DomainError("Lagrangian path needs a < b");
    if (grid_.empty()) grid_ = uniform_grid(a, b, 64);
    if (grid_.front() != a || grid_.back() != b) throw DomainError("path grid must span [a, b]");
    for (double t : {a, b}) {
        const CMat Z = frame_(t);
        if (Z.rows() != space_.dim() || Z.cols() != space_.half())
            throw DimensionError("Lagrangian frame has the wrong shape");
        if (space_.isotropy_residual(Z) > 1e-8) throw DimensionError("frame is not isotropic");
    }
}

LagrangianPath LagrangianPath::graph(std::function<CMat(double)> M, double a, double b, std::vector<double> grid) {
    const int n = int(M(a).rows() / 2);
    auto frame = [M = std::move(M)](double t) {
        const CMat P = M(t);
        CMat Z(2 * P.rows(), P.cols());
        Z.topRows(P.rows()).setIdentity();
        Z.bottomRows(P.rows()) = P;
        return Z;
    };
    return LagrangianPath(SymplecticSpace::graph(n), a, b, frame, std::move(grid));
}

LagrangianPath LagrangianPath::from_solution(const FundamentalSolution& sol, const CMat& prefactor) {
    auto M = [sol, prefactor](double t) -> CMat { return prefactor * sol.evaluate(t).cast<cplx>(); };
    return graph(M, sol.start(), sol.end(), sol.grid());
}

CMat LagrangianPath::frame(double t) const {
    const double slack = 1e-12 * std::max(1.0, b_ - a_);
    if (t < a_ - slack || t > b_ + slack) throw DomainError("path evaluated outside its interval");
    return frame_(std::clamp(t, a_, b_));
}

LagrangianPath LagrangianPath::restricted(double a, double b) const {
    if (a < a_ || b > b_ || !(b > a)) throw DomainError("restriction outside the path interval");
    std::vector<double> g{a};
    for (double t : grid_)
        if (t > a && t < b) g.push_back(t);
    g.push_back(b);
    return LagrangianPath(space_, a, b, frame_, g);
}

LagrangianPath LagrangianPath::refined() const {
    std::vector<double> g;
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        g.push_back(grid_[i]);
        g.push_back(0.5 * (grid_[i] + grid_[i + 1]));
    }
    g.push_back(grid_.back());
    return LagrangianPath(space_, a_, b_, frame_, g);
}

LagrangianPath LagrangianPath::reparametrized(std::function<double(double)> phi, double a, double b) const {
    auto f = [fr = frame_, phi = std::move(phi), lo = a_, hi = b_](double t) {
        return fr(std::clamp(phi(t), lo, hi));
    };
    return LagrangianPath(space_, a, b, f, uniform_grid(a, b, int(grid_.size()) - 1));
}

LagrangianPath LagrangianPath::perturbed(double eps) const {
    const CMat R = (std::cos(eps) * RMat::Identity(space_.dim(), space_.dim()) - std::sin(eps) * space_.form)
                       .cast<cplx>();
    auto f = [fr = frame_, R](double t) -> CMat { return R * fr(t); };
    return LagrangianPath(space_, a_, b_, f, grid_);
}

LagrangianPath LagrangianPath::transformed(const CMat& Phi) const {
    auto f = [fr = frame_, Phi](double t) -> CMat { return Phi * fr(t); };
    return LagrangianPath(space_, a_, b_, f, grid_);
}

CMat direct_sum_frame(const CMat& Z1, int k1, const CMat& Z2, int k2) {
    // spaces are C^{2k1} + C^{2k2}; frames stack block-diagonally
    CMat Z = CMat::Zero(2 * (k1 + k2), k1 + k2);
    Z.block(0, 0, 2 * k1, k1) = Z1;
    Z.block(2 * k1, k1, 2 * k2, k2) = Z2;
    return Z;
}

LagrangianPath direct_sum(const LagrangianPath& p, const LagrangianPath& q) {
    if (p.start() != q.start() || p.end() != q.end()) throw DomainError("direct sum needs a common interval");
    const int k1 = p.half(), k2 = q.half();
    auto f = [p, q, k1, k2](double t) { return direct_sum_frame(p.frame(t), k1, q.frame(t), k2); };
    std::vector<double> g = p.grid();
    g.insert(g.end(), q.grid().begin(), q.grid().end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return LagrangianPath(SymplecticSpace::direct_sum(p.space(), q.space()), p.start(), p.end(), f, g);
}

namespace {

int kernel_dimension(const Eigen::VectorXd& sv, double tol) {
    int k = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++k;
    return k;
}

CMat derivative_form(const LagrangianPath& path, double t0, const CMat& a, double* scale_out) {
    const double L = path.end() - path.start();
    const CMat F = path.space().form.cast<cplx>();
    const CMat Z = path.frame(t0);
    auto diff = [&](double h) -> CMat {
        CMat D;
        if (t0 - h < path.start()) {
            D = (-3.0 * Z + 4.0 * path.frame(t0 + h) - path.frame(t0 + 2 * h)) / (2 * h);
        } else if (t0 + h > path.end()) {
            D = (3.0 * Z - 4.0 * path.frame(t0 - h) + path.frame(t0 - 2 * h)) / (2 * h);
        } else {
            D = (path.frame(t0 + h) - path.frame(t0 - h)) / (2 * h);
        }
        return D;
    };
    double h = 1e-5 * L;
    CMat D = diff(h);
    CMat H = a.adjoint() * D.adjoint() * F * Z * a;
    for (int it = 0; it < 8; ++it) {
        h *= 0.5;
        const CMat D2 = diff(h);
        const CMat H2 = a.adjoint() * D2.adjoint() * F * Z * a;
        // measured on the kernel vectors themselves, so ill-conditioned frames do not drown the form
        const double scale = std::max(1e-300, (D2 * a).norm() * (Z * a).norm());
        const bool done = (H2 - H).norm() <= 1e-6 * scale;
        H = H2;
        D = D2;
        if (done) {
            if (scale_out) *scale_out = scale;
            return 0.5 * (H + H.adjoint());
        }
    }
    throw AccuracyError("crossing form derivative did not converge", (H).norm());
}

}  // namespace

CrossingForm crossing_form(const LagrangianPath& path, const CMat& L0, double t0, const ClmOptions& opt) {
    const CMat Q0 = orthonormal_columns(L0);
    const CMat Z = path.frame(t0);
    const auto sv = stacked_sv(Q0, Z);
    CrossingForm out;
    out.kernel_dim = kernel_dimension(sv, opt.crossing_tol);
    if (out.kernel_dim == 0) throw NotACrossingError("crossing_form: l(t0) and L0 are transversal");
    const CMat R = Z - Q0 * (Q0.adjoint() * Z);
    out.basis = smallest_right_singular(R, out.kernel_dim);
    double scale = 1.0;
    out.form = derivative_form(path, t0, out.basis, &scale);
    out.signature = hermitian_signature(out.form, opt.form_tol * scale);
    return out;
}

std::vector<double> locate_crossings(const CMat& L0, const LagrangianPath& path, double tol) {
    const CMat Q0 = orthonormal_columns(L0);
    const double L = path.end() - path.start();
    // Perturbed paths have dips of width ~eps next to the endpoints; sample there geometrically.
    std::vector<double> g = path.grid();
    for (int k = 4; k <= 34; ++k) {
        g.push_back(path.start() + L * std::ldexp(1.0, -k));
        g.push_back(path.end() - L * std::ldexp(1.0, -k));
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    auto f = [&](double t) { return stacked_sv(Q0, path.frame(t))(0); };
    // sigma_min is a minimum over branches and can hide a steep dip behind a shallow branch;
    // |det| vanishes with every branch, so its candidates are added too
    std::vector<double> fv(g.size()), dv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Eigen::VectorXd sv = stacked_sv(Q0, path.frame(g[i]));
        fv[i] = sv(0);
        dv[i] = sv.prod();
    }
    std::vector<std::size_t> cand = detail::candidate_intervals(g, fv, tol);
    for (std::size_t i : detail::candidate_intervals(g, dv, 0.0)) cand.push_back(i);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<std::pair<double, double>> found;  // (t, value)
    // a flat stretch of zeros is one degenerate region: its grid points are reported as they are
    for (std::size_t i = 0; i < g.size(); ++i)
        if (fv[i] <= tol && detail::local_min(fv, i, tol)) found.push_back({g[i], fv[i]});
    constexpr int kSub = 16;
    // Two branches vanishing closer than the sub-sample spacing show up as one dip of sigma_min.
    // When the next singular value is small at a zero, a narrower window around it is resampled.
    std::function<void(double, double, double, double, int)> refine = [&](double lo, double hi, double flo,
                                                                          double fhi, int depth) {
        std::vector<double> st(kSub + 1), sv(kSub + 1);
        for (int j = 0; j <= kSub; ++j) {
            st[j] = j == kSub ? hi : lo + (hi - lo) * j / kSub;
            sv[j] = j == 0 ? flo : j == kSub ? fhi : f(st[j]);
        }
        const double h = (hi - lo) / kSub;
        double slope = 0.0;
        for (int j = 0; j < kSub; ++j) slope = std::max(slope, std::abs(sv[j + 1] - sv[j]) / h);
        for (int j = 0; j <= kSub; ++j) {
            if (!detail::local_min(sv, std::size_t(j), tol)) continue;
            const auto [t, v] = golden_min(f, st[std::max(0, j - 1)], st[std::min(kSub, j + 1)], 1e-12 * L);
            if (v > tol) continue;
            found.push_back({t, v});
            if (depth >= 4) continue;
            const double second = stacked_sv(Q0, path.frame(t))(1);
            if (second > 4.0 * slope * h) continue;
            const double a = std::max(path.start(), t - 2 * h), b = std::min(path.end(), t + 2 * h);
            refine(a, b, f(a), f(b), depth + 1);
        }
    };
    for (std::size_t i : cand) {
        if (fv[i] <= tol && fv[i + 1] <= tol) continue;
        refine(g[i], g[i + 1], fv[i], fv[i + 1], 0);
    }
    std::sort(found.begin(), found.end());
    // points joined by a stretch below tol are one crossing (refinement drifts along the noise floor)
    const double a = path.start(), b = path.end();
    const bool at_a = f(a) <= tol, at_b = f(b) <= tol;
    auto joined = [&](double x, double y) { return std::abs(x - y) <= 1e-12 * L || f(0.5 * (x + y)) <= tol; };
    std::vector<double> out;
    for (const auto& [t, v] : found) {
        double ts = t;
        if (at_a && joined(a, ts)) ts = a;
        if (at_b && joined(ts, b)) ts = b;
        if (!out.empty() && joined(out.back(), ts)) continue;
        out.push_back(ts);
    }
    return out;
}

namespace {

struct RegularCount {
    bool regular = true;
    int index = 0;
    std::vector<CrossingRecord> crossings;
};

RegularCount count_regular(const CMat& L0, const LagrangianPath& path, const ClmOptions& opt) {
    RegularCount rc;
    for (double t : locate_crossings(L0, path, opt.crossing_tol)) {
        CrossingForm cf = crossing_form(path, L0, t, opt);
        CrossingRecord rec{t, cf.kernel_dim, cf.signature, cf.signature.zero == 0};
        rc.crossings.push_back(rec);
        if (!rec.regular) {
            rc.regular = false;
            continue;
        }
        if (t == path.start()) rc.index += cf.signature.plus;
        else if (t == path.end()) rc.index -= cf.signature.minus;
        else rc.index += cf.signature.plus - cf.signature.minus;
    }
    return rc;
}

double endpoint_gap(const CMat& L0, const LagrangianPath& path, double tol) {
    const CMat Q0 = orthonormal_columns(L0);
    double gap = INFINITY;
    for (double t : {path.start(), path.end()}) {
        const auto sv = stacked_sv(Q0, path.frame(t));
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 100.0 * tol) gap = std::min(gap, sv(i));
    }
    return gap;
}

}  // namespace

ClmResult clm_index_detailed(const CMat& L0, const LagrangianPath& path, const ClmOptions& opt) {
    ClmResult res;
    RegularCount rc = count_regular(L0, path, opt);
    if (rc.regular) {
        res.index = rc.index;
        res.index_half_epsilon = rc.index;
        res.crossings = std::move(rc.crossings);
        return res;
    }
    if (!opt.regularize) throw DegeneratePathError("path has a degenerate crossing and regularization is disabled");
    double eps = opt.epsilon;
    if (eps <= 0) eps = std::min(1e-3, 0.25 * endpoint_gap(L0, path, opt.crossing_tol));
    const RegularCount r1 = count_regular(L0, path.perturbed(eps), opt);
    const RegularCount r2 = count_regular(L0, path.perturbed(0.5 * eps), opt);
    if (!r1.regular || !r2.regular)
        throw DegeneratePathError("perturbed path still has degenerate crossings (eps = " + std::to_string(eps) + ")");
    if (r1.index != r2.index)
        throw DegeneratePathError("regularization unstable: " + std::to_string(r1.index) + " at eps, " +
                                  std::to_string(r2.index) + " at eps/2");
    res.index = r1.index;
    res.index_half_epsilon = r2.index;
    res.regularized = true;
    res.epsilon = eps;
    res.crossings = r1.crossings;
    return res;
}

int clm_index(const CMat& L0, const LagrangianPath& path, const ClmOptions& opt) {
    return clm_index_detailed(L0, path, opt).index;
}

int clm_index(const CMat& L0, const PiecewisePath& path, const ClmOptions& opt) {
    int total = 0;
    for (const auto& piece : path) total += clm_index(L0, piece, opt);
    return total;
}

int clm_index_winding(const CMat& L0, const LagrangianPath& path) {
    const auto& sp = path.space();
    const CMat U0 = unitary_of(sp, L0);
    auto W = [&](double t) -> CMat { return U0.adjoint() * unitary_of(sp, path.frame(t)); };
    auto det_phase = [&](double t) { return std::arg(W(t).determinant()); };
    auto wrap = [](double x) { return std::remainder(x, kTwoPi); };

    double total = 0.0;
    std::function<double(double, double, double, double, int)> seg = [&](double t0, double t1, double p0, double p1,
                                                                         int depth) -> double {
        const double d = wrap(p1 - p0);
        if (std::abs(d) <= std::numbers::pi / 4 || depth > 40) return d;
        const double tm = 0.5 * (t0 + t1);
        const double pm = det_phase(tm);
        return seg(t0, tm, p0, pm, depth + 1) + seg(tm, t1, pm, p1, depth + 1);
    };
    const auto& g = path.grid();
    double prev = det_phase(g[0]);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double cur = det_phase(g[i]);
        total += seg(g[i - 1], g[i], prev, cur, 0);
        prev = cur;
    }
    auto alpha_sum = [&](double t) {
        Eigen::ComplexEigenSolver<CMat> es(W(t), false);
        double s = 0.0;
        for (const auto& ev : es.eigenvalues()) {
            double a = std::arg(ev);
            if (std::abs(a) < 1e-7) a = kTwoPi;
            else if (a < 0) a += kTwoPi;
            s += a;
        }
        return s;
    };
    const double x = (total + alpha_sum(path.start()) - alpha_sum(path.end())) / kTwoPi;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-3) throw AccuracyError("winding count is not close to an integer", std::abs(x - r));
    return int(r);
}

IotaResult iota(const SymplecticPath& S, cplx omega, const ClmOptions& opt) {
    const CMat X0 = S.at(S.a);
    const int n = int(X0.rows() / 2);
    CMat L0(4 * n, 2 * n);
    L0.topRows(2 * n).setIdentity();
    L0.bottomRows(2 * n) = omega * CMat::Identity(2 * n, 2 * n);
    const int shift = std::abs(omega - cplx(1.0)) < 1e-12 ? n : 0;

    const PolarPath connect(X0);
    const LagrangianPath cp = LagrangianPath::graph([connect](double t) { return connect(t); }, 0.0, 1.0);
    const LagrangianPath sp = LagrangianPath::graph(S.at, S.a, S.b, S.grid);

    IotaResult out;
    // The reference path often lies inside the Maslov cycle on a whole stretch (eigenvalue 1 of S(a)
    // persists along U^t P^t); the winding route needs no regularization there.
    out.connecting = clm_index_winding(L0, cp);
    const ClmResult rs = clm_index_detailed(L0, sp, opt);
    out.concatenated = out.connecting + rs.index;  // path additivity over the junction at S(a)
    out.index = (out.concatenated - shift) - (out.connecting - shift);
    out.crossings = rs.crossings;
    out.epsilon = rs.epsilon;
    out.winding_check = clm_index_winding(L0, sp);
    return out;
}

IotaResult iota_omega(const FundamentalSolution& psi, cplx omega, const CMat& Ad, const ClmOptions& opt) {
    SymplecticPath S;
    const CMat pre = omega * Ad;
    S.at = [psi, pre](double t) -> CMat { return pre * psi.evaluate(t).cast<cplx>(); };
    S.a = psi.start();
    S.b = psi.end();
    S.grid = psi.grid();
    return iota(S, 1.0, opt);
}

const char* to_string(Parity p) {
    switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Boundary: return "boundary";
    }
    return "?";
}

Parity parity_certificate(const CMat& Sa, const CMat& Sb, int omega, double eps) {
    if (omega != 1 && omega != -1) throw DomainError("parity certificate needs omega = +1 or -1");
    const int n = int(Sa.rows() / 2);
    const CMat R = expm(RMat(-eps * standard_J(n))).cast<cplx>();
    const double da = d_omega(R * Sa, double(omega)).real();
    const double db = d_omega(R * Sb, double(omega)).real();
    const double tol = 1e-12 * std::max(1.0, std::pow(std::max(norm2(Sa), norm2(Sb)), 2 * n));
    if (std::abs(da) <= tol || std::abs(db) <= tol) return Parity::Boundary;
    return (da > 0) == (db > 0) ? Parity::Even : Parity::Odd;
}

}  // namespace msi
