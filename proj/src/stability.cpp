#include "msindex/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msindex/integrator.hpp"

namespace msi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Radius inside which numerically split eigenvalues are treated as one.
double cluster_radius(const CMat& M) { return 1e-6 * std::max(1.0, norm2(M)); }

double angle_of(cplx z) {
    double a = std::arg(z);
    if (a < 0) a += kTwoPi;
    return a;
}

bool near_one(cplx w) { return std::abs(w - cplx(1.0)) < 1e-12; }

// Index of an I-based path with the -n normalization at w = 1. Paths to matrices with
// eigenvalue w sit in the Maslov cycle on whole stretches, so the winding route is used.
int based_index(const SymplecticPath& path, cplx w) {
    const int n = path.n();
    CMat L0(4 * n, 2 * n);
    L0.topRows(2 * n).setIdentity();
    L0.bottomRows(2 * n) = w * CMat::Identity(2 * n, 2 * n);
    const LagrangianPath gp = LagrangianPath::graph(path.at, path.a, path.b, path.grid);
    return clm_index_winding(L0, gp) - (near_one(w) ? n : 0);
}

// Half the angular distance from w to the nearest unit eigenvalue of M not at w.
double half_gap(const CMat& M, cplx omega) {
    const double r = cluster_radius(M);
    double gap = std::numbers::pi;
    for (const auto& c : eigen_clusters(M, r)) {
        if (std::abs(c.center - omega) <= std::max(r, 1e-4)) continue;
        if (std::abs(std::abs(c.center) - 1.0) > 1e-6) continue;
        gap = std::min(gap, std::abs(std::arg(c.center / omega)));
    }
    return 0.5 * gap;
}

Splitting splitting_at(const SymplecticPath& path, cplx omega, double theta) {
    const int base = based_index(path, omega);
    Splitting s;
    s.theta = theta;
    s.plus = based_index(path, omega * std::polar(1.0, theta)) - base;
    s.minus = based_index(path, omega * std::polar(1.0, -theta)) - base;
    return s;
}

Splitting splitting_checked(const SymplecticPath& path, const CMat& M, cplx omega) {
    const double theta = std::min(1e-3, half_gap(M, omega));
    if (theta < 1e-5) throw ClusteredSpectrumError("splitting numbers: unit eigenvalues too close to separate");
    const Splitting a = splitting_at(path, omega, theta);
    const Splitting b = splitting_at(path, omega, 0.5 * theta);
    if (a.plus != b.plus || a.minus != b.minus)
        throw ClusteredSpectrumError("splitting numbers: one-sided jumps differ at theta and theta/2");
    return a;
}

SymplecticPath polar_path(const CMat& M) {
    const PolarPath p(M);
    SymplecticPath path;
    path.at = [p](double t) { return p(t); };
    path.a = 0.0;
    path.b = 1.0;
    return path;
}

int morse_index(const MorseSturmSystem& sys, cplx w) { return omega_morse_index(sys, w).index; }

void require_positive_metric(const MorseSturmSystem& sys, const char* what) {
    if (!sys.g.riemannian()) throw NotApplicableError(std::string(what) + ": needs a positive definite metric");
}

// Morse indices of the iterates at w = 1 until the first nonzero one.
std::vector<int> iterate_indices(const MorseSturmSystem& sys, int max_m) {
    std::vector<int> out;
    for (int m = 1; m <= max_m; ++m) {
        out.push_back(morse_index(iterate(sys, m), 1.0));
        if (out.back() != 0) break;
    }
    return out;
}

bool all_zero(const std::vector<int>& v, int max_m) {
    return int(v.size()) == max_m && std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

}  // namespace

RMat poincare_map(const MorseSturmSystem& sys) {
    const FundamentalSolution psi = integrate_fundamental(sys, 1.0, 0.0);
    return sys.twist_lift() * psi.endpoint();
}

StabilityClass classify_stability(const RMat& P, double tol) {
    const CMat M = P.cast<cplx>();
    const double scale = std::max(1.0, norm2(M));
    const double thr = tol * norm2(M);
    const Eigen::Index d = M.rows();

    StabilityClass out;
    out.on_circle = true;
    out.semisimple = true;
    for (const auto& c : eigen_clusters(M, std::sqrt(tol) * scale)) {
        FloquetEigenvalue e;
        e.value = c.center;
        e.algebraic = c.multiplicity;
        e.on_circle = std::abs(std::abs(c.center) - 1.0) <= tol * scale;
        const Eigen::JacobiSVD<CMat> svd(M - c.center * CMat::Identity(d, d));
        const RVec sv = svd.singularValues();
        int geo = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) <= thr) ++geo;
            if (sv(i) > 0.1 * thr && sv(i) < 10.0 * thr) e.marginal = true;
        }
        e.geometric = std::min(geo, e.algebraic);
        if (e.on_circle) {
            try {
                e.krein = krein_type(M, c.center);
            } catch (const SpectralError&) {
            }
        }
        out.on_circle = out.on_circle && e.on_circle;
        out.semisimple = out.semisimple && e.geometric == e.algebraic;
        out.marginal = out.marginal || e.marginal;
        out.eigenvalues.push_back(e);
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const auto& a, const auto& b) {
        const double aa = angle_of(a.value), ab = angle_of(b.value);
        return aa != ab ? aa < ab : std::abs(a.value) < std::abs(b.value);
    });
    out.linearly_stable = out.on_circle && out.semisimple;
    return out;
}

Splitting splitting_numbers(const CMat& M, cplx omega) {
    if (!is_symplectic(M, 1e-8 * std::max(1.0, std::pow(norm2(M), 2))))
        throw NotSymplecticError("splitting_numbers: matrix is not symplectic");
    return splitting_checked(polar_path(M), M, omega);
}

Splitting splitting_numbers(const SymplecticPath& path, cplx omega) {
    const CMat M = path.at(path.b);
    return splitting_checked(path, M, omega);
}

GeodesicSplitting geodesic_splitting_check(const MorseSturmSystem& sys, cplx omega) {
    require_positive_metric(sys, "geodesic_splitting_check");
    const RMat P = poincare_map(sys);
    const CMat M = P.cast<cplx>();
    GeodesicSplitting out;
    out.matrix = splitting_numbers(M, omega);
    // The Morse index is constant on each arc between spectral points. Going halfway to the next
    // one keeps the moved eigenvalues of the index form clear of the FEM zero band.
    const double theta = half_gap(M, omega);
    const int base = morse_index(sys, omega);
    out.fem.theta = theta;
    out.fem.plus = morse_index(sys, omega * std::polar(1.0, theta)) - base;
    out.fem.minus = morse_index(sys, omega * std::polar(1.0, -theta)) - base;
    out.equal = out.fem.plus == out.matrix.plus && out.fem.minus == out.matrix.minus;
    return out;
}

const char* to_string(Verdict v) { return v == Verdict::UnstableByParity ? "unstable_by_parity" : "silent"; }

Verdict instability_criterion(const MorseSturmSystem& sys, int i_spec_at_one) {
    const bool odd = ((i_spec_at_one + sys.n) % 2 + 2) % 2 == 1;
    const bool oriented = sys.orientation() == 1;
    return (oriented && odd) || (!oriented && !odd) ? Verdict::UnstableByParity : Verdict::Silent;
}

std::optional<std::pair<int, int>> rational_angle(double x, int max_q, double tol) {
    x -= std::floor(x);
    if (x <= tol || 1.0 - x <= tol) return std::pair{0, 1};
    // convergents of the continued fraction
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        const long p2 = long(a) * p1 + p0, q2 = long(a) * q1 + q0;
        if (q2 > max_q) break;
        if (std::abs(x - double(p2) / double(q2)) <= tol) return std::pair{int(p2), int(q2)};
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        const double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

IndexHyperbolicResult index_hyperbolic_check(const MorseSturmSystem& sys, int max_m) {
    if (max_m < 1) throw DomainError("index_hyperbolic_check: max_m must be positive");
    IndexHyperbolicResult out;
    out.max_m = max_m;
    const CMat M = poincare_map(sys).cast<cplx>();

    bool spectral = true;
    try {
        for (const auto& c : eigen_clusters(M, cluster_radius(M))) {
            if (std::abs(std::abs(c.center) - 1.0) > 1e-6) continue;
            UnitAngle u;
            u.lambda = c.center / std::abs(c.center);
            if (const auto pq = rational_angle(angle_of(u.lambda) / kTwoPi, max_m)) {
                u.rational = true;
                u.numerator = pq->first;
                u.denominator = pq->second;
            }
            u.splitting = splitting_numbers(M, u.lambda);
            const bool ok = u.rational ? (u.splitting.plus == 0 && u.splitting.minus == 0)
                                       : u.splitting.plus == u.splitting.minus;
            spectral = spectral && ok;
            out.angles.push_back(u);
        }
        out.spectral_route = spectral;
        out.is_index_hyperbolic = spectral;
    } catch (const ClusteredSpectrumError& e) {
        out.note = e.what();
    }

    if (sys.g.riemannian()) {
        out.iterate_morse_indices = iterate_indices(sys, max_m);
        out.variational_route = all_zero(out.iterate_morse_indices, max_m);
        if (*out.variational_route && out.is_index_hyperbolic && !*out.is_index_hyperbolic)
            out.note = "vanishing iterate indices but nonzero splitting at a rational angle";
        if (!out.is_index_hyperbolic && *out.variational_route) out.is_index_hyperbolic = true;
    }
    return out;
}

bool strong_stability_check(const RMat& P) {
    const StabilityClass cls = classify_stability(P);
    if (!cls.linearly_stable) return false;
    for (const auto& e : cls.eigenvalues) {
        if (std::abs(e.value - cplx(1.0)) < 1e-6 || std::abs(e.value + cplx(1.0)) < 1e-6) return false;
        if (!e.krein || !e.krein->definite()) return false;
    }
    return true;
}

TheoremFResult theorem_F_check(const MorseSturmSystem& sys, int max_m) {
    require_positive_metric(sys, "theorem_F_check");
    if (max_m < 1) throw DomainError("theorem_F_check: max_m must be positive");
    TheoremFResult out;
    out.iterate_morse_indices = iterate_indices(sys, max_m);
    out.applies = all_zero(out.iterate_morse_indices, max_m);
    if (out.applies) {
        out.not_strongly_stable = !strong_stability_check(poincare_map(sys));
        out.consistent = out.not_strongly_stable;
    }
    return out;
}

bool perturbation_lemma_check(const RMat& T, std::vector<double> deltas) {
    if (!classify_stability(T).linearly_stable)
        throw DomainError("perturbation_lemma_check: matrix is not linearly stable");
    if (deltas.size() < 2) throw DomainError("perturbation_lemma_check: need at least two deltas");
    std::sort(deltas.begin(), deltas.end());
    const int n = int(T.rows() / 2);
    const RMat J = standard_J(n);
    const RMat I = RMat::Identity(T.rows(), T.cols());
    for (int k = 0; k < 2; ++k)
        for (double sgn : {1.0, -1.0}) {
            const RMat E = expm(RMat(sgn * deltas[k] * J));
            if (!((E * T - I).determinant() > 0.0)) return false;
        }
    return true;
}

StabilityReport analyze_stability(const MorseSturmSystem& sys, int i_spec_at_one, int max_m, double eig_tol) {
    StabilityReport out;
    out.P = poincare_map(sys);
    out.cls = classify_stability(out.P, eig_tol);
    out.orientation = sys.orientation();
    out.max_m = max_m;
    out.verdict = instability_criterion(sys, i_spec_at_one);
    out.strongly_stable_candidate = strong_stability_check(out.P);

    const CMat M = out.P.cast<cplx>();
    for (const auto& e : out.cls.eigenvalues) {
        if (!e.on_circle) continue;
        const cplx w = e.value / std::abs(e.value);
        try {
            out.splitting.emplace_back(w, splitting_numbers(M, w));
        } catch (const ClusteredSpectrumError&) {
        }
    }
    if (max_m > 0) {
        try {
            const IndexHyperbolicResult ih = index_hyperbolic_check(sys, max_m);
            out.index_hyperbolic = ih.is_index_hyperbolic;
            out.index_hyperbolic_note = ih.note;
        } catch (const std::exception& e) {
            out.index_hyperbolic_note = e.what();
        }
    }
    auto sign_of = [](double x, double scale) { return std::abs(x) <= 1e-10 * scale ? 0 : (x > 0 ? 1 : -1); };
    const double scale = std::pow(std::max(1.0, norm2(M)), double(M.rows()));
    out.d1_sign = sign_of(d_omega(M, 1.0).real(), scale);
    out.det_sign = sign_of((out.P - RMat::Identity(out.P.rows(), out.P.cols())).determinant(), scale);
    return out;
}

}  // namespace msi
