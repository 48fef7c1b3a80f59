#include "msindex/integrator.hpp"

#include <cmath>

namespace msi {

namespace {

struct Generator {
    const MorseSturmSystem& sys;
    double c, s, shift;
    RMat operator()(double t) const { return flow_generator(sys, c, s, t, shift); }
};

// K has the block form [[0, B], [Gd, 0]]; exploit it for the products.
inline RMat apply(const RMat& K, const RMat& X, int n) {
    RMat Y(2 * n, X.cols());
    Y.topRows(n).noalias() = K.topRightCorner(n, n) * X.bottomRows(n);
    Y.bottomRows(n) = K.bottomLeftCorner(n, n).diagonal().asDiagonal() * X.topRows(n);
    return Y;
}

inline void rk4_step(const Generator& gen, const RMat& K0, const RMat& Kh, const RMat& K1, double h, RMat& X,
                     int n) {
    (void)gen;
    const RMat k1 = apply(K0, X, n);
    const RMat k2 = apply(Kh, X + 0.5 * h * k1, n);
    const RMat k3 = apply(Kh, X + 0.5 * h * k2, n);
    const RMat k4 = apply(K1, X + h * k3, n);
    X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double sup_coefficient(const MorseSturmSystem& sys, double c, double s, double shift) {
    double best = 0.0;
    const int samples = sys.Rhat.kind() == CurvaturePath::Kind::Constant ? 1 : 64;
    for (int i = 0; i <= samples; ++i) {
        const double t = sys.T * i / samples;
        RMat D = hamiltonian_coefficient(sys, c, s, t);
        D.bottomRightCorner(sys.n, sys.n).diagonal().array() -= shift;
        best = std::max(best, norm2(D));
    }
    return best;
}

struct Level {
    std::vector<double> grid;
    std::vector<RMat> samples;
    double defect = 0.0, rel_defect = 0.0;
};

Level run_level(const Generator& gen, double t0, double t1, int N) {
    const int n = gen.sys.n;
    const RMat J = standard_J(n);
    Level L;
    L.grid.resize(N + 1);
    L.samples.resize(N + 1);
    const double h = (t1 - t0) / N;
    RMat X = RMat::Identity(2 * n, 2 * n);
    L.grid[0] = t0;
    L.samples[0] = X;
    RMat K0 = gen(t0);
    for (int i = 0; i < N; ++i) {
        const double t = t0 + i * h;
        const double tn = (i + 1 == N) ? t1 : t0 + (i + 1) * h;
        const RMat Kh = gen(t + 0.5 * h);
        const RMat K1 = gen(tn);
        rk4_step(gen, K0, Kh, K1, h, X, n);
        K0 = K1;
        L.grid[i + 1] = tn;
        L.samples[i + 1] = X;
        const double d = (X.transpose() * J * X - J).norm();
        L.defect = std::max(L.defect, d);
        L.rel_defect = std::max(L.rel_defect, d / std::max(1.0, X.squaredNorm()));
    }
    return L;
}

}  // namespace

double growth_rate(const MorseSturmSystem& sys, double c, double s, double shift) {
    const double c0 = sys.Rhat.sup_norm(sys.T, 32);
    return std::sqrt(std::max(1.0, std::abs(c) * c0 + std::abs(s) + std::abs(shift)));
}

double coefficient_sup_norm(const MorseSturmSystem& sys, double c, double s) {
    return sup_coefficient(sys, c, s, 0.0);
}

FundamentalSolution integrate_fundamental(const MorseSturmSystem& sys, double c, double s,
                                          const IntegratorConfig& config) {
    return integrate_fundamental(sys, c, s, 0.0, sys.T, config);
}

FundamentalSolution integrate_fundamental(const MorseSturmSystem& sys, double c, double s, double t0, double t1,
                                          const IntegratorConfig& config) {
    const double slack = 1e-12 * std::max(1.0, sys.T);
    if (!(t0 >= -slack && t1 <= sys.T + slack && t1 > t0))
        throw DomainError("integration interval outside [0, T]");
    if (config.initial_steps < 1) throw ConfigError("initial_steps must be positive");
    const Generator gen{sys, c, s, config.shift};
    const double len = t1 - t0;
    const double tol = config.defect_bound > 0
                           ? config.defect_bound
                           : 1e-10 * std::max(1.0, sup_coefficient(sys, c, s, config.shift) * len);

    int N = config.initial_steps;
    Level coarse = run_level(gen, t0, t1, N);
    double best = coarse.rel_defect;
    while (true) {
        if (2 * N > config.max_steps)
            throw AccuracyError("integrator refinement budget exhausted", best);
        Level fine = run_level(gen, t0, t1, 2 * N);
        best = std::min(best, fine.rel_defect);
        const RMat& a = coarse.samples.back();
        const RMat& b = fine.samples.back();
        const double change = (a - b).norm() / std::max(1.0, b.norm());
        if (fine.rel_defect <= tol && change <= tol) {
            FundamentalSolution sol;
            sol.sys_ = sys;
            sol.c_ = c;
            sol.s_ = s;
            sol.shift_ = config.shift;
            sol.grid_ = std::move(fine.grid);
            sol.samples_ = std::move(fine.samples);
            sol.defect_ = fine.defect;
            sol.rel_defect_ = fine.rel_defect;
            sol.tol_ = tol;
            return sol;
        }
        coarse = std::move(fine);
        N *= 2;
    }
}

RMat FundamentalSolution::evaluate(double t) const {
    const double a = grid_.front(), b = grid_.back();
    const double slack = 1e-12 * std::max(1.0, b - a);
    if (!(t >= a - slack && t <= b + slack)) throw DomainError("evaluate: time outside the integration interval");
    t = std::clamp(t, a, b);
    const double h0 = (b - a) / steps();
    std::size_t idx = std::size_t(std::floor((t - a) / h0));
    idx = std::min(idx, grid_.size() - 1);
    while (idx > 0 && grid_[idx] > t) --idx;
    while (idx + 1 < grid_.size() && grid_[idx + 1] <= t) ++idx;
    const double h = t - grid_[idx];
    if (h == 0.0) return samples_[idx];
    const Generator gen{sys_, c_, s_, shift_};
    RMat X = samples_[idx];
    const double tg = grid_[idx];
    rk4_step(gen, gen(tg), gen(tg + 0.5 * h), gen(tg + h), h, X, sys_.n);
    return X;
}

RMat propagate(const MorseSturmSystem& sys, double c, double s, double t0, double t1, int steps, double shift) {
    const Generator gen{sys, c, s, shift};
    const int n = sys.n;
    const double h = (t1 - t0) / steps;
    RMat X = RMat::Identity(2 * n, 2 * n);
    RMat K0 = gen(t0);
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        const RMat Kh = gen(t + 0.5 * h);
        const RMat K1 = gen(t + h);
        rk4_step(gen, K0, Kh, K1, h, X, n);
        K0 = K1;
    }
    return X;
}

}  // namespace msi
