#include "msindex/fem.hpp"

#include <algorithm>

#include "msindex/kernels.hpp"
#include "msindex/maslov.hpp"

namespace msi {

namespace {

struct Pivot {
    int negative = 0;
    CMat inverse;
};

Pivot pivot(const CMat& P) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (P + P.adjoint()));
    Pivot out;
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0) ++out.negative;
    out.inverse = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

}  // namespace

CMat CyclicBlockMatrix::dense() const {
    const int N = blocks(), n = block_size();
    CMat D = CMat::Zero(N * n, N * n);
    for (int k = 0; k < N; ++k) D.block(k * n, k * n, n, n) = diag[k];
    for (int k = 0; k + 1 < N; ++k) {
        D.block(k * n, (k + 1) * n, n, n) += upper[k];
        D.block((k + 1) * n, k * n, n, n) += upper[k].adjoint();
    }
    D.block(0, (N - 1) * n, n, n) += corner;
    D.block((N - 1) * n, 0, n, n) += corner.adjoint();
    return D;
}

CyclicBlockMatrix CyclicBlockMatrix::axpy(double a, const CyclicBlockMatrix& o) const {
    CyclicBlockMatrix r = *this;
    for (std::size_t k = 0; k < diag.size(); ++k) r.diag[k] += a * o.diag[k];
    for (std::size_t k = 0; k < upper.size(); ++k) r.upper[k] += a * o.upper[k];
    r.corner += a * o.corner;
    return r;
}

DiscretizedForm assemble(const MorseSturmSystem& sys, cplx omega, int N) {
    if (!sys.g.riemannian()) throw NotApplicableError("finite elements need G = I");
    if (N < 8) throw DomainError("finite elements need N >= 8");
    const int n = sys.n;
    const double h = sys.T / N;
    const CMat C = omega * sys.A.cast<cplx>();
    const CMat Z = CMat::Zero(n, n), I = CMat::Identity(n, n);
    const kernels::ElementBlocks el = kernels::fem_elements(sys, N);

    DiscretizedForm f;
    f.N = N;
    f.omega = omega;
    for (CyclicBlockMatrix* m : {&f.H, &f.M}) {
        m->diag.assign(N, Z);
        m->upper.assign(N - 1, Z);
        m->corner = Z;
    }
    // element 0 joins u_0 = C u_N to u_1; unknown index k stands for node k + 1
    auto add = [&](CyclicBlockMatrix& m, const CMat& k00, const CMat& k01, const CMat& k11) {
        m.diag[0] += k11;
        m.diag[N - 1] += C.adjoint() * k00 * C;
        m.corner += k01.adjoint() * C;
    };
    add(f.H, el.k00[0].cast<cplx>(), el.k01[0].cast<cplx>(), el.k11[0].cast<cplx>());
    add(f.M, (h / 3) * I, (h / 6) * I, (h / 3) * I);
    for (int e = 1; e < N; ++e) {
        f.H.diag[e - 1] += el.k00[e].cast<cplx>();
        f.H.diag[e] += el.k11[e].cast<cplx>();
        f.H.upper[e - 1] += el.k01[e].cast<cplx>();
        f.M.diag[e - 1] += (h / 3) * I;
        f.M.diag[e] += (h / 3) * I;
        f.M.upper[e - 1] += (h / 6) * I;
    }
    return f;
}

int negative_count(const CyclicBlockMatrix& H) {
    const int N = H.blocks(), n = H.block_size();
    if (N < 3) return negative_count_dense(H);
    std::vector<CMat> D = H.diag;
    CMat F = H.corner;          // coupling of the current block to the last one
    CMat S = D[N - 1];
    int neg = 0;
    for (int k = 0; k <= N - 2; ++k) {
        const Pivot p = pivot(D[k]);
        neg += p.negative;
        S -= F.adjoint() * p.inverse * F;
        if (k == N - 2) break;
        const CMat& B = H.upper[k];
        D[k + 1] -= B.adjoint() * p.inverse * B;
        CMat next = (k + 1 == N - 2) ? CMat(H.upper[N - 2]) : CMat(CMat::Zero(n, n));
        next -= B.adjoint() * p.inverse * F;
        F = std::move(next);
    }
    return neg + pivot(S).negative;
}

int negative_count_dense(const CyclicBlockMatrix& H) {
    const CMat D = H.dense();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (D + D.adjoint()), Eigen::EigenvaluesOnly);
    return int((es.eigenvalues().array() < 0).count());
}

FemCount fem_count(const MorseSturmSystem& sys, cplx omega, int N) {
    const DiscretizedForm f = assemble(sys, omega, N);
    FemCount c;
    c.N = N;
    const double h = sys.T / N;
    c.zero_band = 10.0 * (1.0 + sys.Rhat.sup_norm(sys.T)) * h * h;
    c.index = negative_count(f.H.axpy(c.zero_band, f.M));
    c.nullity = negative_count(f.H.axpy(-c.zero_band, f.M)) - c.index;
    return c;
}

MorseIndexResult omega_morse_index(const MorseSturmSystem& sys, cplx omega, const FemOptions& opt) {
    MorseIndexResult r;
    for (int N = opt.start_N; N <= opt.max_N; N *= 2) {
        r.history.push_back(fem_count(sys, omega, N));
        const auto& h = r.history;
        const std::size_t m = h.size();
        if (m >= 3 && h[m - 1].index == h[m - 2].index && h[m - 2].index == h[m - 3].index &&
            h[m - 1].nullity == h[m - 2].nullity && h[m - 2].nullity == h[m - 3].nullity) {
            r.index = h.back().index;
            r.nullity = h.back().nullity;
            r.N_used = N;
            return r;
        }
    }
    throw ConvergenceError("finite element counts did not stabilise by N = " + std::to_string(opt.max_N));
}

MorseTheoremResult morse_index_theorem_check(const MorseSturmSystem& sys, cplx omega) {
    MorseTheoremResult r;
    r.fem_index = omega_morse_index(sys, std::conj(omega)).index;
    r.nullity = nullity(sys.A.cast<cplx>(), omega);
    const FundamentalSolution psi = integrate_fundamental(sys, 1.0, 0.0);
    const CMat target = std::conj(omega) * sys.twist_lift().transpose().cast<cplx>();
    const LagrangianPath path = LagrangianPath::from_solution(psi, CMat::Identity(2 * sys.n, 2 * sys.n));
    r.clm = clm_index(graph_frame(target), path);
    r.holds = r.fem_index + r.nullity == r.clm;
    return r;
}

}  // namespace msi
