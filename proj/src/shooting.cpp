#include "msindex/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace msi {

namespace {

double curvature_frequency(const CurvaturePath& R) {
    switch (R.kind()) {
    case CurvaturePath::Kind::Constant:
        return 0.0;
    case CurvaturePath::Kind::Fourier: {
        int kmax = 0;
        for (const auto& t : R.terms()) kmax = std::max(kmax, t.k);
        return 2.0 * std::numbers::pi * kmax / R.period();
    }
    case CurvaturePath::Kind::Iterated:
        return curvature_frequency(R.base());
    }
    return 0.0;
}

}  // namespace

TwistedBvp::TwistedBvp(MorseSturmSystem sys, cplx omega, double c, double shift)
    : sys_(std::move(sys)), omega_(omega), c_(c), shift_(shift) {
    c0_ = sys_.Rhat.sup_norm(sys_.T, 256);
    twist_ = omega_ * sys_.twist_lift().cast<cplx>();
}

int TwistedBvp::segments(double s) const {
    const double rate = std::sqrt(std::max(1.0, std::abs(c_) * c0_ + std::abs(s) + std::abs(shift_)));
    return std::max(1, int(std::ceil(rate * sys_.T / 6.0)));
}

std::vector<double> TwistedBvp::nodes(double s) const {
    const int K = segments(s);
    std::vector<double> t(K + 1);
    for (int k = 0; k <= K; ++k) t[k] = sys_.T * k / K;
    t[K] = sys_.T;
    return t;
}

int TwistedBvp::scan_steps(double s, double len) const {
    const double rate = std::sqrt(std::max(1.0, std::abs(c_) * c0_ + std::abs(s) + std::abs(shift_)));
    const double osc = curvature_frequency(sys_.Rhat);
    return std::max(16, int(std::ceil(20.0 * (rate + 0.5 * osc) * len)));
}

CMat TwistedBvp::matrix(double s, Accuracy acc) const {
    const auto t = nodes(s);
    const int K = int(t.size()) - 1;
    const int d = 2 * sys_.n;
    CMat B = CMat::Zero((K + 1) * d, (K + 1) * d);
    for (int k = 0; k < K; ++k) {
        const double len = t[k + 1] - t[k];
        RMat M;
        if (acc == Accuracy::Scan) {
            M = propagate(sys_, c_, s, t[k], t[k + 1], scan_steps(s, len), shift_);
        } else {
            IntegratorConfig cfg;
            cfg.initial_steps = scan_steps(s, len);
            cfg.shift = shift_;
            M = integrate_fundamental(sys_, c_, s, t[k], t[k + 1], cfg).endpoint();
        }
        const double r = 1.0 / std::max(1.0, M.norm());
        B.block(k * d, k * d, d, d) = -r * M.cast<cplx>();
        B.block(k * d, (k + 1) * d, d, d) = r * CMat::Identity(d, d);
    }
    const double r = 1.0 / std::max(1.0, twist_.norm());
    B.block(K * d, 0, d, d) = r * CMat::Identity(d, d);
    B.block(K * d, K * d, d, d) = -r * twist_;
    return B;
}

Eigen::VectorXd TwistedBvp::singular_values(double s, Accuracy acc) const {
    Eigen::JacobiSVD<CMat> svd(matrix(s, acc));
    Eigen::VectorXd sv = svd.singularValues();
    std::reverse(sv.begin(), sv.end());
    return sv;
}

double TwistedBvp::indicator(double s, Accuracy acc) const { return singular_values(s, acc)(0); }

KernelSolution TwistedBvp::kernel(double s, double threshold) const {
    const auto t = nodes(s);
    const int K = int(t.size()) - 1;
    const int n = sys_.n, d = 2 * n;
    std::vector<FundamentalSolution> segs;
    segs.reserve(K);
    CMat B = CMat::Zero((K + 1) * d, (K + 1) * d);
    for (int k = 0; k < K; ++k) {
        IntegratorConfig cfg;
        cfg.initial_steps = scan_steps(s, t[k + 1] - t[k]);
        cfg.shift = shift_;
        segs.push_back(integrate_fundamental(sys_, c_, s, t[k], t[k + 1], cfg));
        const RMat& M = segs.back().endpoint();
        const double r = 1.0 / std::max(1.0, M.norm());
        B.block(k * d, k * d, d, d) = -r * M.cast<cplx>();
        B.block(k * d, (k + 1) * d, d, d) = r * CMat::Identity(d, d);
    }
    const double r = 1.0 / std::max(1.0, twist_.norm());
    B.block(K * d, 0, d, d) = r * CMat::Identity(d, d);
    B.block(K * d, K * d, d, d) = -r * twist_;

    Eigen::JacobiSVD<CMat> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    KernelSolution out;
    out.s = s;
    for (Eigen::Index i = sv.size() - 1; i >= 0 && sv(i) <= threshold; --i) {
        out.sigma.push_back(sv(i));
        ++out.dim;
    }
    if (out.dim == 0) return out;
    const CMat V = svd.matrixV().rightCols(out.dim);
    out.z0 = V.topRows(d);

    const CMat G = sys_.G().cast<cplx>();
    out.form = CMat::Zero(out.dim, out.dim);
    out.gram = CMat::Zero(out.dim, out.dim);
    for (int k = 0; k < K; ++k) {
        const auto& seg = segs[k];
        const CMat zk = V.middleRows(k * d, d);
        const int N = seg.steps();
        const double h = (seg.end() - seg.start()) / N;
        for (int i = 0; i <= N; ++i) {
            const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const CMat U = seg.samples()[i].bottomRows(n).cast<cplx>() * zk;
            out.form += (w * h / 3.0) * (U.adjoint() * G * U);
            out.gram += (w * h / 3.0) * (U.adjoint() * U);
        }
    }
    out.form = 0.5 * (out.form + out.form.adjoint());
    out.gram = 0.5 * (out.gram + out.gram.adjoint());

    // normalize by the Gram matrix so the degeneracy test is scale free
    Eigen::SelfAdjointEigenSolver<CMat> ge(out.gram);
    const Eigen::VectorXd gev = ge.eigenvalues().cwiseMax(1e-300);
    const CMat Wm = ge.eigenvectors() * gev.cwiseSqrt().cwiseInverse().asDiagonal() * ge.eigenvectors().adjoint();
    const CMat Nf = Wm * out.form * Wm;
    out.signature = hermitian_signature(0.5 * (Nf + Nf.adjoint()), 1e-6);
    out.regular = out.signature.zero == 0;
    return out;
}

}  // namespace msi
