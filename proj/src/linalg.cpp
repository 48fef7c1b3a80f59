#include "msindex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace msi {

namespace {

void require_even_square(const CMat& M, const char* who) {
    if (M.rows() != M.cols() || M.rows() % 2 != 0 || M.rows() == 0)
        throw DimensionError(std::string(who) + ": expected a square matrix of even size, got " +
                             std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

}  // namespace

RMat standard_J(int k) {
    if (k < 0) throw DimensionError("standard_J: negative size");
    RMat J = RMat::Zero(2 * k, 2 * k);
    J.topRightCorner(k, k) = -RMat::Identity(k, k);
    J.bottomLeftCorner(k, k) = RMat::Identity(k, k);
    return J;
}

double symplectic_defect(const CMat& M) {
    require_even_square(M, "symplectic_defect");
    const CMat J = standard_J(int(M.rows() / 2)).cast<cplx>();
    return (M.adjoint() * J * M - J).norm();
}

bool is_symplectic(const CMat& M, double tol) { return symplectic_defect(M) <= tol; }

RMat diamond(const RMat& M1, const RMat& M2) {
    return diamond(CMat(M1.cast<cplx>()), CMat(M2.cast<cplx>())).real();
}

CMat diamond(const CMat& M1, const CMat& M2) {
    require_even_square(M1, "diamond");
    require_even_square(M2, "diamond");
    const Eigen::Index a = M1.rows() / 2, b = M2.rows() / 2, n = a + b;
    CMat out = CMat::Zero(2 * n, 2 * n);
    out.block(0, 0, a, a) = M1.block(0, 0, a, a);
    out.block(0, n, a, a) = M1.block(0, a, a, a);
    out.block(n, 0, a, a) = M1.block(a, 0, a, a);
    out.block(n, n, a, a) = M1.block(a, a, a, a);
    out.block(a, a, b, b) = M2.block(0, 0, b, b);
    out.block(a, n + a, b, b) = M2.block(0, b, b, b);
    out.block(n + a, a, b, b) = M2.block(b, 0, b, b);
    out.block(n + a, n + a, b, b) = M2.block(b, b, b, b);
    return out;
}

CMat graph_frame(const CMat& M, double tol) {
    require_even_square(M, "graph_frame");
    const double scale = std::max(1.0, M.squaredNorm());
    if (symplectic_defect(M) > tol * scale)
        throw NotSymplecticError("graph_frame: matrix is not symplectic");
    CMat Z(2 * M.rows(), M.cols());
    Z.topRows(M.rows()).setIdentity();
    Z.bottomRows(M.rows()) = M;
    return Z;
}

Signature hermitian_signature(const CMat& H, double tol) {
    if (H.rows() != H.cols()) throw DimensionError("hermitian_signature: not square");
    Signature s;
    if (H.rows() == 0) return s;
    const double scale = std::max(1.0, H.norm());
    if ((H - H.adjoint()).norm() > 1e-8 * scale)
        throw NotHermitianError("hermitian_signature: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    for (double ev : es.eigenvalues()) {
        if (ev > tol) ++s.plus;
        else if (ev < -tol) ++s.minus;
        else ++s.zero;
    }
    return s;
}

double norm2(const CMat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(A);
    return svd.singularValues()(0);
}

double norm2(const RMat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<RMat> svd(A);
    return svd.singularValues()(0);
}

CMat null_space(const CMat& A, double rel_tol) {
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = rel_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++rank;
    return svd.matrixV().rightCols(A.cols() - rank);
}

CMat smallest_right_singular(const CMat& A, int k) {
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(k);
}

CMat orthonormal_columns(const CMat& Z) {
    Eigen::HouseholderQR<CMat> qr(Z);
    return qr.householderQ() * CMat::Identity(Z.rows(), Z.cols());
}

int nullity(const CMat& A, cplx omega, double tol) {
    if (A.rows() != A.cols()) throw DimensionError("nullity: not square");
    const CMat B = A - omega * CMat::Identity(A.rows(), A.cols());
    Eigen::JacobiSVD<CMat> svd(B);
    const double thr = tol * std::max(1.0, norm2(A));
    int k = 0;
    for (double s : svd.singularValues())
        if (s <= thr) ++k;
    return k;
}

std::vector<EigenCluster> eigen_clusters(const CMat& M, double radius) {
    Eigen::ComplexEigenSolver<CMat> es(M, false);
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    const std::size_t m = ev.size();
    // single linkage
    std::vector<int> label(m, -1);
    int next = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            auto j = stack.back();
            stack.pop_back();
            for (std::size_t k = 0; k < m; ++k)
                if (label[k] < 0 && std::abs(ev[k] - ev[j]) <= radius) {
                    label[k] = next;
                    stack.push_back(k);
                }
        }
        ++next;
    }
    std::vector<EigenCluster> out(next);
    for (std::size_t i = 0; i < m; ++i) {
        out[label[i]].center += ev[i];
        out[label[i]].multiplicity += 1;
    }
    for (auto& c : out) c.center /= double(c.multiplicity);
    std::sort(out.begin(), out.end(), [](const EigenCluster& a, const EigenCluster& b) {
        if (std::arg(a.center) != std::arg(b.center)) return std::arg(a.center) < std::arg(b.center);
        return std::abs(a.center) < std::abs(b.center);
    });
    return out;
}

KreinType krein_type(const CMat& M, cplx lambda, double tol) {
    require_even_square(M, "krein_type");
    const double scale = std::max(1.0, norm2(M));
    const double tau = tol * scale;
    // defective eigenvalues scatter like eps^(1/m); group them generously
    const double radius = std::max(tau, 1e-6 * scale);
    const auto clusters = eigen_clusters(M, radius);
    const EigenCluster* hit = nullptr;
    for (const auto& c : clusters)
        if (std::abs(c.center - lambda) <= radius && (!hit || std::abs(c.center - lambda) < std::abs(hit->center - lambda)))
            hit = &c;
    if (!hit) throw SpectralError("krein_type: value is not an eigenvalue");

    const Eigen::Index d = M.rows();
    const CMat shifted = M - hit->center * CMat::Identity(d, d);
    CMat power = CMat::Identity(d, d);
    for (int i = 0; i < hit->multiplicity; ++i) power = power * shifted;
    const CMat E = smallest_right_singular(power, hit->multiplicity);
    const CMat Jt = cplx(0, -1) * standard_J(int(d / 2)).cast<cplx>();
    const CMat H = E.adjoint() * Jt * E;
    const Signature s = hermitian_signature(0.5 * (H + H.adjoint()), 1e-8);
    KreinType out;
    out.lambda = hit->center;
    out.p = s.plus;
    out.q = s.minus;
    out.algebraic_multiplicity = hit->multiplicity;
    return out;
}

cplx d_omega(const CMat& M, cplx omega) {
    require_even_square(M, "d_omega");
    const int n = int(M.rows() / 2);
    const cplx det = (M - omega * CMat::Identity(M.rows(), M.cols())).determinant();
    const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
    return sign * std::pow(std::conj(omega), n) * det;
}

RMat darboux_basis(const RMat& F) {
    const Eigen::Index d = F.rows();
    if (F.cols() != d || d % 2 != 0) throw DimensionError("darboux_basis: bad form size");
    if ((F * F + RMat::Identity(d, d)).norm() > 1e-9 * double(d))
        throw DimensionError("darboux_basis: form is not a complex structure");
    const Eigen::Index k = d / 2;
    RMat S = RMat::Zero(d, d);
    std::vector<RVec> used;
    Eigen::Index filled = 0;
    for (Eigen::Index c = 0; c < d && filled < k; ++c) {
        RVec e = RVec::Unit(d, c);
        for (const auto& u : used) e -= u.dot(e) * u;
        for (const auto& u : used) e -= u.dot(e) * u;  // second pass for stability
        if (e.norm() < 0.5) continue;
        e.normalize();
        RVec f = F * e;
        S.col(filled) = e;
        S.col(k + filled) = f;
        used.push_back(e);
        used.push_back(f);
        ++filled;
    }
    if (filled != k) throw DimensionError("darboux_basis: failed to complete basis");
    return S;
}

PolarPath::PolarPath(const CMat& M) : M_(M) {
    require_even_square(M, "PolarPath");
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMat U = svd.matrixU() * svd.matrixV().adjoint();
    Pvec_ = svd.matrixV();
    Plog_ = svd.singularValues().array().log().matrix();

    Eigen::ComplexSchur<CMat> schur(U);
    Uvec_ = schur.matrixU();
    const auto diag = schur.matrixT().diagonal();
    Uang_.resize(diag.size());
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        double a = std::arg(diag(i));
        // one branch for every eigenvalue at -1, so U^t commutes with J
        if (std::abs(std::abs(a) - std::numbers::pi) < 1e-9) a = std::numbers::pi;
        Uang_(i) = a;
    }
}

CMat PolarPath::operator()(double t) const {
    CVec phase(Uang_.size());
    for (Eigen::Index i = 0; i < Uang_.size(); ++i) phase(i) = std::polar(1.0, t * Uang_(i));
    CVec scale(Plog_.size());
    for (Eigen::Index i = 0; i < Plog_.size(); ++i) scale(i) = std::exp(t * Plog_(i));
    return (Uvec_ * phase.asDiagonal() * Uvec_.adjoint()) * (Pvec_ * scale.asDiagonal() * Pvec_.adjoint());
}

CMat expm(const CMat& A) { return A.exp(); }
RMat expm(const RMat& A) { return A.exp(); }

}  // namespace msi
