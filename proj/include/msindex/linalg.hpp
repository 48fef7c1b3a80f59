#pragma once
// Dense symplectic linear algebra on C^{2k}.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace msi {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSymplecticError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotHermitianError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// (n+, n0, n-) of a Hermitian form.
struct Signature {
    int plus = 0;
    int zero = 0;
    int minus = 0;
    bool operator==(const Signature&) const = default;
};

struct KreinType {
    cplx lambda;
    int p = 0;   // positive directions of -i J on the generalized eigenspace
    int q = 0;
    int algebraic_multiplicity = 0;
    bool definite() const { return p == 0 || q == 0; }
};

// [[0,-I],[I,0]] of size 2k.
RMat standard_J(int k);

// M^* J M == J within tol (Frobenius). Real M uses M^T.
bool is_symplectic(const CMat& M, double tol = 1e-10);
double symplectic_defect(const CMat& M);

// Block interleave of two symplectic matrices, each split into n x n blocks.
CMat diamond(const CMat& M1, const CMat& M2);
RMat diamond(const RMat& M1, const RMat& M2);

// Columns [I; M], Lagrangian in C^{2n} + C^{2n} with form (-J) + J.
CMat graph_frame(const CMat& M, double tol = 1e-8);

Signature hermitian_signature(const CMat& H, double tol = 1e-10);

// Krein signature of lambda; raises SpectralError if lambda is not an eigenvalue.
KreinType krein_type(const CMat& M, cplx lambda, double tol = 1e-8);

// (-1)^(n-1) conj(w)^n det(M - w I).
cplx d_omega(const CMat& M, cplx omega);

// dim ker(A - w I) with threshold tol * max(1, |A|).
int nullity(const CMat& A, cplx omega, double tol = 1e-10);

// Orthonormal basis of ker(A), singular values below rel_tol * max(1, |A|).
CMat null_space(const CMat& A, double rel_tol);
// Right singular vectors of the k smallest singular values.
CMat smallest_right_singular(const CMat& A, int k);

CMat orthonormal_columns(const CMat& Z);

// Spectral norm.
double norm2(const CMat& A);
double norm2(const RMat& A);

// Eigenvalues grouped into clusters of radius `radius`.
struct EigenCluster {
    cplx center;
    int multiplicity = 0;
};
std::vector<EigenCluster> eigen_clusters(const CMat& M, double radius);

// Orthogonal S with S^T F S = standard_J for a real orthogonal skew F (F^2 = -I).
RMat darboux_basis(const RMat& F);

// Polar path from I to a group element M (M^* J M = J): t -> U^t P^t, t in [0,1].
class PolarPath {
public:
    explicit PolarPath(const CMat& M);
    CMat operator()(double t) const;
    const CMat& endpoint() const { return M_; }

private:
    CMat M_;
    CMat Uvec_;          // Schur vectors of the unitary factor
    Eigen::VectorXd Uang_;
    CMat Pvec_;          // eigenvectors of the positive factor
    Eigen::VectorXd Plog_;
};

// exp(t * A) for small dense matrices.
CMat expm(const CMat& A);
RMat expm(const RMat& A);

}  // namespace msi
