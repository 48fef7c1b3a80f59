#pragma once
// Galerkin oracle for Riemannian systems (G = I): piecewise-linear elements on the twisted loop
// space u(0) = w A u(T), inertia of the index form by cyclic block elimination.

#include "msindex/model.hpp"

namespace msi {

struct NotApplicableError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cyclic block-tridiagonal Hermitian matrix on nodes 1..N (node 0 folded into node N).
// diag[k] = H(k,k), upper[k] = H(k,k+1) for k < N-1, corner = H(0, N-1).
struct CyclicBlockMatrix {
    std::vector<CMat> diag, upper;
    CMat corner;
    int blocks() const { return int(diag.size()); }
    int block_size() const { return diag.empty() ? 0 : int(diag[0].rows()); }
    CMat dense() const;
    CyclicBlockMatrix axpy(double a, const CyclicBlockMatrix& other) const;  // this + a * other
};

struct DiscretizedForm {
    int N = 0;
    cplx omega;
    CyclicBlockMatrix H;  // index form
    CyclicBlockMatrix M;  // L2 mass
};

DiscretizedForm assemble(const MorseSturmSystem& sys, cplx omega, int N);

// Number of negative eigenvalues, by block LDL^* with Haynsworth additivity.
int negative_count(const CyclicBlockMatrix& H);
// Same from a dense eigendecomposition (reference for small sizes).
int negative_count_dense(const CyclicBlockMatrix& H);

struct FemCount {
    int index = 0;
    int nullity = 0;
    int N = 0;
    double zero_band = 0.0;
};
// Counts of the pencil with zero band z: index = n_-(H + zM), nullity = n_-(H - zM) - index.
FemCount fem_count(const MorseSturmSystem& sys, cplx omega, int N);

struct FemOptions {
    int start_N = 32;
    int max_N = 4096;
};
struct MorseIndexResult {
    int index = 0;
    int nullity = 0;
    int N_used = 0;
    std::vector<FemCount> history;
};
// Doubles N until index and nullity agree over two successive doublings.
MorseIndexResult omega_morse_index(const MorseSturmSystem& sys, cplx omega, const FemOptions& opt = {});

struct MorseTheoremResult {
    int fem_index = 0;
    int nullity = 0;
    int clm = 0;
    bool holds = false;
};
// FEM index at conj(w) plus dim ker(A - w I) against the Maslov index of Gr(Psi) versus Gr(conj(w) A_d^T).
MorseTheoremResult morse_index_theorem_check(const MorseSturmSystem& sys, cplx omega);

}  // namespace msi
