#pragma once
// Floquet analysis of the linearized Poincare map: spectrum, semisimplicity, Krein types,
// splitting numbers and the index-based instability certificates.

#include <optional>
#include <string>
#include <vector>

#include "msindex/fem.hpp"
#include "msindex/index_theory.hpp"

namespace msi {

struct ClusteredSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A_d Psi_{1,0}(T)
RMat poincare_map(const MorseSturmSystem& sys);

struct FloquetEigenvalue {
    cplx value;
    int algebraic = 0;
    int geometric = 0;
    bool on_circle = false;
    bool marginal = false;          // rank decision within a decade of the threshold
    std::optional<KreinType> krein; // unit eigenvalues only
};

struct StabilityClass {
    std::vector<FloquetEigenvalue> eigenvalues;
    bool on_circle = false;
    bool semisimple = false;
    bool linearly_stable = false;
    bool marginal = false;
};
StabilityClass classify_stability(const RMat& P, double tol = 1e-8);

struct Splitting {
    int plus = 0;
    int minus = 0;
    double theta = 0.0;  // one-sided offset actually used
};
// Jumps of the index of the polar path I -> M at w; S+ from w e^{+i theta}.
Splitting splitting_numbers(const CMat& M, cplx omega);
// Same along a caller-supplied path from I to M.
Splitting splitting_numbers(const SymplecticPath& path, cplx omega);

struct GeodesicSplitting {
    Splitting fem;      // jumps of the finite element omega-Morse index
    Splitting matrix;   // splitting numbers of the Poincare map
    bool equal = false;
};
GeodesicSplitting geodesic_splitting_check(const MorseSturmSystem& sys, cplx omega);

enum class Verdict { UnstableByParity, Silent };
const char* to_string(Verdict v);
Verdict instability_criterion(const MorseSturmSystem& sys, int i_spec_at_one);

struct UnitAngle {
    cplx lambda;
    bool rational = false;
    int numerator = 0, denominator = 0;
    Splitting splitting;
};
struct IndexHyperbolicResult {
    std::optional<bool> is_index_hyperbolic;  // empty when the spectrum could not be resolved
    bool spectral_route = false;
    std::optional<bool> variational_route;    // G = I only: all iterate Morse indices vanish
    std::vector<int> iterate_morse_indices;
    std::vector<UnitAngle> angles;
    int max_m = 0;
    std::string note;
};
IndexHyperbolicResult index_hyperbolic_check(const MorseSturmSystem& sys, int max_m);

bool strong_stability_check(const RMat& P);

struct TheoremFResult {
    bool applies = false;
    bool not_strongly_stable = false;
    bool consistent = true;
    std::vector<int> iterate_morse_indices;
};
TheoremFResult theorem_F_check(const MorseSturmSystem& sys, int max_m);

// e^{+-delta J} T has det(. - I) > 0 for the two smallest deltas; T must be linearly stable.
bool perturbation_lemma_check(const RMat& T, std::vector<double> deltas);

// Closest fraction p/q to x in [0, 1) with q <= max_q, if within tol.
std::optional<std::pair<int, int>> rational_angle(double x, int max_q, double tol = 1e-8);

struct StabilityReport {
    RMat P;
    StabilityClass cls;
    std::vector<std::pair<cplx, Splitting>> splitting;
    std::optional<bool> index_hyperbolic;
    bool strongly_stable_candidate = false;
    Verdict verdict = Verdict::Silent;
    int orientation = 1;
    int max_m = 0;
    std::string index_hyperbolic_note;
    // sign of D_1(P) (appendix convention) and of det(P - I) (the section-seven sets)
    int d1_sign = 0;
    int det_sign = 0;
};
StabilityReport analyze_stability(const MorseSturmSystem& sys, int i_spec_at_one, int max_m, double eig_tol = 1e-8);

}  // namespace msi
