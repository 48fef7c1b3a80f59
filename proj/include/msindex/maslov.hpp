#pragma once
// Maslov index of Lagrangian paths against a fixed Lagrangian, and the index of symplectic paths.

#include <functional>
#include <vector>

#include "msindex/integrator.hpp"

namespace msi {

struct DegeneratePathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotACrossingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Complex symplectic space C^{2k} with Hermitian form <F x, y>, F real, F^T = -F, F^2 = -I.
struct SymplecticSpace {
    RMat form;
    RMat darboux;  // orthogonal, darboux^T form darboux = standard_J

    static SymplecticSpace standard(int k);
    // C^{2n} + C^{2n} with (-J) + J: home of graphs of symplectic matrices.
    static SymplecticSpace graph(int n);
    static SymplecticSpace direct_sum(const SymplecticSpace& a, const SymplecticSpace& b);
    static SymplecticSpace from_form(const RMat& F);

    int dim() const { return int(form.rows()); }
    int half() const { return dim() / 2; }
    // largest |Z^* F Z| relative to |Z|^2
    double isotropy_residual(const CMat& Z) const;
};

class LagrangianPath {
public:
    using FrameFn = std::function<CMat(double)>;

    LagrangianPath(SymplecticSpace space, double a, double b, FrameFn frame, std::vector<double> grid = {});

    // graph t -> M(t) in SymplecticSpace::graph
    static LagrangianPath graph(std::function<CMat(double)> M, double a, double b, std::vector<double> grid = {});
    // graph of t -> prefactor * Psi(t) on the integration grid
    static LagrangianPath from_solution(const FundamentalSolution& sol, const CMat& prefactor);

    CMat frame(double t) const;
    double start() const { return a_; }
    double end() const { return b_; }
    const std::vector<double>& grid() const { return grid_; }
    const SymplecticSpace& space() const { return space_; }
    int half() const { return space_.half(); }

    LagrangianPath restricted(double a, double b) const;
    // samples the grid twice as densely
    LagrangianPath refined() const;
    // t -> l(phi(t)) for an increasing phi from [a, b] onto [start, end]
    LagrangianPath reparametrized(std::function<double(double)> phi, double a, double b) const;
    // e^{-eps F} l(t)
    LagrangianPath perturbed(double eps) const;
    // Phi l(t) for a fixed symplectic Phi
    LagrangianPath transformed(const CMat& Phi) const;

private:
    SymplecticSpace space_;
    double a_, b_;
    FrameFn frame_;
    std::vector<double> grid_;
};

// Piecewise path: consecutive pieces, each continuous.
using PiecewisePath = std::vector<LagrangianPath>;

LagrangianPath direct_sum(const LagrangianPath& p, const LagrangianPath& q);
CMat direct_sum_frame(const CMat& Z1, int k1, const CMat& Z2, int k2);

struct CrossingForm {
    int kernel_dim = 0;
    CMat basis;     // coefficients a with Z(t0) a in L0, orthonormal
    CMat form;      // Hermitian k x k
    Signature signature;
};

struct CrossingRecord {
    double t = 0.0;
    int kernel_dim = 0;
    Signature signature;
    bool regular = true;
};

struct ClmOptions {
    double crossing_tol = 1e-8;   // smallest singular value below this is a crossing
    double form_tol = 1e-6;       // relative tolerance for the signature of crossing forms
    double epsilon = 0.0;         // 0: choose from the endpoint gaps
    bool regularize = true;
};

struct ClmResult {
    int index = 0;
    std::vector<CrossingRecord> crossings;  // of the path actually counted
    bool regularized = false;
    double epsilon = 0.0;
    int index_half_epsilon = 0;
};

// Quadratic form of the crossing at t0 on l(t0) ∩ L0.
CrossingForm crossing_form(const LagrangianPath& path, const CMat& L0, double t0, const ClmOptions& opt = {});

ClmResult clm_index_detailed(const CMat& L0, const LagrangianPath& path, const ClmOptions& opt = {});
int clm_index(const CMat& L0, const LagrangianPath& path, const ClmOptions& opt = {});
int clm_index(const CMat& L0, const PiecewisePath& path, const ClmOptions& opt = {});

// Independent route: winding of det of the relative unitary with endpoint corrections.
int clm_index_winding(const CMat& L0, const LagrangianPath& path);

// Crossings of the path with L0 located by the singular-value scan only.
std::vector<double> locate_crossings(const CMat& L0, const LagrangianPath& path, double tol);

// Path of symplectic matrices on [a, b].
struct SymplecticPath {
    std::function<CMat(double)> at;
    double a = 0.0, b = 1.0;
    std::vector<double> grid;
    int n() const { return int(at(a).rows() / 2); }
};

struct IotaResult {
    int index = 0;
    int connecting = 0;      // clm value of the reference path from I to S(a)
    int concatenated = 0;    // clm value of the concatenation
    int winding_check = 0;   // independent route for the same quantity
    std::vector<CrossingRecord> crossings;
    double epsilon = 0.0;
};

// iota_w of an arbitrary path S via the concatenation rule and the graph bridge.
IotaResult iota(const SymplecticPath& S, cplx omega, const ClmOptions& opt = {});

// iota_w of t -> A_d psi(t) (psi(0) = I), including the twist as prefactor.
IotaResult iota_omega(const FundamentalSolution& psi, cplx omega, const CMat& Ad, const ClmOptions& opt = {});

enum class Parity { Even, Odd, Boundary };
const char* to_string(Parity p);
Parity parity_certificate(const CMat& Sa, const CMat& Sb, int omega, double eps = 1e-4);

}  // namespace msi
