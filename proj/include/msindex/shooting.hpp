#pragma once
// The twisted boundary problem  z(0) = w A_d z(T)  for the (c, s) family, posed on a
// multiple-shooting partition so that long or strongly hyperbolic flows stay well conditioned.

#include <vector>

#include "msindex/integrator.hpp"

namespace msi {

enum class Accuracy { Scan, Fine };

struct KernelSolution {
    double s = 0.0;
    int dim = 0;
    std::vector<double> sigma;     // singular values below the kernel threshold
    CMat z0;                       // columns: initial data z(0) of the kernel solutions
    CMat form;                     // Gamma_ij = int <G u_j, u_i>
    CMat gram;                     // int <u_j, u_i>
    Signature signature;
    bool regular = true;
};

class TwistedBvp {
public:
    TwistedBvp(MorseSturmSystem sys, cplx omega, double c = 1.0, double shift = 0.0);

    const MorseSturmSystem& system() const { return sys_; }
    cplx omega() const { return omega_; }
    double c() const { return c_; }
    double shift() const { return shift_; }
    double curvature_bound() const { return c0_; }

    int segments(double s) const;
    // Block matrix with rows  z_{k+1} - M_k z_k = 0  and  z_0 - w A_d z_K = 0, rows scaled.
    CMat matrix(double s, Accuracy acc) const;
    // Smallest singular value of matrix(s); zero exactly at crossings.
    double indicator(double s, Accuracy acc) const;
    // Singular values in ascending order.
    Eigen::VectorXd singular_values(double s, Accuracy acc) const;

    // Kernel at s with Jacobi solutions, crossing form and Gram matrix.
    KernelSolution kernel(double s, double threshold) const;

private:
    std::vector<double> nodes(double s) const;
    int scan_steps(double s, double len) const;

    MorseSturmSystem sys_;
    cplx omega_;
    double c_, shift_, c0_;
    CMat twist_;
};

}  // namespace msi
