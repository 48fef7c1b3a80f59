#pragma once
// Fundamental solutions of z' = J D_{c,s}(t) z by fixed-step RK4 with grid doubling.

#include <vector>

#include "msindex/model.hpp"

namespace msi {

struct AccuracyError : std::runtime_error {
    AccuracyError(const std::string& what, double best) : std::runtime_error(what), best_defect(best) {}
    double best_defect;
};

struct IntegratorConfig {
    int initial_steps = 64;
    double defect_bound = 0.0;  // 0 selects 1e-10 * max(1, sup|D| * length)
    int max_steps = 1 << 20;
    double shift = 0.0;         // added to c R(t): curvature R + shift I
};

class FundamentalSolution {
public:
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<RMat>& samples() const { return samples_; }
    // max over the grid of |Psi^T J Psi - J|_F
    double defect() const { return defect_; }
    // same, divided by max(1, |Psi|_F^2); this is what refinement controls
    double relative_defect() const { return rel_defect_; }
    double tolerance() const { return tol_; }
    double c() const { return c_; }
    double s() const { return s_; }
    double shift() const { return shift_; }
    int steps() const { return int(grid_.size()) - 1; }
    double start() const { return grid_.front(); }
    double end() const { return grid_.back(); }
    const RMat& endpoint() const { return samples_.back(); }

    // One RK4 sub-step from the nearest grid point at or below t.
    RMat evaluate(double t) const;

private:
    friend FundamentalSolution integrate_fundamental(const MorseSturmSystem&, double, double, double, double,
                                                     const IntegratorConfig&);
    MorseSturmSystem sys_;
    double c_ = 1.0, s_ = 0.0, shift_ = 0.0;
    std::vector<double> grid_;
    std::vector<RMat> samples_;
    double defect_ = 0.0, rel_defect_ = 0.0, tol_ = 0.0;
};

FundamentalSolution integrate_fundamental(const MorseSturmSystem& sys, double c, double s,
                                          const IntegratorConfig& config = {});
// Same on a sub-interval [t0, t1] of [0, T], starting from I at t0.
FundamentalSolution integrate_fundamental(const MorseSturmSystem& sys, double c, double s, double t0, double t1,
                                          const IntegratorConfig& config = {});

// Fixed-step transfer map from t0 to t1 (no refinement).
RMat propagate(const MorseSturmSystem& sys, double c, double s, double t0, double t1, int steps,
               double shift = 0.0);

// sup over [0,T] of |D_{c,s}(t)|_2, sampled.
double coefficient_sup_norm(const MorseSturmSystem& sys, double c, double s);

// Rough exponential rate of the flow, used to size steps and shooting segments.
double growth_rate(const MorseSturmSystem& sys, double c, double s, double shift = 0.0);

}  // namespace msi
