#pragma once
// Geometric and spectral indices of a twisted system, and the integer identities tying them.

#include <optional>
#include <vector>

#include "msindex/maslov.hpp"
#include "msindex/shooting.hpp"

namespace msi {

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int nullity(const RMat& A, cplx omega, double tol = 1e-10);

struct SCrossing {
    double s = 0.0;
    int kernel_dim = 0;
    Signature signature;
    bool regular = true;
};

struct SpathOptions {
    int initial_intervals = 64;
    int max_intervals = 1024;
    double crossing_tol = 1e-7;   // refined indicator below this is a crossing
    double kernel_tol = 1e-5;     // singular values counted into the kernel
    double near_miss = 1e-5;      // scan minima above this are not refined
    double shift = 1e-6;          // curvature shift used when a crossing is degenerate
};

struct SpathResult {
    int index = 0;
    double s0 = 0.0;
    std::vector<SCrossing> crossings;
    double shift = 0.0;          // 0 unless the shifted family was needed
    int intervals = 0;           // scan grid that was confirmed by doubling
};

// Crossings of s -> (bvp at s) on [lo, hi], each with its kernel solution.
std::vector<KernelSolution> scan_crossings(const TwistedBvp& bvp, double lo, double hi, int intervals,
                                           const SpathOptions& opt = {});

double find_s0(const MorseSturmSystem& sys, cplx omega, double c = 1.0, const SpathOptions& opt = {});

SpathResult spectral_index_spath_detailed(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt = {});
int spectral_index_spath(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt = {});

IotaResult geometric_index_detailed(const MorseSturmSystem& sys, cplx omega);
int geometric_index(const MorseSturmSystem& sys, cplx omega);

struct IndexReport {
    cplx omega;
    int i_geo = 0;
    int nullity = 0;
    int i_spec_thmA = 0;
    std::optional<int> i_spec_spath;
    double s0 = 0.0;
    bool routes_agree = false;
    // diagnostics
    int i_geo_winding = 0;
    double geo_epsilon = 0.0;
    double spath_shift = 0.0;
    int spath_intervals = 0;
    std::vector<SCrossing> s_crossings;
    std::vector<CrossingRecord> t_crossings;
};

IndexReport theorem_A_check(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt = {});

struct Prop55Result {
    int lhs = 0;
    int nullity = 0;
    double s0 = 0.0;
    bool holds = false;
};
Prop55Result prop55_check(const MorseSturmSystem& sys, cplx omega, const SpathOptions& opt = {});

// [[0, B], [B^*, 0]] has nullity 2 dim ker B and equal positive and negative counts.
bool block_fact_check(const CMat& B, double tol = 1e-10);

struct BottResult {
    int m = 1;
    int lhs = 0;
    int rhs = 0;
    bool equal = false;
    std::vector<std::pair<cplx, int>> per_omega;
    int nullity_lhs = 0;
    int nullity_rhs = 0;
    bool nullity_equal = false;
};
BottResult bott_check(const MorseSturmSystem& sys, int m);

std::vector<cplx> roots_of_unity(int m);

}  // namespace msi
