#pragma once
// Data-parallel kernels. Each OpenMP version has a serial twin in kernels::serial that the
// tests compare against bit for bit; bench/bench_kernels.cpp times the two.

#include <vector>

#include "msindex/shooting.hpp"

namespace msi::kernels {

// indicator(s) of a twisted boundary problem over a list of s values
std::vector<double> indicator_scan(const TwistedBvp& bvp, const std::vector<double>& s, Accuracy acc);

// endpoint maps Psi_{c,s}(T) over a list of s values (fixed steps)
std::vector<RMat> endpoint_maps(const MorseSturmSystem& sys, double c, const std::vector<double>& s, int steps);

// Element-wise quantities of the P1 discretization: per element, stiffness-plus-curvature
// blocks K00, K01, K11 (n x n each) and the mass weights. Filled in element order.
struct ElementBlocks {
    std::vector<RMat> k00, k01, k11;
};
ElementBlocks fem_elements(const MorseSturmSystem& sys, int N);

namespace serial {
std::vector<double> indicator_scan(const TwistedBvp& bvp, const std::vector<double>& s, Accuracy acc);
std::vector<RMat> endpoint_maps(const MorseSturmSystem& sys, double c, const std::vector<double>& s, int steps);
ElementBlocks fem_elements(const MorseSturmSystem& sys, int N);
}  // namespace serial

}  // namespace msi::kernels
