#pragma once
// Seeded property suites shared by the CLI self-test and the unit tests, with the random
// generators they draw from.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "msindex/maslov.hpp"

namespace msi {

namespace gen {
CMat complex_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0);
CMat hermitian(std::mt19937_64& rng, int k, double scale = 1.0);
RMat symmetric(std::mt19937_64& rng, int k, double scale = 1.0);
// k x k complex matrix of the given rank
CMat rank_matrix(std::mt19937_64& rng, int k, int rank);
// exp(J S) for a random symmetric S; positive definite S gives a unit-circle spectrum
RMat symplectic(std::mt19937_64& rng, int n, bool elliptic, double scale = 1.0);
// Lagrangian e^{J H} [I; 0] in the standard space of dimension 2k
CMat lagrangian(std::mt19937_64& rng, int k, double scale = 1.0);
// t -> e^{J (t H1 + t^2 H2)} [I; 0] on [0, 1]
LagrangianPath lagrangian_path(std::mt19937_64& rng, int k, double scale = 2.0);
}  // namespace gen

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    int skipped = 0;
    std::vector<std::string> details;  // first few failures
    bool passed() const { return failures == 0 && cases > 0; }
};

SuiteResult block_factorization_sweep(std::mt19937_64& rng, int cases);
SuiteResult clm_property_suite(std::mt19937_64& rng, int paths);
SuiteResult splitting_additivity_suite(std::mt19937_64& rng, int pairs);

struct SelftestOptions {
    std::uint64_t seed = 7;
    int block_cases = 200;
    int clm_paths = 100;
    int splitting_pairs = 20;
};
std::vector<SuiteResult> run_selftest(const SelftestOptions& opt);

}  // namespace msi
