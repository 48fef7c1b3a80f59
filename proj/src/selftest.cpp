#include "msindex/selftest.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "msindex/index_theory.hpp"
#include "msindex/stability.hpp"

namespace msi {

namespace gen {

CMat complex_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    CMat M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = cplx(nd(rng), nd(rng));
    return M;
}

CMat hermitian(std::mt19937_64& rng, int k, double scale) {
    const CMat X = complex_matrix(rng, k, k, scale);
    return 0.5 * (X + X.adjoint());
}

RMat symmetric(std::mt19937_64& rng, int k, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    RMat X(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) X(i, j) = nd(rng);
    return 0.5 * (X + X.transpose());
}

CMat rank_matrix(std::mt19937_64& rng, int k, int rank) {
    if (rank == 0) return CMat::Zero(k, k);
    return complex_matrix(rng, k, rank) * complex_matrix(rng, rank, k);
}

RMat symplectic(std::mt19937_64& rng, int n, bool elliptic, double scale) {
    RMat S = symmetric(rng, 2 * n, scale);
    if (elliptic) {
        const RMat X = symmetric(rng, 2 * n, scale);
        S = X * X.transpose() + 0.1 * RMat::Identity(2 * n, 2 * n);
    }
    return expm(RMat(standard_J(n) * S));
}

CMat lagrangian(std::mt19937_64& rng, int k, double scale) {
    const CMat J = standard_J(k).cast<cplx>();
    CMat Z = CMat::Zero(2 * k, k);
    Z.topRows(k).setIdentity();
    return orthonormal_columns(expm(CMat(J * hermitian(rng, 2 * k, scale))) * Z);
}

LagrangianPath lagrangian_path(std::mt19937_64& rng, int k, double scale) {
    const CMat J = standard_J(k).cast<cplx>();
    const CMat A1 = J * hermitian(rng, 2 * k, scale);
    const CMat A2 = J * hermitian(rng, 2 * k, scale);
    CMat Z = CMat::Zero(2 * k, k);
    Z.topRows(k).setIdentity();
    auto frame = [A1, A2, Z](double t) -> CMat { return expm(CMat(t * A1 + t * t * A2)) * Z; };
    return LagrangianPath(SymplecticSpace::standard(k), 0.0, 1.0, frame);
}

}  // namespace gen

namespace {

void record(SuiteResult& r, bool ok, const std::string& what) {
    ++r.cases;
    if (ok) return;
    ++r.failures;
    if (r.details.size() < 5) r.details.push_back(what);
}

std::string pair_text(int a, int b) {
    std::ostringstream os;
    os << a << " vs " << b;
    return os.str();
}

}  // namespace

SuiteResult block_factorization_sweep(std::mt19937_64& rng, int cases) {
    SuiteResult r;
    r.name = "block_factorization";
    std::uniform_int_distribution<int> kd(1, 4);
    for (int c = 0; c < cases; ++c) {
        const int k = kd(rng);
        const int rank = std::uniform_int_distribution<int>(0, k)(rng);
        const CMat B = gen::rank_matrix(rng, k, rank);
        record(r, block_fact_check(B), "k=" + std::to_string(k) + " rank=" + std::to_string(rank));
    }
    return r;
}

SuiteResult clm_property_suite(std::mt19937_64& rng, int paths) {
    SuiteResult r;
    r.name = "clm_properties";
    std::uniform_int_distribution<int> kd(1, 2);
    std::uniform_real_distribution<double> ud(0.2, 0.8);
    for (int c = 0; c < paths; ++c) {
        const int k = kd(rng);
        const LagrangianPath path = gen::lagrangian_path(rng, k);
        const CMat L0 = gen::lagrangian(rng, k);
        const int base = clm_index(L0, path);
        const std::string tag = "path " + std::to_string(c) + ": ";

        // I: increasing reparametrization
        const LagrangianPath rp = path.reparametrized([](double t) { return t * t * (3.0 - 2.0 * t); }, 0.0, 1.0);
        const int v1 = clm_index(L0, rp);
        record(r, v1 == base, tag + "reparametrization " + pair_text(v1, base));

        // II: homotopy with fixed ends, e^{beta(t) J H} with beta vanishing at both ends
        const CMat A = standard_J(k).cast<cplx>() * gen::hermitian(rng, 2 * k, 0.5);
        const SymplecticSpace sp = path.space();
        LagrangianPath hp(sp, 0.0, 1.0, [path, A](double t) -> CMat {
            return expm(CMat(std::sin(std::numbers::pi * t) * A)) * path.frame(t);
        });
        const int v2 = clm_index(L0, hp);
        record(r, v2 == base, tag + "homotopy " + pair_text(v2, base));

        // III: additivity at an interior point
        const double mid = ud(rng);
        const int v3 = clm_index(L0, PiecewisePath{path.restricted(0.0, mid), path.restricted(mid, 1.0)});
        record(r, v3 == base, tag + "additivity " + pair_text(v3, base));

        // IV: a fixed symplectic map applied to both
        const CMat Phi = gen::symplectic(rng, k, false, 0.7).cast<cplx>();
        const int v4 = clm_index(orthonormal_columns(Phi * L0), path.transformed(Phi));
        record(r, v4 == base, tag + "symplectic invariance " + pair_text(v4, base));

        // V: direct sums
        const LagrangianPath other = gen::lagrangian_path(rng, 1);
        const CMat L1 = gen::lagrangian(rng, 1);
        const int sum = base + clm_index(L1, other);
        const int v5 = clm_index(direct_sum_frame(L0, k, L1, 1), direct_sum(path, other));
        record(r, v5 == sum, tag + "direct sum " + pair_text(v5, sum));
    }
    return r;
}

SuiteResult splitting_additivity_suite(std::mt19937_64& rng, int pairs) {
    SuiteResult r;
    r.name = "splitting_additivity";
    std::uniform_int_distribution<int> nd(1, 2);
    std::bernoulli_distribution coin(0.7);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    int attempts = 0;
    while (r.cases < 2 * pairs && attempts < 20 * pairs) {
        ++attempts;
        const CMat M1 = gen::symplectic(rng, nd(rng), coin(rng)).cast<cplx>();
        const CMat M2 = gen::symplectic(rng, nd(rng), coin(rng)).cast<cplx>();
        // a unit eigenvalue of M1 if there is one, else an arbitrary unit number
        cplx w = std::polar(1.0, ang(rng));
        for (const auto& c : eigen_clusters(M1, 1e-6))
            if (std::abs(std::abs(c.center) - 1.0) < 1e-8) w = c.center / std::abs(c.center);
        try {
            const Splitting s1 = splitting_numbers(M1, w);
            const Splitting s2 = splitting_numbers(M2, w);
            const Splitting s12 = splitting_numbers(diamond(M1, M2), w);
            record(r, s12.plus == s1.plus + s2.plus && s12.minus == s1.minus + s2.minus,
                   "additivity (" + std::to_string(s12.plus) + "," + std::to_string(s12.minus) + ") vs (" +
                       std::to_string(s1.plus + s2.plus) + "," + std::to_string(s1.minus + s2.minus) + ")");
            // off the spectrum both jumps vanish
            cplx off = std::polar(1.0, ang(rng));
            bool clear = true;
            for (const auto& c : eigen_clusters(M1, 1e-6)) clear = clear && std::abs(c.center - off) > 1e-2;
            if (clear) {
                const Splitting s0 = splitting_numbers(M1, off);
                record(r, s0.plus == 0 && s0.minus == 0, "nonzero splitting off the spectrum");
            } else {
                ++r.skipped;
            }
        } catch (const ClusteredSpectrumError&) {
            ++r.skipped;
        }
    }
    return r;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::vector<SuiteResult> out;
    out.push_back(block_factorization_sweep(rng, opt.block_cases));
    out.push_back(clm_property_suite(rng, opt.clm_paths));
    out.push_back(splitting_additivity_suite(rng, opt.splitting_pairs));
    return out;
}

}  // namespace msi
