#include <doctest.h>

#include <numbers>
#include <random>

#include "msindex/integrator.hpp"

using namespace msi;

TEST_CASE("flat torus flow is the exact shear") {
    const MorseSturmSystem ft = scenario("flat-torus(1)");
    const FundamentalSolution sol = integrate_fundamental(ft, 1.0, 0.0);
    CHECK(sol.defect() < 1e-12);
    CHECK((sol.samples().front() - RMat::Identity(2, 2)).norm() == 0.0);
    for (std::size_t i = 0; i < sol.grid().size(); i += 7) {
        RMat expect = RMat::Identity(2, 2);
        expect(1, 0) = sol.grid()[i];
        CHECK((sol.samples()[i] - expect).norm() < 1e-12);
    }
    // between grid points
    for (double t : {0.0, 0.01234, 0.5 + 1e-4, 0.987}) {
        RMat expect = RMat::Identity(2, 2);
        expect(1, 0) = t;
        CHECK((sol.evaluate(t) - expect).norm() < 1e-10);
    }
    CHECK_THROWS_AS(sol.evaluate(1.5), DomainError);
}

TEST_CASE("great circle flow closes up after one period") {
    const FundamentalSolution sol = integrate_fundamental(scenario("great-circle"), 1.0, 0.0);
    CHECK((sol.endpoint() - RMat::Identity(2, 2)).norm() < 1e-8);
    RMat quarter(2, 2);
    quarter << 0.5403023058681397, -0.8414709848078966, 0.8414709848078965, 0.5403023058681397;
    CHECK((sol.evaluate(1.0) - quarter).norm() < 1e-8);
}

TEST_CASE("agreement with the closed form on constant systems") {
    MorseSturmSystem sys = scenario("lorentz-flat(1,1)");
    sys.Rhat = CurvaturePath::constant(RMat::Identity(2, 2));
    const FundamentalSolution sol = integrate_fundamental(sys, 0.3, 2.0);
    CHECK((sol.endpoint() - closed_form_phi(sys.g, 0.3, 2.0, 1.0)).norm() < 1e-8);
}

TEST_CASE("cocycle and determinant along constant flows") {
    MorseSturmSystem sys = scenario("lorentz-flat(2,1)");
    sys.Rhat = CurvaturePath::constant(RMat::Identity(3, 3));
    sys.T = 2.0;
    const FundamentalSolution sol = integrate_fundamental(sys, 0.5, 1.0);
    const double slack = 10 * std::max(sol.defect(), 1e-12);
    for (auto [t, u] : {std::pair{0.3, 0.4}, std::pair{1.0, 0.9}, std::pair{0.25, 1.5}}) {
        const RMat lhs = sol.evaluate(t + u);
        const RMat rhs = sol.evaluate(t) * sol.evaluate(u);
        CHECK((lhs - rhs).norm() <= slack * std::max(1.0, lhs.norm()));
    }
    for (const RMat& S : sol.samples()) CHECK(std::abs(S.determinant() - 1.0) <= slack * std::max(1.0, S.squaredNorm()));
}

TEST_CASE("defect is certified on random systems") {
    std::mt19937_64 rng(31);
    for (int c = 0; c < 6; ++c) {
        const MorseSturmSystem sys = random_system(rng);
        const FundamentalSolution sol = integrate_fundamental(sys, 1.0, 0.0);
        CHECK(sol.relative_defect() <= sol.tolerance());
        CHECK(sol.grid().front() == 0.0);
        CHECK(sol.grid().back() == doctest::Approx(sys.T));
        for (std::size_t i = 1; i < sol.grid().size(); ++i) CHECK(sol.grid()[i] > sol.grid()[i - 1]);
    }
}

TEST_CASE("budget exhaustion carries the best defect") {
    IntegratorConfig cfg;
    cfg.initial_steps = 2;
    cfg.max_steps = 4;
    cfg.defect_bound = 1e-15;
    try {
        integrate_fundamental(scenario("great-circle"), 1.0, 0.0, cfg);
        FAIL("expected an accuracy error");
    } catch (const AccuracyError& e) {
        CHECK(e.best_defect > 0.0);
    }
}
