#include <doctest.h>

#include <numbers>
#include <random>

#include "msindex/index_theory.hpp"
#include "msindex/selftest.hpp"

using namespace msi;
using std::numbers::pi;

namespace {

const cplx I1{0, 1};

RMat rot(double t) {
    RMat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return R;
}

}  // namespace

TEST_CASE("nullity of the twist") {
    CHECK(nullity(RMat(RMat::Identity(3, 3)), 1.0) == 3);
    CHECK(nullity(RMat(RMat::Identity(3, 3)), -1.0) == 0);
    CHECK(nullity(rot(2 * pi / 3), std::polar(1.0, 2 * pi / 3)) == 1);
    CHECK(nullity(rot(2 * pi / 3), std::polar(1.0, -2 * pi / 3)) == 1);
    CHECK(nullity(rot(2 * pi / 3), 1.0) == 0);
}

TEST_CASE("find_s0") {
    const MorseSturmSystem ft = scenario("flat-torus(1)");
    const double s0 = find_s0(ft, -1.0);
    CHECK(std::isfinite(s0));
    CHECK(s0 > 0);
    // closed form at c = 1, R = 0: det(-Psi_{1,s}(1) - I) = 2 + 2 cosh(sqrt(s))
    const RMat Psi = closed_form_phi({1, 0}, 0.0, s0, 1.0);
    CHECK(std::abs((-Psi - RMat::Identity(2, 2)).determinant()) > 1e-8);
    CHECK(find_s0(scenario("great-circle"), 1.0) >= 1.0);
}

TEST_CASE("spectral index anchors") {
    for (int n : {1, 2}) CHECK(spectral_index_spath(scenario("flat-torus(" + std::to_string(n) + ")"), 1.0) == 0);
    const MorseSturmSystem gc = scenario("great-circle");
    CHECK(spectral_index_spath(gc, 1.0) == 1);
    CHECK(spectral_index_spath(gc, -1.0) == 2);
    const IndexReport lo = theorem_A_check(scenario("lorentz-flat(1,1)"), -1.0);
    REQUIRE(lo.i_spec_spath.has_value());
    CHECK(*lo.i_spec_spath == lo.i_spec_thmA);
}

TEST_CASE("geometric index anchors") {
    CHECK(geometric_index(scenario("flat-torus(2)"), 1.0) == 2);
    CHECK(geometric_index(scenario("great-circle"), 1.0) == 2);
    const MorseSturmSystem tw = scenario("twisted-rot(pi/2)");
    CHECK(nullity(tw.A, 1.0) == 0);
    const IndexReport r = theorem_A_check(tw, 1.0);
    CHECK(r.i_geo == r.i_spec_thmA);
    CHECK(r.routes_agree);
}

TEST_CASE("spectral flow formula on the catalog") {
    const MorseSturmSystem ft2 = scenario("flat-torus(2)");
    const IndexReport r = theorem_A_check(ft2, 1.0);
    CHECK(r.i_geo == 2);
    CHECK(r.nullity == 2);
    CHECK(r.i_spec_thmA == 0);
    CHECK(r.routes_agree);
    const IndexReport mb = theorem_A_check(scenario("mobius-flat"), 1.0);
    CHECK(mb.nullity == 0);
    CHECK(mb.i_geo == mb.i_spec_thmA);
    CHECK(mb.routes_agree);
    for (const char* name : {"great-circle", "lorentz-flat(1,1)", "twisted-rot(2pi/3)", "hyperbolic"})
        for (cplx w : {cplx(1), cplx(-1), I1, std::polar(1.0, 2 * pi / 3)}) {
            CAPTURE(name);
            CAPTURE(w);
            const IndexReport x = theorem_A_check(scenario(name), w);
            CHECK(x.routes_agree);
            CHECK(x.i_spec_thmA == x.i_geo - x.nullity);
        }
}

TEST_CASE("crossing-free tail beyond s0") {
    for (const char* name : {"great-circle", "lorentz-flat(1,1)", "mobius-flat"}) {
        const MorseSturmSystem sys = scenario(name);
        for (cplx w : {cplx(1), cplx(-1)}) {
            const SpathResult r = spectral_index_spath_detailed(sys, w);
            const TwistedBvp bvp(sys, w);
            CHECK(scan_crossings(bvp, r.s0, 2 * r.s0, 64).empty());
        }
    }
}

TEST_CASE("unperturbed flow index equals the eigenspace dimension") {
    const MorseSturmSystem ft = scenario("flat-torus(2)");
    const Prop55Result a = prop55_check(ft, 1.0);
    CHECK(a.lhs == 2);
    CHECK(a.holds);
    const Prop55Result b = prop55_check(ft, -1.0);
    CHECK(b.lhs == 0);
    CHECK(b.holds);
    const Prop55Result c = prop55_check(scenario("twisted-rot(2pi/3)"), std::polar(1.0, 2 * pi / 3));
    CHECK(c.lhs == 1);
    CHECK(c.holds);
}

TEST_CASE("block factorization") {
    CHECK(block_fact_check(CMat::Zero(1, 1)));
    CHECK(block_fact_check(CMat::Identity(1, 1)));
    CHECK_THROWS_AS(block_fact_check(CMat::Zero(2, 3)), DimensionError);
    std::mt19937_64 rng(99);
    const SuiteResult r = block_factorization_sweep(rng, 100);
    CHECK(r.cases == 100);
    CHECK(r.passed());
}

TEST_CASE("roots of unity") {
    const auto r = roots_of_unity(6);
    REQUIRE(r.size() == 6);
    CHECK(r[0] == cplx(1.0));
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(std::abs(std::pow(r[k], 6) - 1.0) < 1e-13);
        CHECK(std::abs(r[k] - std::polar(1.0, 2 * pi * double(k) / 6)) < 1e-15);
    }
    CHECK_THROWS_AS(roots_of_unity(0), DomainError);
}

TEST_CASE("Bott iteration formula") {
    const BottResult one = bott_check(scenario("mobius-flat"), 1);
    CHECK(one.lhs == one.rhs);
    const BottResult gc = bott_check(scenario("great-circle"), 2);
    CHECK(gc.lhs == 3);
    CHECK(gc.rhs == 3);
    CHECK(gc.equal);
    CHECK(gc.nullity_equal);
    REQUIRE(gc.per_omega.size() == 2);
    CHECK(gc.per_omega[0].second == 1);
    CHECK(gc.per_omega[1].second == 2);
    const BottResult tw = bott_check(scenario("twisted-rot(pi/2)"), 4);
    CHECK(tw.equal);
    CHECK(tw.nullity_lhs == 2);
    CHECK(tw.nullity_equal);
    CHECK_THROWS_AS(bott_check(scenario("great-circle"), 13), DomainError);
}

TEST_CASE("conjugate frequencies give equal spectral indices") {
    std::mt19937_64 rng(2024);
    for (int c = 0; c < 4; ++c) {
        const MorseSturmSystem sys = random_system(rng);
        CAPTURE(c);
        CHECK(spectral_index_spath(sys, I1) == spectral_index_spath(sys, -I1));
        const cplx w = std::polar(1.0, 2 * pi / 3);
        CHECK(spectral_index_spath(sys, w) == spectral_index_spath(sys, std::conj(w)));
    }
}
