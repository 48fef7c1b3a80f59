#include <doctest.h>

#include <numbers>
#include <random>

#include "msindex/selftest.hpp"
#include "msindex/stability.hpp"

using namespace msi;
using std::numbers::pi;

namespace {

RMat rot(double t) {
    RMat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return R;
}

RMat diag2(double a, double b) {
    RMat D = RMat::Zero(2, 2);
    D(0, 0) = a;
    D(1, 1) = b;
    return D;
}

RMat shear() {
    RMat S = RMat::Identity(2, 2);
    S(1, 0) = 1;
    return S;
}

}  // namespace

TEST_CASE("Poincare maps of the catalog") {
    CHECK((poincare_map(scenario("flat-torus(1)")) - shear()).norm() < 1e-12);
    CHECK((poincare_map(scenario("great-circle")) - RMat::Identity(2, 2)).norm() < 1e-8);
    CHECK((poincare_map(scenario("mobius-flat")) + shear()).norm() < 1e-12);
    RMat hyp(2, 2);
    hyp << 1.25, 0.75, 0.75, 1.25;
    CHECK((poincare_map(scenario("hyperbolic")) - hyp).norm() < 1e-9);
}

TEST_CASE("classification") {
    const StabilityClass id = classify_stability(RMat::Identity(2, 2));
    CHECK(id.linearly_stable);
    REQUIRE(id.eigenvalues.size() == 1);
    CHECK(id.eigenvalues[0].algebraic == 2);
    CHECK(id.eigenvalues[0].geometric == 2);

    const StabilityClass sh = classify_stability(shear());
    CHECK(sh.on_circle);
    CHECK_FALSE(sh.semisimple);
    CHECK_FALSE(sh.linearly_stable);
    REQUIRE(sh.eigenvalues.size() == 1);
    CHECK(sh.eigenvalues[0].geometric == 1);

    const StabilityClass hy = classify_stability(diag2(2, 0.5));
    CHECK_FALSE(hy.on_circle);
    CHECK_FALSE(hy.linearly_stable);
}

TEST_CASE("splitting numbers") {
    SUBCASE("off the spectrum") {
        const Splitting s = splitting_numbers(rot(pi / 3).cast<cplx>(), cplx(0, 1));
        CHECK(s.plus == 0);
        CHECK(s.minus == 0);
        const Splitting h = splitting_numbers(diag2(2, 0.5).cast<cplx>(), 1.0);
        CHECK(h.plus == 0);
        CHECK(h.minus == 0);
    }
    SUBCASE("identity at 1") {
        const Splitting s = splitting_numbers(CMat::Identity(2, 2), 1.0);
        CHECK(s.plus == 1);
        CHECK(s.minus == 1);
    }
    SUBCASE("elliptic eigenvalue: one-sided jump opposite to the Krein sign") {
        const cplx w = std::polar(1.0, pi / 3);
        const KreinType k = krein_type(rot(pi / 3).cast<cplx>(), w);
        const Splitting s = splitting_numbers(rot(pi / 3).cast<cplx>(), w);
        CHECK(s.plus == k.q);
        CHECK(s.minus == k.p);
    }
    SUBCASE("path independence") {
        std::mt19937_64 rng(6);
        for (int c = 0; c < 6; ++c) {
            const RMat S = gen::symmetric(rng, 2, 1.0);
            const RMat X = S * S.transpose() + 0.2 * RMat::Identity(2, 2);
            const RMat JX = standard_J(1) * X;
            const CMat M = expm(JX).cast<cplx>();
            const SymplecticPath flow{[JX](double t) { return CMat(expm(RMat(t * JX)).cast<cplx>()); }, 0.0, 1.0, {}};
            for (const auto& e : eigen_clusters(M, 1e-8)) {
                const cplx w = e.center / std::abs(e.center);
                try {
                    const Splitting a = splitting_numbers(M, w);
                    const Splitting b = splitting_numbers(flow, w);
                    CHECK(a.plus == b.plus);
                    CHECK(a.minus == b.minus);
                    CHECK(a.plus >= 0);
                    CHECK(a.plus <= e.multiplicity);
                    CHECK(a.minus >= 0);
                    CHECK(a.minus <= e.multiplicity);
                } catch (const ClusteredSpectrumError&) {
                }
            }
        }
    }
    SUBCASE("diamond additivity") {
        std::mt19937_64 rng(7);
        const SuiteResult r = splitting_additivity_suite(rng, 10);
        CHECK(r.cases > 10);
        CHECK(r.passed());
    }
}

TEST_CASE("geodesic splitting numbers match the Poincare map") {
    const GeodesicSplitting ft = geodesic_splitting_check(scenario("flat-torus(1)"), cplx(0, 1));
    CHECK(ft.equal);
    CHECK(ft.matrix.plus == 0);
    CHECK(ft.matrix.minus == 0);
    const GeodesicSplitting gc = geodesic_splitting_check(scenario("great-circle"), 1.0);
    CHECK(gc.equal);
    CHECK(gc.matrix.plus == 1);
    CHECK(gc.matrix.minus == 1);
    const GeodesicSplitting mb = geodesic_splitting_check(scenario("mobius-flat"), -1.0);
    CHECK(mb.equal);
    CHECK_THROWS_AS(geodesic_splitting_check(scenario("lorentz-flat(1,1)"), 1.0), NotApplicableError);
}

TEST_CASE("parity criterion") {
    MorseSturmSystem one = scenario("flat-torus(1)");
    CHECK(instability_criterion(one, 0) == Verdict::UnstableByParity);
    CHECK(instability_criterion(scenario("great-circle"), 1) == Verdict::Silent);
    CHECK(classify_stability(poincare_map(scenario("great-circle"))).linearly_stable);
    // silent although the Mobius band flow is a shear
    CHECK(instability_criterion(scenario("mobius-flat"), 0) == Verdict::Silent);
    CHECK_FALSE(classify_stability(poincare_map(scenario("mobius-flat"))).linearly_stable);
    CHECK(std::string(to_string(Verdict::UnstableByParity)) == "unstable_by_parity");
}

TEST_CASE("index hyperbolicity") {
    const IndexHyperbolicResult ft = index_hyperbolic_check(scenario("flat-torus(2)"), 6);
    REQUIRE(ft.is_index_hyperbolic.has_value());
    CHECK(*ft.is_index_hyperbolic);
    REQUIRE(ft.variational_route.has_value());
    CHECK(*ft.variational_route);

    const IndexHyperbolicResult gc = index_hyperbolic_check(scenario("great-circle"), 6);
    REQUIRE(gc.is_index_hyperbolic.has_value());
    CHECK_FALSE(*gc.is_index_hyperbolic);
    REQUIRE(gc.variational_route.has_value());
    CHECK_FALSE(*gc.variational_route);
    REQUIRE_FALSE(gc.iterate_morse_indices.empty());
    CHECK(gc.iterate_morse_indices[0] == 1);
    REQUIRE(gc.angles.size() == 1);
    CHECK(gc.angles[0].rational);
    CHECK(gc.angles[0].splitting.plus == 1);

    const IndexHyperbolicResult hy = index_hyperbolic_check(scenario("hyperbolic"), 6);
    REQUIRE(hy.is_index_hyperbolic.has_value());
    CHECK(*hy.is_index_hyperbolic);
    CHECK(hy.angles.empty());
}

TEST_CASE("strong stability") {
    CHECK(strong_stability_check(rot(pi / 3)));
    CHECK_FALSE(strong_stability_check(RMat::Identity(2, 2)));
    CHECK_FALSE(strong_stability_check(shear()));
    // mixed Krein type at a double elliptic eigenvalue
    CHECK_FALSE(strong_stability_check(diamond(rot(pi / 3), rot(-pi / 3))));
    CHECK(strong_stability_check(diamond(rot(pi / 3), rot(pi / 3))));

    std::mt19937_64 rng(12);
    for (int c = 0; c < 30; ++c) {
        const RMat P = gen::symplectic(rng, 1 + c % 2, c % 3 != 0, 0.8);
        if (strong_stability_check(P)) CHECK(classify_stability(P).linearly_stable);
    }
}

TEST_CASE("zero-index iterates are not strongly stable") {
    const TheoremFResult ft = theorem_F_check(scenario("flat-torus(1)"), 6);
    CHECK(ft.applies);
    CHECK(ft.not_strongly_stable);
    CHECK(ft.consistent);
    const TheoremFResult hy = theorem_F_check(scenario("hyperbolic"), 6);
    CHECK(hy.applies);
    CHECK(hy.not_strongly_stable);
    CHECK(hy.consistent);
    const TheoremFResult gc = theorem_F_check(scenario("great-circle"), 6);
    CHECK_FALSE(gc.applies);
}

TEST_CASE("perturbation of stable maps") {
    CHECK(perturbation_lemma_check(rot(pi / 2), {1e-3, 2e-3}));
    CHECK(perturbation_lemma_check(RMat::Identity(2, 2), {1e-3, 1e-2}));
    CHECK_THROWS_AS(perturbation_lemma_check(diag2(2, 0.5), {1e-3, 1e-2}), DomainError);
    CHECK_THROWS_AS(perturbation_lemma_check(rot(1.0), {1e-3}), DomainError);
    // the determinant it inspects, against the direct oracle value 2 - 2 cos(1e-3)
    const RMat E = expm(RMat(1e-3 * standard_J(1)));
    CHECK((E - RMat::Identity(2, 2)).determinant() == doctest::Approx(9.999999166510065e-07).epsilon(1e-8));
    CHECK((E * rot(pi / 2) - RMat::Identity(2, 2)).determinant() == doctest::Approx(2.0019999996666664).epsilon(1e-12));
}

TEST_CASE("rational angles") {
    const auto q = rational_angle(1.0 / 3.0, 6);
    REQUIRE(q.has_value());
    CHECK(q->first == 1);
    CHECK(q->second == 3);
    CHECK_FALSE(rational_angle(1.0 / 7.0, 6).has_value());
    CHECK_FALSE(rational_angle(std::sqrt(2.0) - 1.0, 12).has_value());
    const auto z = rational_angle(0.0, 6);
    REQUIRE(z.has_value());
    CHECK(z->second == 1);
}

TEST_CASE("reports on the catalog") {
    struct Row {
        const char* name;
        int i_spec;
    };
    // i_spec at 1 from the spectral route
    for (const Row& r : {Row{"great-circle", 1}, Row{"flat-torus(2)", 0}, Row{"mobius-flat", 0},
                         Row{"twisted-rot(pi/2)", 0}, Row{"hyperbolic", 0}, Row{"lorentz-flat(1,1)", 0}}) {
        CAPTURE(r.name);
        const MorseSturmSystem sys = scenario(r.name);
        const StabilityReport rep = analyze_stability(sys, spectral_index_spath(sys, 1.0), 6);
        // linear stability never meets the parity certificate
        CHECK_FALSE((rep.cls.linearly_stable && rep.verdict == Verdict::UnstableByParity));
        if (rep.strongly_stable_candidate) CHECK(rep.cls.linearly_stable);
        CHECK(rep.cls.linearly_stable == (rep.cls.on_circle && rep.cls.semisimple));
        // Krein counts add up to the unit-circle multiplicity
        int unit = 0, pq = 0;
        for (const auto& e : rep.cls.eigenvalues)
            if (e.on_circle) {
                unit += e.algebraic;
                REQUIRE(e.krein.has_value());
                pq += e.krein->p + e.krein->q;
            }
        CHECK(unit == pq);
    }
    const StabilityReport lo = analyze_stability(scenario("lorentz-flat(1,1)"), 0, 6);
    REQUIRE(lo.cls.eigenvalues.size() == 1);
    CHECK(lo.cls.eigenvalues[0].krein->p == 2);
    CHECK(lo.cls.eigenvalues[0].krein->q == 2);
}

TEST_CASE("parity certificate never fires on a linearly stable system") {
    std::mt19937_64 rng(404);
    for (int c = 0; c < 8; ++c) {
        const MorseSturmSystem sys = random_system(rng);
        const StabilityReport rep = analyze_stability(sys, spectral_index_spath(sys, 1.0), 4);
        CAPTURE(c);
        CHECK_FALSE((rep.cls.linearly_stable && rep.verdict == Verdict::UnstableByParity));
    }
}
