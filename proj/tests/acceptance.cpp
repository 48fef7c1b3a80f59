// One PASS/FAIL line per acceptance criterion, with wall time. Exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "msindex/report.hpp"

using namespace msi;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;
};

// first few failures, then a count
struct Log {
    Outcome out;
    int failures = 0;
    void fail(const std::string& what) {
        out.ok = false;
        if (++failures <= 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
    }
    void check(bool cond, const std::string& what) {
        if (!cond) fail(what);
    }
    Outcome done(const std::string& summary) {
        if (failures > 3) out.detail += "; " + std::to_string(failures - 3) + " more";
        if (out.ok) out.detail = summary;
        return out;
    }
};

std::string str(cplx w) {
    std::ostringstream os;
    os << w;
    return os.str();
}

const std::vector<std::string> kCatalog{"flat-torus(2)", "great-circle", "mobius-flat", "lorentz-flat(1,1)",
                                        "twisted-rot(pi/2)"};
const std::vector<std::string> kRiemannian{"flat-torus(1)", "flat-torus(2)", "flat-torus(3)", "great-circle",
                                           "mobius-flat", "twisted-rot(pi/2)", "twisted-rot(2pi/3)", "hyperbolic"};
const std::vector<cplx> kQuarter{1.0, -1.0, cplx(0, 1), cplx(0, -1)};

std::vector<MorseSturmSystem> random_systems(std::uint64_t seed, int count, bool riemannian = false) {
    std::mt19937_64 rng(seed);
    RandomSystemOptions o;
    o.riemannian = riemannian;
    std::vector<MorseSturmSystem> out;
    for (int i = 0; i < count; ++i) out.push_back(random_system(rng, o));
    return out;
}

Outcome closed_form() {
    Log log;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> cd(-2.0, 2.0), sd(0.0, 4.0), td(0.5, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int n = 1 + k % 3;
        const int q = k % (n + 1);
        MorseSturmSystem sys = scenario("flat-torus(" + std::to_string(n) + ")");
        sys.g = {n - q, q};
        sys.Rhat = CurvaturePath::constant(RMat::Identity(n, n));
        sys.T = td(rng);
        const double c = cd(rng), s = sd(rng);
        const double err = (integrate_fundamental(sys, c, s).endpoint() - closed_form_phi(sys.g, c, s, sys.T)).norm();
        worst = std::max(worst, err);
        log.check(err < 1e-8, "c=" + std::to_string(c) + " s=" + std::to_string(s) + " err=" + std::to_string(err));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "20 pairs, max error %.2e", worst);
    return log.done(buf);
}

Outcome theorem_a() {
    Log log;
    const std::vector<cplx> omegas{1.0, -1.0, cplx(0, 1), std::polar(1.0, 2 * pi / 3)};
    std::vector<MorseSturmSystem> systems;
    for (const auto& s : kCatalog) systems.push_back(scenario(s));
    for (auto& s : random_systems(2024, 50)) systems.push_back(std::move(s));
    int count = 0;
    for (std::size_t k = 0; k < systems.size(); ++k)
        for (cplx w : omegas) {
            ++count;
            const std::string tag = (k < kCatalog.size() ? kCatalog[k] : "random " + std::to_string(k)) + " w=" + str(w);
            try {
                const IndexReport r = theorem_A_check(systems[k], w);
                log.check(r.routes_agree && r.i_spec_spath == r.i_geo - r.nullity,
                          tag + ": " + std::to_string(r.i_spec_spath.value_or(-999)) + " vs " +
                              std::to_string(r.i_geo) + "-" + std::to_string(r.nullity));
            } catch (const std::exception& e) {
                log.fail(tag + ": " + e.what());
            }
        }
    return log.done(std::to_string(count) + " (system, omega) pairs agree");
}

Outcome fem_anchors() {
    Log log;
    auto stable = [&](const MorseSturmSystem& sys, cplx w, int index, int null, const std::string& tag) {
        const FemCount a = fem_count(sys, w, 256), b = fem_count(sys, w, 512);
        log.check(a.index == b.index && a.nullity == b.nullity, tag + " changes under doubling");
        log.check(b.index == index, tag + " index " + std::to_string(b.index));
        if (null >= 0) log.check(b.nullity == null, tag + " nullity " + std::to_string(b.nullity));
    };
    for (int n : {1, 2, 3}) {
        const std::string name = "flat-torus(" + std::to_string(n) + ")";
        stable(scenario(name), 1.0, 0, n, name);
    }
    const MorseSturmSystem gc = scenario("great-circle");
    stable(gc, 1.0, 1, 2, "great-circle w=1");
    stable(gc, -1.0, 2, 0, "great-circle w=-1");
    for (int m = 2; m <= 4; ++m) stable(iterate(gc, m), 1.0, 2 * m - 1, 2, "great-circle^" + std::to_string(m));
    return log.done("flat tori, great circle and iterates 2..4 stable at N=256,512");
}

Outcome corollary_b() {
    Log log;
    int count = 0;
    for (const auto& name : kRiemannian)
        for (cplx w : kQuarter) {
            const MorseSturmSystem sys = scenario(name);
            const int fem = omega_morse_index(sys, w).index;
            const int spec = spectral_index_spath(sys, w);
            ++count;
            log.check(fem == spec, name + " w=" + str(w) + ": " + std::to_string(fem) + " vs " + std::to_string(spec));
        }
    return log.done(std::to_string(count) + " Riemannian (scenario, omega) pairs agree");
}

Outcome bott() {
    Log log;
    int count = 0;
    std::vector<std::string> names = kCatalog;
    names.push_back("hyperbolic");
    for (const auto& name : names)
        for (int m = 1; m <= 6; ++m) {
            const BottResult b = bott_check(scenario(name), m);
            ++count;
            log.check(b.equal && b.nullity_equal, name + " m=" + std::to_string(m) + ": " + std::to_string(b.lhs) +
                                                      " vs " + std::to_string(b.rhs));
        }
    const auto rs = random_systems(77, 20);
    for (std::size_t k = 0; k < rs.size(); ++k) {
        const int m = 2 + int(k % 3);
        try {
            const BottResult b = bott_check(rs[k], m);
            ++count;
            log.check(b.equal && b.nullity_equal, "random " + std::to_string(k) + " m=" + std::to_string(m) + ": " +
                                                      std::to_string(b.lhs) + " vs " + std::to_string(b.rhs));
        } catch (const std::exception& e) {
            log.fail("random " + std::to_string(k) + ": " + e.what());
        }
    }
    return log.done(std::to_string(count) + " iteration identities hold");
}

Outcome prop55() {
    Log log;
    std::vector<std::string> names = kCatalog;
    names.push_back("hyperbolic");
    names.push_back("twisted-rot(2pi/3)");
    for (const auto& name : names)
        for (cplx w : kQuarter) {
            const Prop55Result r = prop55_check(scenario(name), w);
            log.check(r.holds, name + " w=" + str(w) + ": " + std::to_string(r.lhs) + " vs " + std::to_string(r.nullity));
        }
    return log.done(std::to_string(names.size() * 4) + " cases");
}

Outcome lemma54() {
    std::mt19937_64 rng(54);
    const SuiteResult r = block_factorization_sweep(rng, 200);
    Log log;
    for (const auto& d : r.details) log.fail(d);
    return log.done(std::to_string(r.cases) + " random blocks");
}

Outcome theorem_d() {
    Log log;
    std::vector<MorseSturmSystem> systems;
    for (const auto& s : kCatalog) systems.push_back(scenario(s));
    for (const char* s : {"hyperbolic", "twisted-rot(2pi/3)", "flat-torus(1)", "lorentz-flat(2,1)"})
        systems.push_back(scenario(s));
    for (auto& s : random_systems(808, 15)) systems.push_back(std::move(s));
    int stable = 0;
    for (const auto& sys : systems) {
        const StabilityReport rep = analyze_stability(sys, spectral_index_spath(sys, 1.0), 4);
        stable += rep.cls.linearly_stable;
        log.check(!(rep.cls.linearly_stable && rep.verdict == Verdict::UnstableByParity), sys.label);
    }
    // Poincare's case: one degree of freedom, index zero, oriented
    const MorseSturmSystem ft = scenario("flat-torus(1)");
    log.check(spectral_index_spath(ft, 1.0) == 0, "flat-torus(1) index");
    log.check(instability_criterion(ft, 0) == Verdict::UnstableByParity, "anchor did not fire");
    return log.done(std::to_string(systems.size()) + " systems (" + std::to_string(stable) +
                    " linearly stable), anchor fires");
}

Outcome clm_axioms() {
    std::mt19937_64 rng(9);
    const SuiteResult r = clm_property_suite(rng, 100);
    Log log;
    for (const auto& d : r.details) log.fail(d);
    return log.done(std::to_string(r.cases) + " property instances on 100 paths");
}

Outcome splitting() {
    Log log;
    std::mt19937_64 rng(10);
    const SuiteResult add = splitting_additivity_suite(rng, 20);
    for (const auto& d : add.details) log.fail(d);
    log.check(add.cases >= 20, "too few additivity cases");
    // two connecting paths: the polar path and the flow exp(t J X)
    int paths = 0;
    for (int c = 0; c < 10; ++c) {
        const RMat S = gen::symmetric(rng, 2 + 2 * (c % 2), 1.0);
        const RMat X = S * S.transpose() + 0.2 * RMat::Identity(S.rows(), S.rows());
        const RMat JX = standard_J(int(S.rows() / 2)) * X;
        const CMat M = expm(JX).cast<cplx>();
        const SymplecticPath flow{[JX](double t) { return CMat(expm(RMat(t * JX)).cast<cplx>()); }, 0.0, 1.0, {}};
        for (const auto& e : eigen_clusters(M, 1e-8)) {
            const cplx w = e.center / std::abs(e.center);
            try {
                const Splitting a = splitting_numbers(M, w), b = splitting_numbers(flow, w);
                ++paths;
                log.check(a.plus == b.plus && a.minus == b.minus, "path dependence at " + str(w));
            } catch (const ClusteredSpectrumError&) {
            }
        }
    }
    log.check(paths >= 10, "too few path-independence cases");
    const GeodesicSplitting gc = geodesic_splitting_check(scenario("great-circle"), 1.0);
    log.check(gc.equal, "great-circle geodesic vs matrix");
    const GeodesicSplitting mb = geodesic_splitting_check(scenario("mobius-flat"), -1.0);
    log.check(mb.equal, "mobius-flat geodesic vs matrix");
    return log.done(std::to_string(add.cases) + " additivity/off-spectrum cases, " + std::to_string(paths) +
                    " path pairs, geodesic routes agree");
}

Outcome theorem_f() {
    Log log;
    for (const char* name : {"flat-torus(1)", "flat-torus(2)", "hyperbolic"}) {
        const TheoremFResult r = theorem_F_check(scenario(name), 6);
        bool zero = r.iterate_morse_indices.size() == 6;
        for (int v : r.iterate_morse_indices) zero = zero && v == 0;
        log.check(zero, std::string(name) + ": iterate Morse indices not all zero");
        log.check(r.applies && r.not_strongly_stable, std::string(name) + ": strongly stable");
        log.check(!strong_stability_check(poincare_map(scenario(name))), std::string(name) + ": direct check");
    }
    return log.done("flat tori and the hyperbolic system are not strongly stable");
}

Outcome determinism() {
    Log log;
    RunConfig cfg;
    cfg.scenario = "great-circle";
    cfg.analyses = {"indices", "stability", "bott", "theoremA", "theoremF", "selftest"};
    cfg.seed = 7;
    const std::string a = dump_report(run_analyses(cfg).report);
    const std::string b = dump_report(run_analyses(cfg).report);
    log.check(a == b, "reports differ");
    return log.done("byte-identical reports (" + std::to_string(a.size()) + " bytes)");
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds, 0 = none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "closed-form agreement", 5, closed_form},
        {2, "spectral flow formula as integer identity", 120, theorem_a},
        {3, "finite element anchors", 30, fem_anchors},
        {4, "spectral index equals Morse index (G = I)", 0, corollary_b},
        {5, "Bott iteration formula", 0, bott},
        {6, "unperturbed flow index equals dim ker(A - omega)", 0, prop55},
        {7, "block factorization nullity and balance", 0, lemma54},
        {8, "parity certificate contrapositive and anchor", 0, theorem_d},
        {9, "Maslov index axioms", 60, clm_axioms},
        {10, "splitting numbers", 0, splitting},
        {11, "zero-index iterates are not strongly stable", 0, theorem_f},
        {12, "determinism", 0, determinism},
    };
    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        ++ran;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.budget > 0 && dt > c.budget) {
            o.ok = false;
            o.detail += " (over the " + std::to_string(int(c.budget)) + " s budget)";
        }
        failed += !o.ok;
        std::printf("%s criterion %2d: %s [%.1f s] %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, dt, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
