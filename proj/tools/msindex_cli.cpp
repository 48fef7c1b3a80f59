// msindex: indices, identities and stability of twisted Morse-Sturm systems from the command line.
//
// exit codes: 0 success, 1 bad configuration, 2 analysis error, 3 an identity failed

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "msindex/report.hpp"

namespace {

struct Args {
    msi::RunConfig cfg;
    std::string analyses;
    std::string out;
    std::string report;  // export-csv from an existing report
};

void add_common(CLI::App* sub, Args& a, bool with_analyses) {
    sub->add_option("--scenario", a.cfg.scenario, "built-in scenario, e.g. flat-torus(2), great-circle");
    sub->add_option("--file", a.cfg.file, "scenario JSON file");
    sub->add_option("--omegas", a.cfg.omegas, "unit complex numbers: 1,-1,i,a+bi,exp:x,roots:m");
    sub->add_option("--max-m", a.cfg.max_m, "largest iterate examined (<= 12)");
    sub->add_option("--m", a.cfg.m, "iterate for the Bott formula (<= 12)");
    sub->add_option("--seed", a.cfg.seed, "seed for randomized property suites");
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--tol-crossing", a.cfg.tol.crossing, "s-crossing indicator threshold");
    sub->add_option("--tol-kernel", a.cfg.tol.kernel, "kernel rank threshold at s-crossings");
    sub->add_option("--tol-near-miss", a.cfg.tol.near_miss, "scan minima above this are not refined");
    sub->add_option("--tol-shift", a.cfg.tol.shift, "curvature shift for degenerate s-crossings");
    sub->add_option("--tol-eig", a.cfg.tol.eig, "rank threshold for eigenvalue multiplicities");
    if (with_analyses)
        sub->add_option("--analyses", a.analyses, "comma list of indices,stability,bott,theoremA,theoremF,selftest");
}

int emit(const msi::RunOutcome& r, const std::string& out) {
    const std::string text = msi::dump_report(r.report);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::filesystem::create_directories(out);
        const auto path = std::filesystem::path(out) / "report.json";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << text;
        std::cerr << "wrote " << path.string() << "\n";
    }
    for (const auto& v : r.violations) std::cerr << "VIOLATION " << v << "\n";
    return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maslov-type, geometric and spectral indices of twisted Morse-Sturm systems"};
    app.require_subcommand(1);
    Args a;
    a.analyses = "indices,stability";

    auto* analyze = app.add_subcommand("analyze", "run selected analyses and write a JSON report");
    add_common(analyze, a, true);
    auto* indices = app.add_subcommand("indices", "geometric and spectral indices over the omega list");
    add_common(indices, a, false);
    auto* stability = app.add_subcommand("stability", "Floquet spectrum, Krein types, splitting numbers");
    add_common(stability, a, false);
    auto* bott = app.add_subcommand("bott", "check the iteration formula for one iterate");
    add_common(bott, a, false);
    auto* selftest = app.add_subcommand("selftest", "seeded property suites");
    add_common(selftest, a, false);
    auto* csv = app.add_subcommand("export-csv", "write eigenvalues.csv, indices.csv, crossings.csv");
    add_common(csv, a, true);
    csv->add_option("--report", a.report, "existing report JSON to convert");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (indices->parsed()) a.analyses = "indices";
        if (stability->parsed()) a.analyses = "stability";
        if (bott->parsed()) a.analyses = "bott";
        if (selftest->parsed()) a.analyses = "selftest";

        if (csv->parsed()) {
            nlohmann::json rep;
            int code = 0;
            if (!a.report.empty()) {
                std::ifstream in(a.report);
                if (!in) throw msi::ConfigError("cannot open report '" + a.report + "'");
                rep = nlohmann::json::parse(in);
            } else {
                a.cfg.analyses = msi::parse_analyses(a.analyses);
                const msi::RunOutcome r = msi::run_analyses(a.cfg);
                rep = r.report;
                code = r.exit_code();
            }
            const auto files = msi::write_csv(rep, a.out.empty() ? "." : a.out);
            if (files.empty()) throw msi::ConfigError("report holds no tabular data");
            for (const auto& f : files) std::cerr << "wrote " << f << "\n";
            return code;
        }

        a.cfg.analyses = msi::parse_analyses(a.analyses);
        return emit(msi::run_analyses(a.cfg), a.out);
    } catch (const msi::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const msi::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    }
}
