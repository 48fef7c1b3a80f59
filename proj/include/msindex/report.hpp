#pragma once
// Run configuration, the JSON report and its CSV views.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "msindex/index_theory.hpp"
#include "msindex/selftest.hpp"
#include "msindex/stability.hpp"

namespace msi {

struct Tolerances {
    double crossing = 1e-7;   // s-crossing indicator threshold
    double kernel = 1e-5;     // kernel rank threshold at s-crossings
    double near_miss = 1e-5;  // scan minima above this are not refined
    double shift = 1e-6;      // curvature shift for degenerate s-crossings
    double eig = 1e-8;        // rank threshold for geometric multiplicities
};

struct RunConfig {
    std::string scenario;  // built-in catalog name
    std::string file;      // or a scenario JSON file
    std::string omegas = "1,-1,i,-i";
    std::vector<std::string> analyses;
    int max_m = 6;
    int m = 2;
    Tolerances tol;
    std::uint64_t seed = 7;
};

inline const std::vector<std::string>& known_analyses() {
    static const std::vector<std::string> v{"indices", "stability", "bott", "theoremA", "theoremF", "selftest"};
    return v;
}

// "1,-1,i,-i,0.5+0.866i,roots:4,exp:0.25" (exp:x is e^{2 pi i x}); entries must have modulus 1.
std::vector<cplx> parse_omegas(const std::string& text);
// comma separated subset of known_analyses(); empty or unknown entries are a ConfigError
std::vector<std::string> parse_analyses(const std::string& text);
void validate_config(const RunConfig& cfg);

MorseSturmSystem load_system(const RunConfig& cfg);

struct RunOutcome {
    nlohmann::json report;
    std::vector<std::string> violations;  // identities that failed
    int exit_code() const { return violations.empty() ? 0 : 3; }
};
// Analysis errors propagate as exceptions.
RunOutcome run_analyses(const RunConfig& cfg);

nlohmann::json to_json(cplx z);
nlohmann::json to_json(const IndexReport& r);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const BottResult& r);
nlohmann::json to_json(const SuiteResult& r);

// Sorted keys, two-space indent, doubles with 17 significant digits, trailing LF.
std::string dump_report(const nlohmann::json& j);

struct CsvTables {
    std::string eigenvalues, indices, crossings;  // empty when the report has no such data
};
CsvTables csv_tables(const nlohmann::json& report);
// Writes the non-empty tables into dir; returns the paths written.
std::vector<std::string> write_csv(const nlohmann::json& report, const std::string& dir);

}  // namespace msi
