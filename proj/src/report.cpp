#include "msindex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "msindex/fem.hpp"

namespace msi {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
}

double parse_real(const std::string& s, const std::string& ctx) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot read '" + s + "' in " + ctx);
}

cplx parse_one_omega(const std::string& tok) {
    if (tok == "i" || tok == "+i") return {0.0, 1.0};
    if (tok == "-i") return {0.0, -1.0};
    if (tok.rfind("exp:", 0) == 0) {
        const double x = parse_real(tok.substr(4), "omega '" + tok + "'");
        cplx z = std::polar(1.0, 2.0 * std::numbers::pi * x);
        if (std::abs(z.real()) < 1e-15) z.real(0.0);
        if (std::abs(z.imag()) < 1e-15) z.imag(0.0);
        return z;
    }
    // a, bi, a+bi, a-bi, a+i, a-i
    if (tok.empty()) throw ConfigError("empty omega");
    if (tok.back() != 'i') return {parse_real(tok, "omega"), 0.0};
    const std::string body = tok.substr(0, tok.size() - 1);
    std::size_t cut = std::string::npos;  // sign that starts the imaginary part
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            cut = k;
            break;
        }
    const std::string re_txt = cut == std::string::npos ? "" : body.substr(0, cut);
    std::string im_txt = cut == std::string::npos ? body : body.substr(cut);
    if (im_txt.empty() || im_txt == "+") im_txt = "1";
    if (im_txt == "-") im_txt = "-1";
    const std::string ctx = "omega '" + tok + "'";
    return {re_txt.empty() ? 0.0 : parse_real(re_txt, ctx), parse_real(im_txt, ctx)};
}

json sig_json(const Signature& s) { return json{{"plus", s.plus}, {"zero", s.zero}, {"minus", s.minus}}; }

json matrix_json(const RMat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

void dump_value(const json& j, std::string& out, int indent) {
    const std::string pad(indent, ' '), pad2(indent + 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann::json keeps keys sorted
            if (!first) out += ",\n";
            first = false;
            out += pad2 + json(it.key()).dump() + ": ";
            dump_value(it.value(), out, indent + 2);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad2;
            dump_value(j[i], out, indent + 2);
        }
        out += "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        return;
    }
    default:
        out += j.dump();
    }
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_riemannian(const MorseSturmSystem& sys) { return sys.g.riemannian(); }

SpathOptions spath_options(const Tolerances& t) {
    SpathOptions o;
    o.crossing_tol = t.crossing;
    o.kernel_tol = t.kernel;
    o.near_miss = t.near_miss;
    o.shift = t.shift;
    return o;
}

bool wants(const RunConfig& cfg, const char* a) {
    return std::find(cfg.analyses.begin(), cfg.analyses.end(), a) != cfg.analyses.end();
}

bool needs_system(const RunConfig& cfg) {
    return std::any_of(cfg.analyses.begin(), cfg.analyses.end(), [](const std::string& a) { return a != "selftest"; });
}

}  // namespace

std::vector<cplx> parse_omegas(const std::string& text) {
    std::vector<cplx> out;
    for (const std::string& tok : split_commas(text)) {
        if (tok.empty()) throw ConfigError("empty entry in omega list");
        if (tok.rfind("roots:", 0) == 0) {
            const double m = parse_real(tok.substr(6), "'" + tok + "'");
            if (m < 1 || m > 64 || m != std::floor(m)) throw ConfigError("roots:m needs an integer 1 <= m <= 64");
            for (cplx z : roots_of_unity(int(m))) out.push_back(z);
            continue;
        }
        const cplx z = parse_one_omega(tok);
        if (std::abs(std::abs(z) - 1.0) > 1e-6) throw ConfigError("omega '" + tok + "' is not on the unit circle");
        out.push_back(z / std::abs(z));
    }
    if (out.empty()) throw ConfigError("no omega given");
    return out;
}

std::vector<std::string> parse_analyses(const std::string& text) {
    std::vector<std::string> out;
    if (trim(text).empty()) throw ConfigError("at least one analysis is required");
    for (const std::string& tok : split_commas(text)) {
        if (std::find(known_analyses().begin(), known_analyses().end(), tok) == known_analyses().end())
            throw ConfigError("unknown analysis '" + tok + "'");
        if (std::find(out.begin(), out.end(), tok) == out.end()) out.push_back(tok);
    }
    return out;
}

void validate_config(const RunConfig& cfg) {
    if (cfg.analyses.empty()) throw ConfigError("at least one analysis is required");
    if (cfg.max_m < 1 || cfg.max_m > 12) throw ConfigError("max_m must lie in 1..12");
    if (cfg.m < 1 || cfg.m > 12) throw ConfigError("m must lie in 1..12");
    if (!cfg.scenario.empty() && !cfg.file.empty()) throw ConfigError("give either a scenario or a file, not both");
    if (needs_system(cfg) && cfg.scenario.empty() && cfg.file.empty()) throw ConfigError("no scenario given");
    for (double t : {cfg.tol.crossing, cfg.tol.kernel, cfg.tol.near_miss, cfg.tol.shift, cfg.tol.eig})
        if (!(t > 0.0) || t >= 1.0) throw ConfigError("tolerances must lie in (0, 1)");
    parse_omegas(cfg.omegas);
}

MorseSturmSystem load_system(const RunConfig& cfg) {
    MorseSturmSystem sys;
    if (!cfg.file.empty()) {
        std::ifstream in(cfg.file);
        if (!in) throw ConfigError("cannot open scenario file '" + cfg.file + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("scenario file is not JSON: ") + e.what());
        }
        sys = system_from_json(j);
    } else {
        sys = scenario(cfg.scenario);
    }
    require_valid(sys);
    return sys;
}

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const IndexReport& r) {
    json j;
    j["omega"] = to_json(r.omega);
    j["i_geo"] = r.i_geo;
    j["nullity"] = r.nullity;
    j["i_spec"] = r.i_spec_thmA;
    j["i_spec_spath"] = r.i_spec_spath ? json(*r.i_spec_spath) : json(nullptr);
    j["routes_agree"] = r.routes_agree;
    j["s0"] = r.s0;
    j["i_geo_winding"] = r.i_geo_winding;
    j["geo_epsilon"] = r.geo_epsilon;
    j["spath_shift"] = r.spath_shift;
    j["spath_intervals"] = r.spath_intervals;
    json tc = json::array();
    for (const auto& c : r.t_crossings)
        tc.push_back({{"t", c.t}, {"kernel_dim", c.kernel_dim}, {"signature", sig_json(c.signature)}, {"regular", c.regular}});
    json sc = json::array();
    for (const auto& c : r.s_crossings)
        sc.push_back({{"s", c.s}, {"kernel_dim", c.kernel_dim}, {"signature", sig_json(c.signature)}, {"regular", c.regular}});
    j["t_crossings"] = tc;
    j["s_crossings"] = sc;
    return j;
}

json to_json(const StabilityReport& r) {
    json j;
    j["P"] = matrix_json(r.P);
    json ev = json::array(), krein = json::array();
    for (const auto& e : r.cls.eigenvalues) {
        json x{{"value", to_json(e.value)},
               {"abs", std::abs(e.value)},
               {"algebraic", e.algebraic},
               {"geometric", e.geometric},
               {"on_circle", e.on_circle},
               {"marginal", e.marginal}};
        x["krein"] = e.krein ? json{{"p", e.krein->p}, {"q", e.krein->q}} : json(nullptr);
        if (e.krein) krein.push_back({{"lambda", to_json(e.krein->lambda)}, {"p", e.krein->p}, {"q", e.krein->q}});
        ev.push_back(x);
    }
    j["eigenvalues"] = ev;
    j["krein"] = krein;
    j["on_circle"] = r.cls.on_circle;
    j["semisimple"] = r.cls.semisimple;
    j["linearly_stable"] = r.cls.linearly_stable;
    j["marginal"] = r.cls.marginal;
    json sp = json::array();
    for (const auto& [w, s] : r.splitting)
        sp.push_back({{"omega", to_json(w)}, {"plus", s.plus}, {"minus", s.minus}, {"theta", s.theta}});
    j["splitting"] = sp;
    j["index_hyperbolic"] = r.index_hyperbolic ? json(*r.index_hyperbolic) : json("unknown");
    j["index_hyperbolic_note"] = r.index_hyperbolic_note;
    j["max_m"] = r.max_m;
    j["strongly_stable_candidate"] = r.strongly_stable_candidate;
    j["criterion_verdict"] = to_string(r.verdict);
    j["orientation"] = r.orientation;
    j["d1_sign"] = r.d1_sign;
    // det(P - I) > 0 is the "plus" set of the section-seven convention
    j["det_P_minus_I_sign"] = r.det_sign;
    return j;
}

json to_json(const BottResult& r) {
    json per = json::array();
    for (const auto& [w, v] : r.per_omega) per.push_back({{"omega", to_json(w)}, {"i_spec", v}});
    return json{{"m", r.m},         {"lhs", r.lhs},
                {"rhs", r.rhs},     {"equal", r.equal},
                {"per_omega", per}, {"nullity_lhs", r.nullity_lhs},
                {"nullity_rhs", r.nullity_rhs}, {"nullity_equal", r.nullity_equal}};
}

json to_json(const SuiteResult& r) {
    return json{{"name", r.name},         {"cases", r.cases},       {"failures", r.failures},
                {"skipped", r.skipped},   {"details", r.details},   {"passed", r.passed()}};
}

RunOutcome run_analyses(const RunConfig& cfg) {
    validate_config(cfg);
    RunOutcome out;
    json& rep = out.report;
    const std::vector<cplx> omegas = parse_omegas(cfg.omegas);
    const SpathOptions sopt = spath_options(cfg.tol);

    rep["config"] = {{"scenario", cfg.scenario},
                     {"file", cfg.file},
                     {"omegas", cfg.omegas},
                     {"analyses", cfg.analyses},
                     {"max_m", cfg.max_m},
                     {"m", cfg.m},
                     {"seed", cfg.seed},
                     {"tolerances",
                      {{"crossing", cfg.tol.crossing},
                       {"kernel", cfg.tol.kernel},
                       {"near_miss", cfg.tol.near_miss},
                       {"shift", cfg.tol.shift},
                       {"eig", cfg.tol.eig}}}};
    json checks = json::object(), diag = json::object();

    if (needs_system(cfg)) {
        const MorseSturmSystem sys = load_system(cfg);
        json echo = system_to_json(sys);
        echo["label"] = sys.label;
        rep["scenario"] = echo;
        rep["orientation"] = sys.orientation();

        std::vector<IndexReport> idx;
        std::optional<int> i_spec_one;
        if (wants(cfg, "indices") || wants(cfg, "theoremA")) {
            json arr = json::array();
            bool agree = true;
            for (cplx w : omegas) {
                idx.push_back(theorem_A_check(sys, w, sopt));
                arr.push_back(to_json(idx.back()));
                agree = agree && idx.back().routes_agree;
                if (std::abs(w - cplx(1.0)) < 1e-12) i_spec_one = idx.back().i_spec_thmA;
            }
            rep["indices"] = arr;
            checks["theoremA"] = agree;
            if (!agree) out.violations.push_back("theoremA: spectral flow and geometric index disagree");

            if (is_riemannian(sys)) {
                json fem = json::array();
                bool corB = true;
                for (std::size_t k = 0; k < omegas.size(); ++k) {
                    const MorseIndexResult mi = omega_morse_index(sys, omegas[k]);
                    fem.push_back({{"omega", to_json(omegas[k])},
                                   {"index", mi.index},
                                   {"nullity", mi.nullity},
                                   {"N_used", mi.N_used}});
                    corB = corB && mi.index == idx[k].i_spec_thmA;
                }
                diag["fem"] = fem;
                checks["morse_index"] = corB;
                if (!corB) out.violations.push_back("morse_index: FEM index differs from the spectral index");
            }
        }
        if (wants(cfg, "theoremA")) {
            json arr = json::array();
            bool ok = true;
            for (cplx w : omegas) {
                const Prop55Result p = prop55_check(sys, w, sopt);
                arr.push_back({{"omega", to_json(w)}, {"lhs", p.lhs}, {"nullity", p.nullity}, {"s0", p.s0}, {"holds", p.holds}});
                ok = ok && p.holds;
            }
            diag["prop55"] = arr;
            checks["prop55"] = ok;
            if (!ok) out.violations.push_back("prop55: index at s0 differs from dim ker(A - w I)");
        }
        if (wants(cfg, "stability")) {
            if (!i_spec_one) i_spec_one = theorem_A_check(sys, 1.0, sopt).i_spec_thmA;
            const StabilityReport st = analyze_stability(sys, *i_spec_one, cfg.max_m, cfg.tol.eig);
            rep["stability"] = to_json(st);
            rep["stability"]["i_spec_at_one"] = *i_spec_one;
            const bool d_ok = !(st.cls.linearly_stable && st.verdict == Verdict::UnstableByParity);
            checks["theoremD"] = d_ok;
            if (!d_ok) out.violations.push_back("theoremD: parity certificate fired on a linearly stable map");
        }
        if (wants(cfg, "bott")) {
            const BottResult b = bott_check(sys, cfg.m);
            rep["bott"] = to_json(b);
            checks["bott"] = b.equal && b.nullity_equal;
            if (!(b.equal && b.nullity_equal)) out.violations.push_back("bott: iteration formula fails");
        }
        if (wants(cfg, "theoremF")) {
            if (is_riemannian(sys)) {
                const TheoremFResult f = theorem_F_check(sys, cfg.max_m);
                rep["theoremF"] = {{"applicable", true},
                                   {"applies", f.applies},
                                   {"not_strongly_stable", f.not_strongly_stable},
                                   {"consistent", f.consistent},
                                   {"iterate_morse_indices", f.iterate_morse_indices}};
                checks["theoremF"] = f.consistent;
                if (!f.consistent) out.violations.push_back("theoremF: vanishing iterate indices with a strongly stable map");
            } else {
                rep["theoremF"] = {{"applicable", false}, {"reason", "metric is not positive definite"}};
            }
        }
    }
    if (wants(cfg, "selftest")) {
        SelftestOptions so;
        so.seed = cfg.seed;
        json arr = json::array();
        for (const SuiteResult& r : run_selftest(so)) {
            arr.push_back(to_json(r));
            checks[r.name] = r.passed();
            if (!r.passed()) out.violations.push_back("selftest: " + r.name);
        }
        rep["selftest"] = arr;
        checks["lemma54"] = checks["block_factorization"];
    }
    rep["checks"] = checks;
    rep["diagnostics"] = diag;
    rep["violations"] = out.violations;
    return out;
}

std::string dump_report(const json& j) {
    std::string out;
    dump_value(j, out, 0);
    out += "\n";
    return out;
}

CsvTables csv_tables(const json& rep) {
    CsvTables t;
    if (rep.contains("stability")) {
        std::string s = "re,im,abs,algebraic,geometric,krein_p,krein_q\n";
        for (const auto& e : rep["stability"]["eigenvalues"]) {
            const double re = e["value"]["re"].get<double>(), im = e["value"]["im"].get<double>();
            s += num(re) + "," + num(im) + "," + num(e["abs"].get<double>()) + "," +
                 std::to_string(e["algebraic"].get<int>()) + "," + std::to_string(e["geometric"].get<int>()) + ",";
            if (e["krein"].is_null()) s += ",\n";
            else s += std::to_string(e["krein"]["p"].get<int>()) + "," + std::to_string(e["krein"]["q"].get<int>()) + "\n";
        }
        t.eigenvalues = s;
    }
    if (rep.contains("indices")) {
        std::string s = "omega_re,omega_im,i_geo,nullity,i_spec\n";
        std::string c = "kind,omega_re,omega_im,position,kernel_dim,sig_plus,sig_zero,sig_minus\n";
        for (const auto& r : rep["indices"]) {
            const std::string w = num(r["omega"]["re"].get<double>()) + "," + num(r["omega"]["im"].get<double>());
            s += w + "," + std::to_string(r["i_geo"].get<int>()) + "," + std::to_string(r["nullity"].get<int>()) + "," +
                 std::to_string(r["i_spec"].get<int>()) + "\n";
            auto rows = [&](const char* key, const char* kind, const char* pos) {
                for (const auto& x : r[key]) {
                    const auto& sg = x["signature"];
                    c += std::string(kind) + "," + w + "," + num(x[pos].get<double>()) + "," +
                         std::to_string(x["kernel_dim"].get<int>()) + "," + std::to_string(sg["plus"].get<int>()) + "," +
                         std::to_string(sg["zero"].get<int>()) + "," + std::to_string(sg["minus"].get<int>()) + "\n";
                }
            };
            rows("t_crossings", "t", "t");
            rows("s_crossings", "s", "s");
        }
        t.indices = s;
        t.crossings = c;
    }
    return t;
}

std::vector<std::string> write_csv(const json& report, const std::string& dir) {
    const CsvTables t = csv_tables(report);
    std::vector<std::string> written;
    if (t.eigenvalues.empty() && t.indices.empty()) return written;
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        if (body.empty()) return;
        const std::string path = (std::filesystem::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << body;
        written.push_back(path);
    };
    put("eigenvalues.csv", t.eigenvalues);
    put("indices.csv", t.indices);
    put("crossings.csv", t.crossings);
    return written;
}

}  // namespace msi
