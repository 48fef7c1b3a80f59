#include "msindex/model.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

namespace msi {

using nlohmann::json;

RMat SignatureMatrix::matrix() const {
    RMat G = RMat::Identity(dim(), dim());
    for (int i = p; i < p + q; ++i) G(i, i) = -1.0;
    return G;
}

CurvaturePath CurvaturePath::constant(const RMat& R) {
    if (R.rows() != R.cols()) throw DimensionError("curvature must be square");
    CurvaturePath c;
    c.kind_ = Kind::Constant;
    c.dim_ = int(R.rows());
    c.constant_ = 0.5 * (R + R.transpose());
    return c;
}

CurvaturePath CurvaturePath::fourier(double period, std::vector<FourierTerm> terms) {
    if (terms.empty()) throw ConfigError("fourier curvature needs at least one term");
    if (!(period > 0)) throw ConfigError("fourier curvature needs a positive period");
    CurvaturePath c;
    c.kind_ = Kind::Fourier;
    c.dim_ = int(terms.front().cos.rows());
    for (auto& t : terms) {
        if (t.k < 0) throw ConfigError("fourier index must be nonnegative");
        if (t.cos.size() == 0) t.cos = RMat::Zero(c.dim_, c.dim_);
        if (t.sin.size() == 0) t.sin = RMat::Zero(c.dim_, c.dim_);
        if (t.cos.rows() != c.dim_ || t.cos.cols() != c.dim_ || t.sin.rows() != c.dim_ || t.sin.cols() != c.dim_)
            throw DimensionError("fourier coefficient has wrong size");
    }
    c.terms_ = std::move(terms);
    c.period_ = period;
    return c;
}

CurvaturePath CurvaturePath::iterated(const CurvaturePath& base, const RMat& A, double period, int m) {
    if (m < 1) throw ConfigError("iteration count must be positive");
    CurvaturePath c;
    c.kind_ = Kind::Iterated;
    c.dim_ = base.dim_;
    if (base.kind_ == Kind::Iterated) {
        // flatten: base already covers k copies of its own base with the same twist
        c.base_ = base.base_;
        c.twist_ = base.twist_;
        c.period_ = base.period_;
        c.m_ = base.m_ * m;
    } else {
        c.base_ = std::make_shared<const CurvaturePath>(base);
        c.twist_ = A;
        c.period_ = period;
        c.m_ = m;
    }
    c.pow_.reserve(c.m_);
    c.powT_.reserve(c.m_);
    RMat P = RMat::Identity(c.dim_, c.dim_);
    for (int k = 0; k < c.m_; ++k) {
        c.pow_.push_back(P);
        c.powT_.push_back(P.transpose());
        P = P * c.twist_;
    }
    return c;
}

RMat CurvaturePath::operator()(double t) const {
    switch (kind_) {
    case Kind::Constant:
        return constant_;
    case Kind::Fourier: {
        RMat R = RMat::Zero(dim_, dim_);
        const double w = 2.0 * std::numbers::pi * t / period_;
        for (const auto& term : terms_) {
            R += term.cos * std::cos(w * term.k);
            if (term.k != 0) R += term.sin * std::sin(w * term.k);
        }
        return 0.5 * (R + R.transpose());
    }
    case Kind::Iterated: {
        int k = int(std::floor(t / period_));
        k = std::clamp(k, 0, m_ - 1);
        const double tau = t - k * period_;
        return powT_[k] * (*base_)(tau) * pow_[k];
    }
    }
    return {};
}

double CurvaturePath::sup_norm(double T, int samples) const {
    double best = 0.0;
    for (int i = 0; i <= samples; ++i) best = std::max(best, norm2(RMat((*this)(T * i / samples))));
    return best;
}

int MorseSturmSystem::orientation() const { return A.determinant() >= 0 ? 1 : -1; }

RMat MorseSturmSystem::twist_lift() const {
    const RMat Gm = G();
    RMat Ad = RMat::Zero(2 * n, 2 * n);
    Ad.topLeftCorner(n, n) = Gm * A * Gm;
    Ad.bottomRightCorner(n, n) = A;
    return Ad;
}

std::vector<Violation> validate(const MorseSturmSystem& sys) {
    std::vector<Violation> out;
    if (sys.n < 1) {
        out.push_back({"dimension must be positive", double(sys.n)});
        return out;
    }
    if (sys.g.p < 0 || sys.g.q < 0 || sys.g.dim() != sys.n)
        out.push_back({"signature does not match dimension", double(std::abs(sys.g.dim() - sys.n))});
    if (!(sys.T > 0) || !std::isfinite(sys.T)) out.push_back({"period must be positive", sys.T});
    if (sys.A.rows() != sys.n || sys.A.cols() != sys.n) {
        out.push_back({"A has wrong size", double(sys.A.rows())});
        return out;
    }
    if (sys.Rhat.dim() != sys.n) {
        out.push_back({"curvature has wrong size", double(sys.Rhat.dim())});
        return out;
    }
    if (!out.empty()) return out;
    const RMat G = sys.G();
    const double orth = (sys.A.transpose() * G * sys.A - G).norm();
    if (orth > 1e-10) out.push_back({"A not G-orthogonal", orth});
    const double det = std::abs(std::abs(sys.A.determinant()) - 1.0);
    if (det > 1e-10) out.push_back({"|det A| != 1", det});
    double asym = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const RMat R = sys.Rhat(sys.T * i / 16.0);
        asym = std::max(asym, (R - R.transpose()).norm());
        if (!R.allFinite()) asym = INFINITY;
    }
    if (asym > 1e-12) out.push_back({"curvature not symmetric", asym});
    const double compat = (sys.Rhat(sys.T) - sys.A.transpose() * sys.Rhat(0.0) * sys.A).norm();
    if (compat > 1e-10) out.push_back({"iteration compatibility", compat});
    return out;
}

void require_valid(const MorseSturmSystem& sys) {
    const auto v = validate(sys);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid system '" << sys.label << "':";
    for (const auto& x : v) os << " [" << x.constraint << ", residual " << x.residual << "]";
    throw ConfigError(os.str());
}

MorseSturmSystem iterate(const MorseSturmSystem& sys, int m) {
    require_valid(sys);
    if (m < 1) throw ConfigError("iterate: m must be positive");
    if (m == 1) return sys;
    MorseSturmSystem out = sys;
    RMat Am = RMat::Identity(sys.n, sys.n);
    for (int k = 0; k < m; ++k) Am = Am * sys.A;
    out.A = Am;
    out.T = sys.T * m;
    out.Rhat = CurvaturePath::iterated(sys.Rhat, sys.A, sys.T, m);
    out.label = sys.label + "^" + std::to_string(m);
    return out;
}

namespace {

void require_time(const MorseSturmSystem& sys, double t) {
    const double slack = 1e-12 * std::max(1.0, sys.T);
    if (!(t >= -slack && t <= sys.T + slack))
        throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(sys.T) + "]");
}

}  // namespace

RMat hamiltonian_coefficient(const MorseSturmSystem& sys, double c, double s, double t) {
    require_time(sys, t);
    const RMat G = sys.G();
    RMat D = RMat::Zero(2 * sys.n, 2 * sys.n);
    D.topLeftCorner(sys.n, sys.n) = G;
    D.bottomRightCorner(sys.n, sys.n) = -c * sys.Rhat(t) - s * G;
    return D;
}

RMat flow_generator(const MorseSturmSystem& sys, double c, double s, double t, double shift) {
    const int n = sys.n;
    RMat K = RMat::Zero(2 * n, 2 * n);
    RMat top = c * sys.Rhat(t);
    for (int i = 0; i < n; ++i) top(i, i) += (i < sys.g.p ? s : -s) + shift;
    K.topRightCorner(n, n) = top;
    for (int i = 0; i < n; ++i) K(n + i, i) = i < sys.g.p ? 1.0 : -1.0;
    return K;
}

namespace {

// cosh(sqrt(a) t) and sinh(sqrt(a) t)/sqrt(a), continued to a <= 0
std::pair<double, double> entire_cs(double a, double t) {
    if (a > 0) {
        const double l = std::sqrt(a);
        return {std::cosh(l * t), std::sinh(l * t) / l};
    }
    if (a < 0) {
        const double l = std::sqrt(-a);
        return {std::cos(l * t), std::sin(l * t) / l};
    }
    return {1.0, t};
}

}  // namespace

RMat closed_form_phi(const SignatureMatrix& g, double c, double s, double t) {
    const int n = g.dim();
    RMat Phi = RMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const bool plus = i < g.p;
        const double a = plus ? s + c : s - c;
        const auto [C, S] = entire_cs(a, t);
        const double sg = plus ? 1.0 : -1.0;
        Phi(i, i) = C;
        Phi(i, n + i) = sg * a * S;
        Phi(n + i, i) = sg * S;
        Phi(n + i, n + i) = C;
    }
    return Phi;
}

namespace {

double parse_angle(std::string expr) {
    std::string e;
    for (char ch : expr)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '*') e += ch;
    if (e.empty()) throw ConfigError("empty angle");
    const auto pos = e.find("pi");
    if (pos == std::string::npos) {
        std::size_t used = 0;
        const double v = std::stod(e, &used);
        if (used != e.size()) throw ConfigError("bad angle '" + expr + "'");
        return v;
    }
    const std::string num = e.substr(0, pos);
    const std::string rest = e.substr(pos + 2);
    double factor = 1.0;
    if (!num.empty() && num != "+") factor = num == "-" ? -1.0 : std::stod(num);
    double denom = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw ConfigError("bad angle '" + expr + "'");
        denom = std::stod(rest.substr(1));
    }
    return factor * std::numbers::pi / denom;
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

MorseSturmSystem make_constant(int p, int q, double T, const RMat& A, const RMat& R, std::string label) {
    MorseSturmSystem sys;
    sys.n = p + q;
    sys.g = {p, q};
    sys.T = T;
    sys.A = A;
    sys.Rhat = CurvaturePath::constant(R);
    sys.label = std::move(label);
    return sys;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"flat-torus(n)", "great-circle", "mobius-flat", "lorentz-flat(p,q)", "twisted-rot(theta)", "hyperbolic"};
}

MorseSturmSystem scenario(const std::string& name) {
    static const std::regex re(R"(^\s*([a-z\-]+)\s*(?:\(([^)]*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(name, m, re)) throw ConfigError("unknown scenario '" + name + "'");
    const std::string base = m[1];
    const std::vector<std::string> args = m[2].matched ? split_args(m[2]) : std::vector<std::string>{};
    auto int_arg = [&](std::size_t i, int dflt) {
        if (i >= args.size()) return dflt;
        try {
            std::size_t used = 0;
            const int v = std::stoi(args[i], &used);
            if (v < 0 || used == 0) throw ConfigError("");
            return v;
        } catch (...) {
            throw ConfigError("bad integer argument in '" + name + "'");
        }
    };
    MorseSturmSystem sys;
    if (base == "flat-torus") {
        if (args.size() > 1) throw ConfigError("flat-torus takes one argument");
        const int n = int_arg(0, 1);
        if (n < 1) throw ConfigError("flat-torus needs n >= 1");
        sys = make_constant(n, 0, 1.0, RMat::Identity(n, n), RMat::Zero(n, n), name);
    } else if (base == "great-circle") {
        if (!args.empty()) throw ConfigError("great-circle takes no arguments");
        sys = make_constant(1, 0, 2.0 * std::numbers::pi, RMat::Identity(1, 1), -RMat::Identity(1, 1), name);
    } else if (base == "mobius-flat") {
        if (!args.empty()) throw ConfigError("mobius-flat takes no arguments");
        sys = make_constant(1, 0, 1.0, -RMat::Identity(1, 1), RMat::Zero(1, 1), name);
    } else if (base == "lorentz-flat") {
        if (args.size() == 1 || args.size() > 2) throw ConfigError("lorentz-flat takes (p,q)");
        const int p = int_arg(0, 1), q = int_arg(1, 1);
        if (p + q < 1) throw ConfigError("lorentz-flat needs p+q >= 1");
        sys = make_constant(p, q, 1.0, RMat::Identity(p + q, p + q), RMat::Zero(p + q, p + q), name);
    } else if (base == "twisted-rot") {
        if (args.size() > 1) throw ConfigError("twisted-rot takes one angle");
        const double th = args.empty() ? std::numbers::pi / 2 : parse_angle(args[0]);
        RMat A(2, 2);
        A << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        sys = make_constant(2, 0, 1.0, A, RMat::Zero(2, 2), name);
    } else if (base == "hyperbolic") {
        if (!args.empty()) throw ConfigError("hyperbolic takes no arguments");
        // u'' = u over log 2: Floquet multipliers 2 and 1/2
        sys = make_constant(1, 0, std::log(2.0), RMat::Identity(1, 1), RMat::Identity(1, 1), name);
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    require_valid(sys);
    return sys;
}

namespace {

RMat matrix_from_json(const json& j, int n, const char* what) {
    if (!j.is_array() || int(j.size()) != n * n)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(n * n) + " row-major numbers");
    RMat M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const auto& v = j[r * n + c];
            if (!v.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
            M(r, c) = v.get<double>();
        }
    return M;
}

json matrix_to_json(const RMat& M) {
    json a = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) a.push_back(M(r, c));
    return a;
}

}  // namespace

MorseSturmSystem system_from_json(const json& j) {
    try {
        MorseSturmSystem sys;
        sys.n = j.at("n").get<int>();
        if (sys.n < 1) throw ConfigError("n must be positive");
        sys.g.p = j.at("G").at("p").get<int>();
        sys.g.q = j.at("G").at("q").get<int>();
        if (sys.g.p < 0 || sys.g.q < 0 || sys.g.dim() != sys.n) throw ConfigError("G signature must satisfy p+q=n");
        sys.T = j.at("T").get<double>();
        sys.A = matrix_from_json(j.at("A"), sys.n, "A");
        const auto& r = j.at("Rhat");
        const std::string type = r.at("type").get<std::string>();
        if (type == "constant") {
            sys.Rhat = CurvaturePath::constant(matrix_from_json(r.at("matrix"), sys.n, "Rhat.matrix"));
        } else if (type == "fourier") {
            std::vector<FourierTerm> terms;
            for (const auto& t : r.at("terms")) {
                FourierTerm ft;
                ft.k = t.at("k").get<int>();
                ft.cos = t.contains("cos") ? matrix_from_json(t["cos"], sys.n, "cos") : RMat::Zero(sys.n, sys.n);
                ft.sin = t.contains("sin") ? matrix_from_json(t["sin"], sys.n, "sin") : RMat::Zero(sys.n, sys.n);
                terms.push_back(ft);
            }
            sys.Rhat = CurvaturePath::fourier(sys.T, terms);
        } else {
            throw ConfigError("Rhat.type must be constant or fourier");
        }
        const std::string causal = j.value("causal", std::string("spacelike"));
        if (causal == "spacelike") sys.causal = Causal::Spacelike;
        else if (causal == "timelike") sys.causal = Causal::Timelike;
        else throw ConfigError("causal must be spacelike or timelike");
        sys.label = j.value("label", std::string("custom"));
        require_valid(sys);
        return sys;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario json: ") + e.what());
    }
}

json system_to_json(const MorseSturmSystem& sys) {
    json j;
    j["n"] = sys.n;
    j["G"] = {{"p", sys.g.p}, {"q", sys.g.q}};
    j["T"] = sys.T;
    j["A"] = matrix_to_json(sys.A);
    j["causal"] = sys.causal == Causal::Spacelike ? "spacelike" : "timelike";
    j["label"] = sys.label;
    const auto& R = sys.Rhat;
    switch (R.kind()) {
    case CurvaturePath::Kind::Constant:
        j["Rhat"] = {{"type", "constant"}, {"matrix", matrix_to_json(R.constant_value())}};
        break;
    case CurvaturePath::Kind::Fourier: {
        json terms = json::array();
        for (const auto& t : R.terms())
            terms.push_back({{"k", t.k}, {"cos", matrix_to_json(t.cos)}, {"sin", matrix_to_json(t.sin)}});
        j["Rhat"] = {{"type", "fourier"}, {"terms", terms}};
        break;
    }
    case CurvaturePath::Kind::Iterated: {
        // echo only; iterates are rebuilt from the base system
        MorseSturmSystem base = sys;
        base.Rhat = R.base();
        base.T = R.period();
        j["Rhat"] = {{"type", "iterated"}, {"copies", R.copies()}, {"base", system_to_json(base)["Rhat"]}};
        break;
    }
    }
    return j;
}

namespace {

RMat random_orthogonal(std::mt19937_64& rng, int k) {
    std::normal_distribution<double> nd;
    RMat X(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) X(i, j) = nd(rng);
    Eigen::HouseholderQR<RMat> qr(X);
    RMat Q = qr.householderQ();
    const RMat Rm = qr.matrixQR();
    for (int i = 0; i < k; ++i)
        if (Rm(i, i) < 0) Q.col(i) *= -1.0;
    return Q;
}

RMat random_symmetric(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    RMat X(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = nd(rng);
    return 0.5 * (X + X.transpose());
}

}  // namespace

MorseSturmSystem random_system(std::mt19937_64& rng, const RandomSystemOptions& opt) {
    std::uniform_int_distribution<int> nd(1, std::max(1, opt.max_n));
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    MorseSturmSystem sys;
    sys.n = nd(rng);
    const int q = opt.riemannian ? 0 : std::uniform_int_distribution<int>(0, sys.n)(rng);
    sys.g = {sys.n - q, q};
    const int p = sys.g.p, n = sys.n;
    sys.T = 0.6 + ud(rng);

    RMat A = RMat::Identity(n, n);
    if (p > 0) A.topLeftCorner(p, p) = random_orthogonal(rng, p);
    if (q > 0) A.bottomRightCorner(q, q) = random_orthogonal(rng, q);
    if (ud(rng) < 0.3) A.col(0) *= -1.0;  // non-oriented twist
    if (opt.allow_boost && p > 0 && q > 0 && ud(rng) < 0.5) {
        const int i = std::uniform_int_distribution<int>(0, p - 1)(rng);
        const int j = p + std::uniform_int_distribution<int>(0, q - 1)(rng);
        const double eta = 1.2 * (ud(rng) - 0.5);
        RMat B = RMat::Identity(n, n);
        B(i, i) = B(j, j) = std::cosh(eta);
        B(i, j) = B(j, i) = std::sinh(eta);
        A = A * B;
    }
    sys.A = A;

    // R(0) must commute with the twist in the sense A^T R(0) A = R(0): use G times
    // polynomials in A + A^{-1}, which are symmetric because A is G-orthogonal.
    const RMat G = sys.G();
    const RMat Ainv = G * A.transpose() * G;
    const double a0 = 3.0 * (ud(rng) - 0.5), a1 = ud(rng) - 0.5;
    RMat S0 = a0 * G + a1 * G * (A + Ainv);
    S0 = 0.5 * (S0 + S0.transpose());

    std::vector<FourierTerm> terms;
    RMat mean = S0;
    for (int k = 1; k <= opt.fourier_terms; ++k) {
        FourierTerm t;
        t.k = k;
        t.cos = random_symmetric(rng, n, 0.6 / k);
        t.sin = random_symmetric(rng, n, 0.6 / k);
        mean -= t.cos;
        terms.push_back(t);
    }
    terms.insert(terms.begin(), FourierTerm{0, mean, RMat::Zero(n, n)});
    sys.Rhat = CurvaturePath::fourier(sys.T, terms);
    sys.label = "random";
    require_valid(sys);
    return sys;
}

}  // namespace msi
