#pragma once
// Twisted Morse-Sturm systems  -G u'' + R(t) u = 0,  u(0) = A u(T), u'(0) = A u'(T).

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "msindex/linalg.hpp"

namespace msi {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// diag(I_p, -I_q)
struct SignatureMatrix {
    int p = 0;
    int q = 0;
    int dim() const { return p + q; }
    RMat matrix() const;
    bool riemannian() const { return q == 0; }
};

struct FourierTerm {
    int k = 0;
    RMat cos;   // multiplies cos(2 pi k t / T)
    RMat sin;
};

// Symmetric matrix path R(t) on [0, T].
class CurvaturePath {
public:
    enum class Kind { Constant, Fourier, Iterated };

    static CurvaturePath constant(const RMat& R);
    static CurvaturePath fourier(double period, std::vector<FourierTerm> terms);
    // Extension to [0, m T]: R(t + k T) = (A^T)^k R(t) A^k.
    static CurvaturePath iterated(const CurvaturePath& base, const RMat& A, double period, int m);

    RMat operator()(double t) const;
    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    // max over a uniform sample of the spectral norm
    double sup_norm(double T, int samples = 256) const;

    const RMat& constant_value() const { return constant_; }
    const std::vector<FourierTerm>& terms() const { return terms_; }
    double period() const { return period_; }
    int copies() const { return m_; }
    const CurvaturePath& base() const { return *base_; }
    const RMat& twist() const { return twist_; }

private:
    Kind kind_ = Kind::Constant;
    int dim_ = 0;
    RMat constant_;
    std::vector<FourierTerm> terms_;
    double period_ = 1.0;
    std::shared_ptr<const CurvaturePath> base_;
    RMat twist_;
    int m_ = 1;
    std::vector<RMat> pow_, powT_;
};

enum class Causal { Spacelike, Timelike };

struct MorseSturmSystem {
    int n = 1;
    SignatureMatrix g;
    double T = 1.0;
    RMat A;
    CurvaturePath Rhat;
    Causal causal = Causal::Spacelike;
    std::string label;

    int orientation() const;
    // A_d = diag(A^{-T}, A) = diag(G A G, A), acting on z = (G u', u)
    RMat twist_lift() const;
    RMat G() const { return g.matrix(); }
};

struct Violation {
    std::string constraint;
    double residual = 0.0;
};

std::vector<Violation> validate(const MorseSturmSystem& sys);
// throws ConfigError listing the violations
void require_valid(const MorseSturmSystem& sys);

MorseSturmSystem iterate(const MorseSturmSystem& sys, int m);

// D_{c,s}(t) = blockdiag(G, -c R(t) - s G);  J D = [[0, cR + sG], [G, 0]].
RMat hamiltonian_coefficient(const MorseSturmSystem& sys, double c, double s, double t);
// J D_{c,s}(t) directly, plus an optional diagonal shift added to c R.
RMat flow_generator(const MorseSturmSystem& sys, double c, double s, double t, double shift = 0.0);

// Fundamental solution of the constant system R = I, G = diag(I_p, -I_q).
RMat closed_form_phi(const SignatureMatrix& g, double c, double s, double t);

MorseSturmSystem scenario(const std::string& name);
std::vector<std::string> catalog_names();

MorseSturmSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const MorseSturmSystem& sys);

// Random valid system for sweeps: n in [1, max_n], Fourier curvature.
struct RandomSystemOptions {
    int max_n = 3;
    bool riemannian = false;
    bool allow_boost = true;
    int fourier_terms = 2;
};
MorseSturmSystem random_system(std::mt19937_64& rng, const RandomSystemOptions& opt = {});

}  // namespace msi
