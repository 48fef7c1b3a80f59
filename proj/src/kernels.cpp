#include "msindex/kernels.hpp"

#include <cmath>

namespace msi::kernels {

namespace {

// 3-point Gauss-Legendre on [0, 1]
constexpr double kGx[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void element(const MorseSturmSystem& sys, int N, int e, RMat& k00, RMat& k01, RMat& k11) {
    const int n = sys.n;
    const double h = sys.T / N;
    const RMat I = RMat::Identity(n, n);
    // exact stiffness of the derivative term
    k00 = I / h;
    k01 = -I / h;
    k11 = I / h;
    for (int q = 0; q < 3; ++q) {
        const double x = kGx[q];
        const RMat R = sys.Rhat((e + x) * h);
        const double w = kGw[q] * h;
        k00 += w * (1 - x) * (1 - x) * R;
        k01 += w * (1 - x) * x * R;
        k11 += w * x * x * R;
    }
}

}  // namespace

namespace serial {

std::vector<double> indicator_scan(const TwistedBvp& bvp, const std::vector<double>& s, Accuracy acc) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = bvp.indicator(s[i], acc);
    return out;
}

std::vector<RMat> endpoint_maps(const MorseSturmSystem& sys, double c, const std::vector<double>& s, int steps) {
    std::vector<RMat> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = propagate(sys, c, s[i], 0.0, sys.T, steps);
    return out;
}

ElementBlocks fem_elements(const MorseSturmSystem& sys, int N) {
    ElementBlocks b;
    b.k00.resize(N);
    b.k01.resize(N);
    b.k11.resize(N);
    for (int e = 0; e < N; ++e) element(sys, N, e, b.k00[e], b.k01[e], b.k11[e]);
    return b;
}

}  // namespace serial

std::vector<double> indicator_scan(const TwistedBvp& bvp, const std::vector<double>& s, Accuracy acc) {
    std::vector<double> out(s.size());
    const long m = long(s.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < m; ++i) out[i] = bvp.indicator(s[i], acc);
    return out;
}

std::vector<RMat> endpoint_maps(const MorseSturmSystem& sys, double c, const std::vector<double>& s, int steps) {
    std::vector<RMat> out(s.size());
    const long m = long(s.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < m; ++i) out[i] = propagate(sys, c, s[i], 0.0, sys.T, steps);
    return out;
}

ElementBlocks fem_elements(const MorseSturmSystem& sys, int N) {
    ElementBlocks b;
    b.k00.resize(N);
    b.k01.resize(N);
    b.k11.resize(N);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < N; ++e) element(sys, N, e, b.k00[e], b.k01[e], b.k11[e]);
    return b;
}

}  // namespace msi::kernels
