#pragma once
// Helpers shared by the crossing scans over t and over s.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace msi::detail {

// Golden-section minimum of f on [lo, hi]. With a Lipschitz bound `slope`, the search stops
// early once no value below `floor` is possible in the remaining bracket.
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double tol, double slope = 0.0,
                                     double floor = 0.0) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (slope > 0 && std::min(f1, f2) - slope * (hi - lo) > floor) return {f1 <= f2 ? x1 : x2, std::min(f1, f2)};
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    double bx = f1 <= f2 ? x1 : x2, bf = std::min(f1, f2);
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx < bf) bx = x, bf = fx;
    }
    return {bx, bf};
}

// Local minimum up to relative ties, strictly below at least one neighbour, so that flat
// stretches do not count; values at or below zero_tol always count.
inline bool local_min(const std::vector<double>& v, std::size_t i, double zero_tol) {
    auto le = [](double a, double b) { return a <= b * (1.0 + 1e-9) + 1e-300; };
    auto lt = [](double a, double b) { return a < b * (1.0 - 1e-9); };
    const std::size_t last = v.size() - 1;
    if (i > 0 && !le(v[i], v[i - 1])) return false;
    if (i < last && !le(v[i], v[i + 1])) return false;
    return v[i] <= zero_tol || (i > 0 && lt(v[i], v[i - 1])) || (i < last && lt(v[i], v[i + 1]));
}

// Intervals [x_i, x_{i+1}] of a nonnegative Lipschitz sample f that may hide a zero: grid minima
// plus every interval whose end values are small against the local slope times its width.
inline std::vector<std::size_t> candidate_intervals(const std::vector<double>& x, const std::vector<double>& f,
                                                    double zero_tol) {
    const std::size_t m = x.size() - 1;
    std::vector<double> slope(m);
    for (std::size_t j = 0; j < m; ++j) slope[j] = std::abs(f[j + 1] - f[j]) / (x[j + 1] - x[j]);
    std::vector<char> mark(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        double loc = 0.0;
        for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(m - 1, i + 2); ++j) loc = std::max(loc, slope[j]);
        if (f[i] + f[i + 1] <= 4.0 * loc * (x[i + 1] - x[i])) mark[i] = 1;
    }
    for (std::size_t i = 0; i <= m; ++i) {
        if (!local_min(f, i, zero_tol)) continue;
        if (i > 0) mark[i - 1] = 1;
        if (i < m) mark[i] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i)
        if (mark[i]) out.push_back(i);
    return out;
}

}  // namespace msi::detail
