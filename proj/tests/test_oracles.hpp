#pragma once

// Test-only oracles, independent of the library's evaluation paths.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// Airy function by its Maclaurin series: Ai(s) = Ai(0) f(s) + Ai'(0) g(s),
// where f'' = s f, g'' = s g with f(0)=1, g'(0)=1. Accurate in double for
// |s| <= ~8; used only to check the contour-integral evaluation.
inline double airy_series(double s) {
    const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
    const double aip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
    const double s3 = s * s * s;
    double f_term = 1.0, f_sum = 1.0;
    double g_term = s, g_sum = s;
    for (int k = 0; k < 60; ++k) {
        f_term *= s3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        f_sum += f_term;
        g_term *= s3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        g_sum += g_term;
        if (std::abs(f_term) < 1e-20 && std::abs(g_term) < 1e-20) break;
    }
    return ai0 * f_sum + aip0 * g_sum;
}

// pmf of a sum of `terms` i.i.d. Geom(q) variables (negative binomial):
// P(S = k) = C(k + terms - 1, terms - 1) q^k (1-q)^terms.
inline double geom_sum_pmf(int terms, double q, int64_t k) {
    const double lc = std::lgamma(static_cast<double>(k + terms)) -
                      std::lgamma(static_cast<double>(terms)) -
                      std::lgamma(static_cast<double>(k + 1));
    return std::exp(lc + k * std::log(q) + terms * std::log(1.0 - q));
}

} // namespace oracles
