#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "befpp/errors.hpp"
#include "befpp/params.hpp"

namespace befpp {

using cplx = std::complex<double>;

// log(1+w) for complex w without cancellation for small |w|.
inline cplx clog1p(cplx w) {
    const cplx z1 = 1.0 + w;
    if (z1 == cplx(1.0, 0.0)) return w;
    const cplx d = z1 - 1.0;
    return std::log(z1) * (w / d);
}

// The (lambda, d, sigma) triple controlling the n^{1/3}, n^{2/3}, n^{4/9}
// scales of the height function.
struct ScalingConstants {
    double lambda;
    double d;
    double sigma;
};

inline ScalingConstants scaling_constants(const ModelParams& p) {
    p.validate();
    const double lambda = std::cbrt(p.a * (p.a + p.b) / (2.0 * p.t));
    const double d = 3.0 * p.a * (p.a + p.b) / (2.0 * p.b * lambda);
    const double sigma = std::cbrt(3.0 * p.a * (p.a + p.b) * lambda / (2.0 * p.b * p.b * p.b));
    return {lambda, d, sigma};
}

// Large-time limit functions of the free parameter theta.
struct LargeTimeFunctions {
    double theta;
    double kappa;
    double tau;
    double rho;
    double rho_tilde;
};

inline double kappa_of(const ModelParams& p, double theta) {
    const double t1 = theta, t2 = p.a + theta, t3 = p.a + p.b + theta;
    const double num = 1.0 / (t1 * t1) - 1.0 / (t2 * t2);
    const double den = 1.0 / (t2 * t2) - 1.0 / (t3 * t3);
    return num / den;
}

inline double kappa_prime_of(const ModelParams& p, double theta) {
    const double t1 = theta, t2 = p.a + theta, t3 = p.a + p.b + theta;
    const double num = 1.0 / (t1 * t1) - 1.0 / (t2 * t2);
    const double den = 1.0 / (t2 * t2) - 1.0 / (t3 * t3);
    const double dnum = -2.0 / (t1 * t1 * t1) + 2.0 / (t2 * t2 * t2);
    const double dden = -2.0 / (t2 * t2 * t2) + 2.0 / (t3 * t3 * t3);
    return (dnum * den - num * dden) / (den * den);
}

// Simplified closed form a(a+b) / (theta^2 (2a+b+2 theta)).
inline double tau_of(const ModelParams& p, double theta) {
    return p.a * (p.a + p.b) / (theta * theta * (2.0 * p.a + p.b + 2.0 * theta));
}

// Defining three-term expression; equals tau_of analytically.
inline double tau_defining(const ModelParams& p, double theta) {
    const double k = kappa_of(p, theta);
    return 1.0 / (p.a + theta) - 1.0 / theta +
           k * (1.0 / (p.a + theta) - 1.0 / (p.a + p.b + theta));
}

inline double tau_prime_of(const ModelParams& p, double theta) {
    const double s = 2.0 * p.a + p.b + 2.0 * theta;
    return -2.0 * p.a * (p.a + p.b) *
           (1.0 / (theta * theta * theta * s) + 1.0 / (theta * theta * s * s));
}

inline double rho_of(const ModelParams& p, double theta) {
    const double t1 = theta, t2 = p.a + theta, t3 = p.a + p.b + theta;
    const double k = kappa_of(p, theta);
    const double bracket = 1.0 / (t1 * t1 * t1) - 1.0 / (t2 * t2 * t2) +
                           k * (1.0 / (t3 * t3 * t3) - 1.0 / (t2 * t2 * t2));
    return std::cbrt(bracket);
}

inline LargeTimeFunctions large_time_functions(const ModelParams& p, double theta) {
    p.validate();
    if (!(theta > 0.0)) throw domain_error("large_time_functions: theta must be positive");
    LargeTimeFunctions f;
    f.theta = theta;
    f.kappa = kappa_of(p, theta);
    f.tau = tau_of(p, theta);
    f.rho = rho_of(p, theta);
    f.rho_tilde = kappa_prime_of(p, theta) / tau_prime_of(p, theta) * f.rho;
    return f;
}

// theta(n) = (n a (a+b) / 2t)^{1/3}; with this choice tau(theta) n = t + O(n^{-1/3}).
inline double theta_for(const ModelParams& p, int64_t n) {
    p.validate();
    if (n < 1) throw domain_error("theta_for: n must be >= 1");
    return std::cbrt(static_cast<double>(n) * p.a * (p.a + p.b) / (2.0 * p.t));
}

// m(n, x) = floor((a/b) n + d n^{2/3} + sigma x n^{4/9}). May be negative for
// very negative x; the caller clamps since P(H < m) = 0 for m <= 0.
inline int64_t m_for(const ModelParams& p, int64_t n, double x) {
    if (n < 1) throw domain_error("m_for: n must be >= 1");
    const ScalingConstants sc = scaling_constants(p);
    const double nn = static_cast<double>(n);
    const double raw = (p.a / p.b) * nn + sc.d * std::pow(nn, 2.0 / 3.0) +
                       sc.sigma * x * std::pow(nn, 4.0 / 9.0);
    return static_cast<int64_t>(std::floor(raw));
}

// chi = (h - (a/b) n - d n^{2/3}) / (sigma n^{4/9}).
inline double chi_from_height(const ModelParams& p, int64_t n, int64_t h) {
    if (n < 1) throw domain_error("chi_from_height: n must be >= 1");
    const ScalingConstants sc = scaling_constants(p);
    const double nn = static_cast<double>(n);
    return (static_cast<double>(h) - (p.a / p.b) * nn - sc.d * std::pow(nn, 2.0 / 3.0)) /
           (sc.sigma * std::pow(nn, 4.0 / 9.0));
}

// Crossing height of the Re[-f1] level set on the imaginary axis; satisfies
// Re[-f1(+-i p)] = Re[-f1(lambda)] exactly.
inline double p_crossing(const ModelParams& p) {
    return std::sqrt(std::cbrt(std::pow(p.a * (p.a + p.b) / (2.0 * p.t), 2.0)) / 3.0);
}

// f1(lambda) = 3 t^{2/3} (a(a+b)/2)^{1/3}.
inline double f1_at_lambda(const ModelParams& p) {
    return 3.0 * std::pow(p.t, 2.0 / 3.0) * std::cbrt(p.a * (p.a + p.b) / 2.0);
}

// Saddle-point function family at fixed (params, n, x). Evaluators for f1 and
// its derivatives, f2, the rescaled exponent h_n, its unscaled form h~_n, and
// the remainder r_n. All ratio logarithms are taken with the principal branch
// of the ratio itself, never as differences of separate logarithms.
struct SaddleFunctions {
    ModelParams params;
    int64_t n = 1;
    double x = 0.0;

    ScalingConstants sc;
    int64_t m = 0;
    double cbrt_n = 1.0;

    SaddleFunctions(const ModelParams& p, int64_t n_, double x_)
        : params(p), n(n_), x(x_) {
        p.validate();
        if (n < 0) throw domain_error("SaddleFunctions: n must be >= 0");
        sc = scaling_constants(p);
        m = n >= 1 ? m_for(p, n, x) : 0;
        cbrt_n = std::cbrt(static_cast<double>(n));
    }

    // Allows overriding m (the kernel uses the floored integer by default).
    void set_m(int64_t m_) { m = m_; }

    cplx f1(cplx z) const {
        return params.t * z - params.a * (params.a + params.b) / (2.0 * z * z) +
               params.b * sc.d / z;
    }
    cplx f1p(cplx z) const {
        return params.t + params.a * (params.a + params.b) / (z * z * z) -
               params.b * sc.d / (z * z);
    }
    cplx f1pp(cplx z) const {
        const cplx z2 = z * z;
        return -3.0 * params.a * (params.a + params.b) / (z2 * z2) +
               2.0 * params.b * sc.d / (z2 * z);
    }
    cplx f1ppp(cplx z) const {
        const cplx z2 = z * z;
        return 12.0 * params.a * (params.a + params.b) / (z2 * z2 * z) -
               6.0 * params.b * sc.d / (z2 * z2);
    }
    cplx f2(cplx z) const { return params.b * sc.sigma * x / z; }

    // h~_n(u) = -n log((a+u)/u) - m log((a+u)/(a+b+u)) in the unscaled variable.
    cplx h_tilde(cplx u) const {
        return -static_cast<double>(n) * clog1p(params.a / u) +
               static_cast<double>(m) * clog1p(params.b / (params.a + u));
    }

    // h_n(z) = h~_n(n^{1/3} z).
    cplx h_n(cplx z) const { return h_tilde(cbrt_n * z); }

    // Full unscaled exponent t u + h~_n(u) appearing in the kernel.
    cplx phi(cplx u) const { return params.t * u + h_tilde(u); }

    // Remainder after stripping the n^{1/3} and n^{1/9} terms from h_n.
    cplx r_n(cplx z) const {
        const double n13 = cbrt_n;
        const double n19 = std::cbrt(n13);
        return h_n(z) +
               n13 * (params.a * (params.a + params.b) / (2.0 * z * z) - params.b * sc.d / z) -
               n19 * params.b * sc.sigma * x / z;
    }

    void check_domain(cplx z) const {
        const double n13 = cbrt_n > 0.0 ? cbrt_n : 1.0;
        const double tol = 1e-12 * (1.0 + std::abs(z));
        if (std::abs(z) < tol || std::abs(z + params.a / n13) < tol ||
            std::abs(z + (params.a + params.b) / n13) < tol)
            throw domain_error("saddle_eval: z at a pole or branch point of h_n");
    }
};

struct SaddleEval {
    cplx f1, f1d1, f1d2, f1d3, f2, h_n, r_n;
};

inline SaddleEval saddle_eval(const SaddleFunctions& f, cplx z) {
    f.check_domain(z);
    return {f.f1(z), f.f1p(z), f.f1pp(z), f.f1ppp(z), f.f2(z), f.h_n(z), f.r_n(z)};
}

struct SteepDescentPoint {
    double y;
    double analytic_deriv;
    double numeric_deriv;
};

// d/dy Re[f1(lambda + i y)] has the closed form -4a(a+b) y^3 / (lambda^2+y^2)^3.
// The numeric column is a centered finite difference for cross-checking.
inline std::vector<SteepDescentPoint> steep_descent_check(const ModelParams& p,
                                                          const std::vector<double>& y_grid) {
    p.validate();
    const ScalingConstants sc = scaling_constants(p);
    SaddleFunctions f(p, 1, 0.0);
    std::vector<SteepDescentPoint> out;
    out.reserve(y_grid.size());
    for (double y : y_grid) {
        if (y == 0.0) throw domain_error("steep_descent_check: y must be nonzero");
        const double l2y2 = sc.lambda * sc.lambda + y * y;
        const double analytic = -4.0 * p.a * (p.a + p.b) * y * y * y / (l2y2 * l2y2 * l2y2);
        const double h = 1e-6 * std::max(sc.lambda, std::abs(y));
        const double up = std::real(f.f1(cplx(sc.lambda, y + h)));
        const double dn = std::real(f.f1(cplx(sc.lambda, y - h)));
        out.push_back({y, analytic, (up - dn) / (2.0 * h)});
    }
    return out;
}

struct SeriesBoundResult {
    double log_partial_sum;
    double log_bound;
    bool holds;
};

// Partial sums of sum_m C^m m^{1+m/2}/m! against the closed bound 16 C^4 e^{2C^2};
// accumulated in log space to dodge overflow.
inline SeriesBoundResult series_bound_check(double C, int m_max) {
    if (!(C > 1.0)) throw domain_error("series_bound_check: C must exceed 1");
    if (m_max < 1) throw domain_error("series_bound_check: m_max must be >= 1");
    double log_sum = -std::numeric_limits<double>::infinity();
    for (int m = 1; m <= m_max; ++m) {
        const double lm = static_cast<double>(m);
        const double lt = lm * std::log(C) + (1.0 + lm / 2.0) * std::log(lm) - std::lgamma(lm + 1.0);
        const double hi = std::max(log_sum, lt), lo = std::min(log_sum, lt);
        log_sum = std::isinf(lo) ? hi : hi + std::log1p(std::exp(lo - hi));
    }
    const double log_bound = std::log(16.0) + 4.0 * std::log(C) + 2.0 * C * C;
    return {log_sum, log_bound, log_sum <= log_bound};
}

} // namespace befpp
