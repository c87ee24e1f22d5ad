#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "befpp/errors.hpp"

namespace befpp {

// Sorted sample with ECDF evaluation and KS statistics. Ties are handled by
// evaluating the ECDF jump over each distinct value as a block, which keeps
// the statistics correct for integer-valued data.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples) : s_(std::move(samples)) {
        if (s_.empty()) throw domain_error("EmpiricalDistribution: empty sample");
        std::sort(s_.begin(), s_.end());
    }

    // Right-continuous ECDF.
    double ecdf(double x) const {
        const auto it = std::upper_bound(s_.begin(), s_.end(), x);
        return static_cast<double>(it - s_.begin()) / static_cast<double>(s_.size());
    }

    size_t size() const { return s_.size(); }
    const std::vector<double>& sorted() const { return s_; }

    double mean() const {
        double acc = 0.0;
        for (double v : s_) acc += v;
        return acc / static_cast<double>(s_.size());
    }
    double sd() const {
        const double mu = mean();
        double acc = 0.0;
        for (double v : s_) acc += (v - mu) * (v - mu);
        return std::sqrt(acc / static_cast<double>(s_.size() - 1));
    }

private:
    std::vector<double> s_;
};

// sup-norm distance between the ECDF and a reference CDF, both one-sided gaps
// evaluated at the sample points.
inline double ks_one_sample(const EmpiricalDistribution& emp,
                            const std::function<double(double)>& cdf) {
    const auto& s = emp.sorted();
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    size_t i = 0;
    while (i < s.size()) {
        size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        const double F = cdf(s[i]);
        d = std::max(d, F - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(j) / n - F);
        i = j;
    }
    return d;
}

// sup |ECDF - F| for an integer-valued reference law: both CDFs are compared
// right-continuously on the integer range covering the sample, which is where
// the supremum of a difference of step functions with common jump points
// lives. ks_one_sample above assumes a continuous reference CDF.
inline double ks_one_sample_integer(const EmpiricalDistribution& emp,
                                    const std::function<double(int64_t)>& cdf) {
    const auto& s = emp.sorted();
    const int64_t lo = static_cast<int64_t>(std::floor(s.front())) - 1;
    const int64_t hi = static_cast<int64_t>(std::floor(s.back())) + 1;
    double d = 0.0;
    for (int64_t v = lo; v <= hi; ++v)
        d = std::max(d, std::abs(emp.ecdf(static_cast<double>(v)) - cdf(v)));
    return d;
}

// Two-sample KS distance, tie-aware.
inline double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    const auto& xa = a.sorted();
    const auto& xb = b.sorted();
    const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xa.size() || j < xb.size()) {
        double v;
        if (j >= xb.size())
            v = xa[i];
        else if (i >= xa.size())
            v = xb[j];
        else
            v = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == v) ++i;
        while (j < xb.size() && xb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic critical values: c(alpha) sqrt((n+m)/(n m)) and c(alpha)/sqrt(n),
// c(alpha) = sqrt(-ln(alpha/2)/2). Conservative for discrete data.
inline double ks_coefficient(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

inline double ks_two_sample_critical(size_t n, size_t m, double alpha) {
    return ks_coefficient(alpha) *
           std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

inline double ks_one_sample_critical(size_t n, double alpha) {
    return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

} // namespace befpp
