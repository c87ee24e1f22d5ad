#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "befpp/quadrature.hpp"

namespace befpp {

// Kernel values arrive split into a real log-magnitude and a unit phase so
// balancing can happen before exponentiation. A log magnitude of -inf denotes
// an exact zero.
struct LogKernelValue {
    double log_mag = -std::numeric_limits<double>::infinity();
    cplx phase = 1.0;

    static LogKernelValue from_value(cplx v) {
        const double m = std::abs(v);
        if (m == 0.0) return {};
        return {std::log(m), v / m};
    }
};

using LogKernel = std::function<LogKernelValue(size_t, size_t)>;

// det(I - K) on the grid, with the 1/(2 pi i) of the contour measure folded
// into the weights and the similarity transform D K D^{-1}, D = diag(e^balance),
// applied entrywise. The similarity leaves the determinant unchanged while
// keeping entries representable for kernels spanning hundreds of orders of
// magnitude.
inline cplx fredholm_det(const NystromGrid& grid, const LogKernel& kernel) {
    const size_t n = grid.size();
    if (n == 0) throw config_error("fredholm_det: empty grid");
    const cplx inv2pii = 1.0 / cplx(0.0, 2.0 * M_PI);
    Eigen::MatrixXcd M(n, n);
    for (size_t j = 0; j < n; ++j) {
        for (size_t k = 0; k < n; ++k) {
            const LogKernelValue kv = kernel(j, k);
            cplx val = 0.0;
            if (std::isfinite(kv.log_mag)) {
                const double e = kv.log_mag + grid.balance[j] - grid.balance[k];
                if (e > 700.0) {
                    std::ostringstream os;
                    os << "fredholm_det: balanced entry overflow at node pair (" << j << ", "
                       << k << "), exponent " << e;
                    throw range_error(os.str());
                }
                val = std::exp(e) * kv.phase * grid.weights[k] * inv2pii;
                if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
                    std::ostringstream os;
                    os << "fredholm_det: non-finite entry at node pair (" << j << ", " << k << ")";
                    throw range_error(os.str());
                }
            }
            M(j, k) = (j == k ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) - val;
        }
    }
    const cplx det = Eigen::PartialPivLU<Eigen::MatrixXcd>(M).determinant();
    if (!std::isfinite(det.real()) || !std::isfinite(det.imag()))
        throw range_error("fredholm_det: determinant left the double range after balancing");
    return det;
}

// Convenience overload for kernels given as plain complex values.
inline cplx fredholm_det(const NystromGrid& grid,
                         const std::function<cplx(cplx, cplx)>& kernel) {
    return fredholm_det(grid, LogKernel([&](size_t j, size_t k) {
                            return LogKernelValue::from_value(kernel(grid.nodes[j], grid.nodes[k]));
                        }));
}

struct FredholmResult {
    cplx value;
    double doubling_error;
};

// Evaluates det(I - K) on the grid and once more on the node-doubled grid;
// doubling_error = |difference|. Suitable when the kernel is a pure function
// of the node values.
inline FredholmResult fredholm_det_refined(const NystromGrid& grid,
                                           const std::function<cplx(cplx, cplx)>& kernel) {
    const cplx coarse = fredholm_det(grid, kernel);
    const cplx fine = fredholm_det(refine(grid), kernel);
    return {fine, std::abs(fine - coarse)};
}

} // namespace befpp
