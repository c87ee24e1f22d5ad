#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "befpp/contour.hpp"
#include "befpp/errors.hpp"

namespace befpp {

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_cached(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::pair<std::vector<double>, std::vector<double>> nw;
        gauss_legendre(n, nw.first, nw.second);
        it = cache.emplace(n, std::move(nw)).first;
    }
    return it->second;
}

using BalanceFn = std::function<double(cplx)>;

// Quadrature nodes and complex dz-weights on a contour, plus per-node real
// log-scale factors used to balance kernels with large dynamic range. The
// weights satisfy sum(w) = integral of 1 dz over the spec.
struct NystromGrid {
    ContourSpec spec;
    int nodes_per_piece = 0;
    std::vector<cplx> nodes;
    std::vector<cplx> weights;
    std::vector<double> balance;
    BalanceFn balance_fn; // kept so refined grids rebalance consistently

    size_t size() const { return nodes.size(); }
};

namespace detail {

// Composite Gauss-Legendre on a straight piece from z0 to z1.
inline void gl_on_segment(cplx z0, cplx z1, int n_nodes, std::vector<cplx>& nodes,
                          std::vector<cplx>& weights) {
    const int per_panel = 16;
    const int panels = std::max(1, (n_nodes + per_panel - 1) / per_panel);
    const int npp = std::max(2, (n_nodes + panels - 1) / panels);
    const auto& [gx, gw] = gauss_legendre_cached(npp);
    const cplx dz = (z1 - z0) / static_cast<double>(panels);
    for (int p = 0; p < panels; ++p) {
        const cplx a = z0 + static_cast<double>(p) * dz;
        for (int k = 0; k < npp; ++k) {
            nodes.push_back(a + 0.5 * (gx[k] + 1.0) * dz);
            weights.push_back(0.5 * gw[k] * dz);
        }
    }
}

} // namespace detail

// Trapezoid rule on full circles (spectrally accurate for analytic
// integrands), composite Gauss-Legendre panels elsewhere.
inline NystromGrid discretize(const ContourSpec& spec, int nodes_per_piece,
                              BalanceFn balance_fn = {}) {
    spec.validate();
    if (nodes_per_piece < 2) throw config_error("discretize: need at least 2 nodes per piece");
    NystromGrid g;
    g.spec = spec;
    g.nodes_per_piece = nodes_per_piece;
    g.balance_fn = balance_fn;
    for (const auto& piece : spec.pieces) {
        if (std::holds_alternative<CirclePiece>(piece)) {
            const auto& c = std::get<CirclePiece>(piece);
            if (c.full()) {
                const int n = nodes_per_piece;
                const double span = c.theta1 - c.theta0;
                const double dth = span / n;
                for (int k = 0; k < n; ++k) {
                    const double th = c.theta0 + (k + 0.5) * dth;
                    const cplx e(std::cos(th), std::sin(th));
                    g.nodes.push_back(c.center + c.radius * e);
                    g.weights.push_back(cplx(0.0, 1.0) * c.radius * e * dth);
                }
            } else {
                const int per_panel = 16;
                const int panels = std::max(1, (nodes_per_piece + per_panel - 1) / per_panel);
                const int npp = std::max(2, (nodes_per_piece + panels - 1) / panels);
                const auto& [gx, gw] = gauss_legendre_cached(npp);
                const double span = (c.theta1 - c.theta0) / panels;
                for (int p = 0; p < panels; ++p) {
                    const double th0 = c.theta0 + p * span;
                    for (int k = 0; k < npp; ++k) {
                        const double th = th0 + 0.5 * (gx[k] + 1.0) * span;
                        const cplx e(std::cos(th), std::sin(th));
                        g.nodes.push_back(c.center + c.radius * e);
                        g.weights.push_back(cplx(0.0, 1.0) * c.radius * e * 0.5 * gw[k] * span);
                    }
                }
            }
        } else if (std::holds_alternative<SegmentPiece>(piece)) {
            const auto& s = std::get<SegmentPiece>(piece);
            detail::gl_on_segment(s.z0, s.z1, nodes_per_piece, g.nodes, g.weights);
        } else {
            const auto& r = std::get<RayPiece>(piece);
            detail::gl_on_segment(r.start(), r.end(), nodes_per_piece, g.nodes, g.weights);
        }
    }
    g.balance.assign(g.nodes.size(), 0.0);
    if (balance_fn)
        for (size_t i = 0; i < g.nodes.size(); ++i) g.balance[i] = balance_fn(g.nodes[i]);
    return g;
}

inline NystromGrid refine(const NystromGrid& g) {
    return discretize(g.spec, 2 * g.nodes_per_piece, g.balance_fn);
}

} // namespace befpp
