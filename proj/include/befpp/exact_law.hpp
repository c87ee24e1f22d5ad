#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include "befpp/fredholm.hpp"
#include "befpp/quadrature.hpp"
#include "befpp/rng.hpp"
#include "befpp/saddle_contours.hpp"
#include "befpp/scaling.hpp"
#include "befpp/tracy_widom.hpp"

namespace befpp {

enum class ContourPreset { small_circle, saddle };

struct ExactLawRequest {
    ModelParams params;
    int64_t n = 1;
    int64_t m = 1;
    ContourPreset preset = ContourPreset::saddle;
    int u_nodes = 64;          // nodes per u-contour piece
    int z_nodes = 48;          // nodes per z~ piece
    int max_levels = 3;        // grid doublings attempted
    double doubling_tol = 1e-8;
    double imag_tol = 1e-8;
    SaddleGeometry geom;
    double balance_jitter = 0.0; // extra random balance offsets (similarity test)
    uint64_t jitter_seed = 0;
};

struct ExactLawResult {
    double p = 0.0;
    double imag_residual = 0.0;
    double doubling_error = 0.0;
    int levels_used = 0;
    int u_nodes_used = 0;
    int z_nodes_used = 0;
};

namespace detail {

// One Nystrom evaluation of det(I - K_n) at fixed grid sizes. The kernel
//   K_n(u,u') = e^{Phi(z~) - Phi(u)} (z~/u) / ((z~-u)(z~-u')),  Phi(v) = t v + h~_n(v),
// integrated over the z~ wedge, is assembled in log space: the z~ integral is
// reduced by partial fractions to Cauchy transforms of e^{Phi(z~)-S} and the
// u-dependent prefactor stays split as log-magnitude plus phase.
inline cplx exact_law_eval(const SaddleFunctions& fns, const ContourSpec& uc,
                           const ContourSpec& zc, int npp_u, int npp_z, double sep_scale,
                           double jitter = 0.0, uint64_t jitter_seed = 0) {
    const NystromGrid zg = discretize(zc, npp_z);
    const size_t Mz = zg.size();
    std::vector<cplx> phiz(Mz);
    double S = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < Mz; ++i) {
        phiz[i] = fns.phi(zg.nodes[i]);
        S = std::max(S, phiz[i].real());
    }
    const cplx inv2pii = 1.0 / cplx(0.0, 2.0 * M_PI);
    std::vector<cplx> ez(Mz); // e^{Phi(z~)-S} z~ w(z~) / (2 pi i)
    for (size_t i = 0; i < Mz; ++i)
        ez[i] = std::exp(phiz[i] - S) * zg.nodes[i] * zg.weights[i] * inv2pii;

    BalanceFn bal = [&fns, S, jitter, jitter_seed](cplx u) {
        double b = 0.5 * (fns.phi(u).real() + std::log(std::abs(u)) - S);
        if (jitter != 0.0) {
            // deterministic per-node offset; any real offsets must leave the
            // determinant unchanged (similarity invariance)
            uint64_t bits;
            const double re = u.real();
            std::memcpy(&bits, &re, sizeof(bits));
            const uint64_t mixed = splitmix64(bits ^ jitter_seed);
            b += jitter * (static_cast<double>(mixed >> 11) * 0x1.0p-53 - 0.5);
        }
        return b;
    };
    const NystromGrid ug = discretize(uc, npp_u, bal);
    const size_t Mu = ug.size();

    const double ctol = 1e-9 * sep_scale;
    std::vector<cplx> W(Mu), Wp(Mu), phiu(Mu);
    for (size_t j = 0; j < Mu; ++j) {
        const cplx u = ug.nodes[j];
        phiu[j] = fns.phi(u);
        cplx w = 0.0, wp = 0.0;
        for (size_t i = 0; i < Mz; ++i) {
            const cplx d = zg.nodes[i] - u;
            if (std::abs(d) < ctol) {
                std::ostringstream os;
                os << "exact_law: z~ node " << i << " collides with u node " << j
                   << "; regenerate grids";
                throw config_error(os.str());
            }
            w += ez[i] / d;
            wp += ez[i] / (d * d);
        }
        W[j] = w;
        Wp[j] = wp;
    }

    const double near_tol = 1e-3 * sep_scale;
    LogKernel kernel = [&](size_t j, size_t k) -> LogKernelValue {
        cplx inner;
        if (j == k) {
            inner = Wp[j];
        } else {
            const cplx du = ug.nodes[j] - ug.nodes[k];
            if (std::abs(du) < near_tol) {
                cplx acc = 0.0;
                for (size_t i = 0; i < Mz; ++i)
                    acc += ez[i] / ((zg.nodes[i] - ug.nodes[j]) * (zg.nodes[i] - ug.nodes[k]));
                inner = acc;
            } else {
                inner = (W[j] - W[k]) / du;
            }
        }
        const cplx c = inner / ug.nodes[j];
        const double mag = std::abs(c);
        if (mag == 0.0 || !std::isfinite(mag)) return {};
        const double log_mag = S - phiu[j].real() + std::log(mag);
        const cplx phase = (c / mag) * std::exp(cplx(0.0, -phiu[j].imag()));
        return {log_mag, phase};
    };
    return fredholm_det(ug, kernel);
}

} // namespace detail

// P(H_t(n) < m) = det(I - K_n), with the grids doubled until the determinant
// is stable to doubling_tol. For m <= 0 the probability is 0 without any
// computation since H_t(n) >= 0.
inline ExactLawResult prob_height_below(const ExactLawRequest& req) {
    req.params.validate();
    if (req.n < 0) throw domain_error("prob_height_below: n must be >= 0");
    if (req.m <= 0) return {};

    SaddleFunctions fns(req.params, req.n, 0.0);
    fns.set_m(req.m);
    const ScalingConstants sc = scaling_constants(req.params);
    const double sep_scale =
        std::cbrt(static_cast<double>(std::max<int64_t>(req.n, 1))) * sc.lambda;

    const ContourPair pair = build_saddle_contours(req.params, req.n, req.geom);
    ContourSpec uc = pair.u_contour;
    if (req.preset == ContourPreset::small_circle)
        uc = build_small_circle(req.params, req.n, req.geom);
    const ContourSpec& zc = pair.z_contour;

    cplx prev = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int level = 0; level < req.max_levels; ++level) {
        const int npp_u = req.u_nodes << level;
        const int npp_z = req.z_nodes << level;
        cplx det;
        try {
            det = detail::exact_law_eval(fns, uc, zc, npp_u, npp_z, sep_scale,
                                         req.balance_jitter, req.jitter_seed);
        } catch (const range_error& e) {
            if (req.preset == ContourPreset::small_circle)
                throw range_error(std::string(e.what()) +
                                  "; small-circle preset out of double range here, "
                                  "switch to the saddle preset");
            throw;
        }
        if (level > 0) {
            const double err = std::abs(det - prev);
            best_err = std::min(best_err, err);
            if (err < req.doubling_tol) {
                ExactLawResult res;
                res.p = det.real();
                res.imag_residual = std::abs(det.imag());
                res.doubling_error = err;
                res.levels_used = level + 1;
                res.u_nodes_used = npp_u;
                res.z_nodes_used = npp_z;
                if (res.imag_residual > req.imag_tol) {
                    std::ostringstream os;
                    os << "prob_height_below: imaginary residual " << res.imag_residual
                       << " above tolerance " << req.imag_tol << " (n=" << req.n
                       << ", m=" << req.m << ")";
                    throw accuracy_error(os.str());
                }
                return res;
            }
        }
        prev = det;
    }
    std::ostringstream os;
    os << "prob_height_below: doubling error " << best_err << " did not reach tolerance "
       << req.doubling_tol << " within " << req.max_levels << " levels (n=" << req.n
       << ", m=" << req.m << ")";
    throw accuracy_error(os.str());
}

struct TwProbeResult {
    double p_exact;
    double f_target;
};

// Exact finite-n point of the limit theorem: P(H_t(n) < m(n, x)) against
// F_GUE(x), for convergence tables.
inline TwProbeResult tw_limit_probe(const ModelParams& params, int64_t n, double x,
                                    const ExactLawRequest& base = {}) {
    ExactLawRequest req = base;
    req.params = params;
    req.n = n;
    req.m = std::max<int64_t>(1, m_for(params, n, x));
    req.preset = ContourPreset::saddle;
    const ExactLawResult r = prob_height_below(req);
    return {r.p, F_gue(x, TWMethod::airy).F};
}

} // namespace befpp
