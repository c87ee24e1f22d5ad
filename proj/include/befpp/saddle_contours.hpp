#pragma once

#include <algorithm>
#include <cmath>

#include "befpp/contour.hpp"
#include "befpp/scaling.hpp"

namespace befpp {

// Geometry knobs for the saddle-adapted contour pair, all relative to the
// unscaled saddle location n^{1/3} lambda.
struct SaddleGeometry {
    double delta_frac = 0.05; // contour separation at the saddle
    double r_frac = 1.0;      // vertical half-height of the z~ segment
    double tail_tol = 1e-16;  // e^{t Re z~} bound at the ray endpoints
};

struct ContourPair {
    ContourSpec u_contour; // closed, encircles 0 but not -(a+b)
    ContourSpec z_contour; // open wedge right of the u contour
};

// In the unscaled u variable: a closed u-contour crossing the real axis at -a
// (between the kernel poles at 0 and -(a+b)) and at n^{1/3} lambda - delta,
// oriented counterclockwise; and the z~ wedge: a vertical segment through
// n^{1/3} lambda + delta of half-height r capped by rays at angles +-2pi/3,
// truncated where e^{t Re z~} < tail_tol.
inline ContourPair build_saddle_contours(const ModelParams& p, int64_t n,
                                         const SaddleGeometry& geom = {}) {
    p.validate();
    if (n < 0) throw config_error("build_saddle_contours: n must be >= 0");
    const ScalingConstants sc = scaling_constants(p);
    const double lam_hat = std::cbrt(static_cast<double>(std::max<int64_t>(n, 1))) * sc.lambda;
    const double delta = geom.delta_frac * lam_hat;
    const double r = geom.r_frac * lam_hat;
    if (!(delta > 0.0) || delta >= lam_hat)
        throw config_error("build_saddle_contours: delta must lie in (0, n^{1/3} lambda)");
    if (r <= delta) throw config_error("build_saddle_contours: vertical half-height too small");

    // z~ wedge through lam_hat + delta. The rays are emitted as segment
    // chains whose lengths double away from the wedge, so quadrature nodes
    // concentrate where e^{t Re z~} still carries mass.
    const double x0 = lam_hat + delta;
    double ray_len = 2.0 * (p.t * x0 - std::log(geom.tail_tol)) / p.t + 4.0 / p.t;
    ray_len = std::max(ray_len, 2.0 * r);
    std::vector<double> cuts; // cumulative distances along a ray
    {
        double h = 2.0 / p.t, pos = 0.0;
        while (pos < ray_len) {
            pos = std::min(pos + h, ray_len);
            cuts.push_back(pos);
            h *= 2.0;
        }
    }
    ContourSpec zc;
    {
        const cplx lo(x0, -r), hi(x0, r);
        const cplx dir_dn(std::cos(-2.0 * M_PI / 3.0), std::sin(-2.0 * M_PI / 3.0));
        const cplx dir_up(std::cos(2.0 * M_PI / 3.0), std::sin(2.0 * M_PI / 3.0));
        for (size_t i = cuts.size(); i-- > 1;)
            zc.pieces.push_back(SegmentPiece{lo + cuts[i] * dir_dn, lo + cuts[i - 1] * dir_dn});
        zc.pieces.push_back(SegmentPiece{lo + cuts[0] * dir_dn, lo});
        zc.pieces.push_back(SegmentPiece{lo, hi});
        zc.pieces.push_back(SegmentPiece{hi, hi + cuts[0] * dir_up});
        for (size_t i = 1; i < cuts.size(); ++i)
            zc.pieces.push_back(SegmentPiece{hi + cuts[i - 1] * dir_up, hi + cuts[i] * dir_up});
        zc.closed = false;
        zc.validate();
    }

    // Closed u-contour: wedge legs at +-2pi/3 from lam_hat - delta up to height
    // H < r, horizontal connectors to Re = -a, and a vertical segment crossing
    // the real axis at -a.
    const double v0 = lam_hat - delta;
    const double H = std::min(lam_hat / std::sqrt(3.0), 0.9 * r);
    const double leg_dx = H / std::sqrt(3.0); // legs run at 2pi/3: dx = dy / sqrt(3)
    const double x_top = v0 - leg_dx;
    if (x_top <= -p.a)
        throw config_error("build_saddle_contours: wedge legs reach past the -a crossing");
    ContourSpec uc;
    {
        const cplx right(v0, 0.0);
        const cplx up_end(x_top, H);
        const cplx dn_end(x_top, -H);
        const cplx left_top(-p.a, H);
        const cplx left_bot(-p.a, -H);
        uc.pieces.push_back(SegmentPiece{right, up_end});
        uc.pieces.push_back(SegmentPiece{up_end, left_top});
        uc.pieces.push_back(SegmentPiece{left_top, left_bot});
        uc.pieces.push_back(SegmentPiece{left_bot, dn_end});
        uc.pieces.push_back(SegmentPiece{dn_end, right});
        uc.closed = true;
        uc.validate();
    }
    return {uc, zc};
}

// Small positively oriented circle about 0: radius min((a+b)/4, n^{1/3} lambda
// + delta) with a safety factor, so it contains 0, excludes -(a+b), and stays
// left of the z~ wedge.
inline ContourSpec build_small_circle(const ModelParams& p, int64_t n,
                                      const SaddleGeometry& geom = {}) {
    p.validate();
    const ScalingConstants sc = scaling_constants(p);
    const double lam_hat = std::cbrt(static_cast<double>(std::max<int64_t>(n, 1))) * sc.lambda;
    const double radius = 0.9 * std::min(0.25 * (p.a + p.b), lam_hat + geom.delta_frac * lam_hat);
    return ContourSpec::circle(0.0, radius);
}

} // namespace befpp
