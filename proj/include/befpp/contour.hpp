#pragma once

#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "befpp/errors.hpp"

namespace befpp {

using cplx = std::complex<double>;

// Circular arc from angle theta0 to theta1 (counterclockwise when theta1 >
// theta0); a full circle when the span is 2 pi.
struct CirclePiece {
    cplx center;
    double radius;
    double theta0 = 0.0;
    double theta1 = 2.0 * M_PI;

    bool full() const { return std::abs(std::abs(theta1 - theta0) - 2.0 * M_PI) < 1e-14; }
    cplx point(double s) const { // s in [0,1]
        const double th = theta0 + s * (theta1 - theta0);
        return center + radius * cplx(std::cos(th), std::sin(th));
    }
    cplx start() const { return point(0.0); }
    cplx end() const { return point(1.0); }
};

struct SegmentPiece {
    cplx z0, z1;
    cplx start() const { return z0; }
    cplx end() const { return z1; }
};

// Truncated ray: origin + s * length * e^{i angle}, s in [0,1].
struct RayPiece {
    cplx origin;
    double angle;
    double length;
    cplx dir() const { return cplx(std::cos(angle), std::sin(angle)); }
    cplx start() const { return origin; }
    cplx end() const { return origin + length * dir(); }
};

using ContourPiece = std::variant<CirclePiece, SegmentPiece, RayPiece>;

inline cplx piece_start(const ContourPiece& p) {
    return std::visit([](const auto& q) { return q.start(); }, p);
}
inline cplx piece_end(const ContourPiece& p) {
    return std::visit([](const auto& q) { return q.end(); }, p);
}

// Piecewise-parametrized oriented contour. Consecutive pieces must share
// endpoints; closed contours return to their starting point.
struct ContourSpec {
    std::vector<ContourPiece> pieces;
    bool closed = false;

    void validate() const {
        if (pieces.empty()) throw config_error("ContourSpec: no pieces");
        const double scale = 1.0 + std::abs(piece_start(pieces.front()));
        for (size_t i = 0; i + 1 < pieces.size(); ++i) {
            if (std::abs(piece_end(pieces[i]) - piece_start(pieces[i + 1])) > 1e-9 * scale)
                throw config_error("ContourSpec: pieces do not share endpoints");
        }
        if (closed && pieces.size() >= 1) {
            const bool lone_full_circle =
                pieces.size() == 1 && std::holds_alternative<CirclePiece>(pieces[0]) &&
                std::get<CirclePiece>(pieces[0]).full();
            if (!lone_full_circle &&
                std::abs(piece_end(pieces.back()) - piece_start(pieces.front())) > 1e-9 * scale)
                throw config_error("ContourSpec: closed contour does not return to start");
        }
    }

    ContourSpec reversed() const {
        ContourSpec r;
        r.closed = closed;
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
            if (std::holds_alternative<CirclePiece>(*it)) {
                CirclePiece c = std::get<CirclePiece>(*it);
                std::swap(c.theta0, c.theta1);
                r.pieces.push_back(c);
            } else if (std::holds_alternative<SegmentPiece>(*it)) {
                SegmentPiece s = std::get<SegmentPiece>(*it);
                std::swap(s.z0, s.z1);
                r.pieces.push_back(s);
            } else {
                const RayPiece& ray = std::get<RayPiece>(*it);
                // A reversed ray is the segment from its far end back to its origin.
                r.pieces.push_back(SegmentPiece{ray.end(), ray.start()});
            }
        }
        return r;
    }

    static ContourSpec circle(cplx center, double radius) {
        ContourSpec c;
        c.pieces.push_back(CirclePiece{center, radius});
        c.closed = true;
        return c;
    }
};

} // namespace befpp
