#pragma once

#include "befpp/errors.hpp"

namespace befpp {

// Model parameters (a, b, t): vertical clock rate, horizontal clock rate and
// observation time. Every formula in the toolkit is a function of these three
// positive reals.
struct ModelParams {
    double a = 1.0;
    double b = 1.0;
    double t = 1.0;

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0))
            throw domain_error("ModelParams: a, b, t must all be positive");
    }

    // P(coin = 1): the rightward step is free, the upward clock has rate a.
    double coin_prob() const { return b / (a + b); }
    // Probability that the backbone walk steps north at a fresh vertex.
    double north_prob() const { return a / (a + b); }
    // Parameter of the geometric jump law 1 + Geom(q).
    double geom_q() const { return a / (a + b); }
};

} // namespace befpp
