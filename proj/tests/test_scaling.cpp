#include <catch_amalgamated.hpp>

#include <cmath>

#include "befpp/quadrature.hpp"
#include "befpp/rng.hpp"
#include "befpp/saddle_contours.hpp"
#include "befpp/scaling.hpp"

using namespace befpp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("scaling constants closed forms at a=b=t=1") {
    const ScalingConstants sc = scaling_constants({1.0, 1.0, 1.0});
    CHECK_THAT(sc.lambda, WithinRel(1.0, 1e-14));
    CHECK_THAT(sc.d, WithinRel(3.0, 1e-14));
    CHECK_THAT(sc.sigma, WithinRel(std::cbrt(3.0), 1e-14));
}

TEST_CASE("third-derivative identity f1'''(lambda) = 3a(a+b)/lambda^5 = 2(b sigma/lambda^2)^3") {
    SaddleFunctions f({1.0, 1.0, 1.0}, 1, 0.0);
    const ScalingConstants sc = f.sc;
    const double via_f = std::real(f.f1ppp(cplx(sc.lambda, 0.0)));
    CHECK_THAT(via_f, WithinRel(6.0, 1e-12));
    const double via_sigma = 2.0 * std::pow(sc.sigma / (sc.lambda * sc.lambda), 3.0);
    CHECK_THAT(via_sigma, WithinRel(6.0, 1e-12));
}

TEST_CASE("cube-root homogeneity: t -> 8t halves lambda and doubles d") {
    const ScalingConstants s1 = scaling_constants({1.3, 0.7, 0.9});
    const ScalingConstants s8 = scaling_constants({1.3, 0.7, 8.0 * 0.9});
    CHECK_THAT(s8.lambda, WithinRel(0.5 * s1.lambda, 1e-13));
    CHECK_THAT(s8.d, WithinRel(2.0 * s1.d, 1e-13));
}

TEST_CASE("large-time functions at a=b=theta=1") {
    const LargeTimeFunctions f = large_time_functions({1.0, 1.0, 1.0}, 1.0);
    CHECK_THAT(f.kappa, WithinRel(27.0 / 5.0, 1e-13));
    CHECK_THAT(f.tau, WithinRel(0.4, 1e-13));
}

TEST_CASE("tau: defining three-term expression equals the simplified form") {
    RngStream rng(11, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p{0.1 + 9.9 * rng.uniform01(), 0.1 + 9.9 * rng.uniform01(),
                            0.1 + 9.9 * rng.uniform01()};
        const double theta = 0.1 + 9.9 * rng.uniform01();
        CHECK_THAT(tau_defining(p, theta), WithinRel(tau_of(p, theta), 1e-12));
    }
}

TEST_CASE("kappa decreases in theta with limit a/b") {
    const ModelParams p{1.0, 1.0, 1.0};
    double prev = kappa_of(p, 0.05);
    for (double theta = 0.1; theta < 50.0; theta += 0.17) {
        const double k = kappa_of(p, theta);
        CHECK(k < prev);
        prev = k;
    }
    CHECK_THAT(kappa_of(p, 1e7), WithinAbs(1.0, 1e-6));
    CHECK(kappa_prime_of(p, 1.0) < 0.0);
}

TEST_CASE("rho_tilde matches numerical differentiation of kappa and tau") {
    const ModelParams p{0.8, 1.7, 2.2};
    for (double theta : {0.5, 1.0, 3.0}) {
        const LargeTimeFunctions f = large_time_functions(p, theta);
        const double h = 1e-6 * theta;
        const double kn = (kappa_of(p, theta + h) - kappa_of(p, theta - h)) / (2.0 * h);
        const double tn = (tau_of(p, theta + h) - tau_of(p, theta - h)) / (2.0 * h);
        CHECK_THAT(f.rho_tilde, WithinRel(kn / tn * f.rho, 1e-7));
    }
}

TEST_CASE("theta_for and the time-consistency O(n^{-1/3}) bound") {
    const ModelParams p{1.0, 1.0, 1.0};
    CHECK_THAT(theta_for(p, 1), WithinRel(1.0, 1e-14));
    CHECK_THAT(theta_for(p, 1000), WithinRel(10.0, 1e-14));

    // |tau(theta(n)) n - t| <= K n^{-1/3}, K stable under grid extension
    double k_small = 0.0, k_full = 0.0;
    for (int e = 1; e <= 6; ++e) {
        const int64_t n = static_cast<int64_t>(std::pow(10.0, e));
        const double theta = theta_for(p, n);
        const double err = std::abs(tau_of(p, theta) * static_cast<double>(n) - p.t);
        const double scaled = err * std::cbrt(static_cast<double>(n));
        if (e <= 5) k_small = std::max(k_small, scaled);
        k_full = std::max(k_full, scaled);
    }
    CHECK(k_full < 10.0);
    CHECK(k_full <= k_small * 1.05 + 1e-12);
}

TEST_CASE("kappa(theta(n)) n approaches (a/b) n + d n^{2/3} at o(n^{2/3})") {
    const ModelParams p{1.0, 2.0, 1.5};
    const ScalingConstants sc = scaling_constants(p);
    double prev_ratio = 1e300;
    for (int e = 2; e <= 6; ++e) {
        const double n = std::pow(10.0, e);
        const double lhs = kappa_of(p, theta_for(p, static_cast<int64_t>(n))) * n;
        const double centered = lhs - (p.a / p.b) * n - sc.d * std::pow(n, 2.0 / 3.0);
        const double ratio = std::abs(centered) / std::pow(n, 2.0 / 3.0);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 0.02); // remainder is ~1.5 n^{1/3} for these params
}

TEST_CASE("m_for examples") {
    const ModelParams p{1.0, 1.0, 1.0};
    CHECK(m_for(p, 1, 0.0) == 4);
    CHECK(m_for(p, 64, 1.0) == 121); // 64 + 48 + 3^{1/3} 64^{4/9} = 121.1577...
    for (int64_t n : {int64_t{2}, int64_t{17}, int64_t{400}}) {
        const ScalingConstants sc = scaling_constants(p);
        const double nn = static_cast<double>(n);
        CHECK(m_for(p, n, 0.0) ==
              static_cast<int64_t>(std::floor(nn + sc.d * std::pow(nn, 2.0 / 3.0))));
    }
}

TEST_CASE("chi_from_height centering and inverse consistency") {
    const ModelParams p{1.0, 1.0, 1.0};
    CHECK_THAT(chi_from_height(p, 1, 4), WithinAbs(0.0, 1e-14));
    const ScalingConstants sc = scaling_constants(p);
    RngStream rng(3, 0, 0);
    for (int i = 0; i < 50; ++i) {
        const int64_t n = 1 + static_cast<int64_t>(rng.below(2000));
        const double x = -4.0 + 8.0 * rng.uniform01();
        const double chi = chi_from_height(p, n, m_for(p, n, x));
        const double gap = 1.0 / (sc.sigma * std::pow(static_cast<double>(n), 4.0 / 9.0));
        CHECK(chi <= x + 1e-12);
        CHECK(chi > x - gap - 1e-12);
    }
}

TEST_CASE("f1 saddle identities over random parameter draws") {
    RngStream rng(17, 0, 0);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p{0.1 + 9.9 * rng.uniform01(), 0.1 + 9.9 * rng.uniform01(),
                            0.1 + 9.9 * rng.uniform01()};
        SaddleFunctions f(p, 1, 0.0);
        const double lam = f.sc.lambda;
        const cplx z(lam, 0.0);
        const double scale3 = std::abs(f.f1ppp(z));
        CHECK(std::abs(f.f1p(z)) <= 1e-12 * scale3 * lam * lam);
        CHECK(std::abs(f.f1pp(z)) <= 1e-12 * scale3 * lam);
        CHECK_THAT(std::real(f.f1ppp(z)),
                   WithinRel(3.0 * p.a * (p.a + p.b) / std::pow(lam, 5.0), 1e-12));
        CHECK_THAT(std::real(f.f1ppp(z)),
                   WithinRel(2.0 * std::pow(p.b * f.sc.sigma / (lam * lam), 3.0), 1e-12));
    }
}

TEST_CASE("saddle_eval values at a=b=t=1") {
    SaddleFunctions f({1.0, 1.0, 1.0}, 1, 0.0);
    const SaddleEval e = saddle_eval(f, cplx(1.0, 0.0));
    CHECK_THAT(std::real(e.f1), WithinRel(3.0, 1e-13)); // 1 - 1 + 3
    CHECK_THAT(std::abs(e.f1d1), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(e.f1d2), WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(saddle_eval(f, cplx(0.0, 0.0)), domain_error);
    CHECK_THROWS_AS(saddle_eval(f, cplx(-1.0, 0.0)), domain_error);
    CHECK_THROWS_AS(saddle_eval(f, cplx(-2.0, 0.0)), domain_error);
}

TEST_CASE("r_n identity holds by construction and r_n(lambda) stays bounded") {
    const ModelParams p{1.0, 1.0, 1.0};
    for (double nd : {1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9}) {
        const int64_t n = static_cast<int64_t>(nd);
        SaddleFunctions f(p, n, 0.7);
        const cplx z(f.sc.lambda, 0.3);
        const double n13 = std::cbrt(nd), n19 = std::cbrt(n13);
        const cplx expect = f.h_n(z) +
                            n13 * (p.a * (p.a + p.b) / (2.0 * z * z) - p.b * f.sc.d / z) -
                            n19 * p.b * f.sc.sigma * 0.7 / z;
        CHECK(std::abs(f.r_n(z) - expect) < 1e-10 * (1.0 + std::abs(expect)));
        // regression bound frozen from the first run (max observed 2.574,
        // decreasing in n)
        CHECK(std::abs(f.r_n(cplx(f.sc.lambda, 0.0))) < 3.0);
    }
}

TEST_CASE("steep descent derivative: closed form vs finite differences") {
    const ModelParams p{1.0, 1.0, 1.0};
    std::vector<double> grid;
    for (double y = -3.0; y <= 3.0; y += 0.37) grid.push_back(y == 0.0 ? 0.05 : y);
    const auto rows = steep_descent_check(p, grid);
    for (const auto& r : rows) {
        CHECK_THAT(r.numeric_deriv, WithinAbs(r.analytic_deriv, 1e-5));
        if (r.y > 0.0) CHECK(r.analytic_deriv < 0.0);
        if (r.y < 0.0) CHECK(r.analytic_deriv > 0.0);
    }
    // y = lambda at (1,1,1): -4 a(a+b) y^3/(lambda^2+y^2)^3 = -1
    const auto one = steep_descent_check(p, {1.0});
    CHECK_THAT(one[0].analytic_deriv, WithinRel(-1.0, 1e-13));
    // antisymmetry
    const auto pm = steep_descent_check(p, {0.8, -0.8});
    CHECK_THAT(pm[0].analytic_deriv, WithinRel(-pm[1].analytic_deriv, 1e-13));
    CHECK_THROWS_AS(steep_descent_check(p, {0.0}), domain_error);
}

TEST_CASE("p-diagnostic: Re[-f1(+-ip)] equals Re[-f1(lambda)]") {
    for (const ModelParams& p :
         {ModelParams{1.0, 1.0, 1.0}, ModelParams{0.4, 2.3, 0.8}, ModelParams{5.0, 0.2, 3.0}}) {
        SaddleFunctions f(p, 1, 0.0);
        const double pc = p_crossing(p);
        const double at_saddle = -f1_at_lambda(p);
        CHECK_THAT(std::real(-f.f1(cplx(0.0, pc))), WithinRel(at_saddle, 1e-12));
        CHECK_THAT(std::real(-f.f1(cplx(0.0, -pc))), WithinRel(at_saddle, 1e-12));
        CHECK_THAT(f1_at_lambda(p),
                   WithinRel(std::real(f.f1(cplx(f.sc.lambda, 0.0))), 1e-12));
    }
}

TEST_CASE("factorial series majorant bound") {
    const SeriesBoundResult r2 = series_bound_check(2.0, 200);
    CHECK(r2.holds);
    CHECK(r2.log_partial_sum <= std::log(16.0 * 16.0) + 8.0);
    const SeriesBoundResult r5 = series_bound_check(5.0, 400);
    CHECK(r5.holds);
    // partial sums nondecreasing in m_max
    double prev = -1e300;
    for (int mm : {10, 50, 100, 200}) {
        const double s = series_bound_check(3.0, mm).log_partial_sum;
        CHECK(s >= prev);
        prev = s;
    }
    CHECK_THROWS_AS(series_bound_check(0.5, 10), domain_error);
}

TEST_CASE("saddle contour geometry") {
    const ModelParams p{1.0, 1.0, 1.0};
    for (int64_t n : {int64_t{1}, int64_t{5}, int64_t{50}}) {
        const ContourPair pair = build_saddle_contours(p, n);
        pair.u_contour.validate();
        pair.z_contour.validate();
        const double lam_hat = std::cbrt(static_cast<double>(n));
        // crossings: -a on the left, n^{1/3} lambda - delta on the right
        const cplx right = piece_start(pair.u_contour.pieces.front());
        CHECK_THAT(right.real(), WithinRel(lam_hat * 0.95, 1e-12));
        CHECK_THAT(right.imag(), WithinAbs(0.0, 1e-14));
        bool has_left_crossing = false;
        for (const auto& piece : pair.u_contour.pieces) {
            if (std::holds_alternative<SegmentPiece>(piece)) {
                const auto& s = std::get<SegmentPiece>(piece);
                if (std::abs(s.z0.real() + p.a) < 1e-12 && std::abs(s.z1.real() + p.a) < 1e-12 &&
                    s.z0.imag() > 0.0 && s.z1.imag() < 0.0)
                    has_left_crossing = true;
            }
        }
        CHECK(has_left_crossing);
    }
    SaddleGeometry bad;
    bad.delta_frac = 1.5;
    CHECK_THROWS_AS(build_saddle_contours(p, 5, bad), config_error);
}

TEST_CASE("u-contour winding numbers: +1 about 0, 0 about -(a+b)") {
    for (const ModelParams& p :
         {ModelParams{1.0, 1.0, 1.0}, ModelParams{0.5, 2.0, 0.7}, ModelParams{3.0, 0.3, 2.0}}) {
        for (int64_t n : {int64_t{1}, int64_t{30}}) {
            const ContourPair pair = build_saddle_contours(p, n);
            const NystromGrid g = discretize(pair.u_contour, 160);
            auto winding = [&](cplx pole) {
                cplx acc = 0.0;
                for (size_t i = 0; i < g.size(); ++i)
                    acc += g.weights[i] / (g.nodes[i] - pole);
                return acc / cplx(0.0, 2.0 * M_PI);
            };
            // -(a+b) can sit close to the left segment; the check is the
            // topological 0-vs-1 distinction, so 1e-6 is ample
            CHECK_THAT(std::abs(winding(cplx(0.0, 0.0)) - 1.0), WithinAbs(0.0, 1e-6));
            CHECK_THAT(std::abs(winding(cplx(-p.a - p.b, 0.0))), WithinAbs(0.0, 1e-6));
        }
    }
}
