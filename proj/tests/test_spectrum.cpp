#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "psml/scenarios/rules.hpp"
#include "psml/scenarios/spectrum.hpp"
#include "test_util.hpp"

using namespace psml;

TEST_CASE("pairwise gradient at equal variances", "[spectrum]") {
    const int n_x = 20;
    const SpectrumModel model(2, n_x, 4);
    Vec theta(2);
    theta << 1.4, 1.4;  // zeta = 1, F(d, d) median
    const Vec g = *model.analytic_pairwise_grad(theta, 0, 1);
    const double scale = math::f_pdf(1.0, n_x, n_x) / (theta[0] * 0.5);
    CHECK(g[1] == Catch::Approx(scale));
    CHECK(g[0] == Catch::Approx(-scale));  // direction e_m2 - zeta e_m with zeta = 1
}

TEST_CASE("pairwise gradient matches finite differences", "[spectrum]") {
    const SpectrumModel model(2, 20, 4);
    Vec theta(2);
    theta << 1.0, 1.2;
    const Vec got = *model.analytic_pairwise_grad(theta, 0, 1);
    const Vec want = test_util::fd_gradient(
        [&](const Vec& t) { return std::log(*model.analytic_pairwise_prob(t, 0, 1)); }, theta);
    CHECK((got - want).norm() < 1e-5 * std::max(1.0, want.norm()));

    Rng rng(113);
    const SpectrumModel model3(3, 14, 4);
    for (int rep = 0; rep < 10; ++rep) {
        Vec t(3);
        for (int k = 0; k < 3; ++k) t[k] = 0.5 + 2.0 * rng.uniform();
        const int m = rep % 3;
        const int m2 = (m + 1 + rep % 2) % 3;
        const Vec g = *model3.analytic_pairwise_grad(t, m, m2);
        const Vec fd = test_util::fd_gradient(
            [&](const Vec& u) { return std::log(*model3.analytic_pairwise_prob(u, m, m2)); },
            t);
        REQUIRE((g - fd).norm() < 1e-5 * std::max(1.0, fd.norm()));
    }
}

TEST_CASE("pairwise probability matches the Monte Carlo energy ordering", "[spectrum]") {
    const int n_x = 12;
    const SpectrumModel model(2, n_x, 2);
    Vec theta(2);
    theta << 1.0, 1.3;
    Rng rng(127);
    const int trials = 100000;
    int wins = 0;
    for (int t = 0; t < trials; ++t) {
        const Vec est = model.ml_x(model.sample_first_stage(theta, n_x, rng));
        wins += (est[0] <= est[1]);
    }
    const double freq = static_cast<double>(wins) / trials;
    CHECK(std::fabs(freq - *model.analytic_pairwise_prob(theta, 0, 1)) < 0.005);
}

TEST_CASE("information matrix entries", "[spectrum]") {
    const SpectrumModel model(2, 70, 30);
    Vec theta(2);
    theta << 1.0, 2.0;
    const Mat J = model.fim_joint(theta, 0, 70, 30);
    CHECK(J(0, 0) == Catch::Approx(100.0 / 2.0));  // N / (2 theta^2) with theta = 1
    CHECK(J(1, 1) == Catch::Approx(70.0 / 8.0));
    CHECK(J(0, 1) == 0.0);
}

TEST_CASE("ml estimators use mean energies", "[spectrum]") {
    const SpectrumModel model(2, 2, 2);
    Vec x(4);
    x << 1.0, 2.0, 3.0, 0.0;  // channel 0: {1, 3}, channel 1: {2, 0}
    const Vec mlx = model.ml_x(x);
    CHECK(mlx[0] == Catch::Approx(5.0));
    CHECK(mlx[1] == Catch::Approx(2.0));

    Vec y(2);
    y << 2.0, 2.0;
    const auto split = model.ml_y(y, 1);
    CHECK(split.values[1] == Catch::Approx(4.0));
    CHECK(split.identified[0] == 0);

    const Vec joint = model.ml_joint(x, y, 1);
    CHECK(joint[1] == Catch::Approx((4.0 + 8.0) / 4.0));
    CHECK(joint[0] == Catch::Approx(5.0));
}

TEST_CASE("joint ML matches numeric maximization", "[spectrum]") {
    const SpectrumModel model(3, 10, 5);
    Vec theta(3);
    theta << 1.0, 1.5, 0.8;
    Rng rng(131);
    MlOrderRule rule(model, true);
    for (int rep = 0; rep < 5; ++rep) {
        Rng r = rng.split(static_cast<std::uint64_t>(rep));
        const TwoStageSample s = draw_two_stage(model, rule, theta, 10, 5, r);
        const Vec closed = model.ml_joint(s.x, s.y, s.m);
        const Vec numeric = test_util::maximize_coordinate_descent(
            [&](const Vec& t) {
                return model.loglik_joint(s.x, s.y, s.m, model.project(t));
            },
            Vec::Ones(3), 3.0, 24, SpectrumModel::kDomainEps);
        REQUIRE((closed - numeric).norm() < 1e-6);
    }
}

TEST_CASE("minimum-energy selection with deterministic ties", "[spectrum]") {
    const SpectrumModel model(3, 1, 1);
    MlOrderRule rule(model, true);
    Vec x(3);
    x << 2.0, 1.0, -1.0;  // energies (4, 1, 1): tie between 1 and 2
    CHECK(rule.select(x) == 1);
    CHECK(rule.second_best(x) == 2);
}

TEST_CASE("score solve handles both gradient signs and flags no-root cases", "[spectrum]") {
    const SpectrumModel model(2, 10, 5);
    Rng rng(137);
    MlOrderRule rule(model, true);
    Vec theta(2);
    theta << 1.0, 1.2;
    const TwoStageSample s = draw_two_stage(model, rule, theta, 10, 5, rng);
    for (double gm : {0.8, -0.2, 0.0}) {
        Vec g(2);
        g << gm, -gm;
        const Vec solved = *model.solve_score(s.x, s.y, s.m, g);
        const Vec resid = model.grad_loglik_joint(s.x, s.y, s.m, solved) - g;
        REQUIRE(resid.norm() < 1e-8 * (1.0 + g.norm()));
    }
    // score range is bounded below: a huge negative gradient has no root
    Vec bad(2);
    bad << -1e9, 0.0;
    CHECK_THROWS_AS(model.solve_score(s.x, s.y, s.m, bad), std::runtime_error);
}

TEST_CASE("joint density integrates to one (importance-sampled)", "[spectrum]") {
    const SpectrumModel model(1, 1, 1);
    Vec theta(1), theta_prop(1);
    theta << 0.8;
    theta_prop << 1.1;
    Rng rng(139);
    ConstantRule rule(0);
    const int draws = 200000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        Rng r = rng.split(static_cast<std::uint64_t>(i));
        const TwoStageSample s = draw_two_stage(model, rule, theta_prop, 1, 1, r);
        const double w = std::exp(model.loglik_joint(s.x, s.y, 0, theta)
                                  - model.loglik_joint(s.x, s.y, 0, theta_prop));
        acc += w;
        acc2 += w * w;
    }
    const double mean = acc / draws;
    const double se = std::sqrt((acc2 / draws - mean * mean) / draws);
    CHECK(std::fabs(mean - 1.0) < 4.0 * se);
}
