#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "psml/metrics.hpp"
#include "psml/rng.hpp"
#include "psml/scenarios/linear_gaussian.hpp"

using namespace psml;

TEST_CASE("psse touches only the selected coordinate", "[metrics]") {
    Vec truth(2);
    truth << 1.0, 9.9;
    Vec est(2);
    est << 1.5, 0.0;
    CHECK(psse_cost(truth, truth, 0) == 0.0);
    CHECK(psse_cost(truth, truth, 1) == 0.0);
    CHECK(psse_cost(est, truth, 0) == Catch::Approx(0.25));

    Vec est2(3);
    est2 << -7.0, 2.0, 123.0;
    Vec truth2(3);
    truth2 << 4.0, 1.0, -55.0;
    CHECK(psse_cost(est2, truth2, 1) == Catch::Approx(1.0));

    CHECK_THROWS_AS(psse_cost(est, truth, 2), std::out_of_range);
    CHECK_THROWS_AS(psse_cost(est, truth2, 0), std::invalid_argument);
}

TEST_CASE("empirical psmse is the trial mean", "[metrics]") {
    std::vector<TrialOutcome> zero{{0.0, 0}, {0.0, 1}};
    CHECK(empirical_psmse(zero) == 0.0);

    std::vector<TrialOutcome> two{{1.0, 0}, {std::sqrt(3.0), 1}};
    CHECK(empirical_psmse(two) == Catch::Approx(2.0));

    // degenerate selection: M = 1 reduces to the ordinary empirical MSE
    std::vector<TrialOutcome> scalar{{0.5, 0}, {-0.5, 0}, {1.0, 0}};
    CHECK(empirical_psmse(scalar) == Catch::Approx((0.25 + 0.25 + 1.0) / 3.0));

    CHECK_THROWS_AS(empirical_psmse(std::vector<TrialOutcome>{}), std::invalid_argument);
}

TEST_CASE("psi-bias aggregates and per-m diagnostics", "[metrics]") {
    std::vector<TrialOutcome> zero{{0.0, 0}, {0.0, 1}};
    CHECK(empirical_psi_bias(zero, 2).aggregate == 0.0);

    std::vector<TrialOutcome> mixed{{0.2, 0}, {-0.2, 1}};
    const auto s = empirical_psi_bias(mixed, 3);
    CHECK(s.aggregate == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.aggregate_abs == Catch::Approx(0.0).margin(1e-15));
    CHECK(s.per_m_bias[0] == Catch::Approx(0.2));
    CHECK(s.per_m_bias[1] == Catch::Approx(-0.2));
    CHECK(s.per_m_count[0] == 1);
    CHECK(s.per_m_count[1] == 1);
    CHECK(s.per_m_count[2] == 0);  // never-selected index reported absent

    CHECK_THROWS_AS(empirical_psi_bias(std::vector<TrialOutcome>{}, 2),
                    std::invalid_argument);
}

TEST_CASE("psmse equals the count-weighted within-m decomposition", "[metrics]") {
    // finite-sample analogue of the total-expectation split
    Rng rng(5);
    std::vector<TrialOutcome> trials;
    const int dim = 4;
    for (int i = 0; i < 257; ++i) {
        trials.push_back({rng.normal() * (1.0 + rng.uniform()), rng.uniform_int(dim)});
    }
    double weighted = 0.0;
    for (int m = 0; m < dim; ++m) {
        double acc = 0.0;
        long count = 0;
        for (const auto& t : trials) {
            if (t.m != m) continue;
            acc += t.error * t.error;
            ++count;
        }
        if (count > 0) {
            weighted += (static_cast<double>(count) / trials.size()) * (acc / count);
        }
    }
    CHECK(empirical_psmse(trials) == Catch::Approx(weighted).epsilon(1e-12));
}

TEST_CASE("information dominance diagnostic", "[metrics]") {
    const auto model = LinearGaussianModel::standard(2, 8, 2);

    SECTION("zero selection information") {
        const double v = information_dominance_check(model, Vec::Zero(2), 0, Vec::Zero(2), 8, 2);
        CHECK(v == 0.0);
    }

    SECTION("rank-one norm identity on an identity-like FIM") {
        // J = 2 I, g = e1  ->  ||J^-1 g g^T|| = 1/2
        std::vector<Mat> hy{Mat::Identity(2, 2), Mat::Identity(2, 2)};
        const LinearGaussianModel unit(Mat::Identity(2, 2), hy, Mat::Identity(2, 2),
                                       Mat::Identity(2, 2), 1, 1);
        Vec g(2);
        g << 1.0, 0.0;
        const double v = information_dominance_check(unit, Vec::Zero(2), 0, g, 1, 1);
        CHECK(v == Catch::Approx(0.5).epsilon(1e-12));
    }

    SECTION("analytic pairwise gradient satisfies the dominance condition") {
        const Vec theta = Vec::Zero(2);
        const Vec g = *model.analytic_pairwise_grad(theta, 0, 1);
        const double v = information_dominance_check(model, theta, 0, g, 8, 2);
        CHECK(v < 1.0);
        CHECK(v > 0.0);
    }
}
