#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "psml/estimators.hpp"
#include "psml/scenarios/knn.hpp"
#include "psml/scenarios/spectrum.hpp"

using namespace psml;

namespace {

// n_x = 1 so the query feature equals the squared observation per channel.
Vec x_for_energy(const Vec& energy) {
    return energy.cwiseSqrt();
}

}  // namespace

TEST_CASE("nearest neighbor returns the label of an exact match", "[knn]") {
    const SpectrumModel model(2, 1, 1);
    Mat refs(3, 2);
    refs << 1.0, 4.0, 4.0, 1.0, 2.0, 2.0;
    const KnnSelectionRule rule(model, refs, {0, 1, 0}, 1);
    CHECK(rule.select(x_for_energy(refs.row(1).transpose())) == 1);
    CHECK(rule.select(x_for_energy(refs.row(0).transpose())) == 0);
}

TEST_CASE("majority vote among the k nearest", "[knn]") {
    const SpectrumModel model(2, 1, 1);
    Mat refs(4, 2);
    refs << 1.0, 1.0, 1.1, 1.0, 1.0, 1.1, 9.0, 9.0;
    // three nearest neighbors carry labels {1, 1, 0}: majority 1
    const KnnSelectionRule rule(model, refs, {1, 1, 0, 0}, 3);
    Vec q(2);
    q << 1.05, 1.0;
    CHECK(rule.select(x_for_energy(q)) == 1);
}

TEST_CASE("vote ties break toward the smallest label", "[knn]") {
    const SpectrumModel model(2, 1, 1);
    Mat refs(2, 2);
    refs << 1.0, 1.0, 1.2, 1.0;
    const KnnSelectionRule rule(model, refs, {1, 0}, 2);
    Vec q(2);
    q << 1.1, 1.0;
    CHECK(rule.select(x_for_energy(q)) == 0);
}

TEST_CASE("construction validates the reference set", "[knn]") {
    const SpectrumModel model(2, 1, 1);
    Mat refs(2, 2);
    refs << 1.0, 1.0, 2.0, 2.0;
    CHECK_THROWS_AS(KnnSelectionRule(model, Mat(0, 2), {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(KnnSelectionRule(model, refs, {0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(KnnSelectionRule(model, refs, {0, 1}, 3), std::invalid_argument);
    CHECK_THROWS_AS(KnnSelectionRule(model, refs, {0, 1}, 0), std::invalid_argument);
}

TEST_CASE("built rule is deterministic and tracks the energy detector", "[knn]") {
    const int n_x = 40;
    const SpectrumModel model(4, n_x, 10);
    Vec theta(4);
    theta << 0.9, 0.95, 0.95, 1.0;
    const auto rule = KnnSelectionRule::build(model, theta, 300, 5, Rng(41));

    Rng rng(43);
    int agree = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        Rng r = rng.split(static_cast<std::uint64_t>(t));
        const Vec x = model.sample_first_stage(theta, n_x, r);
        const int sel = rule.select(x);
        REQUIRE(sel == rule.select(x));  // deterministic
        const Vec e = model.ml_x(x);
        int arg = 0;
        for (int k = 1; k < 4; ++k) {
            if (e[k] < e[arg]) arg = k;
        }
        agree += (sel == arg);
    }
    // a smoothed energy detector: mostly but not always the argmin
    CHECK(agree > trials / 2);
}

TEST_CASE("sa-psml runs against the black-box rule", "[knn]") {
    const int n_x = 32, n_y = 8;
    const SpectrumModel model(4, n_x, n_y);
    Vec theta(4);
    theta << 0.9, 0.95, 0.95, 1.0;
    const auto rule = KnnSelectionRule::build(model, theta, 200, 5, Rng(47));

    Rng rng(53);
    const TwoStageSample s = draw_two_stage(model, rule, theta, n_x, n_y, rng);
    EstimatorConfig cfg;
    cfg.delta = 0.01;
    cfg.max_iter = 12;
    SaConfig sa;
    sa.K = 400;
    const auto result = sa_psml(model, rule, s.x, s.y, s.m, cfg, sa, rng.split(99));
    REQUIRE(result.estimate.size() == 4);
    REQUIRE(result.estimate.minCoeff() > 0.0);
    REQUIRE(result.trace.g_evaluations >= 1);
    // the correction stays within a plausible neighborhood of the ML estimate
    const Vec ml = model.ml_joint(s.x, s.y, s.m);
    CHECK((result.estimate - ml).norm() < 1.0);
}
