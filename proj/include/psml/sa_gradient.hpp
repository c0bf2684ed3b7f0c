#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "psml/core.hpp"

namespace psml {

/// Monte Carlo configuration for the selection-probability machinery.
struct SaConfig {
    int K = 1000;                          // draws per evaluation
    double zero_threshold_scale = 1e-7;    // raw constant of the count threshold
    bool common_random_numbers = false;    // reuse one stream across iterations
};

/// Count threshold below which the gradient estimate is forced to zero.
/// The raw scale constant enters as scale * n_x^2 / dim per draw; at the
/// default it only zeroes the estimate when the selection is never observed.
inline long sa_zero_threshold(const SaConfig& cfg, int n_x, int dim) {
    const double raw = cfg.K * cfg.zero_threshold_scale * static_cast<double>(n_x)
                       * static_cast<double>(n_x) / static_cast<double>(dim);
    return std::max<long>(1, std::lround(raw));
}

struct GEstimate {
    Vec g;
    long hits = 0;
    int K = 0;
    bool zeroed = false;
};

/// Selection-score average over pre-drawn first-stage datasets: the mean of
/// grad_loglik_x over the draws the rule sends to m, or zero when the hit
/// count falls below the threshold. Pure in the dataset multiset.
inline GEstimate estimate_g_on(const ScenarioModel& model, const SelectionRule& rule,
                               const Vec& theta0, int m, std::span<const Vec> datasets,
                               const SaConfig& cfg) {
    GEstimate out;
    out.K = static_cast<int>(datasets.size());
    Vec acc = Vec::Zero(model.dim());
    for (const Vec& x : datasets) {
        if (rule.select(x) != m) continue;
        acc += model.grad_loglik_x(x, theta0);
        ++out.hits;
    }
    if (out.hits < sa_zero_threshold(cfg, model.first_stage_count(), model.dim())) {
        out.g = Vec::Zero(model.dim());
        out.zeroed = true;
        return out;
    }
    out.g = acc / static_cast<double>(out.hits);
    return out;
}

/// Streaming form: draws K i.i.d. first-stage datasets from the model at
/// theta0 and averages the score over those falling in the selection region.
inline GEstimate estimate_g(const ScenarioModel& model, const SelectionRule& rule,
                            const Vec& theta0, int m, const SaConfig& cfg, Rng& rng) {
    GEstimate out;
    out.K = cfg.K;
    const int n_x = model.first_stage_count();
    Vec acc = Vec::Zero(model.dim());
    for (int k = 0; k < cfg.K; ++k) {
        const Vec x = model.sample_first_stage(theta0, n_x, rng);
        if (rule.select(x) != m) continue;
        acc += model.grad_loglik_x(x, theta0);
        ++out.hits;
    }
    if (out.hits < sa_zero_threshold(cfg, n_x, model.dim())) {
        out.g = Vec::Zero(model.dim());
        out.zeroed = true;
        return out;
    }
    out.g = acc / static_cast<double>(out.hits);
    return out;
}

/// Empirical selection frequencies over K draws; entries sum to one exactly.
inline Vec selection_prob_mc(const ScenarioModel& model, const SelectionRule& rule,
                             const Vec& theta, const SaConfig& cfg, Rng& rng) {
    std::vector<long> counts(static_cast<std::size_t>(model.dim()), 0);
    const int n_x = model.first_stage_count();
    for (int k = 0; k < cfg.K; ++k) {
        const Vec x = model.sample_first_stage(theta, n_x, rng);
        ++counts[static_cast<std::size_t>(rule.select(x))];
    }
    Vec freq(model.dim());
    for (int m = 0; m < model.dim(); ++m) {
        freq[m] = static_cast<double>(counts[static_cast<std::size_t>(m)])
                  / static_cast<double>(cfg.K);
    }
    return freq;
}

}  // namespace psml
