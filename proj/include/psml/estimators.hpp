#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psml/core.hpp"
#include "psml/sa_gradient.hpp"

namespace psml {

enum class UpdateMode { score_solve, linear_efficient };
enum class GSource { analytic_full, analytic_pairwise, stochastic };

struct EstimatorConfig {
    double delta = 1e-6;    // convergence threshold on the iterate change
    int max_iter = 50;
    UpdateMode update_mode = UpdateMode::linear_efficient;
    GSource g_source = GSource::analytic_full;
};

struct IterationTrace {
    std::vector<Vec> iterates;       // includes the initial point
    std::vector<double> step_norms;  // consecutive-iterate distances
    bool converged = false;
    int g_evaluations = 0;
};

class EstimatorFailure : public std::runtime_error {
public:
    EstimatorFailure(const std::string& what, IterationTrace trace)
        : std::runtime_error(what), trace(std::move(trace)) {}
    IterationTrace trace;
};

struct MbpResult {
    Vec estimate;
    IterationTrace trace;
};

using GradFn = std::function<Vec(const Vec&)>;

/// Joint-data ML estimate (closed form per scenario).
inline Vec ml_joint(const ScenarioModel& model, const Vec& x, const Vec& y, int m) {
    return model.ml_joint(x, y, m);
}

/// Split-data ML: second-stage observations only.
inline SplitMl ml_split_y(const ScenarioModel& model, const Vec& y, int m) {
    return model.ml_y(y, m);
}

/// Iterative selection-bias-corrected estimator. Starts at the joint ML
/// estimate (passed in when the caller already has it) and repeats either
///   score-solve:       solve grad_loglik_joint(theta_i) = g(theta_{i-1}),
///   linear-efficient:  theta_i = theta_ml - J(theta_{i-1})^-1 g(theta_{i-1}),
/// projecting each iterate into the model domain, until the iterate change
/// drops to delta or the iteration cap is reached. g_fn supplies the
/// gradient of the log selection probability (exact, pairwise, or Monte
/// Carlo). With g identically zero the first iterate reproduces the ML
/// estimate and the loop stops immediately.
inline MbpResult mbp_psml(const ScenarioModel& model, const Vec& x, const Vec& y, int m,
                          const GradFn& g_fn, const EstimatorConfig& cfg,
                          std::optional<Vec> theta_ml_hint = std::nullopt) {
    if (cfg.delta <= 0.0 || cfg.max_iter < 1) {
        throw std::invalid_argument("mbp_psml: bad estimator config");
    }
    const Vec theta_ml = theta_ml_hint ? std::move(*theta_ml_hint) : model.ml_joint(x, y, m);
    IterationTrace trace;
    Vec theta = model.project(theta_ml);
    trace.iterates.push_back(theta);

    const int n_x = model.first_stage_count();
    const int n_y = model.second_stage_count();
    const bool constant_fim = !model.fim_depends_on_theta();
    Eigen::LDLT<Mat> fact;
    bool factored = false;

    for (int i = 1; i <= cfg.max_iter; ++i) {
        Vec g = g_fn(theta);
        ++trace.g_evaluations;
        Vec next;
        if (cfg.update_mode == UpdateMode::score_solve) {
            std::optional<Vec> solved;
            try {
                solved = model.solve_score(x, y, m, g);
            } catch (const std::exception& e) {
                throw EstimatorFailure(std::string("mbp_psml: score solve failed: ") + e.what(),
                                       trace);
            }
            if (!solved) {
                throw EstimatorFailure("mbp_psml: model has no score-solve form", trace);
            }
            next = std::move(*solved);
        } else {
            if (!factored || !constant_fim) {
                fact.compute(model.fim_joint(theta, m, n_x, n_y));
                if (fact.info() != Eigen::Success || !fact.isPositive()) {
                    throw EstimatorFailure("mbp_psml: singular joint FIM at an iterate", trace);
                }
                factored = true;
            }
            next = theta_ml - fact.solve(g);
        }
        next = model.project(next);
        const double step = (next - theta).norm();
        theta = std::move(next);
        trace.iterates.push_back(theta);
        trace.step_norms.push_back(step);
        if (step <= cfg.delta) {
            trace.converged = true;
            break;
        }
    }
    return {theta, std::move(trace)};
}

/// MBP with the pairwise selection probability between the selected and
/// second-best parameters. For diagonal-FIM models the update touches only
/// those two coordinates, so the others stay at their ML values.
inline MbpResult second_best_psml(const ScenarioModel& model, int m, int m_second,
                                  const Vec& x, const Vec& y, const EstimatorConfig& cfg,
                                  std::optional<Vec> theta_ml_hint = std::nullopt) {
    if (m_second == m) throw std::invalid_argument("second_best_psml: indices coincide");
    const GradFn g_fn = [&model, m, m_second](const Vec& t) {
        auto g = model.analytic_pairwise_grad(t, m, m_second);
        if (!g) {
            throw std::logic_error("second_best_psml: model lacks an analytic pairwise gradient");
        }
        return *std::move(g);
    };
    return mbp_psml(model, x, y, m, g_fn, cfg, std::move(theta_ml_hint));
}

inline MbpResult second_best_psml(const ScenarioModel& model, const SelectionRule& rule,
                                  const Vec& x, const Vec& y, const EstimatorConfig& cfg,
                                  std::optional<Vec> theta_ml_hint = std::nullopt) {
    if (!rule.has_second_best()) {
        throw std::logic_error("second_best_psml: rule lacks a second-best query");
    }
    const int m = rule.select(x);
    return second_best_psml(model, m, rule.second_best(x), x, y, cfg,
                            std::move(theta_ml_hint));
}

/// MBP with the Monte Carlo estimate of the selection-probability gradient,
/// re-evaluated at every iterate. Fresh draws per iteration by default;
/// common random numbers reuse one stream. Only requires the rule as a
/// black box.
inline MbpResult sa_psml(const ScenarioModel& model, const SelectionRule& rule, const Vec& x,
                         const Vec& y, int m, const EstimatorConfig& cfg,
                         const SaConfig& sa_cfg, const Rng& rng,
                         std::optional<Vec> theta_ml_hint = std::nullopt) {
    int iteration = 0;
    const GradFn g_fn = [&model, &rule, m, &sa_cfg, &rng, &iteration](const Vec& t) {
        const std::uint64_t label =
            sa_cfg.common_random_numbers ? 0 : static_cast<std::uint64_t>(++iteration);
        Rng stream = rng.split(label);
        return estimate_g(model, rule, t, m, sa_cfg, stream).g;
    };
    return mbp_psml(model, x, y, m, g_fn, cfg, std::move(theta_ml_hint));
}

inline MbpResult sa_psml(const ScenarioModel& model, const SelectionRule& rule, const Vec& x,
                         const Vec& y, const EstimatorConfig& cfg, const SaConfig& sa_cfg,
                         const Rng& rng, std::optional<Vec> theta_ml_hint = std::nullopt) {
    return sa_psml(model, rule, x, y, rule.select(x), cfg, sa_cfg, rng,
                   std::move(theta_ml_hint));
}

/// Brute-force maximizer of the penalized log-likelihood over a box, for
/// cross-checking the iterative estimators at dimension <= 3. The penalty
/// is the caller-supplied log selection probability; refinement re-centers
/// the grid on the incumbent with a margin of one coarse cell per round.
struct GridSpec {
    Vec lo;
    Vec hi;
    int points_per_dim = 41;
    int refine_rounds = 8;
    std::function<double(const Vec&)> log_selection_prob;
};

inline Vec psml_grid(const ScenarioModel& model, const Vec& x, const Vec& y, int m,
                     const GridSpec& spec) {
    const int dim = model.dim();
    if (dim > 3) throw std::invalid_argument("psml_grid: exhaustive search needs dim <= 3");
    if (!spec.log_selection_prob) throw std::invalid_argument("psml_grid: missing penalty");
    if (spec.points_per_dim < 5) throw std::invalid_argument("psml_grid: grid too coarse");

    Vec lo = spec.lo;
    Vec hi = spec.hi;
    Vec best = 0.5 * (lo + hi);
    for (int round = 0; round < spec.refine_rounds; ++round) {
        const Vec step = (hi - lo) / (spec.points_per_dim - 1);
        double best_val = -std::numeric_limits<double>::infinity();
        std::vector<int> idx(static_cast<std::size_t>(dim), 0);
        Vec theta(dim);
        while (true) {
            for (int d = 0; d < dim; ++d) theta[d] = lo[d] + idx[static_cast<std::size_t>(d)] * step[d];
            const double val =
                model.loglik_joint(x, y, m, theta) - spec.log_selection_prob(theta);
            if (val > best_val) {
                best_val = val;
                best = theta;
            }
            int d = 0;
            while (d < dim && ++idx[static_cast<std::size_t>(d)] == spec.points_per_dim) {
                idx[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == dim) break;
        }
        // zoom: one coarse cell of margin around the incumbent
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::max(spec.lo[d], best[d] - 1.1 * step[d]);
            hi[d] = std::min(spec.hi[d], best[d] + 1.1 * step[d]);
        }
    }
    return best;
}

}  // namespace psml
