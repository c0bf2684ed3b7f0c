#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "psml/bounds.hpp"
#include "psml/estimators.hpp"
#include "psml/harness/config.hpp"
#include "psml/metrics.hpp"
#include "psml/scenarios/bernoulli.hpp"
#include "psml/scenarios/knn.hpp"
#include "psml/scenarios/linear_gaussian.hpp"
#include "psml/scenarios/rules.hpp"
#include "psml/scenarios/spectrum.hpp"

namespace psml {

/// Tolerated-failure-rate breach: the CLI maps this to exit code 3.
class FailureRateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CellStats {
    std::string estimator;
    double sweep_value = 0.0;
    long trials = 0;
    long hard_failures = 0;
    long non_converged = 0;
    double psi_bias = 0.0;
    double psi_bias_se = 0.0;
    double psi_bias_abs = 0.0;
    double psmse = 0.0;
    double psmse_se = 0.0;
    double runtime_ms = 0.0;
    bool has_runtime = false;
    double fail_rate = 0.0;
    double crb = 0.0;
    bool has_crb = false;
    std::vector<double> per_m_bias;
    std::vector<long> per_m_count;
    std::vector<TrialOutcome> outcomes;  // populated when config.keep_trials
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellStats> cells;  // sweep-point major, estimator minor
};

namespace runner_detail {

struct SweepPoint {
    int index = 0;
    double value = 0.0;
    int M = 0;
    int N = 0;
    int n_x = 0;
    int n_y = 0;
    double delta_shift = 0.0;
    SaConfig sa;
};

inline SweepPoint resolve_point(const ExperimentConfig& cfg, int index) {
    SweepPoint p;
    p.index = index;
    p.value = cfg.sweep_values[static_cast<std::size_t>(index)];
    p.M = cfg.M;
    p.N = cfg.N;
    p.delta_shift = cfg.delta_shift;
    p.sa = cfg.sa;
    switch (cfg.sweep_var) {
        case SweepVar::N: p.N = static_cast<int>(p.value); break;
        case SweepVar::Delta: p.delta_shift = p.value; break;
        case SweepVar::M: p.M = static_cast<int>(p.value); break;
        case SweepVar::K: p.sa.K = static_cast<int>(p.value); break;
    }
    if (p.M < 1) throw ConfigError("config: sweep produced M < 1");
    p.n_x = static_cast<int>(std::lround(cfg.rho_x * p.N));
    p.n_x = std::min(std::max(p.n_x, 1), p.N - 1);
    p.n_y = p.N - p.n_x;
    if (p.n_x < 1 || p.n_y < 1) {
        throw ConfigError("config: N too small for the stage split");
    }
    return p;
}

struct ScenarioBundle {
    std::unique_ptr<ScenarioModel> model;
    std::unique_ptr<SelectionRule> rule;
    Vec theta;
};

inline ScenarioBundle build_scenario(const ExperimentConfig& cfg, const SweepPoint& p) {
    ScenarioBundle b;
    switch (cfg.scenario) {
        case Scenario::linear_gaussian:
            b.model = std::make_unique<LinearGaussianModel>(
                LinearGaussianModel::standard(p.M, p.n_x, p.n_y));
            b.rule = std::make_unique<MlOrderRule>(*b.model, false);
            break;
        case Scenario::bernoulli:
            b.model = std::make_unique<BernoulliModel>(p.M, p.n_x, p.n_y);
            b.rule = std::make_unique<MlOrderRule>(*b.model, false);
            break;
        case Scenario::spectrum:
            b.model = std::make_unique<SpectrumModel>(p.M, p.n_x, p.n_y);
            b.rule = std::make_unique<MlOrderRule>(*b.model, true);
            break;
        case Scenario::spectrum_knn: {
            b.model = std::make_unique<SpectrumModel>(p.M, p.n_x, p.n_y);
            const Vec theta = theta_from_recipe(cfg, p.M, p.delta_shift);
            b.rule = std::make_unique<KnnSelectionRule>(KnnSelectionRule::build(
                *b.model, theta, cfg.knn_ref_size, cfg.knn_k,
                Rng::derive(cfg.seed, {0x6B, static_cast<std::uint64_t>(p.index)})));
            break;
        }
    }
    b.theta = theta_from_recipe(cfg, p.M, p.delta_shift);
    return b;
}

/// Per-trial state handed to the timed estimator entry points. The joint ML
/// estimate and the second-best index are trial preparation: the iterative
/// estimators start from the ML estimate rather than re-deriving it.
struct PreparedTrial {
    TwoStageSample sample;
    Vec theta_ml;
    int second_best = -1;
};

enum class TrialStatus : std::uint8_t { ok = 0, not_converged = 1, failed = 2 };

struct TrialCell {
    double err = 0.0;
    int m = 0;
    double nanos = 0.0;
    TrialStatus status = TrialStatus::failed;
};

class EstimatorEntry {
public:
    EstimatorEntry(std::string name, const ExperimentConfig& cfg, const SweepPoint& p,
                   const ScenarioBundle& b)
        : name_(std::move(name)), cfg_(&cfg), point_(&p), bundle_(&b) {
        validate();
    }

    const std::string& name() const { return name_; }

    std::pair<Vec, bool> run(const PreparedTrial& t, const Rng& rng) const {
        const ScenarioModel& model = *bundle_->model;
        const SelectionRule& rule = *bundle_->rule;
        if (name_ == "ml") {
            return {model.ml_joint(t.sample.x, t.sample.y, t.sample.m), true};
        }
        if (name_ == "ml-split") {
            return {model.ml_y(t.sample.y, t.sample.m).values, true};
        }
        if (name_ == "ml-first") {
            return {model.ml_x(t.sample.x), true};
        }
        if (name_ == "james-stein") {
            const Mat J = model.fim_joint(model.project(t.theta_ml), t.sample.m,
                                          point_->n_x, point_->n_y);
            return {james_stein(t.theta_ml, J), true};
        }
        if (name_ == "2b-psml"
            || (name_ == "mbp-psml" && cfg_->est.g_source == GSource::analytic_pairwise)) {
            auto r = second_best_psml(model, t.sample.m, t.second_best, t.sample.x, t.sample.y,
                                      cfg_->est, t.theta_ml);
            return {std::move(r.estimate), r.trace.converged};
        }
        if (name_ == "sa-psml"
            || (name_ == "mbp-psml" && cfg_->est.g_source == GSource::stochastic)) {
            auto r = sa_psml(model, rule, t.sample.x, t.sample.y, t.sample.m, cfg_->est,
                             point_->sa, rng, t.theta_ml);
            return {std::move(r.estimate), r.trace.converged};
        }
        // mbp-psml with the full analytic gradient (pairwise == full at M = 2)
        const int other = 1 - t.sample.m;
        auto r = second_best_psml(model, t.sample.m, other, t.sample.x, t.sample.y, cfg_->est,
                                  t.theta_ml);
        return {std::move(r.estimate), r.trace.converged};
    }

private:
    void validate() const {
        const bool pairwise_capable =
            bundle_->model->analytic_pairwise_prob(bundle_->model->project(bundle_->theta), 0,
                                                   point_->M > 1 ? 1 : 0)
                .has_value();
        if (name_ == "2b-psml") {
            if (!bundle_->rule->has_second_best() || !pairwise_capable || point_->M < 2) {
                throw ConfigError("config: 2b-psml unavailable for this scenario");
            }
        }
        if (name_ == "james-stein" && point_->M < 3) {
            throw ConfigError("config: james-stein needs M >= 3");
        }
        if (name_ == "mbp-psml" && cfg_->est.g_source == GSource::analytic_full
            && point_->M != 2) {
            throw ConfigError(
                "config: mbp-psml with analytic-full gradient is only closed-form at M = 2");
        }
        if (name_ == "mbp-psml" && cfg_->est.g_source == GSource::analytic_pairwise
            && (!bundle_->rule->has_second_best() || !pairwise_capable)) {
            throw ConfigError("config: mbp-psml(analytic-pairwise) unavailable here");
        }
    }

    std::string name_;
    const ExperimentConfig* cfg_;
    const SweepPoint* point_;
    const ScenarioBundle* bundle_;
};

inline PreparedTrial prepare_trial(const ScenarioBundle& b, const SweepPoint& p,
                                   const ExperimentConfig& cfg, std::uint64_t trial) {
    Rng rng = Rng::derive(cfg.seed, {0x54, static_cast<std::uint64_t>(p.index), trial});
    PreparedTrial t;
    t.sample = draw_two_stage(*b.model, *b.rule, b.theta, p.n_x, p.n_y, rng);
    t.theta_ml = b.model->ml_joint(t.sample.x, t.sample.y, t.sample.m);
    if (b.rule->has_second_best()) t.second_best = b.rule->second_best(t.sample.x);
    return t;
}

inline Rng estimator_rng(const ExperimentConfig& cfg, const SweepPoint& p, std::uint64_t trial,
                         std::size_t estimator_index) {
    return Rng::derive(cfg.seed, {0x54, static_cast<std::uint64_t>(p.index), trial})
        .split(0x100 + estimator_index);
}

inline void run_one_trial(const ExperimentConfig& cfg, const SweepPoint& p,
                          const ScenarioBundle& b, const std::vector<EstimatorEntry>& entries,
                          std::uint64_t trial, TrialCell* out) {
    const PreparedTrial prep = prepare_trial(b, p, cfg, trial);
    for (std::size_t ei = 0; ei < entries.size(); ++ei) {
        TrialCell& cell = out[ei];
        cell.m = prep.sample.m;
        const Rng rng = estimator_rng(cfg, p, trial, ei);
        try {
            const auto start = std::chrono::steady_clock::now();
            auto [estimate, converged] = entries[ei].run(prep, rng);
            const auto stop = std::chrono::steady_clock::now();
            cell.nanos = static_cast<double>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
            cell.err = estimate[prep.sample.m] - b.theta[prep.sample.m];
            cell.status = converged ? TrialStatus::ok : TrialStatus::not_converged;
        } catch (const std::exception&) {
            cell.status = TrialStatus::failed;
        }
    }
}

inline double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

inline double se_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)
                     / static_cast<double>(v.size()));
}

inline CellStats assemble_cell(const ExperimentConfig& cfg, const SweepPoint& p,
                               const std::string& estimator,
                               const std::vector<TrialCell>& cells, std::size_t ei,
                               std::size_t n_entries) {
    CellStats out;
    out.estimator = estimator;
    out.sweep_value = p.value;
    out.trials = cfg.trials;
    std::vector<TrialOutcome> outcomes;
    std::vector<double> errs, psses, times;
    outcomes.reserve(static_cast<std::size_t>(cfg.trials));
    for (long t = 0; t < cfg.trials; ++t) {
        const TrialCell& c = cells[static_cast<std::size_t>(t) * n_entries + ei];
        if (c.status == TrialStatus::failed) {
            ++out.hard_failures;
            continue;
        }
        if (c.status == TrialStatus::not_converged) ++out.non_converged;
        outcomes.push_back(TrialOutcome{c.err, c.m});
        errs.push_back(c.err);
        psses.push_back(c.err * c.err);
        times.push_back(c.nanos);
    }
    if (!outcomes.empty()) {
        const PsiBiasStats bias = empirical_psi_bias(outcomes, p.M);
        out.psi_bias = bias.aggregate;
        out.psi_bias_abs = bias.aggregate_abs;
        out.per_m_bias = bias.per_m_bias;
        out.per_m_count = bias.per_m_count;
        out.psi_bias_se = se_of_mean(errs);
        out.psmse = empirical_psmse(outcomes);
        out.psmse_se = se_of_mean(psses);
        if (cfg.timing) {
            out.runtime_ms = mean_of(times) / 1e6;
            out.has_runtime = true;
        }
    }
    out.fail_rate = static_cast<double>(out.hard_failures + out.non_converged)
                    / static_cast<double>(cfg.trials);
    if (cfg.keep_trials) out.outcomes = std::move(outcomes);
    return out;
}

inline void check_failure_rate(const ExperimentConfig& cfg, const CellStats& cell) {
    const double hard_rate =
        static_cast<double>(cell.hard_failures) / static_cast<double>(cell.trials);
    if (hard_rate > cfg.fail_abort_rate) {
        throw FailureRateError("estimator '" + cell.estimator + "' failed on "
                               + std::to_string(cell.hard_failures) + "/"
                               + std::to_string(cell.trials) + " trials");
    }
}

inline int effective_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace runner_detail

/// Monte Carlo sweep: for every sweep point and trial, draw a two-stage
/// sample, run every requested estimator, and aggregate the selected-
/// coordinate metrics. Deterministic for a fixed seed: each trial owns a
/// stream derived from (seed, point, trial), so the report is independent
/// of the worker count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentReport report;
    report.config = cfg;
    const int workers = runner_detail::effective_workers(cfg);

    for (int si = 0; si < static_cast<int>(cfg.sweep_values.size()); ++si) {
        const auto point = runner_detail::resolve_point(cfg, si);
        const auto bundle = runner_detail::build_scenario(cfg, point);
        std::vector<runner_detail::EstimatorEntry> entries;
        entries.reserve(cfg.estimators.size());
        for (const auto& name : cfg.estimators) {
            entries.emplace_back(name, cfg, point, bundle);
        }

        std::vector<runner_detail::TrialCell> cells(
            static_cast<std::size_t>(cfg.trials) * entries.size());
        const long chunk = (cfg.trials + workers - 1) / workers;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const long lo = w * chunk;
            const long hi = std::min<long>(cfg.trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (long t = lo; t < hi; ++t) {
                    runner_detail::run_one_trial(
                        cfg, point, bundle, entries, static_cast<std::uint64_t>(t),
                        cells.data() + static_cast<std::size_t>(t) * entries.size());
                }
            });
        }
        for (auto& th : pool) th.join();

        double crb = 0.0;
        bool has_crb = false;
        if (cfg.emit_crb) {
            SaConfig crb_cfg = point.sa;
            crb_cfg.K = cfg.crb_K;
            Rng crb_rng = Rng::derive(cfg.seed, {0xC3, static_cast<std::uint64_t>(si)});
            crb = empirical_psi_crb(*bundle.model, *bundle.rule, bundle.theta, crb_cfg,
                                    crb_rng);
            has_crb = true;
        }

        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
            CellStats cell = runner_detail::assemble_cell(cfg, point, entries[ei].name(),
                                                          cells, ei, entries.size());
            cell.crb = crb;
            cell.has_crb = has_crb;
            runner_detail::check_failure_rate(cfg, cell);
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

/// Wall-clock benchmark over the sweep (intended for M sweeps with the
/// all-ones theta recipe). Warmup estimates are run and discarded, then
/// each estimator is timed over the trial batch with one clock pair so the
/// per-estimate mean is robust to scheduler noise. Timing covers the
/// estimator call only; sample generation and trial preparation sit
/// outside the clock.
inline ExperimentReport bench_runtime(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentReport report;
    report.config = cfg;
    report.config.timing = true;

    for (int si = 0; si < static_cast<int>(cfg.sweep_values.size()); ++si) {
        const auto point = runner_detail::resolve_point(cfg, si);
        const auto bundle = runner_detail::build_scenario(cfg, point);
        std::vector<runner_detail::EstimatorEntry> entries;
        for (const auto& name : cfg.estimators) {
            entries.emplace_back(name, cfg, point, bundle);
        }

        std::vector<runner_detail::PreparedTrial> preps;
        preps.reserve(static_cast<std::size_t>(cfg.trials) + cfg.bench_warmup);
        for (long t = 0; t < cfg.trials + cfg.bench_warmup; ++t) {
            preps.push_back(runner_detail::prepare_trial(bundle, point, cfg,
                                                         static_cast<std::uint64_t>(t)));
        }

        std::vector<runner_detail::TrialCell> cells(
            static_cast<std::size_t>(cfg.trials) * entries.size());
        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
            for (long w = 0; w < cfg.bench_warmup; ++w) {
                const Rng rng = runner_detail::estimator_rng(
                    cfg, point, static_cast<std::uint64_t>(cfg.trials + w), ei);
                try {
                    entries[ei].run(preps[static_cast<std::size_t>(cfg.trials + w)], rng);
                } catch (const std::exception&) {
                }
            }
            const auto start = std::chrono::steady_clock::now();
            for (long t = 0; t < cfg.trials; ++t) {
                auto& cell = cells[static_cast<std::size_t>(t) * entries.size() + ei];
                const auto& prep = preps[static_cast<std::size_t>(t)];
                cell.m = prep.sample.m;
                const Rng rng =
                    runner_detail::estimator_rng(cfg, point, static_cast<std::uint64_t>(t), ei);
                try {
                    auto [estimate, converged] = entries[ei].run(prep, rng);
                    cell.err = estimate[prep.sample.m] - bundle.theta[prep.sample.m];
                    cell.status = converged ? runner_detail::TrialStatus::ok
                                            : runner_detail::TrialStatus::not_converged;
                } catch (const std::exception&) {
                    cell.status = runner_detail::TrialStatus::failed;
                }
            }
            const auto stop = std::chrono::steady_clock::now();
            const double total_ns = static_cast<double>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
            for (long t = 0; t < cfg.trials; ++t) {
                cells[static_cast<std::size_t>(t) * entries.size() + ei].nanos =
                    total_ns / static_cast<double>(cfg.trials);
            }
        }

        for (std::size_t ei = 0; ei < entries.size(); ++ei) {
            CellStats cell = runner_detail::assemble_cell(report.config, point,
                                                          entries[ei].name(), cells, ei,
                                                          entries.size());
            runner_detail::check_failure_rate(report.config, cell);
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

}  // namespace psml
