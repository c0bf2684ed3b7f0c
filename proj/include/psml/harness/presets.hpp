#pragma once

#include <string>
#include <vector>

#include "psml/harness/config.hpp"

namespace psml {

struct Preset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

/// Built-in experiment presets. The desk-scale presets shrink the headline
/// simulation sizes (50000 trials, 25-30 parameters, 50-iteration cap) to
/// laptop budgets (2000 trials, M=10, 12 iterations) while keeping the
/// model structure, stage splits and theta patterns. Their convergence
/// thresholds sit at the Monte Carlo jitter scale of the stochastic
/// gradient, so the SA iterations stop once the update noise dominates.
/// The -full presets keep the original sizes and are not exercised in CI.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = [] {
        std::vector<Preset> v;

        {
            ExperimentConfig c;
            c.scenario = Scenario::linear_gaussian;
            c.theta_recipe = "gaussian-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {50, 100, 200, 400};
            c.M = 10;
            c.rho_x = 0.8;
            c.rho_y = 0.2;
            c.trials = 2000;
            c.estimators = {"ml", "ml-split", "ml-first", "2b-psml", "sa-psml", "james-stein"};
            c.sa.K = 1000;
            c.est.delta = 0.005;
            c.est.max_iter = 12;
            c.seed = 7001;
            v.push_back({"gaussian-desk",
                         "correlated Gaussian populations, M=10, N sweep, 2000 trials", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::bernoulli;
            c.theta_recipe = "bernoulli-delta";
            c.sweep_var = SweepVar::Delta;
            c.sweep_values = {0.0, 0.05, 0.1, 0.2};
            c.M = 10;
            c.N = 150;
            c.rho_x = 0.75;
            c.rho_y = 0.25;
            c.trials = 2000;
            c.estimators = {"ml", "ml-split", "2b-psml", "sa-psml"};
            c.sa.K = 1000;
            c.est.delta = 0.01;
            c.est.max_iter = 12;
            c.seed = 7002;
            v.push_back({"bernoulli-desk",
                         "Bernoulli populations, M=10, N=150, offset sweep, 2000 trials", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::spectrum;
            c.theta_recipe = "spectrum-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {50, 100, 200, 400};
            c.M = 10;
            c.rho_x = 0.9;
            c.rho_y = 0.1;
            c.trials = 2000;
            c.estimators = {"ml", "ml-split", "2b-psml", "sa-psml"};
            c.sa.K = 1000;
            c.est.delta = 0.01;
            c.est.max_iter = 12;
            c.seed = 7003;
            v.push_back({"spectrum-desk",
                         "channel-variance estimation, minimum-energy rule, M=10, N sweep", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::spectrum_knn;
            c.theta_recipe = "knn-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {50, 100, 200, 400};
            c.M = 10;
            c.rho_x = 0.8;
            c.rho_y = 0.2;
            c.trials = 500;
            c.estimators = {"ml", "ml-split", "sa-psml"};
            c.sa.K = 500;
            c.est.delta = 0.01;
            c.est.max_iter = 12;
            c.seed = 7004;
            v.push_back({"spectrum-knn-desk",
                         "black-box kNN channel selection, SA estimator only, M=10", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::linear_gaussian;
            c.theta_recipe = "ones";
            c.sweep_var = SweepVar::M;
            c.sweep_values = {5, 10, 25, 50};
            c.N = 100;
            c.rho_x = 0.8;
            c.rho_y = 0.2;
            c.trials = 32;
            c.estimators = {"2b-psml", "sa-psml"};
            c.sa.K = 500;
            c.est.delta = 1e-3;
            c.est.max_iter = 12;
            c.seed = 7005;
            v.push_back({"runtime-gaussian",
                         "estimator runtime versus parameter count (bench)", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::linear_gaussian;
            c.theta_recipe = "gaussian-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {50, 100, 200, 400, 700, 1000};
            c.M = 25;
            c.rho_x = 0.8;
            c.rho_y = 0.2;
            c.trials = 50000;
            c.estimators = {"ml", "ml-split", "ml-first", "2b-psml", "sa-psml", "james-stein"};
            c.sa.K = 1000;
            c.est.delta = 0.005;
            c.seed = 7101;
            v.push_back({"gaussian-full",
                         "full-scale Gaussian sweep (M=25, 50000 trials; hours)", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::bernoulli;
            c.theta_recipe = "bernoulli-delta";
            c.sweep_var = SweepVar::Delta;
            c.sweep_values = {0.0, 0.025, 0.05, 0.1, 0.15, 0.2};
            c.M = 25;
            c.N = 150;
            c.rho_x = 0.75;
            c.rho_y = 0.25;
            c.trials = 50000;
            c.estimators = {"ml", "ml-split", "2b-psml", "sa-psml"};
            c.sa.K = 1000;
            c.est.delta = 0.01;
            c.seed = 7102;
            v.push_back({"bernoulli-full",
                         "full-scale Bernoulli offset sweep (M=25, 50000 trials; hours)", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::spectrum;
            c.theta_recipe = "spectrum-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {50, 100, 200, 400, 700, 1000};
            c.M = 30;
            c.rho_x = 0.9;
            c.rho_y = 0.1;
            c.trials = 50000;
            c.estimators = {"ml", "ml-split", "2b-psml", "sa-psml"};
            c.sa.K = 1000;
            c.est.delta = 0.01;
            c.seed = 7103;
            v.push_back({"spectrum-full",
                         "full-scale spectrum sweep (M=30, 50000 trials; hours)", c});
        }
        {
            ExperimentConfig c;
            c.scenario = Scenario::linear_gaussian;
            c.theta_recipe = "gaussian-paper";
            c.sweep_var = SweepVar::N;
            c.sweep_values = {40, 80};
            c.M = 5;
            c.rho_x = 0.8;
            c.rho_y = 0.2;
            c.trials = 8;
            c.estimators = {"ml", "ml-split", "2b-psml"};
            c.est.delta = 1e-4;
            c.seed = 7200;
            v.push_back({"smoke", "tiny Gaussian run for quick checks", c});
        }
        return v;
    }();
    return table;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace psml
