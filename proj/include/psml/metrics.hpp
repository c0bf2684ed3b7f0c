#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "psml/core.hpp"

namespace psml {

/// One Monte Carlo trial outcome, reduced to what the selected-coordinate
/// metrics need.
struct TrialOutcome {
    double error = 0.0;  // estimate[m] - truth[m]
    int m = 0;
};

inline TrialOutcome make_trial(const Vec& estimate, const Vec& truth, int m) {
    if (estimate.size() != truth.size()) throw std::invalid_argument("trial: size mismatch");
    if (m < 0 || m >= estimate.size()) throw std::out_of_range("trial: selection index");
    return TrialOutcome{estimate[m] - truth[m], m};
}

/// Squared error of the selected coordinate; other coordinates never enter.
inline double psse_cost(const Vec& estimate, const Vec& truth, int m) {
    const TrialOutcome t = make_trial(estimate, truth, m);
    return t.error * t.error;
}

/// Monte Carlo PSMSE: mean selected-coordinate squared error over full
/// two-stage replications, which marginalizes the selection event.
inline double empirical_psmse(std::span<const TrialOutcome> trials) {
    if (trials.empty()) throw std::invalid_argument("empirical_psmse: no trials");
    double acc = 0.0;
    for (const auto& t : trials) acc += t.error * t.error;
    return acc / static_cast<double>(trials.size());
}

/// Selection-bias summary. The aggregate is the unconditional mean of the
/// selected-coordinate error, which equals the selection-probability-weighted
/// sum of the per-m conditional biases. Both the signed aggregate and its
/// absolute value are reported; per-m entries are conditional means with
/// their trial counts (count 0 marks an m that never occurred).
struct PsiBiasStats {
    double aggregate = 0.0;
    double aggregate_abs = 0.0;
    std::vector<double> per_m_bias;
    std::vector<long> per_m_count;
};

inline PsiBiasStats empirical_psi_bias(std::span<const TrialOutcome> trials, int dim) {
    if (trials.empty()) throw std::invalid_argument("empirical_psi_bias: no trials");
    PsiBiasStats s;
    s.per_m_bias.assign(static_cast<std::size_t>(dim), 0.0);
    s.per_m_count.assign(static_cast<std::size_t>(dim), 0);
    double acc = 0.0;
    for (const auto& t : trials) {
        acc += t.error;
        s.per_m_bias[static_cast<std::size_t>(t.m)] += t.error;
        ++s.per_m_count[static_cast<std::size_t>(t.m)];
    }
    s.aggregate = acc / static_cast<double>(trials.size());
    s.aggregate_abs = std::fabs(s.aggregate);
    for (int m = 0; m < dim; ++m) {
        const auto mm = static_cast<std::size_t>(m);
        if (s.per_m_count[mm] > 0) s.per_m_bias[mm] /= static_cast<double>(s.per_m_count[mm]);
    }
    return s;
}

/// Convergence diagnostic of the iterative estimators: the induced 2-norm
/// of fim_joint(theta)^-1 g g^T, computed through the rank-one identity
/// ||J^-1 g g^T|| = ||J^-1 g|| ||g||. Values below 1 certify contraction
/// at theta.
inline double information_dominance_check(const ScenarioModel& model, const Vec& theta, int m,
                                          const Vec& g, int n_x, int n_y) {
    const Mat J = model.fim_joint(theta, m, n_x, n_y);
    Eigen::LDLT<Mat> fact(J);
    if (fact.info() != Eigen::Success || !fact.isPositive()) {
        throw std::runtime_error("information_dominance_check: singular joint FIM");
    }
    const Vec u = fact.solve(g);
    return u.norm() * g.norm();
}

}  // namespace psml
