#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "psml/rng.hpp"

namespace psml {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One two-stage draw: first-stage data x, the realized selection m
/// (0-based), and second-stage data y generated under that selection.
struct TwoStageSample {
    Vec x;
    int m = 0;
    Vec y;
    int n_x = 0;
    int n_y = 0;
};

/// Deterministic map from first-stage data to a parameter index.
class SelectionRule {
public:
    virtual ~SelectionRule() = default;

    virtual int select(const Vec& x) const = 0;

    virtual bool has_second_best() const { return false; }

    /// Index that would be selected were the selected one absent.
    virtual int second_best(const Vec& x) const {
        (void)x;
        throw std::logic_error("selection rule does not support a second-best query");
    }
};

/// Split-data ML estimate: values are meaningful only where identified[k]
/// is set (independent-population models identify only the selected
/// coordinate from y).
struct SplitMl {
    Vec values;
    std::vector<std::uint8_t> identified;
};

/// Behavioral interface of a two-stage observation model.
///
/// Conventions shared by all implementations:
///  - the joint log-likelihood factorizes as loglik_x + log f_m(y; theta),
///  - fim_joint(theta, m, n_x, n_y) == fim_x(theta, n_x) + fim_y(theta, m, n_y),
///  - log-likelihoods carry their normalization constants,
///  - repetition counts are inferred from data lengths where data is passed,
///    and explicit otherwise; first_stage_count()/second_stage_count() are
///    the counts the model was configured with.
class ScenarioModel {
public:
    virtual ~ScenarioModel() = default;

    virtual int dim() const = 0;
    virtual int first_stage_count() const = 0;
    virtual int second_stage_count() const = 0;

    virtual Vec sample_first_stage(const Vec& theta, int n_x, Rng& rng) const = 0;
    virtual Vec sample_second_stage(const Vec& theta, int m, int n_y, Rng& rng) const = 0;

    virtual double loglik_x(const Vec& x, const Vec& theta) const = 0;
    virtual Vec grad_loglik_x(const Vec& x, const Vec& theta) const = 0;
    virtual double loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const = 0;
    virtual Vec grad_loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const = 0;

    virtual Mat fim_joint(const Vec& theta, int m, int n_x, int n_y) const = 0;
    virtual Mat fim_x(const Vec& theta, int n_x) const = 0;
    virtual Mat fim_y(const Vec& theta, int m, int n_y) const = 0;

    virtual Vec ml_x(const Vec& x) const = 0;
    virtual SplitMl ml_y(const Vec& y, int m) const = 0;
    virtual Vec ml_joint(const Vec& x, const Vec& y, int m) const = 0;

    /// Gradient of the log pairwise selection probability, when a closed
    /// form exists for this model.
    virtual std::optional<Vec> analytic_pairwise_grad(const Vec& theta, int m,
                                                      int m_second) const {
        (void)theta;
        (void)m;
        (void)m_second;
        return std::nullopt;
    }

    /// Closed-form pairwise selection probability, when available.
    virtual std::optional<double> analytic_pairwise_prob(const Vec& theta, int m,
                                                         int m_second) const {
        (void)theta;
        (void)m;
        (void)m_second;
        return std::nullopt;
    }

    /// Closed-form solve of grad_loglik_joint(theta) = g for theta.
    virtual std::optional<Vec> solve_score(const Vec& x, const Vec& y, int m,
                                           const Vec& g) const {
        (void)x;
        (void)y;
        (void)m;
        (void)g;
        return std::nullopt;
    }

    /// Clip an iterate into the model's parameter domain.
    virtual Vec project(const Vec& theta) const { return theta; }

    /// True when fim_joint varies with theta (constant-FIM models let the
    /// iterative estimators factor it once).
    virtual bool fim_depends_on_theta() const { return true; }
};

/// Draw a full two-stage sample: first stage, selection, second stage.
inline TwoStageSample draw_two_stage(const ScenarioModel& model, const SelectionRule& rule,
                                     const Vec& theta, int n_x, int n_y, Rng& rng) {
    TwoStageSample s;
    s.n_x = n_x;
    s.n_y = n_y;
    Rng rx = rng.split(1);
    Rng ry = rng.split(2);
    s.x = model.sample_first_stage(theta, n_x, rx);
    s.m = rule.select(s.x);
    s.y = model.sample_second_stage(theta, s.m, n_y, ry);
    return s;
}

}  // namespace psml
