#pragma once

#include "psml/core.hpp"

namespace psml {

/// Selects the best coordinate of the first-stage ML estimate (largest by
/// default, smallest for energy-detector style rules). Ties break toward
/// the smallest index; the second-best query returns the runner-up under
/// the same ordering.
class MlOrderRule final : public SelectionRule {
public:
    MlOrderRule(const ScenarioModel& model, bool minimize = false)
        : model_(&model), minimize_(minimize) {}

    int select(const Vec& x) const override { return rank(model_->ml_x(x)).first; }

    bool has_second_best() const override { return true; }

    int second_best(const Vec& x) const override { return rank(model_->ml_x(x)).second; }

    std::pair<int, int> rank(const Vec& stat) const {
        const int n = static_cast<int>(stat.size());
        int best = 0;
        int second = -1;
        for (int k = 1; k < n; ++k) {
            if (better(stat[k], stat[best])) {
                second = best;
                best = k;
            } else if (second < 0 || better(stat[k], stat[second])) {
                second = k;
            }
        }
        return {best, second};
    }

private:
    bool better(double a, double b) const { return minimize_ ? a < b : a > b; }

    const ScenarioModel* model_;
    bool minimize_;
};

/// Data-independent rule returning a fixed index (the degenerate case used
/// for sanity checks: its selection probability does not depend on theta).
class ConstantRule final : public SelectionRule {
public:
    explicit ConstantRule(int index) : index_(index) {}
    int select(const Vec&) const override { return index_; }

private:
    int index_;
};

}  // namespace psml
