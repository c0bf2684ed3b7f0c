#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psml/core.hpp"

namespace psml {

/// k-nearest-neighbor selection over a labeled reference set, queried at
/// the first-stage ML estimate with Euclidean distance. Majority vote;
/// ties (in distance and in vote) break toward the smaller index. The
/// reference set is private to the rule: estimators only ever call
/// select(), which keeps the rule a black box.
class KnnSelectionRule final : public SelectionRule {
public:
    KnnSelectionRule(const ScenarioModel& model, Mat reference_points,
                     std::vector<int> labels, int k)
        : model_(&model),
          refs_(std::move(reference_points)),
          labels_(std::move(labels)),
          k_(k) {
        if (refs_.rows() == 0) throw std::invalid_argument("knn: empty reference set");
        if (labels_.size() != static_cast<std::size_t>(refs_.rows())) {
            throw std::invalid_argument("knn: one label per reference point");
        }
        if (k_ < 1 || k_ > static_cast<int>(refs_.rows())) {
            throw std::invalid_argument("knn: k out of range");
        }
    }

    /// Reference set for the black-box spectrum experiment: first-stage ML
    /// draws under theta_true, each labeled with its own minimum-variance
    /// coordinate (the selection an ideal energy detector would make for
    /// that realization).
    static KnnSelectionRule build(const ScenarioModel& model, const Vec& theta_true,
                                  int reference_size, int k, Rng rng) {
        Mat refs(reference_size, model.dim());
        std::vector<int> labels(static_cast<std::size_t>(reference_size));
        for (int i = 0; i < reference_size; ++i) {
            Rng draw = rng.split(static_cast<std::uint64_t>(i));
            const Vec point =
                model.ml_x(model.sample_first_stage(theta_true, model.first_stage_count(), draw));
            refs.row(i) = point.transpose();
            int arg = 0;
            for (int j = 1; j < point.size(); ++j) {
                if (point[j] < point[arg]) arg = j;
            }
            labels[static_cast<std::size_t>(i)] = arg;
        }
        return KnnSelectionRule(model, std::move(refs), std::move(labels), k);
    }

    int select(const Vec& x) const override {
        const Vec q = model_->ml_x(x);
        const int n = static_cast<int>(refs_.rows());
        std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            dist[static_cast<std::size_t>(i)] = {(refs_.row(i).transpose() - q).squaredNorm(), i};
        }
        std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
        std::vector<int> votes(static_cast<std::size_t>(model_->dim()), 0);
        for (int i = 0; i < k_; ++i) {
            ++votes[static_cast<std::size_t>(labels_[static_cast<std::size_t>(dist[i].second)])];
        }
        int best = 0;
        for (int label = 1; label < static_cast<int>(votes.size()); ++label) {
            if (votes[static_cast<std::size_t>(label)] > votes[static_cast<std::size_t>(best)]) {
                best = label;
            }
        }
        return best;
    }

private:
    const ScenarioModel* model_;
    Mat refs_;
    std::vector<int> labels_;
    int k_;
};

}  // namespace psml
