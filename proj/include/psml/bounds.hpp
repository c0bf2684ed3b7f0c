#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "psml/core.hpp"
#include "psml/sa_gradient.hpp"

namespace psml {

/// Monte Carlo estimate of the post-selection information matrix for one
/// selection index: the conditioned score outer-product average, minus the
/// rank-one selection-information term, plus the analytic second-stage
/// information.
struct PsfimEstimate {
    Mat J_hat;
    Vec g_hat;
    int m = 0;
    int K = 0;
    long hit_count = 0;
    bool valid = false;  // false when the selection region was never hit
};

inline PsfimEstimate sa_psfim(const ScenarioModel& model, const SelectionRule& rule,
                              const Vec& theta, int m, const SaConfig& cfg, Rng& rng) {
    PsfimEstimate out;
    out.m = m;
    out.K = cfg.K;
    const int dim = model.dim();
    const int n_x = model.first_stage_count();
    Mat outer = Mat::Zero(dim, dim);
    Vec score_sum = Vec::Zero(dim);
    for (int k = 0; k < cfg.K; ++k) {
        const Vec x = model.sample_first_stage(theta, n_x, rng);
        if (rule.select(x) != m) continue;
        const Vec s = model.grad_loglik_x(x, theta);
        outer.selfadjointView<Eigen::Lower>().rankUpdate(s);
        score_sum += s;
        ++out.hit_count;
    }
    if (out.hit_count == 0) {
        out.J_hat = Mat::Zero(dim, dim);
        out.g_hat = Vec::Zero(dim);
        return out;
    }
    outer = outer.selfadjointView<Eigen::Lower>();
    const double hits = static_cast<double>(out.hit_count);
    out.g_hat = (out.hit_count < sa_zero_threshold(cfg, n_x, dim)) ? Vec::Zero(dim)
                                                                   : Vec(score_sum / hits);
    out.J_hat = outer / hits - out.g_hat * out.g_hat.transpose()
                + model.fim_y(theta, m, model.second_stage_count());
    out.valid = true;
    return out;
}

struct PsiCrbTerm {
    int m = 0;
    double freq = 0.0;
    double inv_diag = 0.0;       // [(J_hat^(m))^-1]_{m,m}
    bool skipped_zero_freq = false;
};

struct PsiCrbEstimate {
    double value = 0.0;
    std::vector<PsiCrbTerm> terms;
};

/// Condition-number gate for declaring an estimated PSFIM singular.
inline constexpr double kPsfimConditionLimit = 1e12;

/// Empirical lower bound on the PSMSE: selection frequencies weighting the
/// selected-coordinate diagonal of the inverse PSFIM estimates. Indices the
/// frequency pass never visits contribute zero and are flagged; a singular
/// PSFIM at a visited index is an error naming that index.
inline PsiCrbEstimate empirical_psi_crb_detailed(const ScenarioModel& model,
                                                 const SelectionRule& rule, const Vec& theta,
                                                 const SaConfig& cfg, Rng& rng) {
    const int dim = model.dim();
    Rng freq_rng = rng.split(0xF0);
    const Vec freq = selection_prob_mc(model, rule, theta, cfg, freq_rng);
    PsiCrbEstimate out;
    out.terms.reserve(static_cast<std::size_t>(dim));
    for (int m = 0; m < dim; ++m) {
        PsiCrbTerm term;
        term.m = m;
        term.freq = freq[m];
        if (freq[m] == 0.0) {
            term.skipped_zero_freq = true;
            out.terms.push_back(term);
            continue;
        }
        Rng m_rng = rng.split(static_cast<std::uint64_t>(m) + 1);
        const PsfimEstimate psfim = sa_psfim(model, rule, theta, m, cfg, m_rng);
        if (!psfim.valid) {
            term.skipped_zero_freq = true;
            out.terms.push_back(term);
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> eig(psfim.J_hat);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo <= 0.0 || hi / lo > kPsfimConditionLimit) {
            throw std::runtime_error("empirical_psi_crb: singular PSFIM estimate at index "
                                     + std::to_string(m));
        }
        Vec e = Vec::Zero(dim);
        e[m] = 1.0;
        term.inv_diag = e.dot(psfim.J_hat.ldlt().solve(e));
        out.value += term.freq * term.inv_diag;
        out.terms.push_back(term);
    }
    return out;
}

inline double empirical_psi_crb(const ScenarioModel& model, const SelectionRule& rule,
                                const Vec& theta, const SaConfig& cfg, Rng& rng) {
    return empirical_psi_crb_detailed(model, rule, theta, cfg, rng).value;
}

}  // namespace psml
