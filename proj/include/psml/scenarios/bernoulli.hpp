#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psml/core.hpp"
#include "psml/math/special.hpp"

namespace psml {

/// M independent Bernoulli populations with success probabilities theta_k.
/// First stage: n_x samples from every population, stacked per draw
/// (x = [x_1[1..M], x_2[1..M], ...]); second stage: n_y samples from the
/// selected population only.
class BernoulliModel final : public ScenarioModel {
public:
    BernoulliModel(int dim, int n_x, int n_y) : dim_(dim), n_x_(n_x), n_y_(n_y) {
        if (dim < 1 || n_x < 1 || n_y < 1) throw std::invalid_argument("bernoulli: bad sizes");
    }

    int dim() const override { return dim_; }
    int first_stage_count() const override { return n_x_; }
    int second_stage_count() const override { return n_y_; }

    Vec sample_first_stage(const Vec& theta, int n_x, Rng& rng) const override {
        Vec x(static_cast<Eigen::Index>(n_x) * dim_);
        for (int n = 0; n < n_x; ++n) {
            for (int k = 0; k < dim_; ++k) {
                x[static_cast<Eigen::Index>(n) * dim_ + k] = rng.bernoulli(theta[k]) ? 1.0 : 0.0;
            }
        }
        return x;
    }

    Vec sample_second_stage(const Vec& theta, int m, int n_y, Rng& rng) const override {
        check_m(m);
        Vec y(n_y);
        for (int n = 0; n < n_y; ++n) y[n] = rng.bernoulli(theta[m]) ? 1.0 : 0.0;
        return y;
    }

    double loglik_x(const Vec& x, const Vec& theta) const override {
        const int n = reps(x);
        const Vec s = success_counts(x);
        double ll = 0.0;
        for (int k = 0; k < dim_; ++k) {
            ll += s[k] * std::log(theta[k]) + (n - s[k]) * std::log1p(-theta[k]);
        }
        return ll;
    }

    Vec grad_loglik_x(const Vec& x, const Vec& theta) const override {
        const int n = reps(x);
        const Vec s = success_counts(x);
        Vec g(dim_);
        for (int k = 0; k < dim_; ++k) g[k] = xi(s[k], n, theta[k]);
        return g;
    }

    double loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        check_m(m);
        const double sy = y.sum();
        const auto ny = static_cast<double>(y.size());
        return loglik_x(x, theta) + sy * std::log(theta[m]) + (ny - sy) * std::log1p(-theta[m]);
    }

    Vec grad_loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        check_m(m);
        Vec g = grad_loglik_x(x, theta);
        g[m] += xi(y.sum(), static_cast<double>(y.size()), theta[m]);
        return g;
    }

    Mat fim_x(const Vec& theta, int n_x) const override {
        Mat J = Mat::Zero(dim_, dim_);
        for (int k = 0; k < dim_; ++k) J(k, k) = n_x / (theta[k] * (1.0 - theta[k]));
        return J;
    }

    Mat fim_y(const Vec& theta, int m, int n_y) const override {
        check_m(m);
        Mat J = Mat::Zero(dim_, dim_);
        J(m, m) = n_y / (theta[m] * (1.0 - theta[m]));
        return J;
    }

    // Diagonal; the selected coordinate carries both stages' counts.
    Mat fim_joint(const Vec& theta, int m, int n_x, int n_y) const override {
        Mat J = fim_x(theta, n_x);
        J += fim_y(theta, m, n_y);
        return J;
    }

    Vec ml_x(const Vec& x) const override {
        const int n = reps(x);
        return success_counts(x) / static_cast<double>(n);
    }

    SplitMl ml_y(const Vec& y, int m) const override {
        check_m(m);
        SplitMl out;
        out.values = Vec::Constant(dim_, std::numeric_limits<double>::quiet_NaN());
        out.values[m] = y.mean();
        out.identified.assign(static_cast<std::size_t>(dim_), 0);
        out.identified[static_cast<std::size_t>(m)] = 1;
        return out;
    }

    Vec ml_joint(const Vec& x, const Vec& y, int m) const override {
        check_m(m);
        const int nx = reps(x);
        const auto ny = static_cast<double>(y.size());
        Vec est = ml_x(x);
        est[m] = (est[m] * nx + y.sum()) / (nx + ny);
        return est;
    }

    /// Pr(first-stage mean of m_second <= first-stage mean of m): the double
    /// binomial sum, with pmfs computed in log space. Ties count toward m.
    std::optional<double> analytic_pairwise_prob(const Vec& theta, int m,
                                                 int m_second) const override {
        const auto tables = pmf_tables(theta, m, m_second);
        double pr = 0.0;
        double cum = 0.0;
        for (int n = 0; n <= n_x_; ++n) {
            cum += tables.second[static_cast<std::size_t>(n)];
            pr += tables.first[static_cast<std::size_t>(n)] * cum;
        }
        return pr;
    }

    std::optional<Vec> analytic_pairwise_grad(const Vec& theta, int m,
                                              int m_second) const override {
        check_m(m);
        check_m(m_second);
        const auto tables = pmf_tables(theta, m, m_second);
        double pr = 0.0;
        double num_m = 0.0;   // sum over the xi term of the selected index
        double num_s = 0.0;   // sum over the xi term of the runner-up
        double cum = 0.0;
        double cum_xi = 0.0;
        for (int n = 0; n <= n_x_; ++n) {
            const double ps = tables.second[static_cast<std::size_t>(n)];
            cum += ps;
            cum_xi += ps * xi(n, n_x_, theta[m_second]);
            const double pm = tables.first[static_cast<std::size_t>(n)];
            pr += pm * cum;
            num_m += pm * xi(n, n_x_, theta[m]) * cum;
            num_s += pm * cum_xi;
        }
        Vec g = Vec::Zero(dim_);
        g[m] = num_m / pr;
        g[m_second] = num_s / pr;
        return g;
    }

    std::optional<Vec> solve_score(const Vec& x, const Vec& y, int m,
                                   const Vec& g) const override {
        check_m(m);
        const int nx = reps(x);
        const Vec s = success_counts(x);
        Vec theta(dim_);
        for (int k = 0; k < dim_; ++k) {
            double count = s[k];
            double total = nx;
            if (k == m) {
                count += y.sum();
                total += static_cast<double>(y.size());
            }
            theta[k] = solve_coordinate(count, total, g[k]);
        }
        return project(theta);
    }

    Vec project(const Vec& theta) const override {
        return theta.cwiseMax(kDomainEps).cwiseMin(1.0 - kDomainEps);
    }

    static double xi(double n, double trials, double theta) {
        return (n - trials * theta) / (theta * (1.0 - theta));
    }

    static constexpr double kDomainEps = 1e-6;

private:
    int reps(const Vec& x) const {
        if (x.size() % dim_ != 0 || x.size() == 0) {
            throw std::invalid_argument("bernoulli: bad observation layout");
        }
        return static_cast<int>(x.size()) / dim_;
    }

    Vec success_counts(const Vec& x) const {
        const int n = reps(x);
        Eigen::Map<const Mat> cols(x.data(), dim_, n);
        return cols.rowwise().sum();
    }

    std::pair<std::vector<double>, std::vector<double>> pmf_tables(const Vec& theta, int m,
                                                                   int m_second) const {
        check_m(m);
        check_m(m_second);
        std::vector<double> pm(static_cast<std::size_t>(n_x_) + 1);
        std::vector<double> ps(static_cast<std::size_t>(n_x_) + 1);
        for (int n = 0; n <= n_x_; ++n) {
            pm[static_cast<std::size_t>(n)] = std::exp(math::binom_logpmf(n, n_x_, theta[m]));
            ps[static_cast<std::size_t>(n)] =
                std::exp(math::binom_logpmf(n, n_x_, theta[m_second]));
        }
        return {std::move(pm), std::move(ps)};
    }

    // Root of xi(count, total, theta) = g inside (0, 1). The quadratic
    // g t^2 - (g + total) t + count changes sign between 0 and 1, so one
    // root is always available.
    static double solve_coordinate(double count, double total, double g) {
        if (g == 0.0) return count / total;
        const double b = -(g + total);
        const double disc = b * b - 4.0 * g * count;
        const double root = std::sqrt(std::max(disc, 0.0));
        const double q = -0.5 * (b + (b >= 0.0 ? root : -root));
        const double r1 = q / g;
        const double r2 = (q == 0.0) ? 0.0 : count / q;
        const bool ok1 = r1 >= -1e-12 && r1 <= 1.0 + 1e-12;
        const bool ok2 = r2 >= -1e-12 && r2 <= 1.0 + 1e-12;
        if (ok1 && ok2) return std::fabs(xi_resid(count, total, r1, g)) <
                                   std::fabs(xi_resid(count, total, r2, g))
                               ? r1
                               : r2;
        if (ok1) return r1;
        if (ok2) return r2;
        return count / total;
    }

    static double xi_resid(double count, double total, double t, double g) {
        const double tt = std::min(std::max(t, kDomainEps), 1.0 - kDomainEps);
        return xi(count, total, tt) - g;
    }

    int check_m(int m) const {
        if (m < 0 || m >= dim_) throw std::out_of_range("bernoulli: selection index");
        return m;
    }

    int dim_;
    int n_x_;
    int n_y_;
};

}  // namespace psml
