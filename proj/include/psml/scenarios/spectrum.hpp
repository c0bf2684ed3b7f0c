#pragma once

#include <cmath>
#include <stdexcept>

#include "psml/core.hpp"
#include "psml/math/special.hpp"

namespace psml {

/// M independent zero-mean Gaussian channels with unknown variances
/// theta_k = sigma_k^2 (the composite occupancy-plus-noise variance is the
/// estimand; its additive parts are not separately identified). Layout
/// matches BernoulliModel: first stage stacks per-draw M-vectors, the
/// second stage observes the selected channel only. Used with the
/// minimum-energy selection rule.
class SpectrumModel final : public ScenarioModel {
public:
    SpectrumModel(int dim, int n_x, int n_y) : dim_(dim), n_x_(n_x), n_y_(n_y) {
        if (dim < 1 || n_x < 1 || n_y < 1) throw std::invalid_argument("spectrum: bad sizes");
    }

    int dim() const override { return dim_; }
    int first_stage_count() const override { return n_x_; }
    int second_stage_count() const override { return n_y_; }

    Vec sample_first_stage(const Vec& theta, int n_x, Rng& rng) const override {
        const Vec sd = theta.cwiseSqrt();
        Vec x(static_cast<Eigen::Index>(n_x) * dim_);
        for (int n = 0; n < n_x; ++n) {
            for (int k = 0; k < dim_; ++k) {
                x[static_cast<Eigen::Index>(n) * dim_ + k] = sd[k] * rng.normal();
            }
        }
        return x;
    }

    Vec sample_second_stage(const Vec& theta, int m, int n_y, Rng& rng) const override {
        check_m(m);
        const double sd = std::sqrt(theta[m]);
        Vec y(n_y);
        for (int n = 0; n < n_y; ++n) y[n] = sd * rng.normal();
        return y;
    }

    double loglik_x(const Vec& x, const Vec& theta) const override {
        const int n = reps(x);
        const Vec t = square_sums(x);
        double ll = 0.0;
        for (int k = 0; k < dim_; ++k) {
            ll += -0.5 * n * std::log(2.0 * M_PI * theta[k]) - 0.5 * t[k] / theta[k];
        }
        return ll;
    }

    Vec grad_loglik_x(const Vec& x, const Vec& theta) const override {
        const int n = reps(x);
        const Vec t = square_sums(x);
        Vec g(dim_);
        for (int k = 0; k < dim_; ++k) g[k] = var_score(t[k], n, theta[k]);
        return g;
    }

    double loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        check_m(m);
        const auto ny = static_cast<double>(y.size());
        const double ty = y.squaredNorm();
        return loglik_x(x, theta) - 0.5 * ny * std::log(2.0 * M_PI * theta[m])
               - 0.5 * ty / theta[m];
    }

    Vec grad_loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        check_m(m);
        Vec g = grad_loglik_x(x, theta);
        g[m] += var_score(y.squaredNorm(), static_cast<double>(y.size()), theta[m]);
        return g;
    }

    Mat fim_x(const Vec& theta, int n_x) const override {
        Mat J = Mat::Zero(dim_, dim_);
        for (int k = 0; k < dim_; ++k) J(k, k) = n_x / (2.0 * theta[k] * theta[k]);
        return J;
    }

    Mat fim_y(const Vec& theta, int m, int n_y) const override {
        check_m(m);
        Mat J = Mat::Zero(dim_, dim_);
        J(m, m) = n_y / (2.0 * theta[m] * theta[m]);
        return J;
    }

    Mat fim_joint(const Vec& theta, int m, int n_x, int n_y) const override {
        Mat J = fim_x(theta, n_x);
        J += fim_y(theta, m, n_y);
        return J;
    }

    Vec ml_x(const Vec& x) const override {
        const int n = reps(x);
        return square_sums(x) / static_cast<double>(n);
    }

    SplitMl ml_y(const Vec& y, int m) const override {
        check_m(m);
        SplitMl out;
        out.values = Vec::Constant(dim_, std::numeric_limits<double>::quiet_NaN());
        out.values[m] = y.squaredNorm() / static_cast<double>(y.size());
        out.identified.assign(static_cast<std::size_t>(dim_), 0);
        out.identified[static_cast<std::size_t>(m)] = 1;
        return out;
    }

    Vec ml_joint(const Vec& x, const Vec& y, int m) const override {
        check_m(m);
        const int nx = reps(x);
        const auto ny = static_cast<double>(y.size());
        Vec est = ml_x(x);
        est[m] = (est[m] * nx + y.squaredNorm()) / (nx + ny);
        return est;
    }

    /// Pr(energy of m <= energy of m_second) under the minimum-energy rule:
    /// the central F(n_x, n_x) cdf at zeta = theta_m2 / theta_m.
    std::optional<double> analytic_pairwise_prob(const Vec& theta, int m,
                                                 int m_second) const override {
        check_m(m);
        check_m(m_second);
        return math::f_cdf(theta[m_second] / theta[m], n_x_, n_x_);
    }

    std::optional<Vec> analytic_pairwise_grad(const Vec& theta, int m,
                                              int m_second) const override {
        check_m(m);
        check_m(m_second);
        const double zeta = theta[m_second] / theta[m];
        const double scale = math::f_pdf(zeta, n_x_, n_x_)
                             / (theta[m] * math::f_cdf(zeta, n_x_, n_x_));
        Vec g = Vec::Zero(dim_);
        g[m_second] = scale;
        g[m] = -scale * zeta;
        return g;
    }

    std::optional<Vec> solve_score(const Vec& x, const Vec& y, int m,
                                   const Vec& g) const override {
        check_m(m);
        const int nx = reps(x);
        const Vec t = square_sums(x);
        Vec theta(dim_);
        for (int k = 0; k < dim_; ++k) {
            double ss = t[k];
            double total = nx;
            if (k == m) {
                ss += y.squaredNorm();
                total += static_cast<double>(y.size());
            }
            theta[k] = solve_coordinate(ss, total, g[k]);
        }
        return project(theta);
    }

    Vec project(const Vec& theta) const override { return theta.cwiseMax(kDomainEps); }

    static constexpr double kDomainEps = 1e-9;

private:
    static double var_score(double sq_sum, double n, double theta) {
        return (sq_sum - n * theta) / (2.0 * theta * theta);
    }

    // Root of var_score(ss, total, theta) = g with theta > 0. The score
    // ranges over (-total^2 / (8 ss), +inf), so a sufficiently negative g
    // has no root; that is a score-solve failure.
    static double solve_coordinate(double ss, double total, double g) {
        if (g == 0.0) return ss / total;
        const double disc = total * total + 8.0 * g * ss;
        if (disc < 0.0) {
            throw std::runtime_error("spectrum: score equation has no root in the domain");
        }
        const double root = std::sqrt(disc);
        if (g > 0.0) return (-total + root) / (4.0 * g);
        // two positive roots; the branch continuous in g at g=0 is the smaller
        const double r1 = (-total + root) / (4.0 * g);
        const double r2 = (-total - root) / (4.0 * g);
        return std::min(r1, r2);
    }

    int reps(const Vec& x) const {
        if (x.size() % dim_ != 0 || x.size() == 0) {
            throw std::invalid_argument("spectrum: bad observation layout");
        }
        return static_cast<int>(x.size()) / dim_;
    }

    Vec square_sums(const Vec& x) const {
        const int n = reps(x);
        Eigen::Map<const Mat> cols(x.data(), dim_, n);
        return cols.array().square().matrix().rowwise().sum();
    }

    int check_m(int m) const {
        if (m < 0 || m >= dim_) throw std::out_of_range("spectrum: selection index");
        return m;
    }

    int dim_;
    int n_x_;
    int n_y_;
};

}  // namespace psml
