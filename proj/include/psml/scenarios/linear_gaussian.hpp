#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psml/core.hpp"
#include "psml/math/special.hpp"

namespace psml {

/// Correlated linear Gaussian populations:
///   x_n = H_x theta + w_n,   w_n ~ N(0, Sigma_w),  n = 1..n_x
///   y_n = H_y[m] theta + v_n, v_n ~ N(0, Sigma_v), n = 1..n_y
/// with the second-stage design matrix chosen by the first-stage selection.
/// Observation vectors are the per-repetition blocks stacked in order.
class LinearGaussianModel final : public ScenarioModel {
public:
    LinearGaussianModel(Mat H_x, std::vector<Mat> H_y, Mat Sigma_w, Mat Sigma_v,
                        int n_x, int n_y)
        : H_x_(std::move(H_x)),
          H_y_(std::move(H_y)),
          n_x_(n_x),
          n_y_(n_y),
          dim_(static_cast<int>(H_x_.cols())),
          k_x_(static_cast<int>(H_x_.rows())) {
        if (H_y_.size() != static_cast<std::size_t>(dim_)) {
            throw std::invalid_argument("linear gaussian: one H_y per selectable parameter");
        }
        init_noise(Sigma_w, Sigma_v);
        // Per-stage normal-equation operators; full column rank is required.
        Ax_ = H_x_.transpose() * Sw_inv_;
        Gx_ = Ax_ * H_x_;
        Eigen::LDLT<Mat> gx(Gx_);
        if (gx.info() != Eigen::Success || !gx.isPositive()) {
            throw std::invalid_argument("linear gaussian: H_x is rank-deficient");
        }
        Px_ = gx.solve(Ax_);
        Gx_inv_ = gx.solve(Mat::Identity(dim_, dim_));
        k_y_.resize(H_y_.size());
        Ay_.resize(H_y_.size());
        Gy_.resize(H_y_.size());
        Py_.resize(H_y_.size());
        joint_inv_.resize(H_y_.size());
        for (std::size_t m = 0; m < H_y_.size(); ++m) {
            if (H_y_[m].cols() != dim_) throw std::invalid_argument("linear gaussian: H_y shape");
            k_y_[m] = static_cast<int>(H_y_[m].rows());
            Ay_[m] = H_y_[m].transpose() * Sv_inv_;
            Gy_[m] = Ay_[m] * H_y_[m];
            Eigen::LDLT<Mat> gy(Gy_[m]);
            if (gy.info() != Eigen::Success || !gy.isPositive()) {
                throw std::invalid_argument("linear gaussian: H_y is rank-deficient");
            }
            Py_[m] = gy.solve(Ay_[m]);
            const Mat joint = n_x_ * Gx_ + n_y_ * Gy_[m];
            joint_inv_[m] = joint.ldlt().solve(Mat::Identity(dim_, dim_));
        }
    }

    /// Paper-style construction: H = I on both stages, shared covariance
    /// Sigma_ij = (1 + |i - j|)^-2.
    static LinearGaussianModel standard(int dim, int n_x, int n_y) {
        Mat sigma(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double d = 1.0 + std::abs(i - j);
                sigma(i, j) = 1.0 / (d * d);
            }
        }
        std::vector<Mat> hy(static_cast<std::size_t>(dim), Mat::Identity(dim, dim));
        return LinearGaussianModel(Mat::Identity(dim, dim), std::move(hy), sigma, sigma,
                                   n_x, n_y);
    }

    int dim() const override { return dim_; }
    int first_stage_count() const override { return n_x_; }
    int second_stage_count() const override { return n_y_; }

    Vec sample_first_stage(const Vec& theta, int n_x, Rng& rng) const override {
        return sample_stage(H_x_ * theta, Lw_, k_x_, n_x, rng);
    }

    Vec sample_second_stage(const Vec& theta, int m, int n_y, Rng& rng) const override {
        return sample_stage(H_y_[check_m(m)] * theta, Lv_, k_y_[m], n_y, rng);
    }

    double loglik_x(const Vec& x, const Vec& theta) const override {
        return stage_loglik(x, H_x_ * theta, Sw_inv_, k_x_, logdet_w_);
    }

    Vec grad_loglik_x(const Vec& x, const Vec& theta) const override {
        const int n = reps(x, k_x_);
        return n * (Ax_ * (block_mean(x, k_x_) - H_x_ * theta));
    }

    double loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        return loglik_x(x, theta)
             + stage_loglik(y, H_y_[check_m(m)] * theta, Sv_inv_, k_y_[m], logdet_v_);
    }

    Vec grad_loglik_joint(const Vec& x, const Vec& y, int m, const Vec& theta) const override {
        const int ny = reps(y, k_y_[check_m(m)]);
        return grad_loglik_x(x, theta)
             + ny * (Ay_[m] * (block_mean(y, k_y_[m]) - H_y_[m] * theta));
    }

    Mat fim_x(const Vec&, int n_x) const override { return n_x * Gx_; }

    Mat fim_y(const Vec&, int m, int n_y) const override { return n_y * Gy_[check_m(m)]; }

    Mat fim_joint(const Vec&, int m, int n_x, int n_y) const override {
        return n_x * Gx_ + n_y * Gy_[check_m(m)];
    }

    bool fim_depends_on_theta() const override { return false; }

    Vec ml_x(const Vec& x) const override { return Px_ * block_mean(x, k_x_); }

    SplitMl ml_y(const Vec& y, int m) const override {
        SplitMl out;
        out.values = Py_[check_m(m)] * block_mean(y, k_y_[m]);
        out.identified.assign(static_cast<std::size_t>(dim_), 1);
        return out;
    }

    Vec ml_joint(const Vec& x, const Vec& y, int m) const override {
        check_m(m);
        const int nx = reps(x, k_x_);
        const int ny = reps(y, k_y_[m]);
        const Vec b = nx * (Ax_ * block_mean(x, k_x_)) + ny * (Ay_[m] * block_mean(y, k_y_[m]));
        if (nx == n_x_ && ny == n_y_) return joint_inv_[m] * b;
        return (nx * Gx_ + ny * Gy_[m]).ldlt().solve(b);
    }

    /// Standardized pairwise contrast: Delta = (e_m - e_m2) / sqrt(a^T Jx^-1 a).
    Vec pairwise_contrast(int m, int m_second, int n_x) const {
        Vec a = Vec::Zero(dim_);
        a[check_m(m)] = 1.0;
        a[check_m(m_second)] = -1.0;
        const double var = a.dot(Gx_inv_ * a) / n_x;
        return a / std::sqrt(var);
    }

    std::optional<double> analytic_pairwise_prob(const Vec& theta, int m,
                                                 int m_second) const override {
        const Vec delta = pairwise_contrast(m, m_second, n_x_);
        return math::norm_cdf(delta.dot(theta));
    }

    std::optional<Vec> analytic_pairwise_grad(const Vec& theta, int m,
                                              int m_second) const override {
        const Vec delta = pairwise_contrast(m, m_second, n_x_);
        return Vec(math::mills_ratio(delta.dot(theta)) * delta);
    }

    std::optional<Vec> solve_score(const Vec& x, const Vec& y, int m,
                                   const Vec& g) const override {
        // The score is exactly linear in theta, so the solve is a shift of
        // the ML estimate.
        return Vec(ml_joint(x, y, m) - joint_inv_[check_m(m)] * g);
    }

private:
    static int reps(const Vec& v, int block) {
        if (block <= 0 || v.size() % block != 0 || v.size() == 0) {
            throw std::invalid_argument("linear gaussian: bad observation layout");
        }
        return static_cast<int>(v.size()) / block;
    }

    static Vec block_mean(const Vec& v, int block) {
        const int n = reps(v, block);
        Eigen::Map<const Mat> cols(v.data(), block, n);
        return cols.rowwise().mean();
    }

    static Vec sample_stage(const Vec& mean, const Mat& chol, int block, int n, Rng& rng) {
        Mat z(block, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < block; ++i) z(i, j) = rng.normal();
        }
        Mat cols = chol * z;
        cols.colwise() += mean;
        return Eigen::Map<Vec>(cols.data(), static_cast<Eigen::Index>(block) * n);
    }

    static double stage_loglik(const Vec& v, const Vec& mean, const Mat& prec, int block,
                               double logdet) {
        const int n = reps(v, block);
        double quad = 0.0;
        for (int j = 0; j < n; ++j) {
            const Vec r = v.segment(static_cast<Eigen::Index>(j) * block, block) - mean;
            quad += r.dot(prec * r);
        }
        return -0.5 * (quad + n * (block * std::log(2.0 * M_PI) + logdet));
    }

    void init_noise(const Mat& Sigma_w, const Mat& Sigma_v) {
        Eigen::LLT<Mat> llt_w(Sigma_w);
        Eigen::LLT<Mat> llt_v(Sigma_v);
        if (llt_w.info() != Eigen::Success || llt_v.info() != Eigen::Success) {
            throw std::invalid_argument("linear gaussian: noise covariance not SPD");
        }
        Lw_ = llt_w.matrixL();
        Lv_ = llt_v.matrixL();
        Sw_inv_ = llt_w.solve(Mat::Identity(Sigma_w.rows(), Sigma_w.cols()));
        Sv_inv_ = llt_v.solve(Mat::Identity(Sigma_v.rows(), Sigma_v.cols()));
        logdet_w_ = 2.0 * Lw_.diagonal().array().log().sum();
        logdet_v_ = 2.0 * Lv_.diagonal().array().log().sum();
    }

    int check_m(int m) const {
        if (m < 0 || m >= dim_) throw std::out_of_range("linear gaussian: selection index");
        return m;
    }

    Mat H_x_;
    std::vector<Mat> H_y_;
    int n_x_;
    int n_y_;
    int dim_;
    int k_x_;
    std::vector<int> k_y_;
    Mat Lw_, Lv_, Sw_inv_, Sv_inv_;
    double logdet_w_ = 0.0, logdet_v_ = 0.0;
    Mat Ax_, Gx_, Gx_inv_, Px_;
    std::vector<Mat> Ay_, Gy_, Py_, joint_inv_;
};

/// James-Stein shrinkage of an ML estimate under information matrix J.
/// A zero quadratic form leaves the estimate unchanged.
inline Vec james_stein(const Vec& ml, const Mat& J) {
    const int dim = static_cast<int>(ml.size());
    if (dim < 3) throw std::invalid_argument("james_stein: needs dimension >= 3");
    const double quad = ml.dot(J * ml);
    if (quad == 0.0) return ml;
    return (1.0 - (dim - 2) / quad) * ml;
}

}  // namespace psml
