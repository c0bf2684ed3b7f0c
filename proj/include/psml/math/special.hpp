#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Special functions needed by the selection-probability formulas: standard
// normal pdf/cdf, inverse Mills ratio, regularized incomplete beta, central
// F-distribution cdf/pdf and binomial log-pmf. Implemented in-repo to keep
// the library dependency-light; validated against arbitrary-precision
// reference values in the test suite.

namespace psml::math {

inline constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

namespace detail {

// Asymptotic Mills series 1 - 1/z^2 + 3/z^4 - ... + 10395/z^12; the next
// term is below 1e-13 for z <= -20.
inline double mills_series(double z) {
    const double iz2 = 1.0 / (z * z);
    return 1.0
           + iz2 * (-1.0
                    + iz2 * (3.0
                             + iz2 * (-15.0
                                      + iz2 * (105.0 + iz2 * (-945.0 + iz2 * 10395.0)))));
}

}  // namespace detail

/// log Phi(z), stable for large negative z.
inline double log_norm_cdf(double z) {
    if (z > -20.0) return std::log(norm_cdf(z));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * M_PI)
           + std::log(detail::mills_series(z));
}

/// Inverse Mills ratio phi(z)/Phi(z), stable over the whole axis.
inline double mills_ratio(double z) {
    if (z > -20.0) return norm_pdf(z) / norm_cdf(z);
    return -z / detail::mills_series(z);
}

inline double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double betainc_reg(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("betainc_reg: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

/// Central F(d1, d2) cdf.
inline double f_cdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return betainc_reg(d1 * x / (d1 * x + d2), 0.5 * d1, 0.5 * d2);
}

/// Central F(d1, d2) pdf.
inline double f_pdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    const double lognum = 0.5 * d1 * std::log(d1 / d2) + (0.5 * d1 - 1.0) * std::log(x)
                          - 0.5 * (d1 + d2) * std::log1p(d1 * x / d2);
    return std::exp(lognum - lbeta(0.5 * d1, 0.5 * d2));
}

inline double lchoose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log of the binomial pmf with n successes out of trials at probability p.
inline double binom_logpmf(double n, double trials, double p) {
    if (p <= 0.0 || p >= 1.0) throw std::domain_error("binom_logpmf: p must be interior");
    return lchoose(trials, n) + n * std::log(p) + (trials - n) * std::log1p(-p);
}

/// Adaptive Simpson quadrature on [lo, hi] to absolute tolerance tol.
template <typename F>
double adaptive_simpson(const F& f, double lo, double hi, double tol, int max_depth = 40) {
    struct Impl {
        const F& f;
        int max_depth;
        double run(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth || std::fabs(delta) <= 15.0 * tol) {
                return left + right + delta / 15.0;
            }
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                 + run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    return Impl{f, max_depth}.run(lo, hi, fa, fm, fb, whole, tol, 0);
}

}  // namespace psml::math
