#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vecon/errors.hpp"

namespace vecon {

/// Dense row-major matrix, just large enough for regression designs.
class Matrix {
  public:
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> residuals;
    double rss = 0;
    int n_obs = 0;
    int n_params = 0;

    /// Gaussian maximum-likelihood log-likelihood at the fit.
    double log_likelihood() const {
        const double n = n_obs;
        return -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(rss / n) + 1.0);
    }

    /// Akaike information criterion, -2*llf + 2*k with k = n_params.
    double aic() const { return -2.0 * log_likelihood() + 2.0 * n_params; }

    double t_value(std::size_t j) const { return coefficients[j] / standard_errors[j]; }
};

/// Least squares via Householder QR. Standard errors use the unbiased
/// residual variance (divisor n_obs - n_params).
inline OlsFit ols(const Matrix& design, std::span<const double> response) {
    const std::size_t n = design.rows();
    const std::size_t p = design.cols();
    require(response.size() == n, errc::invalid_value, "response length != design rows");
    require(p >= 1, errc::invalid_value, "design has no columns");
    require(n > p, errc::too_few_observations,
            std::to_string(n) + " observations for " + std::to_string(p) + " parameters");

    Matrix a = design;
    std::vector<double> qty(response.begin(), response.end());

    double max_col_norm = 0;
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        max_col_norm = std::max(max_col_norm, std::sqrt(s));
    }
    const double tol =
        std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(n)) * max_col_norm;

    std::vector<double> v(n);
    for (std::size_t j = 0; j < p; ++j) {
        double norm2 = 0;
        for (std::size_t i = j; i < n; ++i) norm2 += a(i, j) * a(i, j);
        const double norm = std::sqrt(norm2);
        require(norm > tol, errc::rank_deficient,
                "design column " + std::to_string(j) + " is linearly dependent");

        const double alpha = a(j, j) > 0 ? -norm : norm;
        v[j] = a(j, j) - alpha;
        double vnorm2 = v[j] * v[j];
        for (std::size_t i = j + 1; i < n; ++i) {
            v[i] = a(i, j);
            vnorm2 += v[i] * v[i];
        }
        a(j, j) = alpha;
        for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0;
        if (vnorm2 == 0) continue;

        for (std::size_t c = j + 1; c < p; ++c) {
            double s = 0;
            for (std::size_t i = j; i < n; ++i) s += v[i] * a(i, c);
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < n; ++i) a(i, c) -= f * v[i];
        }
        double s = 0;
        for (std::size_t i = j; i < n; ++i) s += v[i] * qty[i];
        const double f = 2.0 * s / vnorm2;
        for (std::size_t i = j; i < n; ++i) qty[i] -= f * v[i];
    }

    std::vector<double> beta(p);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = qty[jj];
        for (std::size_t k = jj + 1; k < p; ++k) s -= a(jj, k) * beta[k];
        beta[jj] = s / a(jj, jj);
    }

    std::vector<double> resid(n);
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0;
        for (std::size_t k = 0; k < p; ++k) fitted += design(i, k) * beta[k];
        resid[i] = response[i] - fitted;
        rss += resid[i] * resid[i];
    }
    const double sigma2 = rss / static_cast<double>(n - p);

    // inv(X'X) = Rinv * Rinv', with Rinv the inverse of the upper triangle.
    Matrix rinv(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t jj = c + 1; jj-- > 0;) {
            double s = (jj == c) ? 1.0 : 0.0;
            for (std::size_t k = jj + 1; k <= c; ++k) s -= a(jj, k) * rinv(k, c);
            rinv(jj, c) = s / a(jj, jj);
        }
    }
    std::vector<double> se(p);
    for (std::size_t jj = 0; jj < p; ++jj) {
        double diag = 0;
        for (std::size_t k = jj; k < p; ++k) diag += rinv(jj, k) * rinv(jj, k);
        se[jj] = std::sqrt(sigma2 * diag);
    }

    return OlsFit{std::move(beta), std::move(se), std::move(resid), rss,
                  static_cast<int>(n), static_cast<int>(p)};
}

}  // namespace vecon
