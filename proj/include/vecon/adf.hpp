#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecon/errors.hpp"
#include "vecon/ols.hpp"

namespace vecon {

/// Schwert (1989) lag budget: floor(12 * (n/100)^0.25).
inline int adf_max_lag(int n_obs) {
    require(n_obs >= 20, errc::too_few_observations,
            "lag rule needs at least 20 observations, got " + std::to_string(n_obs));
    return static_cast<int>(
        std::floor(12.0 * std::pow(static_cast<double>(n_obs) / 100.0, 0.25)));
}

namespace detail {

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Dickey-Fuller tau distribution, constant-only regression, one variable.
// Asymptotic p-value approximation from MacKinnon (1994): p = Phi(poly(t)),
// with a low-t and a high-t polynomial switching at tau_star.
inline constexpr double tau_c_max = 2.74;
inline constexpr double tau_c_min = -18.83;
inline constexpr double tau_c_star = -1.61;
inline constexpr double tau_c_smallp[3] = {2.1659, 1.4412, 0.038269};
inline constexpr double tau_c_largep[4] = {1.7339, 0.93202, -0.12745, -0.010368};

// Finite-sample critical-value response surface from MacKinnon (2010),
// constant-only case: cv(n) = b0 + b1/n + b2/n^2 + b3/n^3.
inline constexpr double tau_c_cv_1pct[4] = {-3.43035, -6.5393, -16.786, -79.433};
inline constexpr double tau_c_cv_5pct[4] = {-2.86154, -2.8903, -4.234, -40.040};
inline constexpr double tau_c_cv_10pct[4] = {-2.56677, -1.5384, -2.809, 0.0};

inline double response_surface(const double (&b)[4], int n_obs) {
    const double x = 1.0 / static_cast<double>(n_obs);
    return b[0] + x * (b[1] + x * (b[2] + x * b[3]));
}

}  // namespace detail

/// Approximate p-value of the constant-only Dickey-Fuller tau statistic.
/// The published approximation is asymptotic, so n_obs does not enter the
/// formula; it is part of the contract for symmetry with the critical values.
inline double mackinnon_pvalue(double t_stat, [[maybe_unused]] int n_obs = 0) {
    require(std::isfinite(t_stat), errc::invalid_value, "non-finite t statistic");
    if (t_stat > detail::tau_c_max) return 1.0;
    if (t_stat < detail::tau_c_min) return 0.0;
    double z;
    if (t_stat <= detail::tau_c_star) {
        const auto& c = detail::tau_c_smallp;
        z = c[0] + t_stat * (c[1] + t_stat * c[2]);
    } else {
        const auto& c = detail::tau_c_largep;
        z = c[0] + t_stat * (c[1] + t_stat * (c[2] + t_stat * c[3]));
    }
    return std::clamp(detail::norm_cdf(z), 0.0, 1.0);
}

struct CriticalValues {
    double pct1 = 0;
    double pct5 = 0;
    double pct10 = 0;
};

/// Finite-sample 1%/5%/10% critical values at the regression sample size.
inline CriticalValues mackinnon_critical_values(int n_obs) {
    require(n_obs > 0, errc::invalid_value, "n_obs must be positive");
    return CriticalValues{detail::response_surface(detail::tau_c_cv_1pct, n_obs),
                          detail::response_surface(detail::tau_c_cv_5pct, n_obs),
                          detail::response_surface(detail::tau_c_cv_10pct, n_obs)};
}

struct RejectFlags {
    bool pct1 = false;
    bool pct5 = false;
    bool pct10 = false;
};

/// Unit-root test outcome. The null hypothesis is that a unit root exists;
/// reject_at holds p_value < alpha for alpha in {1%, 5%, 10%}.
struct AdfResult {
    double t_stat = 0;
    double p_value = 1;
    int lags_used = 0;
    int n_obs = 0;  // observations entering the final regression
    CriticalValues critical_values;
    RejectFlags reject_at;
};

/// Augmented Dickey-Fuller test with constant, no trend:
///
///   dy_t = mu + gamma*y_{t-1} + sum_{j=1..k} delta_j*dy_{t-j} + e_t
///
/// k is chosen in [0, max_lag] by AIC over a common estimation sample (all
/// candidates trimmed at max_lag), then the winning lag is refit on the
/// longest sample it allows; the reported statistic is the t-ratio on gamma.
inline AdfResult adf_test(std::span<const double> series,
                          std::optional<int> max_lag = std::nullopt) {
    const int n = static_cast<int>(series.size());
    require(n >= 4, errc::too_few_observations,
            "series of length " + std::to_string(n) + " cannot be tested");
    const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
    require(*mn != *mx, errc::degenerate_series, "constant series has no unit-root question");
    for (double v : series)
        require(std::isfinite(v), errc::invalid_value, "non-finite series value");

    int lag_budget = max_lag ? *max_lag : adf_max_lag(n);
    require(lag_budget >= 0, errc::invalid_value, "negative max_lag");
    lag_budget = std::min(lag_budget, n / 2 - 2);
    const int n_sel = n - 1 - lag_budget;  // common estimation sample
    require(n_sel >= 20 && n_sel > lag_budget + 2, errc::too_few_observations,
            "only " + std::to_string(n_sel) + " usable observations after differencing/trimming");

    std::vector<double> diff(static_cast<std::size_t>(n - 1));
    for (int t = 0; t + 1 < n; ++t) diff[t] = series[t + 1] - series[t];

    // Design rows for sample size m (trimmed at lag k): row r's response is
    // diff[g] with g = (n-1-m) + r; regressors 1, y[g], diff[g-1..g-k].
    auto fit = [&](int k, int m) {
        Matrix design(static_cast<std::size_t>(m), static_cast<std::size_t>(k + 2));
        std::vector<double> response(static_cast<std::size_t>(m));
        const int offset = (n - 1) - m;
        for (int r = 0; r < m; ++r) {
            const int g = offset + r;
            response[r] = diff[g];
            design(r, 0) = 1.0;
            design(r, 1) = series[g];
            for (int j = 1; j <= k; ++j) design(r, 1 + j) = diff[g - j];
        }
        return ols(design, response);
    };

    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= lag_budget; ++k) {
        const double aic = fit(k, n_sel).aic();
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = k;
        }
    }

    const int n_fit = n - 1 - best_lag;
    const OlsFit final_fit = fit(best_lag, n_fit);
    const double t_stat = final_fit.t_value(1);
    const double p = mackinnon_pvalue(t_stat, n_fit);

    AdfResult result;
    result.t_stat = t_stat;
    result.p_value = p;
    result.lags_used = best_lag;
    result.n_obs = n_fit;
    result.critical_values = mackinnon_critical_values(n_fit);
    result.reject_at = RejectFlags{p < 0.01, p < 0.05, p < 0.10};
    return result;
}

}  // namespace vecon
