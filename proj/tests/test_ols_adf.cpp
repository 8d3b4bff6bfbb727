#include <cmath>
#include <filesystem>
#include <span>
#include <vector>

#include <catch2/catch.hpp>

#include "support/checks.hpp"
#include "support/synthetic.hpp"
#include "vecon/adf.hpp"
#include "vecon/ols.hpp"

using namespace vecon;
using testkit::require_error;

namespace {
const std::filesystem::path kFixtures = VECON_FIXTURE_DIR;

Matrix design_with_intercept(const std::vector<double>& x) {
    Matrix m(x.size(), 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        m(i, 0) = 1.0;
        m(i, 1) = x[i];
    }
    return m;
}
}  // namespace

TEST_CASE("ols recovers an exact linear relationship") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};  // y = 2x + 1
    const OlsFit fit = ols(design_with_intercept(x), y);
    CHECK(fit.coefficients[0] == Approx(1.0).margin(1e-12));
    CHECK(fit.coefficients[1] == Approx(2.0).margin(1e-12));
    CHECK(fit.rss == Approx(0.0).margin(1e-20));
    CHECK(fit.n_obs == 4);
    CHECK(fit.n_params == 2);
}

TEST_CASE("ols matches the normal-equations hand solve") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 2, 2, 3};
    const OlsFit fit = ols(design_with_intercept(x), y);
    CHECK(fit.coefficients[0] == Approx(1.1).epsilon(1e-12));
    CHECK(fit.coefficients[1] == Approx(0.6).epsilon(1e-12));
    CHECK(fit.residuals.size() == 4);
    CHECK(fit.rss == Approx(0.2).epsilon(1e-10));
}

TEST_CASE("ols rejects rank-deficient designs and tiny samples") {
    Matrix dup(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        dup(i, 0) = static_cast<double>(i + 1);
        dup(i, 1) = static_cast<double>(i + 1);  // same column twice
    }
    const std::vector<double> y{1, 2, 3, 4, 5};
    require_error([&] { ols(dup, y); }, errc::rank_deficient);

    Matrix tall(2, 2);
    tall(0, 0) = 1;
    tall(1, 0) = 1;
    tall(0, 1) = 0;
    tall(1, 1) = 1;
    const std::vector<double> y2{1, 2};
    require_error([&] { ols(tall, y2); }, errc::too_few_observations);
}

TEST_CASE("ols reproduces known coefficients on a synthetic problem") {
    testkit::Rng rng(31);
    const std::size_t n = 400;
    Matrix design(n, 3);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.gaussian();
        const double b = rng.gaussian() * 4.0;
        design(i, 0) = 1.0;
        design(i, 1) = a;
        design(i, 2) = b;
        y[i] = 2.5 - 1.25 * a + 0.75 * b;  // noiseless
    }
    const OlsFit fit = ols(design, y);
    CHECK(fit.coefficients[0] == Approx(2.5).epsilon(1e-10));
    CHECK(fit.coefficients[1] == Approx(-1.25).epsilon(1e-10));
    CHECK(fit.coefficients[2] == Approx(0.75).epsilon(1e-10));
}

TEST_CASE("lag budget rule") {
    CHECK(adf_max_lag(100) == 12);
    CHECK(adf_max_lag(180) == 13);  // 12 * 1.8^0.25 = 13.899 -> 13
    CHECK(adf_max_lag(20) == 8);
    require_error([] { adf_max_lag(19); }, errc::too_few_observations);
}

TEST_CASE("mackinnon p-value approximation hits the known anchors") {
    CHECK(mackinnon_pvalue(-2.86, 179) == Approx(0.05).margin(0.005));
    CHECK(mackinnon_pvalue(-10.0, 179) < 1e-4);
    CHECK(mackinnon_pvalue(1.0, 179) > 0.9);
    CHECK(mackinnon_pvalue(-30.0, 179) == 0.0);
    CHECK(mackinnon_pvalue(5.0, 179) == 1.0);
}

TEST_CASE("mackinnon p-value is monotone in the statistic") {
    double last = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = -12.0 + 15.0 * (static_cast<double>(i) / 1000.0);
        const double p = mackinnon_pvalue(t, 179);
        CHECK(p >= last);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        last = p;
    }
}

TEST_CASE("critical values shrink toward the asymptotic surface") {
    const CriticalValues at100 = mackinnon_critical_values(100);
    const CriticalValues at1000 = mackinnon_critical_values(1000);
    CHECK(at100.pct1 < at1000.pct1);
    CHECK(at1000.pct1 == Approx(-3.43035).margin(0.01));
    CHECK(at1000.pct5 == Approx(-2.86154).margin(0.005));
    CHECK(at1000.pct10 == Approx(-2.56677).margin(0.005));
}

TEST_CASE("adf test on the committed fixtures") {
    const auto rw = testkit::read_series_csv(kFixtures / "adf" / "rw_seed42.csv");
    const AdfResult walk = adf_test(rw);
    CHECK(walk.p_value > 0.10);
    CHECK_FALSE(walk.reject_at.pct5);

    const auto ar = testkit::read_series_csv(kFixtures / "adf" / "ar1_seed7.csv");
    const AdfResult stationary = adf_test(ar);
    CHECK(stationary.p_value < 0.01);
    CHECK(stationary.reject_at.pct1);
    CHECK(stationary.reject_at.pct5);
    CHECK(stationary.reject_at.pct10);
}

TEST_CASE("adf test rejects degenerate input") {
    const std::vector<double> flat(50, 3.0);
    require_error([&] { adf_test(flat); }, errc::degenerate_series);
    const std::vector<double> tiny{1.0, 2.0, 1.5, 2.5, 2.0};
    require_error([&] { adf_test(tiny); }, errc::too_few_observations);
}

TEST_CASE("adf statistic is invariant under affine maps of the series") {
    const auto y = testkit::random_walk(77, 180);
    const AdfResult base = adf_test(y);
    for (double a : {0.5, 3.0, 1000.0}) {
        for (double b : {-10.0, 0.0, 7.0}) {
            std::vector<double> mapped;
            mapped.reserve(y.size());
            for (double v : y) mapped.push_back(a * v + b);
            const AdfResult r = adf_test(mapped);
            CHECK(r.lags_used == base.lags_used);
            CHECK(r.t_stat == Approx(base.t_stat).margin(1e-8));
        }
    }
}

TEST_CASE("adf honors an explicit lag budget") {
    const auto y = testkit::read_series_csv(kFixtures / "adf" / "wn_seed5.csv");
    const AdfResult free_pick = adf_test(y);
    CHECK(free_pick.lags_used == 7);  // the AIC winner under the default budget
    const AdfResult capped = adf_test(y, 2);
    CHECK(capped.lags_used <= 2);
    CHECK(capped.n_obs == 180 - 1 - capped.lags_used);
    const AdfResult none = adf_test(y, 0);
    CHECK(none.lags_used == 0);
    CHECK(std::isfinite(none.t_stat));
}

TEST_CASE("adf results are bit-identical across reruns") {
    const auto y = testkit::ar1(5, 0.9, 220);
    const AdfResult a = adf_test(y);
    const AdfResult b = adf_test(y);
    CHECK(a.t_stat == b.t_stat);
    CHECK(a.p_value == b.p_value);
    CHECK(a.lags_used == b.lags_used);
    CHECK(a.critical_values.pct5 == b.critical_values.pct5);
}

TEST_CASE("reject flags line up with the critical values near the boundary") {
    // same decision from p < alpha and from t below the finite-sample cv,
    // apart from the approximation mismatch in a narrow band
    const auto y = testkit::random_walk(123, 180);
    const AdfResult r = adf_test(y);
    if (r.reject_at.pct5) CHECK(r.t_stat < r.critical_values.pct5 + 0.02);
    if (!r.reject_at.pct5) CHECK(r.t_stat > r.critical_values.pct5 - 0.02);
}
