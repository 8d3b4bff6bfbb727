#pragma once

// Deterministic synthetic data for tests: a fully specified PRNG (mt19937_64
// plus Box-Muller) so every suite sees the same draws on every platform, and
// builders for the synthetic economies the acceptance criteria run on.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vecon/core.hpp"

namespace testkit {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in (0, 1].
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) / 9007199254740993.0;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0;
};

inline std::vector<double> random_walk(std::uint64_t seed, int n, double start = 100.0) {
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    double level = start;
    for (int t = 0; t < n; ++t) {
        level += rng.gaussian();
        out[t] = level;
    }
    return out;
}

inline std::vector<double> ar1(std::uint64_t seed, double phi, int n, double level = 100.0) {
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    double x = 0;
    for (int t = 0; t < n; ++t) {
        x = phi * x + rng.gaussian();
        out[t] = x + level;
    }
    return out;
}

inline std::vector<double> read_series_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v = 0;
        std::from_chars(line.data(), line.data() + line.size(), v);
        out.push_back(v);
    }
    return out;
}

/// An aligned series with integer prices wiggling around `base` by about
/// +-1%, guaranteed non-constant.
inline vecon::PriceSeries noisy_series(std::int64_t item_id, std::int64_t base, int days,
                                       Rng& rng) {
    std::vector<vecon::PricePoint> points;
    points.reserve(static_cast<std::size_t>(days));
    for (int t = 0; t < days; ++t) {
        const double factor = 1.0 + 0.01 * (2.0 * rng.uniform() - 1.0);
        const std::int64_t price =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(base * factor)));
        points.push_back(vecon::PricePoint{t, price});
    }
    if (points.size() >= 2) {
        bool constant = true;
        for (const auto& p : points) constant = constant && p.price == points[0].price;
        if (constant) points[1].price += 1;  // tiny bases can round flat
    }
    return vecon::PriceSeries::create(item_id, std::nullopt, std::move(points));
}

inline vecon::PriceSeries constant_series(std::int64_t item_id, std::int64_t price, int days) {
    std::vector<vecon::PricePoint> points;
    for (int t = 0; t < days; ++t) points.push_back(vecon::PricePoint{t, price});
    return vecon::PriceSeries::create(item_id, std::nullopt, std::move(points));
}

/// Economy with `n_items` series over `days` days, the first `n_constant` of
/// them flat. Bases spread over decades so quartiles are well separated.
inline vecon::Snapshot synthetic_economy(int n_items, int days, int n_constant,
                                         std::uint64_t seed,
                                         std::optional<std::vector<vecon::VolumeRecord>> volumes =
                                             std::nullopt,
                                         std::optional<vecon::BondQuote> bond = std::nullopt) {
    Rng rng(seed);
    std::vector<vecon::PriceSeries> series;
    series.reserve(static_cast<std::size_t>(n_items));
    for (int i = 0; i < n_items; ++i) {
        const std::int64_t id = i + 1;
        const std::int64_t base = 50 + 37LL * i;
        if (i < n_constant)
            series.push_back(constant_series(id, base, days));
        else
            series.push_back(noisy_series(id, base, days, rng));
    }
    return vecon::Snapshot::create(vecon::AnalysisWindow::create("2018-06-13", days),
                                   std::move(series), std::move(volumes), std::move(bond));
}

/// 400-item economy where only the upper-mid quartile drifts by `drift_pct`
/// over the window (end-point denominator); the other quartiles wiggle around
/// flat bases by +-1%. Quartile bands are separated by decades so membership
/// is unambiguous.
inline vecon::Snapshot drifting_economy(int days, double drift_pct, std::uint64_t seed) {
    Rng rng(seed);
    const int per_group = 100;
    std::vector<vecon::PriceSeries> series;
    std::int64_t id = 1;
    for (int group = 0; group < 4; ++group) {
        const std::int64_t band_base = static_cast<std::int64_t>(std::pow(10.0, 2 + group) * 10);
        for (int i = 0; i < per_group; ++i, ++id) {
            const std::int64_t base = band_base + 13LL * i;
            if (group == 2) {
                // linear climb so that 100*(end-start)/end = drift_pct
                const double end_level = base / (1.0 - drift_pct / 100.0);
                std::vector<vecon::PricePoint> points;
                for (int t = 0; t < days; ++t) {
                    const double level =
                        base + (end_level - base) * (static_cast<double>(t) / (days - 1));
                    points.push_back(vecon::PricePoint{t, std::llround(level)});
                }
                series.push_back(vecon::PriceSeries::create(id, std::nullopt, std::move(points)));
            } else {
                series.push_back(noisy_series(id, base, days, rng));
            }
        }
    }
    return vecon::Snapshot::create(vecon::AnalysisWindow::create("2018-06-13", days),
                                   std::move(series), std::nullopt, std::nullopt);
}

}  // namespace testkit
