#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "vecon/core.hpp"
#include "vecon/transforms.hpp"

namespace vecon {

/// Per-item summary used by the bivariate plots and volume analyses.
/// std_price is the population standard deviation (divisor n).
struct DescriptiveStats {
    std::int64_t item_id = 0;
    double mean_price = 0;
    double std_price = 0;
    double cov = 0;  // coefficient of variation, sigma / mu
    double mean_daily_pct_change = 0;
    double log_mean_price = 0;
};

inline DescriptiveStats describe(const PriceSeries& series) {
    require(series.size() >= 2, errc::series_too_short,
            "item " + std::to_string(series.item_id()) + " has fewer than 2 observations");
    const auto& pts = series.points();
    const double n = static_cast<double>(pts.size());

    double sum = 0;
    for (const auto& p : pts) sum += static_cast<double>(p.price);
    const double mean = sum / n;

    double ss = 0;
    for (const auto& p : pts) {
        const double d = static_cast<double>(p.price) - mean;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / n);

    double ret_sum = 0;
    for (std::size_t t = 0; t + 1 < pts.size(); ++t)
        ret_sum += (static_cast<double>(pts[t + 1].price) - static_cast<double>(pts[t].price)) /
                   static_cast<double>(pts[t].price);
    const double mean_ret = ret_sum / (n - 1);

    return DescriptiveStats{series.item_id(), mean,  sigma,
                            sigma / mean,     mean_ret, std::log(mean)};
}

/// Fraction of total listed volume carried by the k largest entries.
inline double volume_share(std::span<const VolumeRecord> volumes, std::size_t k) {
    require(k >= 1 && k <= volumes.size(), errc::k_out_of_range,
            "k=" + std::to_string(k) + " outside 1.." + std::to_string(volumes.size()));
    std::vector<std::int64_t> sorted;
    sorted.reserve(volumes.size());
    for (const auto& v : volumes) sorted.push_back(v.volume);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    __int128 top = 0, total = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        total += sorted[i];
        if (i < k) top += sorted[i];
    }
    return static_cast<double>(top) / static_cast<double>(total);
}

/// Real-currency value traded: real value of the mean price, times volume.
inline Decimal4 traded_value(double mean_price, std::int64_t volume, const BondQuote& quote) {
    require(volume >= 0, errc::invalid_value, "negative volume");
    return to_real_value(mean_price, quote) * volume;
}

/// CSV export, 12 significant digits per numeric column.
inline void write_stats_csv(std::ostream& os, std::span<const DescriptiveStats> stats) {
    os << "item_id,mean_price,std_price,cov,mean_daily_pct_change,log_mean_price\n";
    char buf[160];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<long long>(s.item_id), s.mean_price, s.std_price, s.cov,
                      s.mean_daily_pct_change, s.log_mean_price);
        os << buf;
    }
}

}  // namespace vecon
