#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vecon/core.hpp"
#include "vecon/descriptive.hpp"
#include "vecon/errors.hpp"

namespace vecon {

/// Four wealth brackets: items ranked by mean virtual price, lowest first.
struct Partition {
    static constexpr std::array<const char*, 4> group_labels = {"lower", "lower_mid",
                                                                "upper_mid", "upper"};
    std::string scheme = "quartile-by-mean-price";
    std::array<std::vector<std::int64_t>, 4> groups;  // lower .. upper
};

/// Ranks by mean_price ascending (ties by item_id), splits into 4 contiguous
/// rank groups; with |items| = 4q + r the lowest r groups get one extra item.
inline Partition partition_quartiles(std::span<const DescriptiveStats> stats) {
    require(stats.size() >= 4, errc::too_few_items,
            "quartiles need at least 4 items, got " + std::to_string(stats.size()));
    std::vector<const DescriptiveStats*> ranked;
    ranked.reserve(stats.size());
    for (const auto& s : stats) ranked.push_back(&s);
    std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
        if (a->mean_price != b->mean_price) return a->mean_price < b->mean_price;
        return a->item_id < b->item_id;
    });

    Partition part;
    const std::size_t q = ranked.size() / 4;
    const std::size_t r = ranked.size() % 4;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < 4; ++g) {
        const std::size_t count = q + (g < r ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i) part.groups[g].push_back(ranked[pos++]->item_id);
    }
    return part;
}

enum class Weighting { unit, volume };

constexpr const char* weighting_name(Weighting w) {
    return w == Weighting::unit ? "unit" : "volume";
}

/// An aggregate daily series over a membership list; the values are sums
/// (optionally volume-weighted) of member prices per day.
struct IndexSeries {
    std::string label;
    std::vector<double> values;  // length = window length
    std::vector<std::int64_t> membership;
    Weighting weighting = Weighting::unit;
};

/// values[t] = sum of member prices at day t.
inline IndexSeries build_sum_index(const Snapshot& snapshot,
                                   std::span<const std::int64_t> membership,
                                   std::string label) {
    require(!membership.empty(), errc::empty_membership, "index '" + label + "' has no members");
    const int days = snapshot.window().length_days();
    std::vector<__int128> acc(static_cast<std::size_t>(days), 0);
    for (std::int64_t id : membership) {
        const PriceSeries* s = snapshot.find(id);
        require(s != nullptr, errc::unknown_member,
                "index '" + label + "' member " + std::to_string(id) + " not in snapshot");
        const auto& pts = s->points();
        for (int t = 0; t < days; ++t) acc[t] += pts[t].price;
    }
    IndexSeries out{std::move(label), {}, {membership.begin(), membership.end()},
                    Weighting::unit};
    out.values.reserve(acc.size());
    for (__int128 v : acc) out.values.push_back(static_cast<double>(v));
    return out;
}

/// values[t] = sum of volume_i * price_i[t] over the volume table.
inline IndexSeries build_weighted_index(const Snapshot& snapshot,
                                        std::span<const VolumeRecord> volumes,
                                        std::string label) {
    require(!volumes.empty(), errc::empty_membership, "index '" + label + "' has no members");
    const int days = snapshot.window().length_days();
    std::vector<__int128> acc(static_cast<std::size_t>(days), 0);
    std::vector<std::int64_t> membership;
    membership.reserve(volumes.size());
    for (const auto& v : volumes) {
        require(v.volume >= 1, errc::non_positive_volume,
                "item " + std::to_string(v.item_id) + " volume " + std::to_string(v.volume));
        const PriceSeries* s = snapshot.find(v.item_id);
        require(s != nullptr, errc::unknown_member,
                "index '" + label + "' member " + std::to_string(v.item_id) + " not in snapshot");
        const auto& pts = s->points();
        for (int t = 0; t < days; ++t) acc[t] += static_cast<__int128>(v.volume) * pts[t].price;
        membership.push_back(v.item_id);
    }
    IndexSeries out{std::move(label), {}, std::move(membership), Weighting::volume};
    out.values.reserve(acc.size());
    for (__int128 v : acc) out.values.push_back(static_cast<double>(v));
    return out;
}

/// Window inflation in percent: 100 * (end - start) / end.
/// Note the end-point denominator; the conventional start-point denominator is
/// NOT used, and every report states this convention.
inline double inflation_rate_pct(const IndexSeries& index) {
    require(index.values.size() >= 2, errc::series_too_short,
            "index '" + index.label + "' shorter than 2 days");
    const double first = index.values.front();
    const double last = index.values.back();
    require(last != 0.0, errc::zero_end_value, "index '" + index.label + "' ends at zero");
    return 100.0 * (last - first) / last;
}

inline void write_index_csv(std::ostream& os, const IndexSeries& index) {
    os << "day_index,value\n";
    char buf[64];
    for (std::size_t t = 0; t < index.values.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", t, index.values[t]);
        os << buf;
    }
}

}  // namespace vecon
