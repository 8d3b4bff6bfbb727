#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vecon/calendar.hpp"
#include "vecon/decimal.hpp"
#include "vecon/errors.hpp"

namespace vecon {

/// The analysis window: `length_days` consecutive days starting at
/// `start_epoch_day`. Day ordinals inside the window run 0..length_days-1.
class AnalysisWindow {
  public:
    static constexpr int default_length_days = 180;

    static AnalysisWindow create(std::int64_t start_epoch_day, int length_days) {
        require(length_days >= 2, errc::invalid_value,
                "window needs at least 2 days, got " + std::to_string(length_days));
        return AnalysisWindow(start_epoch_day, length_days);
    }

    static AnalysisWindow create(std::string_view start_iso, int length_days) {
        return create(parse_iso_date(start_iso), length_days);
    }

    /// Window whose last day is `end_epoch_day` (inclusive).
    static AnalysisWindow ending_at(std::int64_t end_epoch_day, int length_days) {
        return create(end_epoch_day - length_days + 1, length_days);
    }

    std::int64_t start_epoch_day() const { return start_; }
    std::int64_t end_epoch_day() const { return start_ + length_ - 1; }
    int length_days() const { return length_; }
    std::string start_iso() const { return format_iso_date(start_); }

    bool contains_epoch_day(std::int64_t day) const {
        return day >= start_ && day <= end_epoch_day();
    }

    bool operator==(const AnalysisWindow&) const = default;

  private:
    AnalysisWindow(std::int64_t start, int length) : start_(start), length_(length) {}
    std::int64_t start_;
    int length_;
};

struct PricePoint {
    std::int64_t day = 0;  // epoch-day before alignment, window ordinal after
    std::int64_t price = 0;
    bool operator==(const PricePoint&) const = default;
};

/// One item's daily virtual-coin price history. Days strictly increasing,
/// prices strictly positive; both enforced at construction.
class PriceSeries {
  public:
    static PriceSeries create(std::int64_t item_id, std::optional<std::string> name,
                              std::vector<PricePoint> points) {
        require(item_id > 0, errc::invalid_value,
                "item_id must be positive, got " + std::to_string(item_id));
        require(!points.empty(), errc::empty_series,
                "item " + std::to_string(item_id) + " has no observations");
        for (std::size_t i = 0; i < points.size(); ++i) {
            require(points[i].price > 0, errc::non_positive_price,
                    "item " + std::to_string(item_id) + " day " +
                        std::to_string(points[i].day) + " price " +
                        std::to_string(points[i].price));
            if (i > 0)
                require(points[i].day > points[i - 1].day, errc::duplicate_day,
                        "item " + std::to_string(item_id) + " day " +
                            std::to_string(points[i].day) + " not increasing");
        }
        return PriceSeries(item_id, std::move(name), std::move(points));
    }

    std::int64_t item_id() const { return item_id_; }
    const std::optional<std::string>& name() const { return name_; }
    const std::vector<PricePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    /// Prices in day order, without the day labels.
    std::vector<std::int64_t> prices() const {
        std::vector<std::int64_t> out;
        out.reserve(points_.size());
        for (const auto& p : points_) out.push_back(p.price);
        return out;
    }

    bool constant() const {
        return std::all_of(points_.begin(), points_.end(),
                           [&](const PricePoint& p) { return p.price == points_.front().price; });
    }

    /// True when days are exactly the window ordinals 0..length_days-1.
    bool aligned_to(const AnalysisWindow& window) const {
        if (static_cast<int>(points_.size()) != window.length_days()) return false;
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (points_[i].day != static_cast<std::int64_t>(i)) return false;
        return true;
    }

    bool operator==(const PriceSeries&) const = default;

  private:
    PriceSeries(std::int64_t item_id, std::optional<std::string> name,
                std::vector<PricePoint> points)
        : item_id_(item_id), name_(std::move(name)), points_(std::move(points)) {}

    std::int64_t item_id_;
    std::optional<std::string> name_;
    std::vector<PricePoint> points_;
};

/// Total units traded over the window; only the most-traded items have one.
struct VolumeRecord {
    std::int64_t item_id = 0;
    std::int64_t volume = 0;

    static VolumeRecord create(std::int64_t item_id, std::int64_t volume) {
        require(item_id > 0, errc::invalid_value,
                "item_id must be positive, got " + std::to_string(item_id));
        require(volume >= 1, errc::non_positive_volume,
                "item " + std::to_string(item_id) + " volume " + std::to_string(volume));
        return VolumeRecord{item_id, volume};
    }

    bool operator==(const VolumeRecord&) const = default;
};

/// Official real<->virtual exchange rate: real currency per bond and virtual
/// coins per bond.
class BondQuote {
  public:
    static BondQuote create(Decimal4 real_price, std::int64_t virtual_price) {
        require(real_price.raw() > 0, errc::invalid_value, "bond real price must be positive");
        require(virtual_price > 0, errc::invalid_value, "bond virtual price must be positive");
        return BondQuote(real_price, virtual_price);
    }

    Decimal4 real_price() const { return real_; }
    std::int64_t virtual_price() const { return virtual_; }

    bool operator==(const BondQuote&) const = default;

  private:
    BondQuote(Decimal4 r, std::int64_t v) : real_(r), virtual_(v) {}
    Decimal4 real_;
    std::int64_t virtual_;
};

/// The canonical dataset: aligned series (sorted by item_id), optional volume
/// table and bond quote, all under one window. Immutable once built.
class Snapshot {
  public:
    static Snapshot create(AnalysisWindow window, std::vector<PriceSeries> series,
                           std::optional<std::vector<VolumeRecord>> volumes,
                           std::optional<BondQuote> bond) {
        std::sort(series.begin(), series.end(),
                  [](const PriceSeries& a, const PriceSeries& b) {
                      return a.item_id() < b.item_id();
                  });
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (i > 0)
                require(series[i].item_id() != series[i - 1].item_id(), errc::duplicate_item,
                        "duplicate item " + std::to_string(series[i].item_id()));
            require(series[i].aligned_to(window), errc::invalid_value,
                    "item " + std::to_string(series[i].item_id()) +
                        " is not aligned to the window");
        }
        if (volumes) {
            for (const auto& v : *volumes) VolumeRecord::create(v.item_id, v.volume);
            // canonical order: volume descending, ties by item_id ascending
            std::sort(volumes->begin(), volumes->end(),
                      [](const VolumeRecord& a, const VolumeRecord& b) {
                          if (a.volume != b.volume) return a.volume > b.volume;
                          return a.item_id < b.item_id;
                      });
            std::vector<std::int64_t> ids;
            ids.reserve(volumes->size());
            for (const auto& v : *volumes) ids.push_back(v.item_id);
            std::sort(ids.begin(), ids.end());
            require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
                    errc::duplicate_item, "duplicate item in volume table");
        }
        return Snapshot(window, std::move(series), std::move(volumes), std::move(bond));
    }

    const AnalysisWindow& window() const { return window_; }
    const std::vector<PriceSeries>& series() const { return series_; }
    const std::optional<std::vector<VolumeRecord>>& volumes() const { return volumes_; }
    const std::optional<BondQuote>& bond() const { return bond_; }

    const PriceSeries* find(std::int64_t item_id) const {
        auto it = std::lower_bound(series_.begin(), series_.end(), item_id,
                                   [](const PriceSeries& s, std::int64_t id) {
                                       return s.item_id() < id;
                                   });
        if (it == series_.end() || it->item_id() != item_id) return nullptr;
        return &*it;
    }

    bool operator==(const Snapshot&) const = default;

  private:
    Snapshot(AnalysisWindow window, std::vector<PriceSeries> series,
             std::optional<std::vector<VolumeRecord>> volumes, std::optional<BondQuote> bond)
        : window_(window),
          series_(std::move(series)),
          volumes_(std::move(volumes)),
          bond_(std::move(bond)) {}

    AnalysisWindow window_;
    std::vector<PriceSeries> series_;
    std::optional<std::vector<VolumeRecord>> volumes_;
    std::optional<BondQuote> bond_;
};

}  // namespace vecon
