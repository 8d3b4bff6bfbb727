#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vecon/core.hpp"
#include "vecon/errors.hpp"

namespace vecon {

inline constexpr std::string_view snapshot_schema_tag = "vecon-snapshot-v1";
inline constexpr std::int64_t ms_per_day = 86'400'000;

/// Result of the zero-movement filter: how many series stayed and which were
/// dropped for showing no price movement over the whole window.
struct ExclusionReport {
    std::size_t retained_count = 0;
    std::vector<std::int64_t> excluded_ids;  // ascending
};

namespace detail {

inline std::int64_t parse_i64(std::string_view text, errc code, const std::string& what) {
    std::int64_t value = 0;
    auto [p, e] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(e == std::errc() && p == text.data() + text.size(), code,
            what + ": '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::string read_file(const std::filesystem::path& path, errc missing_code) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), missing_code, "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return std::move(ss).str();
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = std::filesystem::path(path).concat(".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(os.good(), errc::io_failure, "cannot open " + tmp.string());
        os << content;
        require(os.good(), errc::io_failure, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, errc::io_failure, "rename failed: " + path.string());
}

}  // namespace detail

/// Parses one item-price document: a JSON object whose "daily" key maps
/// epoch-millisecond strings to integer prices. Unknown sibling keys are
/// ignored. The document carries no id, so it is supplied from context.
inline PriceSeries parse_item_document(std::string_view text, std::int64_t item_id,
                                       std::optional<std::string> name = std::nullopt) {
    const nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    require(!doc.is_discarded() && doc.is_object(), errc::malformed_document,
            "item " + std::to_string(item_id) + ": not a JSON object");
    const auto daily = doc.find("daily");
    require(daily != doc.end() && daily->is_object(), errc::malformed_document,
            "item " + std::to_string(item_id) + ": missing 'daily' object");
    require(!daily->empty(), errc::empty_series,
            "item " + std::to_string(item_id) + ": 'daily' is empty");

    std::vector<PricePoint> points;
    points.reserve(daily->size());
    for (const auto& [key, value] : daily->items()) {
        const std::int64_t ms =
            detail::parse_i64(key, errc::malformed_document,
                              "item " + std::to_string(item_id) + ": bad timestamp key");
        require(value.is_number_integer() || value.is_number_unsigned(),
                errc::malformed_document,
                "item " + std::to_string(item_id) + ": non-integer price at " + key);
        const std::int64_t price = value.get<std::int64_t>();
        require(price > 0, errc::non_positive_price,
                "item " + std::to_string(item_id) + ": price " + std::to_string(price) +
                    " at " + key);
        points.push_back(PricePoint{detail::floor_div(ms, ms_per_day), price});
    }
    std::sort(points.begin(), points.end(),
              [](const PricePoint& a, const PricePoint& b) { return a.day < b.day; });
    for (std::size_t i = 1; i < points.size(); ++i)
        require(points[i].day != points[i - 1].day, errc::duplicate_day,
                "item " + std::to_string(item_id) + ": two entries on ordinal day " +
                    std::to_string(points[i].day));
    return PriceSeries::create(item_id, std::move(name), std::move(points));
}

/// Parses the volume table CSV (header `item_id,volume`). Records are
/// returned sorted by volume descending, ties by item_id ascending.
inline std::vector<VolumeRecord> parse_volume_table(std::string_view text) {
    std::vector<VolumeRecord> records;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = detail::strip_cr(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) continue;
        if (!saw_header) {
            require(line == "item_id,volume", errc::malformed_document,
                    "volume table header must be 'item_id,volume'");
            saw_header = true;
            continue;
        }
        const auto fields = detail::split_csv(line);
        require(fields.size() == 2, errc::malformed_document,
                "volume row needs 2 fields: '" + std::string(line) + "'");
        const std::int64_t id =
            detail::parse_i64(fields[0], errc::malformed_document, "bad item_id");
        require(id > 0, errc::malformed_document, "item_id must be positive: " + std::to_string(id));
        const std::int64_t volume =
            detail::parse_i64(fields[1], errc::malformed_document, "bad volume");
        require(volume >= 1, errc::non_positive_volume,
                "item " + std::to_string(id) + " volume " + std::to_string(volume));
        records.push_back(VolumeRecord{id, volume});
    }
    require(saw_header, errc::malformed_document, "volume table is empty");

    std::vector<std::int64_t> ids;
    ids.reserve(records.size());
    for (const auto& r : records) ids.push_back(r.item_id);
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end())
        fail(errc::duplicate_item, "item " + std::to_string(*dup) + " listed twice");

    std::sort(records.begin(), records.end(), [](const VolumeRecord& a, const VolumeRecord& b) {
        if (a.volume != b.volume) return a.volume > b.volume;
        return a.item_id < b.item_id;
    });
    return records;
}

/// Drops series whose price never moves over the full window
/// (max == min). Excluded ids are reported in ascending order.
inline std::pair<std::vector<PriceSeries>, ExclusionReport> filter_static(
    std::vector<PriceSeries> series_set) {
    std::vector<PriceSeries> retained;
    ExclusionReport report;
    for (auto& s : series_set) {
        if (s.constant())
            report.excluded_ids.push_back(s.item_id());
        else
            retained.push_back(std::move(s));
    }
    std::sort(report.excluded_ids.begin(), report.excluded_ids.end());
    report.retained_count = retained.size();
    return {std::move(retained), std::move(report)};
}

/// Aligns one series to the window: output day indexes are 0..length_days-1,
/// each day carrying the most recent observation at or before it (exchange
/// "last traded price" semantics); days before the first observation take the
/// first observation. Coverage counts distinct observed in-window days.
inline PriceSeries align_series(const PriceSeries& series, const AnalysisWindow& window,
                                double min_coverage = 0.90) {
    const std::int64_t start = window.start_epoch_day();
    const std::int64_t end = window.end_epoch_day();
    const auto& pts = series.points();

    std::size_t in_window = 0;
    for (const auto& p : pts)
        if (p.day >= start && p.day <= end) ++in_window;
    require(in_window > 0, errc::no_overlap,
            "item " + std::to_string(series.item_id()) + " has no observations in the window");
    const double coverage =
        static_cast<double>(in_window) / static_cast<double>(window.length_days());
    require(coverage >= min_coverage, errc::insufficient_coverage,
            "item " + std::to_string(series.item_id()) + " covers " +
                std::to_string(coverage * 100) + "% of the window");

    std::vector<PricePoint> aligned;
    aligned.reserve(static_cast<std::size_t>(window.length_days()));
    std::size_t next = 0;  // first observation with day > current window day
    std::int64_t last_price = 0;
    bool have_prior = false;
    for (int t = 0; t < window.length_days(); ++t) {
        const std::int64_t day = start + t;
        while (next < pts.size() && pts[next].day <= day) {
            last_price = pts[next].price;
            have_prior = true;
            ++next;
        }
        const std::int64_t price = have_prior ? last_price : pts.front().price;
        aligned.push_back(PricePoint{t, price});
    }
    return PriceSeries::create(series.item_id(), series.name(), std::move(aligned));
}

/// Aligns every series; any series violating coverage/overlap raises the
/// corresponding error. Output order follows input order.
inline std::vector<PriceSeries> align_window(std::span<const PriceSeries> series_set,
                                             const AnalysisWindow& window,
                                             double min_coverage = 0.90) {
    std::vector<PriceSeries> out;
    out.reserve(series_set.size());
    for (const auto& s : series_set) out.push_back(align_series(s, window, min_coverage));
    return out;
}

// ---------------------------------------------------------------------------
// canonical snapshot files
// ---------------------------------------------------------------------------

/// Writes dir/meta.json, dir/prices.csv and (when present) dir/volumes.csv.
/// Each file goes through a temp file + rename.
inline void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, errc::io_failure, "cannot create " + dir.string());

    nlohmann::ordered_json meta;
    meta["schema"] = snapshot_schema_tag;
    meta["window"] = {{"start_day", snapshot.window().start_iso()},
                      {"length_days", snapshot.window().length_days()}};
    if (snapshot.bond()) {
        meta["bond"] = {{"real_price", snapshot.bond()->real_price().to_string()},
                        {"virtual_price", snapshot.bond()->virtual_price()}};
    }
    nlohmann::ordered_json names = nlohmann::ordered_json::object();
    for (const auto& s : snapshot.series())
        if (s.name()) names[std::to_string(s.item_id())] = *s.name();
    if (!names.empty()) meta["names"] = std::move(names);
    detail::write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");

    std::string prices = "item_id,day_index,price\n";
    for (const auto& s : snapshot.series())
        for (const auto& p : s.points())
            prices += std::to_string(s.item_id()) + "," + std::to_string(p.day) + "," +
                      std::to_string(p.price) + "\n";
    detail::write_file_atomic(dir / "prices.csv", prices);

    if (snapshot.volumes()) {
        std::string volumes = "item_id,volume\n";
        for (const auto& v : *snapshot.volumes())
            volumes += std::to_string(v.item_id) + "," + std::to_string(v.volume) + "\n";
        detail::write_file_atomic(dir / "volumes.csv", volumes);
    }
}

inline Snapshot load_snapshot(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    require(fs::exists(dir / "meta.json"), errc::source_unavailable,
            "no snapshot at " + dir.string() + " (meta.json missing)");

    const std::string meta_text = detail::read_file(dir / "meta.json", errc::source_unavailable);
    const nlohmann::json meta = nlohmann::json::parse(meta_text, nullptr, false);
    require(!meta.is_discarded() && meta.is_object(), errc::malformed_snapshot_file,
            "meta.json is not a JSON object");
    require(meta.contains("schema") && meta["schema"].is_string(), errc::malformed_snapshot_file,
            "meta.json has no schema tag");
    require(meta["schema"] == snapshot_schema_tag, errc::schema_version_mismatch,
            "expected '" + std::string(snapshot_schema_tag) + "', found '" +
                meta["schema"].get<std::string>() + "'");

    AnalysisWindow window = [&] {
        try {
            const auto& w = meta.at("window");
            return AnalysisWindow::create(w.at("start_day").get<std::string>(),
                                          w.at("length_days").get<int>());
        } catch (const std::exception& e) {
            fail(errc::malformed_snapshot_file, std::string("bad window in meta.json: ") + e.what());
        }
    }();

    std::optional<BondQuote> bond;
    if (meta.contains("bond")) {
        try {
            const auto& b = meta.at("bond");
            const Decimal4 real = b.at("real_price").is_string()
                                      ? Decimal4::parse(b.at("real_price").get<std::string>())
                                      : Decimal4::from_double(b.at("real_price").get<double>());
            bond = BondQuote::create(real, b.at("virtual_price").get<std::int64_t>());
        } catch (const std::exception& e) {
            fail(errc::malformed_snapshot_file, std::string("bad bond in meta.json: ") + e.what());
        }
    }

    std::map<std::int64_t, std::string> names;
    if (meta.contains("names")) {
        require(meta["names"].is_object(), errc::malformed_snapshot_file, "names must be an object");
        for (const auto& [key, value] : meta["names"].items()) {
            require(value.is_string(), errc::malformed_snapshot_file, "name must be a string");
            names[detail::parse_i64(key, errc::malformed_snapshot_file, "bad names key")] =
                value.get<std::string>();
        }
    }

    const std::string prices_text =
        detail::read_file(dir / "prices.csv", errc::malformed_snapshot_file);
    std::map<std::int64_t, std::vector<PricePoint>> by_item;
    {
        std::size_t pos = 0;
        bool saw_header = false;
        while (pos <= prices_text.size()) {
            std::size_t eol = prices_text.find('\n', pos);
            if (eol == std::string::npos) eol = prices_text.size();
            std::string_view line =
                detail::strip_cr(std::string_view(prices_text).substr(pos, eol - pos));
            pos = eol + 1;
            if (line.empty()) continue;
            if (!saw_header) {
                require(line == "item_id,day_index,price", errc::malformed_snapshot_file,
                        "prices.csv header must be 'item_id,day_index,price'");
                saw_header = true;
                continue;
            }
            const auto fields = detail::split_csv(line);
            require(fields.size() == 3, errc::malformed_snapshot_file,
                    "prices.csv row needs 3 fields: '" + std::string(line) + "'");
            const std::int64_t id =
                detail::parse_i64(fields[0], errc::malformed_snapshot_file, "bad item_id");
            const std::int64_t day =
                detail::parse_i64(fields[1], errc::malformed_snapshot_file, "bad day_index");
            const std::int64_t price =
                detail::parse_i64(fields[2], errc::malformed_snapshot_file, "bad price");
            by_item[id].push_back(PricePoint{day, price});
        }
        require(saw_header, errc::malformed_snapshot_file, "prices.csv is empty");
    }

    std::vector<PriceSeries> series;
    series.reserve(by_item.size());
    try {
        for (auto& [id, points] : by_item) {
            auto it = names.find(id);
            series.push_back(PriceSeries::create(
                id, it == names.end() ? std::nullopt : std::optional<std::string>(it->second),
                std::move(points)));
        }
    } catch (const error& e) {
        fail(errc::malformed_snapshot_file, std::string("bad series in prices.csv: ") + e.what());
    }

    std::optional<std::vector<VolumeRecord>> volumes;
    if (fs::exists(dir / "volumes.csv")) {
        try {
            volumes =
                parse_volume_table(detail::read_file(dir / "volumes.csv", errc::io_failure));
        } catch (const error& e) {
            if (e.code() == errc::io_failure) throw;
            fail(errc::malformed_snapshot_file, std::string("bad volumes.csv: ") + e.what());
        }
    }

    try {
        return Snapshot::create(window, std::move(series), std::move(volumes), std::move(bond));
    } catch (const error& e) {
        fail(errc::malformed_snapshot_file, std::string("inconsistent snapshot: ") + e.what());
    }
}

/// Ingest orchestration: parse raw documents, resolve the window (anchored at
/// the newest observed day when no start is given), align, and assemble a
/// snapshot. Items failing coverage/overlap are dropped and reported back
/// rather than aborting the batch.
struct IngestResult {
    Snapshot snapshot;
    std::vector<std::pair<std::int64_t, std::string>> dropped;  // id, reason
};

inline IngestResult build_snapshot(
    const std::vector<std::pair<std::int64_t, std::string>>& documents,
    std::optional<AnalysisWindow> window, int default_length_days, double min_coverage,
    std::optional<std::vector<VolumeRecord>> volumes, std::optional<BondQuote> bond) {
    std::vector<PriceSeries> raw;
    raw.reserve(documents.size());
    for (const auto& [id, body] : documents) raw.push_back(parse_item_document(body, id));

    if (!window) {
        require(!raw.empty(), errc::empty_snapshot, "no documents to derive a window from");
        std::int64_t end = raw.front().points().back().day;
        for (const auto& s : raw) end = std::max(end, s.points().back().day);
        window = AnalysisWindow::ending_at(end, default_length_days);
    }

    std::vector<std::pair<std::int64_t, std::string>> dropped;
    std::vector<PriceSeries> aligned;
    for (const auto& s : raw) {
        try {
            aligned.push_back(align_series(s, *window, min_coverage));
        } catch (const error& e) {
            if (e.code() != errc::no_overlap && e.code() != errc::insufficient_coverage) throw;
            dropped.emplace_back(s.item_id(), std::string(errc_name(e.code())));
        }
    }
    return IngestResult{
        Snapshot::create(*window, std::move(aligned), std::move(volumes), std::move(bond)),
        std::move(dropped)};
}

}  // namespace vecon
