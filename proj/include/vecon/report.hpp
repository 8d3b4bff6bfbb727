#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecon/adf.hpp"
#include "vecon/core.hpp"
#include "vecon/descriptive.hpp"
#include "vecon/heatmap.hpp"
#include "vecon/indexes.hpp"
#include "vecon/ingest.hpp"
#include "vecon/transforms.hpp"

namespace vecon {

inline constexpr std::string_view report_schema_tag = "vecon-report-v1";

/// Runtime configuration. Flags override the config file; the VECON_SOURCE
/// environment variable is the lowest-precedence source.
struct Config {
    std::string source;
    std::optional<std::string> window_start;  // ISO date; absent = anchor at newest day
    int window_length_days = AnalysisWindow::default_length_days;
    std::optional<BondQuote> bond;
    double min_coverage = 0.90;
    double inflation_warn_pct = 10.0;
    double inflation_critical_pct = 50.0;
    double adf_alpha = 0.05;
    int heatmap_bins = 1000;
    double heatmap_sigma = 8.0;

    void validate() const {
        require(window_length_days >= 2, errc::invalid_config, "window needs at least 2 days");
        require(min_coverage > 0 && min_coverage <= 1, errc::invalid_config,
                "min_coverage must be in (0, 1]");
        require(inflation_warn_pct > 0 && inflation_warn_pct < inflation_critical_pct,
                errc::invalid_config, "need 0 < inflation_warn_pct < inflation_critical_pct");
        require(adf_alpha > 0 && adf_alpha < 1, errc::invalid_config,
                "adf_alpha must be in (0, 1)");
        require(heatmap_bins >= 1, errc::invalid_config, "heatmap_bins must be positive");
        require(heatmap_sigma >= 0, errc::invalid_config, "heatmap_sigma must be non-negative");
        if (window_start) parse_iso_date(*window_start);
    }

    std::optional<AnalysisWindow> window() const {
        if (!window_start) return std::nullopt;
        return AnalysisWindow::create(*window_start, window_length_days);
    }

    static Config from_json(const nlohmann::json& j) {
        require(j.is_object(), errc::invalid_config, "config must be a JSON object");
        Config cfg;
        for (const auto& [key, value] : j.items()) {
            try {
                if (key == "source") {
                    cfg.source = value.get<std::string>();
                } else if (key == "window") {
                    if (value.contains("start_day"))
                        cfg.window_start = value.at("start_day").get<std::string>();
                    if (value.contains("length_days"))
                        cfg.window_length_days = value.at("length_days").get<int>();
                } else if (key == "bond") {
                    const Decimal4 real =
                        value.at("bond_real_price").is_string()
                            ? Decimal4::parse(value.at("bond_real_price").get<std::string>())
                            : Decimal4::from_double(value.at("bond_real_price").get<double>());
                    cfg.bond = BondQuote::create(
                        real, value.at("bond_virtual_price").get<std::int64_t>());
                } else if (key == "min_coverage") {
                    cfg.min_coverage = value.get<double>();
                } else if (key == "inflation_warn_pct") {
                    cfg.inflation_warn_pct = value.get<double>();
                } else if (key == "inflation_critical_pct") {
                    cfg.inflation_critical_pct = value.get<double>();
                } else if (key == "adf_alpha") {
                    cfg.adf_alpha = value.get<double>();
                } else if (key == "heatmap_bins") {
                    cfg.heatmap_bins = value.get<int>();
                } else if (key == "heatmap_sigma") {
                    cfg.heatmap_sigma = value.get<double>();
                } else {
                    fail(errc::invalid_config, "unknown config key '" + key + "'");
                }
            } catch (const error&) {
                throw;
            } catch (const std::exception& e) {
                fail(errc::invalid_config, "bad config value for '" + key + "': " + e.what());
            }
        }
        cfg.validate();
        return cfg;
    }

    static Config load(const std::filesystem::path& path) {
        const std::string text = detail::read_file(path, errc::source_unavailable);
        const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        require(!j.is_discarded(), errc::invalid_config, "config is not valid JSON: " + path.string());
        return from_json(j);
    }
};

enum class AlertLevel { none, warn, critical };

constexpr const char* alert_name(AlertLevel a) {
    switch (a) {
        case AlertLevel::none: return "none";
        case AlertLevel::warn: return "warn";
        case AlertLevel::critical: return "critical";
    }
    return "none";
}

/// critical when inflation >= critical threshold, warn when in [warn, critical).
inline AlertLevel alert_level(double inflation_pct, const Config& cfg) {
    if (inflation_pct >= cfg.inflation_critical_pct) return AlertLevel::critical;
    if (inflation_pct >= cfg.inflation_warn_pct) return AlertLevel::warn;
    return AlertLevel::none;
}

struct IndexHealth {
    std::string label;
    Weighting weighting = Weighting::unit;
    std::size_t members = 0;
    double inflation_pct = 0;
    AlertLevel alert = AlertLevel::none;
    AdfResult adf;
};

struct VolumeShareRow {
    std::size_t k = 0;
    double share = 0;
};

struct VolumeSummary {
    std::size_t table_size = 0;
    std::vector<VolumeShareRow> shares;
    double top20_share = 0;  // at k = min(20, table_size)
    std::optional<Decimal4> traded_value_top20;
    std::optional<Decimal4> traded_value_table;
};

struct HealthReport {
    AnalysisWindow window;
    std::size_t input_count = 0;
    ExclusionReport exclusions;
    std::vector<IndexHealth> indexes;  // 4 quartiles, then top100 when present
    std::optional<VolumeSummary> volume;
    std::vector<std::pair<std::string, std::string>> conventions;
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline nlohmann::ordered_json index_health_json(const IndexHealth& h) {
    nlohmann::ordered_json j;
    j["label"] = h.label;
    j["weighting"] = weighting_name(h.weighting);
    j["members"] = h.members;
    j["inflation_pct"] = h.inflation_pct;
    j["inflation_pct_2dp"] = fmt("%.2f", h.inflation_pct);
    j["alert"] = alert_name(h.alert);
    nlohmann::ordered_json a;
    a["t_stat"] = h.adf.t_stat;
    a["t_stat_3dp"] = fmt("%.3f", h.adf.t_stat);
    a["p_value"] = h.adf.p_value;
    a["p_value_3dp"] = fmt("%.3f", h.adf.p_value);
    a["lags_used"] = h.adf.lags_used;
    a["n_obs"] = h.adf.n_obs;
    a["critical_values"] = {{"1pct", h.adf.critical_values.pct1},
                            {"5pct", h.adf.critical_values.pct5},
                            {"10pct", h.adf.critical_values.pct10}};
    a["reject"] = {{"1pct", h.adf.reject_at.pct1},
                   {"5pct", h.adf.reject_at.pct5},
                   {"10pct", h.adf.reject_at.pct10}};
    j["adf"] = std::move(a);
    return j;
}

}  // namespace detail

/// The report as a JSON document; report.md is rendered from this object so
/// every number in the markdown exists verbatim here.
inline nlohmann::ordered_json report_to_json(const HealthReport& report, const Config& cfg) {
    nlohmann::ordered_json j;
    j["schema"] = report_schema_tag;
    j["window"] = {{"start_day", report.window.start_iso()},
                   {"length_days", report.window.length_days()}};
    nlohmann::ordered_json conv = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.conventions) conv[key] = value;
    j["conventions"] = std::move(conv);
    j["thresholds"] = {{"inflation_warn_pct", cfg.inflation_warn_pct},
                       {"inflation_critical_pct", cfg.inflation_critical_pct},
                       {"adf_alpha", cfg.adf_alpha}};
    j["exclusions"] = {{"input_count", report.input_count},
                       {"retained_count", report.exclusions.retained_count},
                       {"excluded_count", report.exclusions.excluded_ids.size()},
                       {"excluded_ids", report.exclusions.excluded_ids}};
    nlohmann::ordered_json indexes = nlohmann::ordered_json::array();
    for (const auto& h : report.indexes) indexes.push_back(detail::index_health_json(h));
    j["indexes"] = std::move(indexes);
    if (report.volume) {
        nlohmann::ordered_json v;
        v["table_size"] = report.volume->table_size;
        nlohmann::ordered_json shares = nlohmann::ordered_json::array();
        for (const auto& row : report.volume->shares) {
            shares.push_back({{"k", row.k},
                              {"share", row.share},
                              {"share_pct_1dp", detail::fmt("%.1f", row.share * 100.0)}});
        }
        v["shares"] = std::move(shares);
        v["top20_share"] = report.volume->top20_share;
        v["top20_share_pct_1dp"] = detail::fmt("%.1f", report.volume->top20_share * 100.0);
        if (report.volume->traded_value_top20)
            v["traded_value_top20"] = report.volume->traded_value_top20->to_string();
        if (report.volume->traded_value_table)
            v["traded_value_table"] = report.volume->traded_value_table->to_string();
        j["volume"] = std::move(v);
    }
    return j;
}

/// Markdown projection of report.json: all numbers are lifted from the JSON
/// document, never recomputed.
inline std::string report_to_markdown(const nlohmann::ordered_json& j) {
    std::ostringstream md;
    auto s = [](const nlohmann::ordered_json& v) { return v.get<std::string>(); };
    auto d = [](const nlohmann::ordered_json& v) { return v.dump(); };

    md << "# Virtual economy health report\n\n";
    md << "Window: " << s(j["window"]["start_day"]) << " for "
       << d(j["window"]["length_days"]) << " days.\n\n";
    md << "Series: " << d(j["exclusions"]["input_count"]) << " in, "
       << d(j["exclusions"]["retained_count"]) << " retained, "
       << d(j["exclusions"]["excluded_count"]) << " excluded for zero movement.\n\n";

    md << "## Indexes\n\n";
    md << "| index | members | weighting | inflation % | alert | ADF t | ADF p | lags | n_obs |\n";
    md << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& idx : j["indexes"]) {
        md << "| " << s(idx["label"]) << " | " << d(idx["members"]) << " | "
           << s(idx["weighting"]) << " | " << s(idx["inflation_pct_2dp"]) << " | "
           << s(idx["alert"]) << " | " << s(idx["adf"]["t_stat_3dp"]) << " | "
           << s(idx["adf"]["p_value_3dp"]) << " | " << d(idx["adf"]["lags_used"]) << " | "
           << d(idx["adf"]["n_obs"]) << " |\n";
    }
    md << "\nAlert thresholds: warn at " << d(j["thresholds"]["inflation_warn_pct"])
       << "% window inflation, critical at " << d(j["thresholds"]["inflation_critical_pct"])
       << "%; ADF alpha " << d(j["thresholds"]["adf_alpha"]) << ".\n";

    if (j.contains("volume")) {
        const auto& v = j["volume"];
        md << "\n## Trading volume\n\n";
        md << "Table size: " << d(v["table_size"]) << " items. Top 20 volume share: "
           << s(v["top20_share_pct_1dp"]) << "%.\n\n";
        md << "| top k | share of table volume % |\n|---|---|\n";
        for (const auto& row : v["shares"])
            md << "| " << d(row["k"]) << " | " << s(row["share_pct_1dp"]) << " |\n";
        if (v.contains("traded_value_top20"))
            md << "\nReal value traded (mean price x volume): top 20 = "
               << s(v["traded_value_top20"]) << ", whole table = "
               << s(v["traded_value_table"]) << ".\n";
    }

    md << "\n## Conventions\n\n";
    for (const auto& [key, value] : j["conventions"].items())
        md << "- " << key << ": " << value.get<std::string>() << "\n";
    return std::move(md).str();
}

/// Runs the full monitoring battery over a snapshot and writes every output
/// file under out_dir: report.json, report.md, adf.csv, per-index CSVs with
/// an indexes.json manifest, and two heatmap exports.
inline HealthReport run_report(const Snapshot& snapshot, const Config& cfg,
                               const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    cfg.validate();
    require(!snapshot.series().empty(), errc::empty_snapshot, "snapshot holds no series");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec, errc::io_failure, "cannot create " + out_dir.string());

    HealthReport report{snapshot.window(), snapshot.series().size(), {}, {}, {}, {}};

    // zero-movement exclusion, then per-item statistics
    auto [retained, exclusions] = filter_static(snapshot.series());
    report.exclusions = std::move(exclusions);
    std::vector<DescriptiveStats> stats;
    stats.reserve(retained.size());
    for (const auto& s : retained) stats.push_back(describe(s));

    // quartile partition and indexes; top-100 weighted index when volumes exist
    const Partition partition = partition_quartiles(stats);
    std::vector<IndexSeries> indexes;
    for (std::size_t g = 0; g < 4; ++g)
        indexes.push_back(
            build_sum_index(snapshot, partition.groups[g], Partition::group_labels[g]));
    if (snapshot.volumes())
        indexes.push_back(build_weighted_index(snapshot, *snapshot.volumes(), "top100"));

    for (const auto& index : indexes) {
        const std::vector<double> diffed =
            first_difference(std::span<const double>(index.values));
        IndexHealth h;
        h.label = index.label;
        h.weighting = index.weighting;
        h.members = index.membership.size();
        h.inflation_pct = inflation_rate_pct(index);
        h.alert = alert_level(h.inflation_pct, cfg);
        h.adf = adf_test(diffed);
        report.indexes.push_back(std::move(h));
    }

    if (snapshot.volumes()) {
        const auto& volumes = *snapshot.volumes();
        VolumeSummary summary;
        summary.table_size = volumes.size();
        for (std::size_t k : {std::size_t(1), std::size_t(5), std::size_t(10), std::size_t(20),
                              std::size_t(50), std::size_t(100)}) {
            if (k <= volumes.size())
                summary.shares.push_back(VolumeShareRow{k, volume_share(volumes, k)});
        }
        summary.top20_share = volume_share(volumes, std::min<std::size_t>(20, volumes.size()));
        if (snapshot.bond()) {
            Decimal4 top20 = Decimal4::from_raw(0);
            Decimal4 table = Decimal4::from_raw(0);
            for (std::size_t i = 0; i < volumes.size(); ++i) {
                const PriceSeries* s = snapshot.find(volumes[i].item_id);
                require(s != nullptr, errc::unknown_member,
                        "volume item " + std::to_string(volumes[i].item_id) +
                            " not in snapshot");
                const Decimal4 value =
                    traded_value(describe(*s).mean_price, volumes[i].volume, *snapshot.bond());
                table = table + value;
                if (i < 20) top20 = top20 + value;
            }
            summary.traded_value_top20 = top20;
            summary.traded_value_table = table;
        }
        report.volume = std::move(summary);
    }

    report.conventions = {
        {"inflation_denominator",
         "end point: inflation_pct = 100 * (value[last] - value[first]) / value[last]"},
        {"std_deviation", "population standard deviation (divisor n)"},
        {"quartile_ranking",
         "mean virtual price over the window, ascending; ties by item_id; remainder items go "
         "to the lowest groups"},
        {"adf_regression", "constant, no trend, applied to first-differenced index values"},
        {"adf_lag_selection",
         "AIC minimized over a common sample with lag budget floor(12*(n/100)^0.25)"},
        {"adf_pvalues",
         "MacKinnon (1994) asymptotic approximation; finite-sample critical values from "
         "MacKinnon (2010)"},
        {"rejection_rule", "reject the unit-root null when p_value < alpha"},
        {"statistics_basis", "virtual prices; real-value conversion applied only at presentation"},
    };

    // ---- files ----
    const nlohmann::ordered_json report_json = report_to_json(report, cfg);
    detail::write_file_atomic(out_dir / "report.json", report_json.dump(2) + "\n");
    detail::write_file_atomic(out_dir / "report.md", report_to_markdown(report_json));

    {
        std::string csv =
            "label,t_stat,p_value,lags_used,n_obs,reject_1pct,reject_5pct,reject_10pct\n";
        char buf[160];
        for (const auto& h : report.indexes) {
            std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%d,%d,%d,%d,%d\n", h.label.c_str(),
                          h.adf.t_stat, h.adf.p_value, h.adf.lags_used, h.adf.n_obs,
                          h.adf.reject_at.pct1 ? 1 : 0, h.adf.reject_at.pct5 ? 1 : 0,
                          h.adf.reject_at.pct10 ? 1 : 0);
            csv += buf;
        }
        detail::write_file_atomic(out_dir / "adf.csv", csv);
    }

    {
        nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < indexes.size(); ++i) {
            std::ostringstream os;
            write_index_csv(os, indexes[i]);
            detail::write_file_atomic(out_dir / ("index_" + indexes[i].label + ".csv"),
                                      std::move(os).str());
            manifest.push_back(
                {{"label", indexes[i].label},
                 {"file", "index_" + indexes[i].label + ".csv"},
                 {"weighting", weighting_name(indexes[i].weighting)},
                 {"members", indexes[i].membership.size()},
                 {"inflation_pct", report.indexes[i].inflation_pct},
                 {"inflation_denominator", "end"}});
        }
        detail::write_file_atomic(out_dir / "indexes.json", manifest.dump(2) + "\n");
    }

    {
        std::vector<Point2> change_vs_logprice;
        std::vector<Point2> cov_vs_change;
        change_vs_logprice.reserve(stats.size());
        cov_vs_change.reserve(stats.size());
        for (const auto& st : stats) {
            change_vs_logprice.push_back(Point2{st.log_mean_price, st.mean_daily_pct_change});
            cov_vs_change.push_back(Point2{st.mean_daily_pct_change, st.cov});
        }
        const HeatmapGrid g1 =
            gaussian_blur(histogram2d(change_vs_logprice, cfg.heatmap_bins), cfg.heatmap_sigma);
        export_grid(g1, out_dir / "heatmap_change_vs_logprice");
        const HeatmapGrid g2 =
            gaussian_blur(histogram2d(cov_vs_change, cfg.heatmap_bins), cfg.heatmap_sigma);
        export_grid(g2, out_dir / "heatmap_cov_vs_change");
    }

    return report;
}

}  // namespace vecon
