// vecon: virtual economy monitoring CLI.
//
// Subcommands: ingest, stats, index, adf, heatmap, report.
// Exit codes: 0 success, 1 domain/data error, 2 usage error.
// Diagnostics go to stderr; data goes to files or stdout.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vecon/adf.hpp"
#include "vecon/core.hpp"
#include "vecon/descriptive.hpp"
#include "vecon/fetch.hpp"
#include "vecon/heatmap.hpp"
#include "vecon/indexes.hpp"
#include "vecon/ingest.hpp"
#include "vecon/report.hpp"
#include "vecon/transforms.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string snapshot_dir;
    std::string source;
    std::string out;
};

vecon::Config load_config(const CommonOpts& opts) {
    vecon::Config cfg;
    if (!opts.config_path.empty()) cfg = vecon::Config::load(opts.config_path);
    return cfg;
}

// flag > config file > VECON_SOURCE environment variable
std::string resolve_source(const CommonOpts& opts, const vecon::Config& cfg) {
    if (!opts.source.empty()) return opts.source;
    if (!cfg.source.empty()) return cfg.source;
    if (const char* env = std::getenv("VECON_SOURCE"); env && *env) return env;
    return "";
}

vecon::Snapshot load_snapshot_checked(const std::string& dir) {
    if (dir.empty()) vecon::fail(vecon::errc::source_unavailable, "no --snapshot given");
    return vecon::load_snapshot(dir);
}

vecon::Snapshot with_bond(vecon::Snapshot snapshot, const std::optional<vecon::BondQuote>& bond) {
    if (!bond || snapshot.bond() == bond) return snapshot;
    return vecon::Snapshot::create(snapshot.window(), snapshot.series(), snapshot.volumes(),
                                   bond);
}

struct Battery {
    std::vector<vecon::PriceSeries> retained;
    vecon::ExclusionReport exclusions;
    std::vector<vecon::DescriptiveStats> stats;
    std::vector<vecon::IndexSeries> indexes;  // 4 quartiles + optional top100
};

// filter + describe; index construction only where a command needs it
Battery compute_battery(const vecon::Snapshot& snapshot, bool build_indexes) {
    Battery b;
    auto [retained, exclusions] = vecon::filter_static(snapshot.series());
    b.retained = std::move(retained);
    b.exclusions = std::move(exclusions);
    b.stats.reserve(b.retained.size());
    for (const auto& s : b.retained) b.stats.push_back(vecon::describe(s));
    if (!build_indexes) return b;
    const vecon::Partition partition = vecon::partition_quartiles(b.stats);
    for (std::size_t g = 0; g < 4; ++g)
        b.indexes.push_back(vecon::build_sum_index(snapshot, partition.groups[g],
                                                   vecon::Partition::group_labels[g]));
    if (snapshot.volumes())
        b.indexes.push_back(
            vecon::build_weighted_index(snapshot, *snapshot.volumes(), "top100"));
    return b;
}

void write_text(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        return;
    }
    std::ofstream os(out, std::ios::binary);
    vecon::require(os.good(), vecon::errc::io_failure, "cannot open " + out);
    os << content;
    vecon::require(os.good(), vecon::errc::io_failure, "write failed: " + out);
}

std::vector<std::int64_t> read_ids_file(const std::string& path) {
    std::ifstream is(path);
    vecon::require(is.good(), vecon::errc::source_unavailable, "cannot read ids file " + path);
    std::vector<std::int64_t> ids;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ids.push_back(vecon::detail::parse_i64(line, vecon::errc::invalid_value, "bad id"));
    }
    return ids;
}

struct IngestOpts {
    CommonOpts common;
    std::vector<std::int64_t> ids;
    std::string ids_file;
    std::string volumes_path;
    std::string window_start;
    std::string window_end;
    int window_days = 0;  // 0 = from config
    double min_coverage = -1;
    std::string bond_real;
    std::int64_t bond_virtual = 0;
    int interval_ms = -1;
    int retries = -1;
    int backoff_ms = -1;
};

int run_ingest(const IngestOpts& opts) {
    const vecon::Config cfg = load_config(opts.common);
    const std::string source = resolve_source(opts.common, cfg);
    vecon::require(!source.empty(), vecon::errc::source_unavailable,
                   "no source (use --source, config, or VECON_SOURCE)");
    vecon::require(!opts.common.out.empty(), vecon::errc::invalid_config,
                   "ingest needs --out <snapshot dir>");

    vecon::FetchPolicy policy = vecon::FetchPolicy::create(
        opts.interval_ms >= 0 ? opts.interval_ms : 200, opts.retries >= 0 ? opts.retries : 3,
        opts.backoff_ms >= 0 ? opts.backoff_ms : 500);

    std::vector<std::int64_t> ids = opts.ids;
    if (!opts.ids_file.empty()) {
        const auto more = read_ids_file(opts.ids_file);
        ids.insert(ids.end(), more.begin(), more.end());
    }
    if (ids.empty()) ids = vecon::discover_fixture_ids(source);
    vecon::require(!ids.empty(), vecon::errc::empty_snapshot, "no item ids to ingest");

    const auto docs_raw = vecon::fetch_documents(ids, policy, source);
    std::vector<std::pair<std::int64_t, std::string>> docs;
    docs.reserve(docs_raw.size());
    for (const auto& d : docs_raw) docs.emplace_back(d.item_id, d.body);

    const int days = opts.window_days > 0 ? opts.window_days : cfg.window_length_days;
    std::optional<vecon::AnalysisWindow> window;
    if (!opts.window_start.empty())
        window = vecon::AnalysisWindow::create(opts.window_start, days);
    else if (!opts.window_end.empty())
        window = vecon::AnalysisWindow::ending_at(vecon::parse_iso_date(opts.window_end), days);
    else if (cfg.window_start)
        window = cfg.window();

    std::optional<std::vector<vecon::VolumeRecord>> volumes;
    if (!opts.volumes_path.empty())
        volumes = vecon::parse_volume_table(
            vecon::detail::read_file(opts.volumes_path, vecon::errc::source_unavailable));

    std::optional<vecon::BondQuote> bond = cfg.bond;
    if (!opts.bond_real.empty())
        bond = vecon::BondQuote::create(vecon::Decimal4::parse(opts.bond_real),
                                        opts.bond_virtual);

    const double coverage = opts.min_coverage >= 0 ? opts.min_coverage : cfg.min_coverage;
    const vecon::IngestResult result =
        vecon::build_snapshot(docs, window, days, coverage, std::move(volumes), bond);
    vecon::save_snapshot(result.snapshot, opts.common.out);

    std::cerr << "ingested " << result.snapshot.series().size() << " series into "
              << opts.common.out << " (window " << result.snapshot.window().start_iso() << " +"
              << result.snapshot.window().length_days() << "d)\n";
    for (const auto& [id, reason] : result.dropped)
        std::cerr << "dropped item " << id << ": " << reason << "\n";
    if (result.snapshot.volumes()) {
        for (const auto& v : *result.snapshot.volumes())
            if (!result.snapshot.find(v.item_id))
                std::cerr << "warning: volume item " << v.item_id
                          << " has no price series in the snapshot; the weighted index "
                             "will fail until it is ingested\n";
    }
    return 0;
}

int run_stats(const CommonOpts& opts) {
    const vecon::Snapshot snapshot = load_snapshot_checked(opts.snapshot_dir);
    const Battery b = compute_battery(snapshot, false);
    std::ostringstream os;
    vecon::write_stats_csv(os, b.stats);
    write_text(opts.out, std::move(os).str());
    return 0;
}

int run_index(const CommonOpts& opts) {
    vecon::require(!opts.out.empty(), vecon::errc::invalid_config, "index needs --out <dir>");
    const vecon::Snapshot snapshot = load_snapshot_checked(opts.snapshot_dir);
    const Battery b = compute_battery(snapshot, true);
    std::error_code ec;
    fs::create_directories(opts.out, ec);
    vecon::require(!ec, vecon::errc::io_failure, "cannot create " + opts.out);

    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    for (const auto& index : b.indexes) {
        std::ostringstream os;
        vecon::write_index_csv(os, index);
        vecon::detail::write_file_atomic(fs::path(opts.out) / ("index_" + index.label + ".csv"),
                                         std::move(os).str());
        manifest.push_back({{"label", index.label},
                            {"file", "index_" + index.label + ".csv"},
                            {"weighting", vecon::weighting_name(index.weighting)},
                            {"members", index.membership.size()},
                            {"inflation_pct", vecon::inflation_rate_pct(index)},
                            {"inflation_denominator", "end"}});
    }
    vecon::detail::write_file_atomic(fs::path(opts.out) / "indexes.json",
                                     manifest.dump(2) + "\n");
    return 0;
}

int run_adf(const CommonOpts& opts) {
    const vecon::Snapshot snapshot = load_snapshot_checked(opts.snapshot_dir);
    const Battery b = compute_battery(snapshot, true);
    std::string csv =
        "label,t_stat,p_value,lags_used,n_obs,reject_1pct,reject_5pct,reject_10pct\n";
    char buf[160];
    for (const auto& index : b.indexes) {
        const auto diffed = vecon::first_difference(std::span<const double>(index.values));
        const vecon::AdfResult r = vecon::adf_test(diffed);
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%d,%d,%d,%d,%d\n", index.label.c_str(),
                      r.t_stat, r.p_value, r.lags_used, r.n_obs, r.reject_at.pct1 ? 1 : 0,
                      r.reject_at.pct5 ? 1 : 0, r.reject_at.pct10 ? 1 : 0);
        csv += buf;
    }
    write_text(opts.out, csv);
    return 0;
}

struct HeatmapOpts {
    CommonOpts common;
    int bins = 0;
    double sigma = -1;
};

int run_heatmap(const HeatmapOpts& opts) {
    vecon::require(!opts.common.out.empty(), vecon::errc::invalid_config,
                   "heatmap needs --out <dir>");
    const vecon::Config cfg = load_config(opts.common);
    const int bins = opts.bins > 0 ? opts.bins : cfg.heatmap_bins;
    const double sigma = opts.sigma >= 0 ? opts.sigma : cfg.heatmap_sigma;

    const vecon::Snapshot snapshot = load_snapshot_checked(opts.common.snapshot_dir);
    const Battery b = compute_battery(snapshot, false);
    std::error_code ec;
    fs::create_directories(opts.common.out, ec);
    vecon::require(!ec, vecon::errc::io_failure, "cannot create " + opts.common.out);

    std::vector<vecon::Point2> change_vs_logprice;
    std::vector<vecon::Point2> cov_vs_change;
    for (const auto& st : b.stats) {
        change_vs_logprice.push_back(vecon::Point2{st.log_mean_price, st.mean_daily_pct_change});
        cov_vs_change.push_back(vecon::Point2{st.mean_daily_pct_change, st.cov});
    }
    vecon::export_grid(vecon::gaussian_blur(vecon::histogram2d(change_vs_logprice, bins), sigma),
                       fs::path(opts.common.out) / "heatmap_change_vs_logprice");
    vecon::export_grid(vecon::gaussian_blur(vecon::histogram2d(cov_vs_change, bins), sigma),
                       fs::path(opts.common.out) / "heatmap_cov_vs_change");
    return 0;
}

int run_report(const CommonOpts& opts) {
    vecon::require(!opts.out.empty(), vecon::errc::invalid_config, "report needs --out <dir>");
    const vecon::Config cfg = load_config(opts);

    std::optional<vecon::Snapshot> snapshot;
    if (!opts.snapshot_dir.empty()) {
        snapshot = vecon::load_snapshot(opts.snapshot_dir);
    } else {
        const std::string source = resolve_source(opts, cfg);
        vecon::require(!source.empty(), vecon::errc::source_unavailable,
                       "no snapshot or source (use --snapshot/--source, config, or VECON_SOURCE)");
        if (fs::exists(fs::path(source) / "meta.json")) {
            snapshot = vecon::load_snapshot(source);
        } else {
            vecon::require(!source.starts_with("http://") && !source.starts_with("https://"),
                           vecon::errc::source_unavailable,
                           "reporting straight from an endpoint needs an id list; run "
                           "'vecon ingest' first and report from the snapshot");
            const auto ids = vecon::discover_fixture_ids(source);
            const auto docs_raw = vecon::fetch_documents(ids, vecon::FetchPolicy{}, source);
            std::vector<std::pair<std::int64_t, std::string>> docs;
            for (const auto& d : docs_raw) docs.emplace_back(d.item_id, d.body);
            vecon::IngestResult result = vecon::build_snapshot(
                docs, cfg.window(), cfg.window_length_days, cfg.min_coverage, std::nullopt,
                std::nullopt);
            for (const auto& [id, reason] : result.dropped)
                std::cerr << "dropped item " << id << ": " << reason << "\n";
            snapshot = std::move(result.snapshot);
        }
    }

    const vecon::HealthReport report =
        vecon::run_report(with_bond(std::move(*snapshot), cfg.bond), cfg, opts.out);
    for (const auto& h : report.indexes) {
        if (h.alert != vecon::AlertLevel::none)
            std::cerr << "alert[" << vecon::alert_name(h.alert) << "] index " << h.label
                      << " inflation " << vecon::detail::fmt("%.2f", h.inflation_pct) << "%\n";
    }
    std::cerr << "report written to " << opts.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"virtual economy monitoring toolkit"};
    app.require_subcommand(1);

    IngestOpts ingest;
    CLI::App* c_ingest = app.add_subcommand("ingest", "fetch or load raw documents, build a snapshot");
    c_ingest->add_option("--source", ingest.common.source, "endpoint base URL or fixture directory");
    c_ingest->add_option("--config", ingest.common.config_path, "config JSON");
    c_ingest->add_option("--out", ingest.common.out, "snapshot output directory");
    c_ingest->add_option("--ids", ingest.ids, "item ids")->delimiter(',');
    c_ingest->add_option("--ids-file", ingest.ids_file, "file with one item id per line");
    c_ingest->add_option("--volumes", ingest.volumes_path, "volume table CSV");
    c_ingest->add_option("--window-start", ingest.window_start, "window start (YYYY-MM-DD)");
    c_ingest->add_option("--window-end", ingest.window_end, "window end (YYYY-MM-DD, inclusive)");
    c_ingest->add_option("--window-days", ingest.window_days, "window length in days");
    c_ingest->add_option("--min-coverage", ingest.min_coverage, "minimum raw coverage fraction");
    c_ingest->add_option("--bond-real", ingest.bond_real, "bond real price, e.g. 5.0000");
    c_ingest->add_option("--bond-virtual", ingest.bond_virtual, "bond virtual price in coins");
    c_ingest->add_option("--interval-ms", ingest.interval_ms, "min ms between requests");
    c_ingest->add_option("--retries", ingest.retries, "max retries per request");
    c_ingest->add_option("--backoff-ms", ingest.backoff_ms, "base backoff ms (doubles per retry)");

    CommonOpts stats;
    CLI::App* c_stats = app.add_subcommand("stats", "per-item descriptive statistics CSV");
    c_stats->add_option("--snapshot", stats.snapshot_dir, "snapshot directory")->required();
    c_stats->add_option("--out", stats.out, "output file (default stdout)");

    CommonOpts index;
    CLI::App* c_index = app.add_subcommand("index", "quartile and top-100 price indexes");
    c_index->add_option("--snapshot", index.snapshot_dir, "snapshot directory")->required();
    c_index->add_option("--out", index.out, "output directory")->required();

    CommonOpts adf;
    CLI::App* c_adf = app.add_subcommand("adf", "stationarity tests on first-differenced indexes");
    c_adf->add_option("--snapshot", adf.snapshot_dir, "snapshot directory")->required();
    c_adf->add_option("--out", adf.out, "output file (default stdout)");

    HeatmapOpts heatmap;
    CLI::App* c_heatmap = app.add_subcommand("heatmap", "bivariate density exports");
    c_heatmap->add_option("--snapshot", heatmap.common.snapshot_dir, "snapshot directory")
        ->required();
    c_heatmap->add_option("--out", heatmap.common.out, "output directory")->required();
    c_heatmap->add_option("--config", heatmap.common.config_path, "config JSON");
    c_heatmap->add_option("--bins", heatmap.bins, "bins per axis");
    c_heatmap->add_option("--sigma", heatmap.sigma, "gaussian blur sigma in bin units");

    CommonOpts report;
    CLI::App* c_report = app.add_subcommand("report", "full health report");
    c_report->add_option("--snapshot", report.snapshot_dir, "snapshot directory");
    c_report->add_option("--source", report.source, "endpoint, fixture dir, or snapshot dir");
    c_report->add_option("--config", report.config_path, "config JSON");
    c_report->add_option("--out", report.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_ingest)) return run_ingest(ingest);
        if (app.got_subcommand(c_stats)) return run_stats(stats);
        if (app.got_subcommand(c_index)) return run_index(index);
        if (app.got_subcommand(c_adf)) return run_adf(adf);
        if (app.got_subcommand(c_heatmap)) return run_heatmap(heatmap);
        if (app.got_subcommand(c_report)) return run_report(report);
    } catch (const vecon::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
