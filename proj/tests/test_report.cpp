#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include <catch2/catch.hpp>

#include "support/checks.hpp"
#include "support/synthetic.hpp"
#include "vecon/report.hpp"

using namespace vecon;
using testkit::require_error;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return std::move(ss).str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vecon_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Config small_config() {
    Config cfg;
    cfg.heatmap_bins = 64;
    cfg.heatmap_sigma = 2.0;
    return cfg;
}

}  // namespace

TEST_CASE("config validation and file loading") {
    const fs::path dir = scratch_dir("config");
    {
        std::ofstream os(dir / "cfg.json");
        os << R"({
            "source": "somewhere",
            "window": {"start_day": "2018-06-13", "length_days": 60},
            "bond": {"bond_real_price": "5.0000", "bond_virtual_price": 4000000},
            "min_coverage": 0.85,
            "inflation_warn_pct": 8.0,
            "inflation_critical_pct": 40.0,
            "adf_alpha": 0.05,
            "heatmap_bins": 128,
            "heatmap_sigma": 4.0
        })";
    }
    const Config cfg = Config::load(dir / "cfg.json");
    CHECK(cfg.source == "somewhere");
    CHECK(cfg.window_length_days == 60);
    REQUIRE(cfg.bond.has_value());
    CHECK(cfg.bond->real_price().to_string() == "5.0000");
    CHECK(cfg.inflation_warn_pct == 8.0);
    CHECK(cfg.heatmap_bins == 128);
    REQUIRE(cfg.window().has_value());
    CHECK(cfg.window()->length_days() == 60);

    require_error(
        [] {
            Config bad;
            bad.inflation_warn_pct = 60.0;  // above critical
            bad.validate();
        },
        errc::invalid_config);
    require_error(
        [] {
            Config bad;
            bad.adf_alpha = 1.5;
            bad.validate();
        },
        errc::invalid_config);
    require_error([] { Config::from_json(nlohmann::json{{"frobnicate", 1}}); },
                  errc::invalid_config);
    fs::remove_all(dir);
}

TEST_CASE("alert levels follow the thresholds") {
    Config cfg;  // warn 10, critical 50
    CHECK(alert_level(0.0, cfg) == AlertLevel::none);
    CHECK(alert_level(-30.0, cfg) == AlertLevel::none);
    CHECK(alert_level(9.99, cfg) == AlertLevel::none);
    CHECK(alert_level(10.0, cfg) == AlertLevel::warn);
    CHECK(alert_level(49.99, cfg) == AlertLevel::warn);
    CHECK(alert_level(50.0, cfg) == AlertLevel::critical);
    CHECK(alert_level(120.0, cfg) == AlertLevel::critical);
}

TEST_CASE("run_report writes the full battery of files") {
    const fs::path out = scratch_dir("report_files");
    std::vector<VolumeRecord> volumes;
    for (int i = 1; i <= 10; ++i) volumes.push_back(VolumeRecord{i, 1000 - i});
    const Snapshot snap = testkit::synthetic_economy(
        40, 60, 0, 77, volumes, BondQuote::create(Decimal4::parse("5.0000"), 4000000));

    const HealthReport report = run_report(snap, small_config(), out);

    REQUIRE(report.indexes.size() == 5);
    CHECK(report.indexes[0].label == "lower");
    CHECK(report.indexes[3].label == "upper");
    CHECK(report.indexes[4].label == "top100");
    CHECK(report.indexes[4].weighting == Weighting::volume);
    CHECK(report.exclusions.retained_count == 40);
    REQUIRE(report.volume.has_value());
    CHECK(report.volume->table_size == 10);
    CHECK(report.volume->traded_value_table.has_value());

    for (const char* name :
         {"report.json", "report.md", "adf.csv", "indexes.json", "index_lower.csv",
          "index_lower_mid.csv", "index_upper_mid.csv", "index_upper.csv", "index_top100.csv",
          "heatmap_change_vs_logprice.csv", "heatmap_change_vs_logprice.json",
          "heatmap_change_vs_logprice.pgm", "heatmap_cov_vs_change.csv",
          "heatmap_cov_vs_change.json", "heatmap_cov_vs_change.pgm"}) {
        INFO(name);
        CHECK(fs::exists(out / name));
    }

    const std::string adf_csv = slurp(out / "adf.csv");
    CHECK(adf_csv.starts_with(
        "label,t_stat,p_value,lags_used,n_obs,reject_1pct,reject_5pct,reject_10pct\n"));
    CHECK(std::count(adf_csv.begin(), adf_csv.end(), '\n') == 6);

    const std::string index_csv = slurp(out / "index_lower.csv");
    CHECK(index_csv.starts_with("day_index,value\n"));
    CHECK(std::count(index_csv.begin(), index_csv.end(), '\n') == 61);

    fs::remove_all(out);
}

TEST_CASE("every number in the markdown appears verbatim in the json") {
    const fs::path out = scratch_dir("report_md");
    std::vector<VolumeRecord> volumes;
    for (int i = 1; i <= 8; ++i) volumes.push_back(VolumeRecord{i, 500 + 13 * i});
    const Snapshot snap = testkit::synthetic_economy(
        24, 60, 2, 5, volumes, BondQuote::create(Decimal4::parse("4.5000"), 3000000));
    run_report(snap, small_config(), out);

    const std::string md = slurp(out / "report.md");
    const std::string json = slurp(out / "report.json");
    const std::regex number(R"([-+]?\d+(\.\d+)?)");
    int checked = 0;
    for (auto it = std::sregex_iterator(md.begin(), md.end(), number);
         it != std::sregex_iterator(); ++it) {
        const std::string token = it->str();
        INFO("markdown token: " << token);
        CHECK(json.find(token) != std::string::npos);
        ++checked;
    }
    CHECK(checked > 30);
    fs::remove_all(out);
}

TEST_CASE("an engineered 60 percent rise turns one quartile critical") {
    const int days = 40;
    testkit::Rng rng(44);
    std::vector<PriceSeries> series;
    std::int64_t id = 1;
    for (int group = 0; group < 4; ++group) {
        for (int i = 0; i < 2; ++i, ++id) {
            const std::int64_t base = static_cast<std::int64_t>(std::pow(10.0, group + 2));
            if (group == 3) {
                // end-denominator inflation of 60%: end = 2.5 * start
                std::vector<PricePoint> pts;
                for (int t = 0; t < days; ++t) {
                    const double level = base * (1.0 + 1.5 * t / (days - 1));
                    pts.push_back(PricePoint{t, std::llround(level)});
                }
                series.push_back(PriceSeries::create(id, std::nullopt, std::move(pts)));
            } else {
                series.push_back(testkit::noisy_series(id, base, days, rng));
            }
        }
    }
    const Snapshot snap =
        Snapshot::create(AnalysisWindow::create("2018-06-13", days), std::move(series),
                         std::nullopt, std::nullopt);

    const fs::path out = scratch_dir("report_alert");
    const HealthReport report = run_report(snap, small_config(), out);
    CHECK(report.indexes[3].label == "upper");
    CHECK(report.indexes[3].inflation_pct == Approx(60.0).margin(1.0));
    CHECK(report.indexes[3].alert == AlertLevel::critical);
    CHECK(report.indexes[0].alert == AlertLevel::none);
    CHECK(report.indexes[1].alert == AlertLevel::none);
    fs::remove_all(out);
}

TEST_CASE("report runs are byte-identical") {
    const fs::path out1 = scratch_dir("report_det1");
    const fs::path out2 = scratch_dir("report_det2");
    const Snapshot snap = testkit::synthetic_economy(30, 60, 3, 21);
    run_report(snap, small_config(), out1);
    run_report(snap, small_config(), out2);
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
    CHECK(slurp(out1 / "report.md") == slurp(out2 / "report.md"));
    CHECK(slurp(out1 / "heatmap_cov_vs_change.csv") == slurp(out2 / "heatmap_cov_vs_change.csv"));
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("report rejects an empty snapshot") {
    const Snapshot empty = Snapshot::create(AnalysisWindow::create("2018-06-13", 30), {},
                                            std::nullopt, std::nullopt);
    const fs::path out = scratch_dir("report_empty");
    require_error([&] { run_report(empty, small_config(), out); }, errc::empty_snapshot);
    fs::remove_all(out);
}

TEST_CASE("alert fields are a pure function of the inflation values in the report") {
    const fs::path out = scratch_dir("report_alert_proj");
    const Snapshot snap = testkit::synthetic_economy(16, 60, 0, 67);
    Config cfg = small_config();
    cfg.inflation_warn_pct = 0.05;  // tight thresholds so noise trips them
    cfg.inflation_critical_pct = 0.4;
    const HealthReport report = run_report(snap, cfg, out);
    const nlohmann::json j = nlohmann::json::parse(slurp(out / "report.json"));
    for (const auto& idx : j["indexes"]) {
        const double inflation = idx["inflation_pct"].get<double>();
        CHECK(idx["alert"].get<std::string>() == alert_name(alert_level(inflation, cfg)));
    }
    CHECK(report.indexes.size() == j["indexes"].size());
    fs::remove_all(out);
}
