#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <catch2/catch.hpp>

#include "support/checks.hpp"
#include "support/synthetic.hpp"
#include "vecon/heatmap.hpp"

using namespace vecon;
using testkit::require_error;

namespace {
std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return std::move(ss).str();
}
}  // namespace

TEST_CASE("histogram bins points with a closed top edge") {
    const std::vector<Point2> corners{{0, 0}, {1, 1}};
    const HeatmapGrid grid = histogram2d(corners, 2);
    CHECK(grid.at(0, 0) == 1.0);
    CHECK(grid.at(1, 1) == 1.0);
    CHECK(grid.at(0, 1) == 0.0);
    CHECK(grid.at(1, 0) == 0.0);
    CHECK(total_mass(grid) == 2.0);
    CHECK(grid.x_mean == 0.5);
    CHECK(grid.y_mean == 0.5);
}

TEST_CASE("single point lands in exactly one bin even on a collapsed axis") {
    const std::vector<Point2> one{{3.0, -2.0}};
    const HeatmapGrid grid = histogram2d(one, 2);
    CHECK(total_mass(grid) == 1.0);
    int nonzero = 0;
    for (double v : grid.counts) nonzero += v != 0.0;
    CHECK(nonzero == 1);
    CHECK(grid.x_min < 3.0);
    CHECK(grid.x_max > 3.0);
}

TEST_CASE("every point lands in exactly one bin") {
    testkit::Rng rng(6);
    std::vector<Point2> points;
    for (int i = 0; i < 3358; ++i) points.push_back(Point2{rng.gaussian(), rng.gaussian()});
    const HeatmapGrid grid = histogram2d(points, 57);
    CHECK(total_mass(grid) == Approx(3358.0).margin(1e-9));
}

TEST_CASE("histogram rejects empty or non-finite input") {
    const std::vector<Point2> none;
    require_error([&] { histogram2d(none, 10); }, errc::no_points);
    const std::vector<Point2> inf{{std::numeric_limits<double>::infinity(), 0.0}};
    require_error([&] { histogram2d(inf, 10); }, errc::non_finite_coordinate);
}

TEST_CASE("blur with sigma zero is the identity") {
    testkit::Rng rng(9);
    std::vector<Point2> points;
    for (int i = 0; i < 100; ++i) points.push_back(Point2{rng.gaussian(), rng.gaussian()});
    const HeatmapGrid grid = histogram2d(points, 16);
    const HeatmapGrid same = gaussian_blur(grid, 0.0);
    CHECK(same.counts == grid.counts);
    require_error([&] { gaussian_blur(grid, -1.0); }, errc::negative_sigma);
}

TEST_CASE("central impulse blurs to a symmetric mass-preserving bump") {
    const int bins = 41;
    std::vector<Point2> one{{0.0, 0.0}};
    HeatmapGrid grid = histogram2d(one, bins);
    // move the impulse to the exact center
    std::fill(grid.counts.begin(), grid.counts.end(), 0.0);
    grid.at(20, 20) = 1.0;

    const HeatmapGrid blurred = gaussian_blur(grid, 2.0);
    CHECK(total_mass(blurred) == Approx(1.0).epsilon(1e-9));
    CHECK(blurred.at(20, 20) < 1.0);
    CHECK(blurred.at(20, 20) > 0.0);
    for (int d = 1; d <= 8; ++d) {
        CHECK(blurred.at(20, 20 + d) == Approx(blurred.at(20, 20 - d)).epsilon(1e-12));
        CHECK(blurred.at(20 + d, 20) == Approx(blurred.at(20 - d, 20)).epsilon(1e-12));
        CHECK(blurred.at(20 + d, 20) == Approx(blurred.at(20, 20 + d)).epsilon(1e-12));
    }
}

TEST_CASE("blur conserves mass for all sigma, including kernels wider than the grid") {
    testkit::Rng rng(12);
    std::vector<Point2> points;
    for (int i = 0; i < 500; ++i) points.push_back(Point2{rng.uniform(), rng.gaussian()});
    for (int bins : {2, 5, 64}) {
        const HeatmapGrid grid = histogram2d(points, bins);
        for (double sigma : {0.4, 1.0, 8.0}) {
            const HeatmapGrid blurred = gaussian_blur(grid, sigma);
            CHECK(total_mass(blurred) == Approx(500.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("blur commutes with mirroring the point set") {
    testkit::Rng rng(15);
    std::vector<Point2> points;
    std::vector<Point2> mirrored;
    for (int i = 0; i < 400; ++i) {
        const Point2 p{rng.gaussian(), 2.0 * rng.uniform()};
        points.push_back(p);
        mirrored.push_back(Point2{p.y, p.x});
    }
    const HeatmapGrid a = gaussian_blur(histogram2d(points, 32), 1.5);
    const HeatmapGrid b = gaussian_blur(histogram2d(mirrored, 32), 1.5);
    for (int yb = 0; yb < 32; ++yb)
        for (int xb = 0; xb < 32; ++xb)
            REQUIRE(a.at(yb, xb) == Approx(b.at(xb, yb)).margin(1e-12));
}

TEST_CASE("mean markers come from the raw points, not the grid") {
    testkit::Rng rng(18);
    std::vector<Point2> points;
    double sx = 0, sy = 0;
    for (int i = 0; i < 250; ++i) {
        const Point2 p{rng.gaussian() * 3.0, rng.gaussian() + 1.0};
        points.push_back(p);
        sx += p.x;
        sy += p.y;
    }
    for (int bins : {7, 100}) {
        const HeatmapGrid grid = gaussian_blur(histogram2d(points, bins), 2.0);
        CHECK(grid.x_mean == Approx(sx / 250.0).epsilon(1e-14));
        CHECK(grid.y_mean == Approx(sy / 250.0).epsilon(1e-14));
    }
}

TEST_CASE("grid export writes csv, sidecar and pgm deterministically") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "vecon_heatmap_test";
    fs::create_directories(dir);

    std::vector<Point2> points{{0, 0}, {1, 1}};
    const HeatmapGrid grid = histogram2d(points, 2);
    export_grid(grid, dir / "g");

    const std::string csv = slurp(dir / "g.csv");
    CHECK(csv == "1,0\n0,1\n");

    const std::string sidecar = slurp(dir / "g.json");
    CHECK(sidecar.find("\"bins\": 2") != std::string::npos);
    CHECK(sidecar.find("\"boundary\": \"reflect\"") != std::string::npos);

    const std::string pgm = slurp(dir / "g.pgm");
    CHECK(pgm.starts_with("P5\n2 2\n65535\n"));
    // row 0 on top = y bin 1: pixels (0,1) then (1,0) scaled to 16 bits
    const std::string pixels = pgm.substr(pgm.find("65535\n") + 6);
    REQUIRE(pixels.size() == 8);
    CHECK(static_cast<unsigned char>(pixels[0]) == 0x00);
    CHECK(static_cast<unsigned char>(pixels[1]) == 0x00);
    CHECK(static_cast<unsigned char>(pixels[2]) == 0xFF);
    CHECK(static_cast<unsigned char>(pixels[3]) == 0xFF);

    export_grid(grid, dir / "h");
    CHECK(slurp(dir / "h.csv") == csv);
    CHECK(slurp(dir / "h.pgm") == pgm);

    const HeatmapGrid uniform = [] {
        std::vector<Point2> pts{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        return histogram2d(pts, 2);
    }();
    export_grid(uniform, dir / "u");
    const std::string upgm = slurp(dir / "u.pgm");
    const std::string upx = upgm.substr(upgm.find("65535\n") + 6);
    for (char c : upx) CHECK(c == 0);  // constant field normalizes to zero

    fs::remove_all(dir);
}
