#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "vecon/errors.hpp"

namespace vecon {

struct Point2 {
    double x = 0;
    double y = 0;
};

/// Square binned bivariate density. counts is row-major with row = y bin and
/// row 0 at the bottom (origin lower-left); mass equals the point count
/// before blurring and is conserved through it.
struct HeatmapGrid {
    int bins = 0;
    std::vector<double> counts;  // bins*bins
    double x_min = 0, x_max = 0;
    double y_min = 0, y_max = 0;
    double x_mean = 0, y_mean = 0;
    double sigma = 0;  // blur applied so far, in bin units

    double& at(int y_bin, int x_bin) { return counts[static_cast<std::size_t>(y_bin) * bins + x_bin]; }
    double at(int y_bin, int x_bin) const {
        return counts[static_cast<std::size_t>(y_bin) * bins + x_bin];
    }
};

inline double total_mass(const HeatmapGrid& grid) {
    double s = 0;
    for (double v : grid.counts) s += v;
    return s;
}

namespace detail {

/// Axis range [min, max]; a collapsed axis is padded by 0.5% per side.
inline void axis_range(double lo, double hi, double& out_lo, double& out_hi) {
    if (lo == hi) {
        const double pad = 0.005 * std::max(std::abs(lo), 1.0);
        out_lo = lo - pad;
        out_hi = hi + pad;
    } else {
        out_lo = lo;
        out_hi = hi;
    }
}

inline int bin_of(double v, double lo, double hi, int bins) {
    // half-open bins, top edge closed
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    return std::clamp(b, 0, bins - 1);
}

/// Half-sample reflection of index i into [0, n).
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

}  // namespace detail

/// Bins points into a bins x bins grid over [min, max] per axis and records
/// the raw coordinate means.
inline HeatmapGrid histogram2d(std::span<const Point2> points, int bins) {
    require(!points.empty(), errc::no_points, "histogram needs at least one point");
    require(bins >= 1, errc::invalid_value, "bins must be positive");
    double x_lo = points[0].x, x_hi = points[0].x;
    double y_lo = points[0].y, y_hi = points[0].y;
    double x_sum = 0, y_sum = 0;
    for (const auto& p : points) {
        require(std::isfinite(p.x) && std::isfinite(p.y), errc::non_finite_coordinate,
                "non-finite point coordinate");
        x_lo = std::min(x_lo, p.x);
        x_hi = std::max(x_hi, p.x);
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
        x_sum += p.x;
        y_sum += p.y;
    }

    HeatmapGrid grid;
    grid.bins = bins;
    grid.counts.assign(static_cast<std::size_t>(bins) * bins, 0.0);
    detail::axis_range(x_lo, x_hi, grid.x_min, grid.x_max);
    detail::axis_range(y_lo, y_hi, grid.y_min, grid.y_max);
    grid.x_mean = x_sum / static_cast<double>(points.size());
    grid.y_mean = y_sum / static_cast<double>(points.size());

    for (const auto& p : points) {
        const int xb = detail::bin_of(p.x, grid.x_min, grid.x_max, bins);
        const int yb = detail::bin_of(p.y, grid.y_min, grid.y_max, bins);
        grid.at(yb, xb) += 1.0;
    }
    return grid;
}

/// Separable Gaussian blur with a kernel truncated at radius ceil(4*sigma)
/// and renormalized to sum 1. Out-of-range taps fold back by reflection, so
/// total mass is conserved. sigma = 0 is the identity.
inline HeatmapGrid gaussian_blur(const HeatmapGrid& grid, double sigma) {
    require(sigma >= 0, errc::negative_sigma, "sigma must be non-negative");
    HeatmapGrid out = grid;
    out.sigma = sigma;
    if (sigma == 0 || grid.bins == 0) return out;

    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double ksum = 0;
    for (int t = -radius; t <= radius; ++t) {
        const double w = std::exp(-0.5 * (t / sigma) * (t / sigma));
        kernel[t + radius] = w;
        ksum += w;
    }
    for (double& w : kernel) w /= ksum;

    const int n = grid.bins;
    // 1-D pass: dst[fold(i+t)] += k[t] * src[i], contiguous rows.
    auto blur_rows = [&](const std::vector<double>& src, std::vector<double>& dst) {
        std::fill(dst.begin(), dst.end(), 0.0);
        for (int row = 0; row < n; ++row) {
            const double* in = src.data() + static_cast<std::size_t>(row) * n;
            double* outp = dst.data() + static_cast<std::size_t>(row) * n;
            for (int t = -radius; t <= radius; ++t) {
                const double w = kernel[t + radius];
                const int lo = std::max(0, -t);
                const int hi = std::min(n, n - t);
                for (int i = lo; i < hi; ++i) outp[i + t] += w * in[i];
                for (int i = 0; i < std::min(lo, n); ++i)
                    outp[detail::reflect_index(i + t, n)] += w * in[i];
                for (int i = std::max(hi, lo); i < n; ++i)
                    outp[detail::reflect_index(i + t, n)] += w * in[i];
            }
        }
    };

    auto transpose = [&](const std::vector<double>& src, std::vector<double>& dst) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                dst[static_cast<std::size_t>(c) * n + r] = src[static_cast<std::size_t>(r) * n + c];
    };

    std::vector<double> tmp_a(grid.counts.size());
    std::vector<double> tmp_b(grid.counts.size());
    blur_rows(grid.counts, tmp_a);  // along x
    transpose(tmp_a, tmp_b);
    blur_rows(tmp_b, tmp_a);        // along y
    transpose(tmp_a, out.counts);
    return out;
}

/// Writes <base>.csv (values at 9 significant digits, one row per y bin,
/// y ascending), <base>.json (ranges, means, sigma, bins, conventions) and
/// <base>.pgm (16-bit grayscale, min-max normalized, row 0 at the top).
inline void export_grid(const HeatmapGrid& grid, const std::filesystem::path& path_base) {
    namespace fs = std::filesystem;
    auto open = [&](const fs::path& p) {
        std::ofstream os(p, std::ios::binary);
        require(os.good(), errc::io_failure, "cannot open " + p.string());
        return os;
    };

    {
        std::ofstream os = open(fs::path(path_base).concat(".csv"));
        char buf[40];
        for (int yb = 0; yb < grid.bins; ++yb) {
            for (int xb = 0; xb < grid.bins; ++xb) {
                std::snprintf(buf, sizeof buf, "%.9g", grid.at(yb, xb));
                os << buf << (xb + 1 == grid.bins ? "\n" : ",");
            }
        }
        require(os.good(), errc::io_failure, "write failed: " + path_base.string() + ".csv");
    }

    {
        std::ofstream os = open(fs::path(path_base).concat(".json"));
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "{\n"
                      "  \"schema\": \"vecon-heatmap-v1\",\n"
                      "  \"bins\": %d,\n"
                      "  \"sigma\": %.17g,\n"
                      "  \"x_range\": [%.17g, %.17g],\n"
                      "  \"y_range\": [%.17g, %.17g],\n"
                      "  \"x_mean\": %.17g,\n"
                      "  \"y_mean\": %.17g,\n"
                      "  \"boundary\": \"reflect\",\n"
                      "  \"kernel_radius\": \"ceil(4*sigma)\",\n"
                      "  \"csv_rows\": \"y bins ascending\",\n"
                      "  \"pgm_rows\": \"y bins descending\"\n"
                      "}\n",
                      grid.bins, grid.sigma, grid.x_min, grid.x_max, grid.y_min, grid.y_max,
                      grid.x_mean, grid.y_mean);
        os << buf;
        require(os.good(), errc::io_failure, "write failed: " + path_base.string() + ".json");
    }

    {
        std::ofstream os = open(fs::path(path_base).concat(".pgm"));
        double lo = grid.counts.empty() ? 0 : grid.counts[0];
        double hi = lo;
        for (double v : grid.counts) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        os << "P5\n" << grid.bins << " " << grid.bins << "\n65535\n";
        const double span = hi - lo;
        for (int yb = grid.bins - 1; yb >= 0; --yb) {
            for (int xb = 0; xb < grid.bins; ++xb) {
                const double v = grid.at(yb, xb);
                const unsigned value =
                    span == 0 ? 0u
                              : static_cast<unsigned>(std::lround((v - lo) / span * 65535.0));
                const unsigned char hi_byte = static_cast<unsigned char>(value >> 8);
                const unsigned char lo_byte = static_cast<unsigned char>(value & 0xFF);
                os.put(static_cast<char>(hi_byte));
                os.put(static_cast<char>(lo_byte));
            }
        }
        require(os.good(), errc::io_failure, "write failed: " + path_base.string() + ".pgm");
    }
}

}  // namespace vecon
