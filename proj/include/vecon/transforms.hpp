#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "vecon/core.hpp"
#include "vecon/decimal.hpp"
#include "vecon/errors.hpp"

namespace vecon {

/// Real-currency value of `price` virtual coins under a bond quote:
/// (real price per bond / virtual price per bond) * price, rounded half-even
/// at 4 fractional digits.
inline Decimal4 to_real_value(std::int64_t price, const BondQuote& quote) {
    require(price >= 0, errc::invalid_value, "negative price");
    return Decimal4::ratio(quote.real_price().raw(), price, quote.virtual_price());
}

/// Same mapping for fractional coin amounts (e.g. a mean price).
inline Decimal4 to_real_value(double amount, const BondQuote& quote) {
    require(std::isfinite(amount) && amount >= 0, errc::invalid_value, "bad amount");
    double scaled = static_cast<double>(quote.real_price().raw()) * amount /
                    static_cast<double>(quote.virtual_price());
    return Decimal4::from_raw(static_cast<std::int64_t>(std::nearbyint(scaled)));
}

struct RealValueSeries {
    std::int64_t item_id = 0;
    std::vector<Decimal4> values;
    bool operator==(const RealValueSeries&) const = default;
};

inline RealValueSeries to_real_values(const PriceSeries& series, const BondQuote& quote) {
    RealValueSeries out{series.item_id(), {}};
    out.values.reserve(series.size());
    for (const auto& p : series.points()) out.values.push_back(to_real_value(p.price, quote));
    return out;
}

/// Elementwise natural logarithm; every value must be strictly positive.
template <typename T>
    requires std::is_arithmetic_v<T>
std::vector<double> log_series(std::span<const T> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const T& v : values) {
        require(v > T(0), errc::non_positive_value, "log of non-positive value");
        out.push_back(std::log(static_cast<double>(v)));
    }
    return out;
}

/// out[t] = in[t+1] - in[t]; length n-1.
template <typename T>
    requires std::is_arithmetic_v<T>
std::vector<T> first_difference(std::span<const T> values) {
    require(values.size() >= 2, errc::series_too_short,
            "first difference needs at least 2 values, got " + std::to_string(values.size()));
    std::vector<T> out;
    out.reserve(values.size() - 1);
    for (std::size_t t = 0; t + 1 < values.size(); ++t) out.push_back(values[t + 1] - values[t]);
    return out;
}

/// Simple (arithmetic) daily returns: out[t] = (in[t+1] - in[t]) / in[t].
template <typename T>
    requires std::is_arithmetic_v<T>
std::vector<double> pct_returns(std::span<const T> values) {
    require(values.size() >= 2, errc::series_too_short,
            "returns need at least 2 values, got " + std::to_string(values.size()));
    std::vector<double> out;
    out.reserve(values.size() - 1);
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
        require(values[t] > T(0), errc::non_positive_value, "return over non-positive value");
        out.push_back((static_cast<double>(values[t + 1]) - static_cast<double>(values[t])) /
                      static_cast<double>(values[t]));
    }
    require(values.back() > T(0), errc::non_positive_value, "return over non-positive value");
    return out;
}

}  // namespace vecon
