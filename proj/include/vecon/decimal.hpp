#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "vecon/errors.hpp"

namespace vecon {

/// Fixed-point decimal with 4 fractional digits, used for every real-currency
/// amount. Stored as a scaled 64-bit integer; arithmetic and serialization are
/// platform-independent and all rounding is round-half-even.
class Decimal4 {
  public:
    static constexpr std::int64_t scale = 10'000;

    constexpr Decimal4() = default;

    static constexpr Decimal4 from_raw(std::int64_t raw) { return Decimal4(raw); }

    /// Exact value of `units` whole currency units.
    static constexpr Decimal4 from_int(std::int64_t units) {
        return Decimal4(units * scale);
    }

    /// Nearest representable value (ties to even). Assumes the default
    /// FE_TONEAREST rounding mode.
    static Decimal4 from_double(double value) {
        require(std::isfinite(value), errc::invalid_value, "non-finite decimal");
        return Decimal4(static_cast<std::int64_t>(std::nearbyint(value * scale)));
    }

    /// Parses "123", "-0.5", "5.0000". More than 4 fractional digits or any
    /// trailing garbage is rejected.
    static Decimal4 parse(std::string_view text) {
        std::string_view s = text;
        bool negative = false;
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
            negative = s.front() == '-';
            s.remove_prefix(1);
        }
        auto dot = s.find('.');
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = dot == std::string_view::npos ? "" : s.substr(dot + 1);
        require(!int_part.empty(), errc::invalid_value, "empty decimal: '" + std::string(text) + "'");
        require(frac_part.size() <= 4, errc::invalid_value,
                "more than 4 fractional digits: '" + std::string(text) + "'");
        std::int64_t units = 0;
        auto [p1, e1] = std::from_chars(int_part.data(), int_part.data() + int_part.size(), units);
        require(e1 == std::errc() && p1 == int_part.data() + int_part.size(),
                errc::invalid_value, "bad decimal: '" + std::string(text) + "'");
        std::int64_t frac = 0;
        if (!frac_part.empty()) {
            auto [p2, e2] = std::from_chars(frac_part.data(), frac_part.data() + frac_part.size(), frac);
            require(e2 == std::errc() && p2 == frac_part.data() + frac_part.size(),
                    errc::invalid_value, "bad decimal: '" + std::string(text) + "'");
            for (std::size_t i = frac_part.size(); i < 4; ++i) frac *= 10;
        }
        std::int64_t raw = units * scale + frac;
        return Decimal4(negative ? -raw : raw);
    }

    /// round_half_even(a * b / d) at 4 fractional digits, computed exactly in
    /// 128-bit arithmetic. `a` is a raw (already scaled) value.
    static Decimal4 ratio(std::int64_t raw_a, std::int64_t b, std::int64_t d) {
        require(d != 0, errc::invalid_value, "division by zero");
        __int128 num = static_cast<__int128>(raw_a) * b;
        bool negative = (num < 0) != (d < 0);
        __int128 n = num < 0 ? -num : num;
        __int128 den = d < 0 ? -static_cast<__int128>(d) : static_cast<__int128>(d);
        __int128 q = n / den;
        __int128 r = n % den;
        __int128 twice = r * 2;
        if (twice > den || (twice == den && (q & 1) != 0)) ++q;
        return Decimal4(static_cast<std::int64_t>(negative ? -q : q));
    }

    constexpr std::int64_t raw() const { return raw_; }
    constexpr double value() const { return static_cast<double>(raw_) / scale; }

    /// Canonical form: sign, integer part, '.', exactly 4 fractional digits.
    std::string to_string() const {
        std::int64_t a = raw_ < 0 ? -raw_ : raw_;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%s%lld.%04lld", raw_ < 0 ? "-" : "",
                      static_cast<long long>(a / scale), static_cast<long long>(a % scale));
        return buf;
    }

    constexpr Decimal4 operator+(Decimal4 other) const { return Decimal4(raw_ + other.raw_); }
    constexpr Decimal4 operator-(Decimal4 other) const { return Decimal4(raw_ - other.raw_); }
    constexpr Decimal4 operator*(std::int64_t n) const { return Decimal4(raw_ * n); }
    constexpr auto operator<=>(const Decimal4&) const = default;

  private:
    constexpr explicit Decimal4(std::int64_t raw) : raw_(raw) {}
    std::int64_t raw_ = 0;
};

}  // namespace vecon
