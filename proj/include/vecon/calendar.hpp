#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "vecon/errors.hpp"

namespace vecon {

/// Days since 1970-01-01 for a proleptic Gregorian civil date
/// (Howard Hinnant's days_from_civil).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

/// "YYYY-MM-DD" -> days since epoch.
inline std::int64_t parse_iso_date(std::string_view text) {
    auto bad = [&] { fail(errc::invalid_value, "bad ISO date: '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') bad();
    int y = 0;
    unsigned m = 0, d = 0;
    auto parse_field = [&](std::string_view f, auto& out) {
        auto [p, e] = std::from_chars(f.data(), f.data() + f.size(), out);
        if (e != std::errc() || p != f.data() + f.size()) bad();
    };
    parse_field(text.substr(0, 4), y);
    parse_field(text.substr(5, 2), m);
    parse_field(text.substr(8, 2), d);
    if (m < 1 || m > 12 || d < 1 || d > 31) bad();
    std::int64_t days = days_from_civil(y, m, d);
    CivilDate back = civil_from_days(days);
    if (back.year != y || back.month != m || back.day != d) bad();
    return days;
}

inline std::string format_iso_date(std::int64_t epoch_day) {
    CivilDate c = civil_from_days(epoch_day);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

}  // namespace vecon
