#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "tweetscope/error.hpp"

namespace tweetscope {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

namespace detail {

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

inline bool make_date(int y, int m, int d, Date& out) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;
    out = Date{ymd};
    return true;
}

}  // namespace detail

/// Parses `YYYY-MM-DD`.
inline Date parse_date(std::string_view s) {
    int y, m, d;
    Date out;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_digits(s, 0, 4, y) ||
        !detail::parse_digits(s, 5, 2, m) || !detail::parse_digits(s, 8, 2, d) || !detail::make_date(y, m, d, out)) {
        throw DataError(fmt::format("invalid date '{}' (expected YYYY-MM-DD)", s));
    }
    return out;
}

/// Parses an RFC 3339 date-time (`YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)`)
/// and normalizes it to UTC. Fractional seconds are truncated.
inline Timestamp parse_rfc3339(std::string_view s) {
    auto fail = [&] { return DataError(fmt::format("invalid RFC 3339 timestamp '{}'", s)); };
    if (s.size() < 20) throw fail();
    Date date;
    try {
        date = parse_date(s.substr(0, 10));
    } catch (const DataError&) {
        throw fail();
    }
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') throw fail();
    int hh, mm, ss;
    if (!detail::parse_digits(s, 11, 2, hh) || s[13] != ':' || !detail::parse_digits(s, 14, 2, mm) ||
        s[16] != ':' || !detail::parse_digits(s, 17, 2, ss) || hh > 23 || mm > 59 || ss > 60) {
        throw fail();
    }
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) throw fail();
    }
    if (pos >= s.size()) throw fail();
    int offset_minutes = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh, om;
        if (!detail::parse_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !detail::parse_digits(s, pos + 4, 2, om) || oh > 23 || om > 59) {
            throw fail();
        }
        offset_minutes = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
        pos += 6;
    } else {
        throw fail();
    }
    if (pos != s.size()) throw fail();
    using namespace std::chrono;
    return time_point_cast<seconds>(date) + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

/// Canonical `YYYY-MM-DDTHH:MM:SSZ`.
inline std::string format_rfc3339(Timestamp t) {
    const Date day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::hh_mm_ss hms{t - day};
    return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(day), hms.hours().count(), hms.minutes().count(),
                       hms.seconds().count());
}

inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

}  // namespace tweetscope
