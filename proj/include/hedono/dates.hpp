#pragma once

// ISO-8601 date/time parsing for document metadata.
//
// Accepted forms: YYYY-MM-DD, optionally followed by 'T' or ' ' and
// HH:MM[:SS[.fraction]], optionally followed by 'Z' or a UTC offset
// (+HH:MM, +HHMM, +HH).

#include <chrono>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hedono/error.hpp"

namespace hedono::dates {

struct Timestamp {
    std::chrono::sys_days day;     // calendar date as written
    int minute_of_day = 0;         // 0 when no time was given
    bool has_time = false;
    std::optional<int> offset_minutes;  // explicit offset, if written
};

namespace detail {

inline bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

inline std::optional<int> parse_offset(std::string_view s) {
    if (s == "Z" || s == "z") return 0;
    if (s.empty() || (s[0] != '+' && s[0] != '-')) return std::nullopt;
    const int sign = s[0] == '-' ? -1 : 1;
    int h = 0, m = 0;
    if (!detail::digits(s, 1, 2, h)) return std::nullopt;
    if (s.size() == 3) {
        m = 0;
    } else if (s.size() == 6 && s[3] == ':') {
        if (!detail::digits(s, 4, 2, m)) return std::nullopt;
    } else if (s.size() == 5) {
        if (!detail::digits(s, 3, 2, m)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (h > 18 || m > 59) return std::nullopt;
    return sign * (h * 60 + m);
}

inline std::optional<Timestamp> parse(std::string_view s) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0;
    if (s.size() < 10 || !detail::digits(s, 0, 4, y) || s[4] != '-' || !detail::digits(s, 5, 2, mo) ||
        s[7] != '-' || !detail::digits(s, 8, 2, d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    Timestamp ts;
    ts.day = sys_days{ymd};
    std::string_view rest = s.substr(10);
    if (rest.empty()) return ts;
    if (rest[0] != 'T' && rest[0] != 't' && rest[0] != ' ') return std::nullopt;

    int hh = 0, mm = 0, ss = 0;
    if (!detail::digits(rest, 1, 2, hh) || rest.size() < 6 || rest[3] != ':' || !detail::digits(rest, 4, 2, mm))
        return std::nullopt;
    std::size_t pos = 6;
    if (pos < rest.size() && rest[pos] == ':') {
        if (!detail::digits(rest, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
        if (pos < rest.size() && (rest[pos] == '.' || rest[pos] == ',')) {
            ++pos;
            const std::size_t start = pos;
            while (pos < rest.size() && rest[pos] >= '0' && rest[pos] <= '9') ++pos;
            if (pos == start) return std::nullopt;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    ts.has_time = true;
    ts.minute_of_day = hh * 60 + mm;
    if (pos < rest.size()) {
        ts.offset_minutes = parse_offset(rest.substr(pos));
        if (!ts.offset_minutes) return std::nullopt;
    }
    return ts;
}

inline Timestamp parse_or_throw(std::string_view s) {
    auto ts = parse(s);
    if (!ts) throw ParseError("invalid ISO-8601 date '" + std::string(s) + "'");
    return *ts;
}

/// Calendar day of a timestamp in the document's timezone.
///
/// The zone is `timezone` when given, else the offset written in the
/// timestamp, else UTC. Date-only values are taken as already local.
/// A timestamp without a written offset is read as UTC.
inline std::chrono::sys_days local_day(const Timestamp& ts, std::optional<int> timezone) {
    using namespace std::chrono;
    if (!ts.has_time) return ts.day;
    const int written = ts.offset_minutes.value_or(0);
    const int target = timezone.value_or(written);
    const minutes utc = duration_cast<minutes>(ts.day.time_since_epoch()) + minutes{ts.minute_of_day - written};
    return floor<days>(sys_time<minutes>{utc + minutes{target}});
}

inline std::string format_day(std::chrono::sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// ISO weekday, 1 = Monday ... 7 = Sunday.
inline unsigned iso_weekday(std::chrono::sys_days d) {
    return std::chrono::weekday{d}.iso_encoding();
}

}  // namespace hedono::dates
