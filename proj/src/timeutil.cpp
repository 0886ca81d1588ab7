#include "ipgeo/timeutil.hpp"

#include "ipgeo/util.hpp"

#include <cctype>
#include <cstdio>

namespace ipgeo {

int64_t days_from_civil(int y, unsigned m, unsigned d) {
    // Howard Hinnant's algorithm; exact over the proleptic Gregorian calendar.
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return int64_t(era) * 146097 + int64_t(doe) - 719468;
}

namespace {

void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = int64_t(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool read_uint(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

} // namespace

std::optional<UnixTime> parse_iso8601_utc(std::string_view s) {
    // date part
    int y, mo, d;
    if (!read_uint(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_uint(s, 5, 2, mo) ||
        s[7] != '-' || !read_uint(s, 8, 2, d))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    int64_t t = days_from_civil(y, unsigned(mo), unsigned(d)) * kSecondsPerDay;
    size_t pos = 10;
    if (pos == s.size()) return t;
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    int hh, mi, ss;
    if (!read_uint(s, pos + 1, 2, hh) || pos + 8 >= s.size() || s[pos + 3] != ':' ||
        !read_uint(s, pos + 4, 2, mi) || s[pos + 6] != ':' || !read_uint(s, pos + 7, 2, ss))
        return std::nullopt;
    if (hh > 23 || mi > 59 || ss > 60) return std::nullopt;
    t += hh * 3600 + mi * 60 + ss;
    pos += 9;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos == s.size()) return t;
    if (s[pos] == 'Z' && pos + 1 == s.size()) return t;
    return std::nullopt;
}

std::string format_iso8601_utc(UnixTime t) {
    int64_t days = floor_div(t, kSecondsPerDay);
    int64_t sod = t - days * kSecondsPerDay;
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

std::optional<UnixTime> parse_date_utc(std::string_view s) {
    if (s.size() != 10) return std::nullopt;
    return parse_iso8601_utc(s);
}

std::pair<int64_t, int64_t> night_index_range(UnixTime t_start, UnixTime t_end,
                                              int utc_offset_min) {
    const int64_t off = int64_t(utc_offset_min) * 60;
    const int64_t ls = t_start + off, le = t_end + off;
    // night k spans [k*D, k*D + N); the closed interval [ls, le]
    // touches it iff k*D <= le and ls < k*D + N
    const int64_t k_min = floor_div(ls - kNightSeconds, kSecondsPerDay) + 1;
    const int64_t k_max = floor_div(le, kSecondsPerDay);
    return {k_min, k_max};
}

} // namespace ipgeo
