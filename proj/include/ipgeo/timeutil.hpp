#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ipgeo {

// Seconds since the Unix epoch, UTC. All cluster timestamps are carried
// in this form; local civil time enters only through a fixed per-run
// UTC offset (no DST table).
using UnixTime = int64_t;

constexpr int64_t kSecondsPerDay = 86400;
constexpr int64_t kNightSeconds = 6 * 3600; // 00:00-06:00 local

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS", optional fractional seconds
// (ignored), optional trailing 'Z'. Anything else -> nullopt.
std::optional<UnixTime> parse_iso8601_utc(std::string_view s);

std::string format_iso8601_utc(UnixTime t);

// "YYYY-MM-DD" only; returns midnight UTC of that day.
std::optional<UnixTime> parse_date_utc(std::string_view s);

// Days between civil date and 1970-01-01 (proleptic Gregorian).
int64_t days_from_civil(int y, unsigned m, unsigned d);

// Local day indices k whose [00:00, 06:00) window the closed interval
// [t_start, t_end] touches, as {k_first, k_last}; empty iff
// k_first > k_last. A multi-night cluster appears once per night.
std::pair<int64_t, int64_t> night_index_range(UnixTime t_start, UnixTime t_end,
                                              int utc_offset_min);

// True iff the local-time interval intersects any midnight-to-6am window.
inline bool night_flag(UnixTime t_start, UnixTime t_end, int utc_offset_min) {
    auto [lo, hi] = night_index_range(t_start, t_end, utc_offset_min);
    return lo <= hi;
}

} // namespace ipgeo
