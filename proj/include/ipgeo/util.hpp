#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ipgeo {

// Configuration problems (bad paths, malformed config, inconsistent
// date windows). Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems with the data itself (conflicting prefixes, registry cycles,
// invalid polygon geometry). Mapped to exit code 3 by the CLI.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string normalize_ws(std::string_view s);

// Case-insensitive match. Patterns may use '*' and '?'; a pattern with
// no metacharacters matches as a substring.
bool glob_or_substring_match(std::string_view pattern, std::string_view text);

// All floating-point report output goes through this: 6 significant
// digits, fixed formatting, so report trees are byte-stable.
std::string fmt6(double v);

// Cohort keys become file names; anything outside [A-Za-z0-9._-] turns
// into '_'.
std::string sanitize_filename(std::string_view s);

int64_t floor_div(int64_t a, int64_t b);

} // namespace ipgeo
