#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipgeo {

// Plain hierarchical run-config format:
//
//   # comment
//   key = value
//   block "label" {
//     key = value
//     nested { ... }
//   }
//
// Keys may repeat (e.g. several `path =` lines). Values run to end of
// line; surrounding quotes are stripped.
struct ConfigNode {
    std::string name;  // empty for the root
    std::string label; // optional block label
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<ConfigNode> children;

    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string_view fallback) const;
    std::string require(std::string_view key) const; // ConfigError if absent
    std::vector<std::string> get_all(std::string_view key) const;

    double get_double(std::string_view key, double fallback) const;
    int64_t get_int(std::string_view key, int64_t fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    std::vector<double> get_double_list(std::string_view key) const; // comma-separated

    const ConfigNode* child(std::string_view name) const; // first match or nullptr
    std::vector<const ConfigNode*> children_named(std::string_view name) const;
};

ConfigNode parse_config_text(std::string_view text, const std::string& origin);
ConfigNode load_config_file(const std::string& path);

} // namespace ipgeo
