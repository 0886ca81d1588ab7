#include "ipgeo/config.hpp"

#include "ipgeo/util.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ipgeo {

namespace {

std::string strip_quotes(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

std::optional<std::string> ConfigNode::get(std::string_view key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return std::nullopt;
}

std::string ConfigNode::get_or(std::string_view key, std::string_view fallback) const {
    auto v = get(key);
    return v ? *v : std::string(fallback);
}

std::string ConfigNode::require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required config key '" + std::string(key) + "' in block '" +
                              (name.empty() ? std::string("<root>") : name) + "'");
    return *v;
}

std::vector<std::string> ConfigNode::get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v);
    return out;
}

double ConfigNode::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    char* end = nullptr;
    double d = std::strtod(v->c_str(), &end);
    if (end == v->c_str()) throw ConfigError("config key '" + std::string(key) + "': not a number: " + *v);
    return d;
}

int64_t ConfigNode::get_int(std::string_view key, int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    char* end = nullptr;
    long long i = std::strtoll(v->c_str(), &end, 10);
    if (end == v->c_str()) throw ConfigError("config key '" + std::string(key) + "': not an integer: " + *v);
    return i;
}

bool ConfigNode::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = to_lower(trim(*v));
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError("config key '" + std::string(key) + "': not a boolean: " + *v);
}

std::vector<double> ConfigNode::get_double_list(std::string_view key) const {
    std::vector<double> out;
    auto v = get(key);
    if (!v) return out;
    for (const auto& piece : split(*v, ',')) {
        std::string t = trim(piece);
        if (t.empty()) continue;
        char* end = nullptr;
        double d = std::strtod(t.c_str(), &end);
        if (end == t.c_str())
            throw ConfigError("config key '" + std::string(key) + "': bad list element: " + t);
        out.push_back(d);
    }
    return out;
}

const ConfigNode* ConfigNode::child(std::string_view name_) const {
    for (const auto& c : children)
        if (c.name == name_) return &c;
    return nullptr;
}

std::vector<const ConfigNode*> ConfigNode::children_named(std::string_view name_) const {
    std::vector<const ConfigNode*> out;
    for (const auto& c : children)
        if (c.name == name_) out.push_back(&c);
    return out;
}

ConfigNode parse_config_text(std::string_view text, const std::string& origin) {
    ConfigNode root;
    std::vector<ConfigNode*> stack{&root};
    std::istringstream in{std::string(text)};
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        auto err = [&](const std::string& what) {
            return ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
        };
        if (line == "}") {
            if (stack.size() == 1) throw err("unmatched '}'");
            stack.pop_back();
            continue;
        }
        if (line.back() == '{') {
            std::string head = trim(line.substr(0, line.size() - 1));
            if (head.empty()) throw err("block needs a name");
            std::string name = head, label;
            if (auto sp = head.find_first_of(" \t"); sp != std::string::npos) {
                name = trim(head.substr(0, sp));
                label = strip_quotes(trim(head.substr(sp + 1)));
            }
            stack.back()->children.push_back(ConfigNode{name, label, {}, {}});
            stack.push_back(&stack.back()->children.back());
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw err("expected 'key = value' or a block");
        std::string key = trim(line.substr(0, eq));
        std::string val = strip_quotes(trim(line.substr(eq + 1)));
        if (key.empty()) throw err("empty key");
        stack.back()->entries.emplace_back(key, val);
    }
    if (stack.size() != 1) throw ConfigError(origin + ": unclosed block at end of file");
    return root;
}

ConfigNode load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace ipgeo
