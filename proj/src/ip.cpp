#include "ipgeo/ip.hpp"

#include <arpa/inet.h>

#include <cstdio>
#include <cstring>
#include <utility>
#include <vector>

namespace ipgeo {

std::optional<IpAddr> IpAddr::parse(std::string_view s) {
    if (s.empty() || s.size() > 45) return std::nullopt;
    char buf[46];
    std::memcpy(buf, s.data(), s.size());
    buf[s.size()] = '\0';
    IpAddr out;
    if (s.find(':') != std::string_view::npos) {
        in6_addr a6;
        if (inet_pton(AF_INET6, buf, &a6) != 1) return std::nullopt;
        out.v6 = true;
        std::memcpy(out.bytes.data(), &a6, 16);
        return out;
    }
    in_addr a4;
    if (inet_pton(AF_INET, buf, &a4) != 1) return std::nullopt;
    out.v6 = false;
    std::memcpy(out.bytes.data(), &a4, 4);
    return out;
}

std::string IpAddr::to_string() const {
    char buf[INET6_ADDRSTRLEN];
    if (v6) {
        in6_addr a6;
        std::memcpy(&a6, bytes.data(), 16);
        inet_ntop(AF_INET6, &a6, buf, sizeof(buf));
    } else {
        in_addr a4;
        std::memcpy(&a4, bytes.data(), 4);
        inet_ntop(AF_INET, &a4, buf, sizeof(buf));
    }
    return buf;
}

IpAddr mask_address(const IpAddr& ip, int prefix_len) {
    IpAddr out = ip;
    const int total = int(ip.bit_count());
    for (int b = prefix_len; b < total; ++b) out.bytes[b >> 3] &= uint8_t(~(1u << (7 - (b & 7))));
    return out;
}

bool Cidr::contains(const IpAddr& ip) const {
    if (ip.v6 != base.v6) return false;
    return mask_address(ip, prefix_len) == base;
}

std::string Cidr::to_string() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s/%d", base.to_string().c_str(), prefix_len);
    return buf;
}

std::optional<Cidr> Cidr::parse(std::string_view s) {
    auto slash = s.rfind('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto addr = IpAddr::parse(s.substr(0, slash));
    if (!addr) return std::nullopt;
    int len = 0;
    auto rest = s.substr(slash + 1);
    if (rest.empty() || rest.size() > 3) return std::nullopt;
    for (char c : rest) {
        if (c < '0' || c > '9') return std::nullopt;
        len = len * 10 + (c - '0');
    }
    if (len < 0 || len > int(addr->bit_count())) return std::nullopt;
    return Cidr{mask_address(*addr, len), len};
}

SubnetKey subnet_key(const IpAddr& ip) {
    const int len = ip.v6 ? 48 : 24;
    return SubnetKey{Cidr{mask_address(ip, len), len}};
}

namespace {

struct NamedRange {
    const char* cidr;
    const char* name;
};

// IANA special-purpose registries (v4 and v6). The v6 list deliberately
// omits the documentation range 2001:db8::/32, which synthetic fixtures
// use as ordinary space.
const NamedRange kSpecialV4[] = {
    {"0.0.0.0/8", "this-network"},
    {"10.0.0.0/8", "private"},
    {"100.64.0.0/10", "shared-cgn"},
    {"127.0.0.0/8", "loopback"},
    {"169.254.0.0/16", "link-local"},
    {"172.16.0.0/12", "private"},
    {"192.0.0.0/24", "ietf-protocol"},
    {"192.0.2.0/24", "documentation"},
    {"192.88.99.0/24", "6to4-relay"},
    {"192.168.0.0/16", "private"},
    {"198.18.0.0/15", "benchmarking"},
    {"198.51.100.0/24", "documentation"},
    {"203.0.113.0/24", "documentation"},
    {"224.0.0.0/4", "multicast"},
    {"240.0.0.0/4", "reserved"},
};

const NamedRange kSpecialV6[] = {
    {"::/128", "unspecified"},
    {"::1/128", "loopback"},
    {"::ffff:0:0/96", "v4-mapped"},
    {"100::/64", "discard"},
    {"fc00::/7", "unique-local"},
    {"fe80::/10", "link-local"},
    {"ff00::/8", "multicast"},
};

std::vector<std::pair<Cidr, std::string>> parse_ranges(const NamedRange* table, size_t n) {
    std::vector<std::pair<Cidr, std::string>> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.emplace_back(*Cidr::parse(table[i].cidr), table[i].name);
    return out;
}

} // namespace

std::optional<std::string> special_use_name(const IpAddr& ip) {
    static const auto v4 = parse_ranges(kSpecialV4, std::size(kSpecialV4));
    static const auto v6 = parse_ranges(kSpecialV6, std::size(kSpecialV6));
    for (const auto& [cidr, name] : ip.v6 ? v6 : v4)
        if (cidr.contains(ip)) return name;
    return std::nullopt;
}

} // namespace ipgeo
