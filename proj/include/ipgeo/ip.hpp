#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ipgeo {

// IPv4 or IPv6 address. v4 occupies bytes[0..3]; unused bytes are zero.
struct IpAddr {
    bool v6 = false;
    std::array<uint8_t, 16> bytes{};

    auto operator<=>(const IpAddr&) const = default;

    size_t bit_count() const { return v6 ? 128 : 32; }
    // bit 0 is the most significant bit of the first byte
    bool bit(size_t i) const { return (bytes[i >> 3] >> (7 - (i & 7))) & 1; }
    std::string to_string() const;

    static std::optional<IpAddr> parse(std::string_view s);
};

struct Cidr {
    IpAddr base; // host bits zeroed
    int prefix_len = 0;

    auto operator<=>(const Cidr&) const = default;

    bool contains(const IpAddr& ip) const;
    std::string to_string() const;

    static std::optional<Cidr> parse(std::string_view s);
};

// Canonical aggregation prefix: /24 for IPv4, /48 for IPv6.
struct SubnetKey {
    Cidr cidr;

    auto operator<=>(const SubnetKey&) const = default;
    std::string to_string() const { return cidr.to_string(); }
};

// Pure mask arithmetic; total over any parseable address.
SubnetKey subnet_key(const IpAddr& ip);

// IANA special-use / reserved classification. Returns the range name
// ("private", "loopback", ...) or nullopt for ordinary unicast space.
std::optional<std::string> special_use_name(const IpAddr& ip);

// Zeroes host bits beyond prefix_len (canonical CIDR form).
IpAddr mask_address(const IpAddr& ip, int prefix_len);

} // namespace ipgeo
