#pragma once

#include "ipgeo/geodesy.hpp"
#include "ipgeo/ip.hpp"
#include "ipgeo/timeutil.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipgeo {

// Cluster taxonomy used by the location-report vendor.
enum class ClusterClass : uint8_t {
    Travel,
    LongAreaDwell,
    AreaDwell,
    ShortAreaDwell,
    PotentialAreaDwell,
    Ping,
    LargeVariance,
    Moving,
    Split,
};

std::optional<ClusterClass> parse_cluster_class(std::string_view s);
std::string_view cluster_class_name(ClusterClass c);
constexpr int kClusterClassCount = 9;

// One GPS-tagged observation: a device's dwell (or travel) interval with
// the public IP it reported. Ookla-style records carry only the first
// three octets; those parse with ip_truncated set and a synthetic .0
// host part, and are barred from address-level analyses.
struct LocationCluster {
    std::string device_id;
    UnixTime t_start = 0;
    UnixTime t_end = 0;
    geo::GeoPoint point;
    double accuracy_m = 0.0;
    int coord_decimals = 0; // min of the lat/lon textual decimal counts
    ClusterClass cluster_class = ClusterClass::AreaDwell;
    IpAddr ip;
    bool ip_truncated = false;
    uint32_t bump_count = 1;
    uint32_t region_mask = 0; // bit i set: inside regions[i] (filled at parse)
};

struct CityRegion {
    std::string name;
    geo::GeoPoint center;
    double radius_m = 64373.76; // 40 miles

    bool contains(const geo::GeoPoint& p) const {
        return geo::vincenty_distance(center, p) <= radius_m;
    }
};

// A set of prefixes; used for the foreign-registry cut (addresses not
// covered by the home registry dump are "foreign").
class CidrSet {
public:
    void add(const Cidr& c) { cidrs_.push_back(c); }
    bool covers(const IpAddr& ip) const {
        for (const auto& c : cidrs_)
            if (c.contains(ip)) return true;
        return false;
    }
    size_t size() const { return cidrs_.size(); }

private:
    std::vector<Cidr> cidrs_;
};

// Row filters. Defaults reproduce the standard cuts: accuracy no worse
// than 50 m, at least five decimals of coordinate precision, no
// special-use or foreign-registry addresses, inside a study region.
struct FilterPolicy {
    double max_accuracy_m = 50.0;
    int min_coord_decimals = 5;
    bool exclude_special_use = true;
    bool exclude_foreign_registry = true;
    std::vector<CityRegion> regions;        // empty: region cut disabled
    const CidrSet* domestic_space = nullptr; // null: foreign cut disabled
};

enum class RejectReason : uint8_t {
    Malformed,
    Accuracy,
    Precision,
    SpecialUse,
    ForeignRegistry,
    OutOfRegion,
};
constexpr int kRejectReasonCount = 6;
std::string_view reject_reason_name(RejectReason r);

// Merges associatively, so partition-parallel parses reduce to the same
// tally regardless of the split.
struct RejectionTally {
    uint64_t total_rows = 0;
    uint64_t accepted = 0;
    uint64_t rejected[kRejectReasonCount] = {};
    std::map<std::string, uint64_t> special_use_breakdown;

    uint64_t rejected_total() const {
        uint64_t s = 0;
        for (auto v : rejected) s += v;
        return s;
    }
    void merge(const RejectionTally& other);
};

struct ParseResult {
    std::vector<LocationCluster> clusters;
    RejectionTally tally;
};

// Parses a delimited cluster stream and applies the policy cuts.
// Documented header: device_id,t_start,t_end,lat,lon,accuracy_m,
// cluster_class,ip,bump_count. Malformed rows are tallied, not fatal;
// an unreadable header is a ConfigError.
ParseResult parse_clusters(std::istream& in, const FilterPolicy& policy,
                           const std::string& origin = "<stream>");
ParseResult parse_clusters_file(const std::string& path, const FilterPolicy& policy);

// Counts the textual decimal digits of a coordinate field ("41.8781"
// -> 4). The cut runs on the text as supplied, since trailing zeros
// vanish after parsing.
int coordinate_decimals(std::string_view field);

// Per-class share of clusters and of bumps.
struct ClassShares {
    uint64_t clusters[kClusterClassCount] = {};
    uint64_t bumps[kClusterClassCount] = {};
    uint64_t total_clusters = 0;
    uint64_t total_bumps = 0;

    double cluster_share(ClusterClass c) const {
        return total_clusters ? double(clusters[int(c)]) / double(total_clusters) : 0.0;
    }
    double bump_share(ClusterClass c) const {
        return total_bumps ? double(bumps[int(c)]) / double(total_bumps) : 0.0;
    }
};

ClassShares tabulate_classes(const std::vector<LocationCluster>& clusters);

// Serializes in the documented input format (used by the generator and
// by round-trip tests).
void write_cluster_header(std::ostream& out);
void write_cluster_row(std::ostream& out, const LocationCluster& c);

} // namespace ipgeo
