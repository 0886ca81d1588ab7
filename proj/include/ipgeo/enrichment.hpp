#pragma once

#include "ipgeo/core.hpp"
#include "ipgeo/geodesy.hpp"
#include "ipgeo/ip.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipgeo {

// Longest-prefix-match table over CIDRs. Values are indices into a
// caller-owned payload array. Build once, then read concurrently.
class PrefixTable {
public:
    // Duplicate identical prefixes are a DataError (reported with the
    // offending CIDR) unless the caller deduplicates first.
    void insert(const Cidr& cidr, uint32_t value);
    std::optional<uint32_t> lookup(const IpAddr& ip) const;
    size_t size() const { return entries_; }

private:
    struct Node {
        int32_t child[2] = {-1, -1};
        int32_t value = -1;
    };
    std::optional<uint32_t> lookup_in(const std::vector<Node>& nodes, const IpAddr& ip) const;
    void insert_in(std::vector<Node>& nodes, const Cidr& cidr, uint32_t value);

    std::vector<Node> v4_{1, Node{}};
    std::vector<Node> v6_{1, Node{}};
    size_t entries_ = 0;
};

// One dated geolocation database: CIDR -> predicted point and optional
// claimed accuracy class.
struct GeoDbEntry {
    Cidr cidr;
    geo::GeoPoint location;
    std::optional<double> claimed_accuracy_km;
};

struct GeoDbSnapshot {
    std::string provider;      // e.g. "mmfree", "ip2lpaid"
    UnixTime window_start = 0; // inclusive
    UnixTime window_end = 0;   // exclusive
    std::vector<GeoDbEntry> entries;
    PrefixTable table;

    std::optional<uint32_t> lookup(const IpAddr& ip) const { return table.lookup(ip); }
};

// CSV columns: network,latitude,longitude,accuracy_km (accuracy blank
// allowed). Conflicting duplicate prefixes abort the load listing the
// offenders.
GeoDbSnapshot load_geodb_csv(const std::string& path, const std::string& provider,
                             UnixTime window_start, UnixTime window_end);

// ---------------------------------------------------------------------------
// Registry (offline whois dump)

struct RegistryRecord {
    Cidr cidr;
    std::string net_handle;
    std::string parent_handle; // empty: chain ends
    std::string org_name;
};

class RegistryDb {
public:
    // CSV columns: cidr,net_handle,parent_handle,org_name
    static RegistryDb load_csv(const std::string& path);
    static RegistryDb from_records(std::vector<RegistryRecord> records);

    // Longest-prefix match for the subnet base address, then parent
    // traversal while the matched allocation is narrower than the
    // subnet threshold (/24 v4, /48 v6). Cycles are a DataError naming
    // the handles; no match returns nullopt ("unknown").
    std::optional<RegistryRecord> resolve_org(const SubnetKey& subnet) const;

    const std::vector<RegistryRecord>& records() const { return records_; }

    // Union of all registry space (drives the foreign-registry cut).
    CidrSet coverage() const;

private:
    std::vector<RegistryRecord> records_;
    PrefixTable table_;
    std::map<std::string, uint32_t> by_handle_;
};

// ---------------------------------------------------------------------------
// DBA classification

enum class Modality : uint8_t { Fixed, Mobile };
enum class OrgCategory : uint8_t { ConsumerIsp, University, Fortune100, Other };

std::string_view modality_name(Modality m);
std::string_view org_category_name(OrgCategory c);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<OrgCategory> parse_org_category(std::string_view s);

struct OrgClass {
    std::string dba_name;
    Modality modality = Modality::Fixed;
    OrgCategory category = OrgCategory::Other;
};

struct DbaRule {
    std::string pattern; // substring or glob, case-insensitive
    std::string dba;     // empty: keep the normalized org name
    Modality modality = Modality::Fixed;
    OrgCategory category = OrgCategory::Other;
};

// Ordered rule list; first match wins. Rule order is significant and is
// part of the run configuration.
class RuleTable {
public:
    static RuleTable defaults(); // the major-ISP table
    static RuleTable load_csv(const std::string& path); // pattern,dba,modality,category
    explicit RuleTable(std::vector<DbaRule> rules = {}) : rules_(std::move(rules)) {}

    OrgClass classify(const RegistryRecord& r) const;
    const std::vector<DbaRule>& rules() const { return rules_; }

private:
    std::vector<DbaRule> rules_;
};

// ---------------------------------------------------------------------------
// Error scoring

struct ErrorRecord {
    uint32_t cluster_idx = 0;
    uint32_t provider_idx = 0;
    geo::GeoPoint predicted;
    double error_m = 0.0;
    std::optional<double> claimed_accuracy_km;
    bool too_close = false; // suspicious DB-echo report
};

struct ScoreResult {
    std::vector<ErrorRecord> records;
    uint64_t prefix_misses = 0;
    uint64_t out_of_window = 0;
};

constexpr double kDefaultTooCloseM = 25.0;

// One ErrorRecord per (cluster, provider) prefix hit, for clusters whose
// start time falls inside the snapshot window. If no cluster overlaps
// the window at all, the run is misconfigured (license-alignment rule)
// and this throws ConfigError.
ScoreResult score_errors(const std::vector<LocationCluster>& clusters,
                         const GeoDbSnapshot& snapshot, uint32_t provider_idx,
                         double too_close_m = kDefaultTooCloseM, int threads = 1);

} // namespace ipgeo
