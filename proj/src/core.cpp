#include "ipgeo/core.hpp"

#include "ipgeo/csv.hpp"
#include "ipgeo/util.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace ipgeo {

namespace {

const std::pair<std::string_view, ClusterClass> kClassNames[] = {
    {"TRAVEL", ClusterClass::Travel},
    {"LONG_AREA_DWELL", ClusterClass::LongAreaDwell},
    {"AREA_DWELL", ClusterClass::AreaDwell},
    {"SHORT_AREA_DWELL", ClusterClass::ShortAreaDwell},
    {"POTENTIAL_AREA_DWELL", ClusterClass::PotentialAreaDwell},
    {"PING", ClusterClass::Ping},
    {"LARGE_VARIANCE", ClusterClass::LargeVariance},
    {"MOVING", ClusterClass::Moving},
    {"SPLIT", ClusterClass::Split},
};

} // namespace

std::optional<ClusterClass> parse_cluster_class(std::string_view s) {
    for (const auto& [name, c] : kClassNames)
        if (name == s) return c;
    return std::nullopt;
}

std::string_view cluster_class_name(ClusterClass c) {
    for (const auto& [name, cc] : kClassNames)
        if (cc == c) return name;
    return "?";
}

std::string_view reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::Malformed: return "malformed";
        case RejectReason::Accuracy: return "accuracy";
        case RejectReason::Precision: return "precision";
        case RejectReason::SpecialUse: return "special_use";
        case RejectReason::ForeignRegistry: return "foreign_registry";
        case RejectReason::OutOfRegion: return "out_of_region";
    }
    return "?";
}

void RejectionTally::merge(const RejectionTally& other) {
    total_rows += other.total_rows;
    accepted += other.accepted;
    for (int i = 0; i < kRejectReasonCount; ++i) rejected[i] += other.rejected[i];
    for (const auto& [k, v] : other.special_use_breakdown) special_use_breakdown[k] += v;
}

int coordinate_decimals(std::string_view field) {
    auto dot = field.find('.');
    if (dot == std::string_view::npos) return 0;
    int n = 0;
    for (size_t i = dot + 1; i < field.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(field[i]))) break;
        ++n;
    }
    return n;
}

namespace {

bool parse_double(std::string_view s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool parse_u32(std::string_view s, uint32_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

// IP field forms: full address, "a.b.c" (three octets), or a /24 or /48
// CIDR. The latter two mark the record as truncated.
bool parse_ip_field(std::string_view s, IpAddr& ip, bool& truncated) {
    truncated = false;
    if (auto full = IpAddr::parse(s)) {
        ip = *full;
        return true;
    }
    if (auto cidr = Cidr::parse(s)) {
        const int expect = cidr->base.v6 ? 48 : 24;
        if (cidr->prefix_len != expect) return false;
        ip = cidr->base;
        truncated = true;
        return true;
    }
    // bare three octets
    if (s.find(':') == std::string_view::npos && !s.empty()) {
        std::string padded = std::string(s) + ".0";
        if (auto v4 = IpAddr::parse(padded)) {
            ip = *v4;
            truncated = true;
            return true;
        }
    }
    return false;
}

struct ColumnMap {
    int device_id, t_start, t_end, lat, lon, accuracy_m, cluster_class, ip, bump_count;
};

} // namespace

ParseResult parse_clusters(std::istream& in, const FilterPolicy& policy,
                           const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(origin + ": unreadable cluster header");
    auto header = split_csv_line(line);
    auto col = [&](std::string_view name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return int(i);
        return -1;
    };
    ColumnMap cm{col("device_id"), col("t_start"),       col("t_end"),
                 col("lat"),       col("lon"),           col("accuracy_m"),
                 col("cluster_class"), col("ip"),        col("bump_count")};
    if (cm.device_id < 0 || cm.t_start < 0 || cm.t_end < 0 || cm.lat < 0 || cm.lon < 0 ||
        cm.accuracy_m < 0 || cm.cluster_class < 0 || cm.ip < 0 || cm.bump_count < 0)
        throw ConfigError(origin + ": cluster header missing required columns");

    ParseResult out;
    auto& tally = out.tally;
    std::vector<std::string> f;
    const size_t need = header.size();

    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        ++tally.total_rows;
        f = split_csv_line(line);
        auto reject = [&](RejectReason r) { ++tally.rejected[int(r)]; };
        if (f.size() != need) {
            reject(RejectReason::Malformed);
            continue;
        }

        LocationCluster c;
        c.device_id = trim(f[cm.device_id]);
        auto ts = parse_iso8601_utc(trim(f[cm.t_start]));
        auto te = parse_iso8601_utc(trim(f[cm.t_end]));
        auto cls = parse_cluster_class(trim(f[cm.cluster_class]));
        const std::string lat_s = trim(f[cm.lat]);
        const std::string lon_s = trim(f[cm.lon]);
        double lat, lon, acc;
        uint32_t bumps;
        bool ok = !c.device_id.empty() && ts && te && *te >= *ts && cls &&
                  parse_double(lat_s, lat) && parse_double(lon_s, lon) &&
                  parse_double(trim(f[cm.accuracy_m]), acc) &&
                  parse_u32(trim(f[cm.bump_count]), bumps) && bumps >= 1 && acc >= 0.0 &&
                  lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0 &&
                  parse_ip_field(trim(f[cm.ip]), c.ip, c.ip_truncated);
        if (!ok) {
            reject(RejectReason::Malformed);
            continue;
        }
        c.t_start = *ts;
        c.t_end = *te;
        c.point = {lat, lon};
        c.accuracy_m = acc;
        c.coord_decimals = std::min(coordinate_decimals(lat_s), coordinate_decimals(lon_s));
        c.cluster_class = *cls;
        c.bump_count = bumps;

        if (c.accuracy_m > policy.max_accuracy_m) {
            reject(RejectReason::Accuracy);
            continue;
        }
        if (c.coord_decimals < policy.min_coord_decimals) {
            reject(RejectReason::Precision);
            continue;
        }
        if (policy.exclude_special_use) {
            if (auto name = special_use_name(c.ip)) {
                reject(RejectReason::SpecialUse);
                ++tally.special_use_breakdown[*name];
                continue;
            }
        }
        if (policy.exclude_foreign_registry && policy.domestic_space &&
            !policy.domestic_space->covers(c.ip)) {
            reject(RejectReason::ForeignRegistry);
            continue;
        }
        if (!policy.regions.empty()) {
            uint32_t mask = 0;
            for (size_t i = 0; i < policy.regions.size() && i < 32; ++i)
                if (policy.regions[i].contains(c.point)) mask |= (1u << i);
            if (!mask) {
                reject(RejectReason::OutOfRegion);
                continue;
            }
            c.region_mask = mask;
        }
        ++tally.accepted;
        out.clusters.push_back(std::move(c));
    }
    return out;
}

ParseResult parse_clusters_file(const std::string& path, const FilterPolicy& policy) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open cluster file: " + path);
    return parse_clusters(in, policy, path);
}

ClassShares tabulate_classes(const std::vector<LocationCluster>& clusters) {
    ClassShares out;
    for (const auto& c : clusters) {
        ++out.clusters[int(c.cluster_class)];
        out.bumps[int(c.cluster_class)] += c.bump_count;
        ++out.total_clusters;
        out.total_bumps += c.bump_count;
    }
    return out;
}

void write_cluster_header(std::ostream& out) {
    out << "device_id,t_start,t_end,lat,lon,accuracy_m,cluster_class,ip,bump_count\n";
}

void write_cluster_row(std::ostream& out, const LocationCluster& c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.1f,", c.point.lat, c.point.lon, c.accuracy_m);
    out << csv_escape(c.device_id) << ',' << format_iso8601_utc(c.t_start) << ','
        << format_iso8601_utc(c.t_end) << buf << cluster_class_name(c.cluster_class) << ',';
    if (c.ip_truncated)
        out << subnet_key(c.ip).to_string();
    else
        out << c.ip.to_string();
    out << ',' << c.bump_count << '\n';
}

} // namespace ipgeo
