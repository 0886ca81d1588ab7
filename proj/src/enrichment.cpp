#include "ipgeo/enrichment.hpp"

#include "ipgeo/csv.hpp"
#include "ipgeo/util.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <set>
#include <thread>

namespace ipgeo {

void PrefixTable::insert_in(std::vector<Node>& nodes, const Cidr& cidr, uint32_t value) {
    int32_t cur = 0;
    for (int b = 0; b < cidr.prefix_len; ++b) {
        const int bit = cidr.base.bit(size_t(b)) ? 1 : 0;
        if (nodes[cur].child[bit] < 0) {
            nodes[cur].child[bit] = int32_t(nodes.size());
            nodes.push_back(Node{});
        }
        cur = nodes[cur].child[bit];
    }
    if (nodes[cur].value >= 0)
        throw DataError("duplicate prefix in table: " + cidr.to_string());
    nodes[cur].value = int32_t(value);
    ++entries_;
}

std::optional<uint32_t> PrefixTable::lookup_in(const std::vector<Node>& nodes,
                                               const IpAddr& ip) const {
    int32_t cur = 0;
    int32_t best = nodes[0].value;
    const size_t nbits = ip.bit_count();
    for (size_t b = 0; b < nbits; ++b) {
        const int bit = ip.bit(b) ? 1 : 0;
        cur = nodes[cur].child[bit];
        if (cur < 0) break;
        if (nodes[cur].value >= 0) best = nodes[cur].value;
    }
    if (best < 0) return std::nullopt;
    return uint32_t(best);
}

void PrefixTable::insert(const Cidr& cidr, uint32_t value) {
    insert_in(cidr.base.v6 ? v6_ : v4_, cidr, value);
}

std::optional<uint32_t> PrefixTable::lookup(const IpAddr& ip) const {
    return lookup_in(ip.v6 ? v6_ : v4_, ip);
}

// ---------------------------------------------------------------------------

GeoDbSnapshot load_geodb_csv(const std::string& path, const std::string& provider,
                             UnixTime window_start, UnixTime window_end) {
    GeoDbSnapshot snap;
    snap.provider = provider;
    snap.window_start = window_start;
    snap.window_end = window_end;

    CsvReader reader(path);
    const int c_net = reader.column("network");
    const int c_lat = reader.column("latitude");
    const int c_lon = reader.column("longitude");
    const int c_acc = reader.column("accuracy_km");
    if (c_net < 0 || c_lat < 0 || c_lon < 0)
        throw ConfigError(path + ": geodb header needs network,latitude,longitude");

    std::map<std::string, geo::GeoPoint> seen;
    std::vector<std::string> conflicts;
    std::vector<std::string> f;
    size_t line_no = 0;
    while (reader.next(f, line_no)) {
        auto cidr = Cidr::parse(trim(f[c_net]));
        if (!cidr) throw DataError(path + ":" + std::to_string(line_no) + ": bad CIDR");
        GeoDbEntry e;
        e.cidr = *cidr;
        auto to_d = [&](const std::string& s, double& out) {
            const std::string t = trim(s);
            auto r = std::from_chars(t.data(), t.data() + t.size(), out);
            return r.ec == std::errc() && r.ptr == t.data() + t.size();
        };
        if (!to_d(f[c_lat], e.location.lat) || !to_d(f[c_lon], e.location.lon))
            throw DataError(path + ":" + std::to_string(line_no) + ": bad coordinates");
        if (c_acc >= 0 && c_acc < int(f.size())) {
            const std::string t = trim(f[c_acc]);
            if (!t.empty()) {
                double acc;
                if (!to_d(t, acc))
                    throw DataError(path + ":" + std::to_string(line_no) + ": bad accuracy_km");
                e.claimed_accuracy_km = acc;
            }
        }
        const std::string key = e.cidr.to_string();
        if (auto it = seen.find(key); it != seen.end()) {
            if (it->second.lat != e.location.lat || it->second.lon != e.location.lon)
                conflicts.push_back(key);
            continue; // identical duplicate: keep the first
        }
        seen.emplace(key, e.location);
        snap.entries.push_back(std::move(e));
    }
    if (!conflicts.empty()) {
        std::string msg = path + ": conflicting duplicate prefixes:";
        for (const auto& c : conflicts) msg += " " + c;
        throw DataError(msg);
    }
    for (uint32_t i = 0; i < snap.entries.size(); ++i)
        snap.table.insert(snap.entries[i].cidr, i);
    return snap;
}

// ---------------------------------------------------------------------------

RegistryDb RegistryDb::from_records(std::vector<RegistryRecord> records) {
    RegistryDb db;
    db.records_ = std::move(records);
    std::set<std::string> dup_check;
    for (uint32_t i = 0; i < db.records_.size(); ++i) {
        const auto& r = db.records_[i];
        if (!dup_check.insert(r.cidr.to_string()).second)
            throw DataError("registry: duplicate CIDR " + r.cidr.to_string());
        db.table_.insert(r.cidr, i);
        db.by_handle_.emplace(r.net_handle, i); // first handle wins
    }
    return db;
}

RegistryDb RegistryDb::load_csv(const std::string& path) {
    CsvReader reader(path);
    const int c_cidr = reader.column("cidr");
    const int c_net = reader.column("net_handle");
    const int c_parent = reader.column("parent_handle");
    const int c_org = reader.column("org_name");
    if (c_cidr < 0 || c_net < 0 || c_parent < 0 || c_org < 0)
        throw ConfigError(path + ": registry header needs cidr,net_handle,parent_handle,org_name");
    std::vector<RegistryRecord> records;
    std::vector<std::string> f;
    size_t line_no = 0;
    while (reader.next(f, line_no)) {
        auto cidr = Cidr::parse(trim(f[c_cidr]));
        if (!cidr) throw DataError(path + ":" + std::to_string(line_no) + ": bad CIDR");
        records.push_back(RegistryRecord{*cidr, trim(f[c_net]), trim(f[c_parent]),
                                         normalize_ws(f[c_org])});
    }
    return from_records(std::move(records));
}

std::optional<RegistryRecord> RegistryDb::resolve_org(const SubnetKey& subnet) const {
    auto hit = table_.lookup(subnet.cidr.base);
    if (!hit) return std::nullopt;
    const int threshold = subnet.cidr.base.v6 ? 48 : 24;
    const RegistryRecord* cur = &records_[*hit];
    std::vector<std::string> chain{cur->net_handle};
    std::set<std::string> visited{cur->net_handle};
    while (cur->cidr.prefix_len > threshold && !cur->parent_handle.empty()) {
        auto it = by_handle_.find(cur->parent_handle);
        if (it == by_handle_.end()) break; // dangling parent: chain ends here
        if (!visited.insert(cur->parent_handle).second) {
            std::string msg = "registry: cycle in parent chain:";
            for (const auto& h : chain) msg += " " + h;
            msg += " -> " + cur->parent_handle;
            throw DataError(msg);
        }
        cur = &records_[it->second];
        chain.push_back(cur->net_handle);
    }
    return *cur;
}

CidrSet RegistryDb::coverage() const {
    CidrSet out;
    for (const auto& r : records_) out.add(r.cidr);
    return out;
}

// ---------------------------------------------------------------------------

std::string_view modality_name(Modality m) {
    return m == Modality::Fixed ? "fixed" : "mobile";
}

std::string_view org_category_name(OrgCategory c) {
    switch (c) {
        case OrgCategory::ConsumerIsp: return "consumer_isp";
        case OrgCategory::University: return "university";
        case OrgCategory::Fortune100: return "fortune100";
        case OrgCategory::Other: return "other";
    }
    return "?";
}

std::optional<Modality> parse_modality(std::string_view s) {
    if (s == "fixed") return Modality::Fixed;
    if (s == "mobile") return Modality::Mobile;
    return std::nullopt;
}

std::optional<OrgCategory> parse_org_category(std::string_view s) {
    if (s == "consumer_isp") return OrgCategory::ConsumerIsp;
    if (s == "university") return OrgCategory::University;
    if (s == "fortune100") return OrgCategory::Fortune100;
    if (s == "other") return OrgCategory::Other;
    return std::nullopt;
}

RuleTable RuleTable::defaults() {
    // Word-based mobile/fixed split; specific mobile brands come before
    // the parent company names, so "AT&T Mobility LLC" never falls
    // through to plain AT&T.
    std::vector<DbaRule> r = {
        {"*at&t mobility*", "AT&T Mobile", Modality::Mobile, OrgCategory::ConsumerIsp},
        {"*verizon wireless*", "Verizon Mobile", Modality::Mobile, OrgCategory::ConsumerIsp},
        {"*t-mobile*", "T-Mobile", Modality::Mobile, OrgCategory::ConsumerIsp},
        {"*sprint*", "Sprint", Modality::Mobile, OrgCategory::ConsumerIsp},
        {"*comcast*", "Comcast", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*charter*", "Charter", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*cablevision*", "Cablevision", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*rcn*", "RCN", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*wideopenwest*", "WOW!", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*wow!*", "WOW!", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*at&t*", "AT&T", Modality::Fixed, OrgCategory::ConsumerIsp},
        {"*verizon*", "Verizon", Modality::Fixed, OrgCategory::ConsumerIsp},
        // generic word rules, after the named brands
        {"*mobility*", "", Modality::Mobile, OrgCategory::ConsumerIsp},
        {"*wireless*", "", Modality::Mobile, OrgCategory::ConsumerIsp},
    };
    return RuleTable(std::move(r));
}

RuleTable RuleTable::load_csv(const std::string& path) {
    CsvReader reader(path);
    const int c_pat = reader.column("pattern");
    const int c_dba = reader.column("dba");
    const int c_mod = reader.column("modality");
    const int c_cat = reader.column("category");
    if (c_pat < 0 || c_dba < 0 || c_mod < 0 || c_cat < 0)
        throw ConfigError(path + ": rule header needs pattern,dba,modality,category");
    std::vector<DbaRule> rules;
    std::vector<std::string> f;
    size_t line_no = 0;
    while (reader.next(f, line_no)) {
        DbaRule r;
        r.pattern = trim(f[c_pat]);
        r.dba = trim(f[c_dba]);
        auto mod = parse_modality(trim(f[c_mod]));
        auto cat = parse_org_category(trim(f[c_cat]));
        if (r.pattern.empty() || !mod || !cat)
            throw DataError(path + ":" + std::to_string(line_no) + ": bad rule row");
        r.modality = *mod;
        r.category = *cat;
        rules.push_back(std::move(r));
    }
    return RuleTable(std::move(rules));
}

OrgClass RuleTable::classify(const RegistryRecord& r) const {
    const std::string name = normalize_ws(r.org_name);
    for (const auto& rule : rules_) {
        if (glob_or_substring_match(rule.pattern, name)) {
            OrgClass out;
            out.dba_name = rule.dba.empty() ? name : rule.dba;
            out.modality = rule.modality;
            out.category = rule.category;
            return out;
        }
    }
    return OrgClass{name, Modality::Fixed, OrgCategory::Other};
}

// ---------------------------------------------------------------------------

ScoreResult score_errors(const std::vector<LocationCluster>& clusters,
                         const GeoDbSnapshot& snapshot, uint32_t provider_idx,
                         double too_close_m, int threads) {
    ScoreResult out;
    if (clusters.empty()) return out;

    bool any_in_window = false;
    for (const auto& c : clusters) {
        if (c.t_start >= snapshot.window_start && c.t_start < snapshot.window_end) {
            any_in_window = true;
            break;
        }
    }
    if (!any_in_window)
        throw ConfigError("score_errors: no cluster falls inside the '" + snapshot.provider +
                          "' snapshot window (license-alignment mismatch)");

    // Fixed-size blocks keep the output stream identical for any thread
    // count: block results are concatenated in block order.
    constexpr size_t kBlock = 65536;
    const size_t n_blocks = (clusters.size() + kBlock - 1) / kBlock;
    std::vector<ScoreResult> partial(n_blocks);

    auto run_block = [&](size_t bi) {
        const size_t lo = bi * kBlock;
        const size_t hi = std::min(lo + kBlock, clusters.size());
        ScoreResult& res = partial[bi];
        for (size_t i = lo; i < hi; ++i) {
            const auto& c = clusters[i];
            if (c.t_start < snapshot.window_start || c.t_start >= snapshot.window_end) {
                ++res.out_of_window;
                continue;
            }
            auto hit = snapshot.lookup(c.ip);
            if (!hit) {
                ++res.prefix_misses;
                continue;
            }
            const GeoDbEntry& e = snapshot.entries[*hit];
            ErrorRecord rec;
            rec.cluster_idx = uint32_t(i);
            rec.provider_idx = provider_idx;
            rec.predicted = e.location;
            rec.error_m = geo::vincenty_distance(c.point, e.location);
            rec.claimed_accuracy_km = e.claimed_accuracy_km;
            rec.too_close = rec.error_m < too_close_m;
            res.records.push_back(rec);
        }
    };

    if (threads <= 1 || n_blocks <= 1) {
        for (size_t bi = 0; bi < n_blocks; ++bi) run_block(bi);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t bi = next.fetch_add(1); bi < n_blocks; bi = next.fetch_add(1))
                run_block(bi);
        };
        std::vector<std::thread> pool;
        const int nt = std::min<int>(threads, int(n_blocks));
        pool.reserve(size_t(nt));
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    size_t total = 0;
    for (const auto& p : partial) total += p.records.size();
    out.records.reserve(total);
    for (auto& p : partial) {
        out.records.insert(out.records.end(), p.records.begin(), p.records.end());
        out.prefix_misses += p.prefix_misses;
        out.out_of_window += p.out_of_window;
    }
    return out;
}

} // namespace ipgeo
