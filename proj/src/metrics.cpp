#include "ipgeo/metrics.hpp"

#include "ipgeo/util.hpp"

#include <algorithm>
#include <cmath>

namespace ipgeo::metrics {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = double(sorted.size() - 1) * q;
    const size_t lo = size_t(h);
    const double frac = h - double(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

EcdfTable build_ecdf(std::vector<double> values) {
    EcdfTable t;
    t.n = values.size();
    if (values.empty()) return t;
    std::sort(values.begin(), values.end());
    for (size_t i = 0; i < values.size(); ++i) {
        const bool last_of_run = (i + 1 == values.size()) || (values[i + 1] != values[i]);
        if (last_of_run)
            t.points.emplace_back(values[i], double(i + 1) / double(t.n));
    }
    return t;
}

double ecdf_at(const EcdfTable& t, double x) {
    // last point with value <= x
    double share = 0.0;
    size_t lo = 0, hi = t.points.size();
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (t.points[mid].first <= x) {
            share = t.points[mid].second;
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return share;
}

CohortDivergence cohort_compare(const EcdfTable& a, const EcdfTable& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("cohort_compare: empty table");
    auto median_of = [](const EcdfTable& t) {
        // interpolated median from the step points is not well defined;
        // use the first value at share >= 0.5 (the order-statistic median)
        for (const auto& [v, s] : t.points)
            if (s >= 0.5) return v;
        return t.points.back().first;
    };
    CohortDivergence out;
    const double mb = median_of(b);
    out.median_ratio = mb != 0.0 ? median_of(a) / mb - 1.0 : 0.0;
    double ks = 0.0;
    for (const auto& [v, s] : a.points) ks = std::max(ks, std::abs(s - ecdf_at(b, v)));
    for (const auto& [v, s] : b.points) ks = std::max(ks, std::abs(s - ecdf_at(a, v)));
    out.ks_stat = ks;
    return out;
}

// ---------------------------------------------------------------------------

std::string_view dim_name(Dim d) {
    switch (d) {
        case Dim::City: return "city";
        case Dim::Provider: return "provider";
        case Dim::Dba: return "dba";
        case Dim::Modality: return "modality";
        case Dim::Category: return "category";
        case Dim::ClassGroup: return "class";
        case Dim::Night: return "night";
        case Dim::AccuracyBin: return "accuracy_bin";
    }
    return "?";
}

std::optional<Dim> parse_dim(std::string_view s) {
    for (Dim d : {Dim::City, Dim::Provider, Dim::Dba, Dim::Modality, Dim::Category,
                  Dim::ClassGroup, Dim::Night, Dim::AccuracyBin})
        if (dim_name(d) == s) return d;
    return std::nullopt;
}

namespace {

std::string accuracy_bin_label(const std::optional<double>& km) {
    return km ? fmt6(*km) : std::string("none");
}

} // namespace

CohortResults ecdf_and_quantiles(
    const std::vector<ErrorRecord>& errors, const EnrichedView& view,
    const std::vector<Dim>& dims, const std::vector<double>& q_list,
    const std::function<bool(const ErrorRecord&, const LocationCluster&)>& selector) {
    CohortResults out;
    out.q_list = q_list;
    std::map<std::string, std::vector<double>> samples;

    const auto& clusters = *view.clusters;
    for (const auto& rec : errors) {
        const auto& c = clusters[rec.cluster_idx];
        if (selector && !selector(rec, c)) {
            ++out.dropped_records;
            continue;
        }

        // the city dimension may fan one record out to several cohorts
        std::vector<std::string> keys{""};
        for (Dim d : dims) {
            std::string label(dim_name(d));
            auto append_all = [&](const std::vector<std::string>& values) {
                std::vector<std::string> next;
                next.reserve(keys.size() * values.size());
                for (const auto& k : keys)
                    for (const auto& v : values)
                        next.push_back(k.empty() ? label + "=" + v : k + "|" + label + "=" + v);
                keys = std::move(next);
            };
            switch (d) {
                case Dim::City: {
                    std::vector<std::string> regions;
                    for (size_t i = 0; i < view.region_names.size(); ++i)
                        if (c.region_mask & (1u << i)) regions.push_back(view.region_names[i]);
                    if (regions.empty()) regions.push_back("none");
                    append_all(regions);
                    break;
                }
                case Dim::Provider:
                    append_all({rec.provider_idx < view.provider_names.size()
                                    ? view.provider_names[rec.provider_idx]
                                    : std::to_string(rec.provider_idx)});
                    break;
                case Dim::Dba: {
                    const auto& org = (*view.org)[rec.cluster_idx];
                    append_all({org ? org->dba_name : std::string("(unknown)")});
                    break;
                }
                case Dim::Modality: {
                    const auto& org = (*view.org)[rec.cluster_idx];
                    append_all({org ? std::string(modality_name(org->modality))
                                    : std::string("(unknown)")});
                    break;
                }
                case Dim::Category: {
                    const auto& org = (*view.org)[rec.cluster_idx];
                    append_all({org ? std::string(org_category_name(org->category))
                                    : std::string("(unknown)")});
                    break;
                }
                case Dim::ClassGroup:
                    append_all({c.cluster_class == ClusterClass::Travel ? "travel" : "non_travel"});
                    break;
                case Dim::Night:
                    append_all({(*view.night)[rec.cluster_idx] ? "night" : "day"});
                    break;
                case Dim::AccuracyBin:
                    append_all({accuracy_bin_label(rec.claimed_accuracy_km)});
                    break;
            }
        }
        for (const auto& k : keys) samples[k].push_back(rec.error_m);
    }

    for (auto& [key, values] : samples) {
        CohortSummary s;
        s.n = values.size();
        std::sort(values.begin(), values.end());
        for (double q : q_list) s.quantiles.push_back(quantile_sorted(values, q));
        s.ecdf = build_ecdf(std::move(values));
        out.cohorts.emplace(key, std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::map<SubnetKey, SubnetAggregate> subnet_aggregate(
    const std::vector<uint32_t>& cluster_indices, const std::vector<LocationCluster>& clusters,
    const std::vector<ErrorRecord>& errors, const geo::LocalProjection& projection,
    const ScaleConfig& cfg) {
    struct Accum {
        std::vector<geo::PlanePoint> points;
        std::set<std::string> devices;
        std::set<IpAddr> addresses;
        uint64_t reports = 0;
        std::map<std::pair<std::string, IpAddr>, uint32_t> visits;
        std::map<uint32_t, std::vector<double>> errs; // provider -> capped errors
    };
    std::map<SubnetKey, Accum> acc;
    std::vector<char> selected(clusters.size(), 0);

    for (uint32_t idx : cluster_indices) {
        const auto& c = clusters[idx];
        geo::PlanePoint p;
        try {
            p = projection.forward(c.point);
        } catch (const std::domain_error&) {
            continue; // outside the projection range
        }
        selected[idx] = 1;
        auto& a = acc[subnet_key(c.ip)];
        a.points.push_back(p);
        a.devices.insert(c.device_id);
        ++a.reports;
        if (!c.ip_truncated) {
            a.addresses.insert(c.ip);
            ++a.visits[{c.device_id, c.ip}];
        }
    }
    for (const auto& rec : errors) {
        if (!selected[rec.cluster_idx]) continue;
        if (rec.error_m > cfg.error_cap_m) continue; // hard discard
        const auto& c = clusters[rec.cluster_idx];
        acc[subnet_key(c.ip)].errs[rec.provider_idx].push_back(rec.error_m);
    }

    std::map<SubnetKey, SubnetAggregate> out;
    for (auto& [key, a] : acc) {
        SubnetAggregate agg;
        agg.key = key;
        agg.device_count = uint32_t(a.devices.size());
        agg.address_count = uint32_t(a.addresses.size());
        agg.report_count = a.reports;
        agg.center = geo::medioid(a.points);
        for (double f : cfg.f_values) agg.scales.push_back(geo::hull_scale(a.points, f));
        for (auto& [prov, errs] : a.errs) {
            std::sort(errs.begin(), errs.end()); // summation order fixed under shuffles
            double sum = 0.0;
            for (double e : errs) sum += e;
            agg.provider_error[prov] = ProviderError{sum / double(errs.size()), errs.size()};
        }
        for (const auto& [pair, v] : a.visits) ++agg.visit_pairs[v];
        out.emplace(key, std::move(agg));
    }
    return out;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<Correlation> scale_error_correlation(
    const std::map<SubnetKey, SubnetAggregate>& aggs, double f, uint32_t provider_idx,
    const ScaleConfig& cfg) {
    size_t fi = cfg.f_values.size();
    for (size_t i = 0; i < cfg.f_values.size(); ++i)
        if (cfg.f_values[i] == f) fi = i;
    if (fi == cfg.f_values.size())
        throw std::invalid_argument("scale_error_correlation: f not in ScaleConfig");

    std::vector<double> xs, ys;
    for (const auto& [key, agg] : aggs) { // map order: deterministic by key
        if (!agg.passes(cfg.min_devices, cfg.min_addresses)) continue;
        if (agg.scales[fi].degenerate) continue;
        auto it = agg.provider_error.find(provider_idx);
        if (it == agg.provider_error.end() || it->second.n == 0) continue;
        xs.push_back(agg.scales[fi].scale_m);
        ys.push_back(it->second.mean_error_m);
    }
    if (xs.size() < 3) return std::nullopt;
    auto r = pearson(xs, ys);
    if (!r) return std::nullopt;
    return Correlation{*r, xs.size()};
}

// ---------------------------------------------------------------------------
// t-distribution p-value via the regularized incomplete beta function

namespace {

double betacf(double a, double b, double x) {
    // continued fraction for the incomplete beta function (Lentz)
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double betainc(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// two-sided p for Student's t with nu degrees of freedom
double t_two_sided_p(double t, double nu) {
    const double x = nu / (nu + t * t);
    return betainc(nu / 2.0, 0.5, x);
}

} // namespace

std::optional<CorrelationTest> attribute_correlation(const std::vector<double>& a,
                                                     const std::vector<double>& b,
                                                     const std::vector<double>* weights) {
    if (a.size() != b.size() || a.size() < 3) return std::nullopt;
    if (weights && weights->size() != a.size()) return std::nullopt;
    const size_t n = a.size();

    double wsum = 0.0, mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        wsum += w;
        mx += w * a[i];
        my += w * b[i];
    }
    if (wsum <= 0.0) return std::nullopt;
    mx /= wsum;
    my /= wsum;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        const double dx = a[i] - mx, dy = b[i] - my;
        sxy += w * dx * dy;
        sxx += w * dx * dx;
        syy += w * dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    CorrelationTest out;
    out.r = sxy / std::sqrt(sxx * syy);
    out.n = n;
    const double nu = double(n) - 2.0;
    const double r2 = std::min(out.r * out.r, 1.0 - 1e-15);
    const double t = out.r * std::sqrt(nu / (1.0 - r2));
    out.p_value = t_two_sided_p(t, nu);
    return out;
}

// ---------------------------------------------------------------------------

VisitHistogram visit_histogram(const std::vector<uint32_t>& indices,
                               const std::vector<LocationCluster>& clusters,
                               const std::function<bool(const SubnetKey&)>& subnet_filter) {
    VisitHistogram out;
    std::map<std::pair<std::string, IpAddr>, uint32_t> visits;
    for (uint32_t idx : indices) {
        const auto& c = clusters[idx];
        if (c.ip_truncated) continue; // address-level only
        if (subnet_filter && !subnet_filter(subnet_key(c.ip))) continue;
        ++visits[{c.device_id, c.ip}];
    }
    uint64_t weight_total = 0;
    for (const auto& [pair, v] : visits) {
        ++out.pair_counts[v];
        ++out.total_pairs;
        weight_total += v;
    }
    for (const auto& [v, pairs] : out.pair_counts) {
        out.unweighted_share[v] = out.total_pairs ? double(pairs) / double(out.total_pairs) : 0.0;
        out.weighted_share[v] =
            weight_total ? double(uint64_t(v) * pairs) / double(weight_total) : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------

MovementReport subnet_movement(const std::map<SubnetKey, SubnetAggregate>& period1,
                               const std::map<SubnetKey, SubnetAggregate>& period2,
                               const ScaleConfig& cfg, const std::vector<uint32_t>& thresholds) {
    MovementReport out;
    for (const auto& [key, a1] : period1) {
        if (!a1.passes(cfg.min_devices, cfg.min_addresses)) continue;
        auto it = period2.find(key);
        if (it == period2.end() || !it->second.passes(cfg.min_devices, cfg.min_addresses))
            continue;
        out.displacement_m.emplace_back(key, geo::plane_distance(a1.center, it->second.center));
    }

    for (uint32_t t : thresholds) {
        PersistenceRow row;
        row.threshold = t;
        uint64_t hit12 = 0, hit21 = 0;
        for (const auto& [key, a1] : period1) {
            if (!a1.passes(t, t)) continue;
            ++row.passing_1;
            auto it = period2.find(key);
            if (it != period2.end() && it->second.passes(cfg.min_devices, cfg.min_addresses))
                ++hit12;
        }
        for (const auto& [key, a2] : period2) {
            if (!a2.passes(t, t)) continue;
            ++row.passing_2;
            auto it = period1.find(key);
            if (it != period1.end() && it->second.passes(cfg.min_devices, cfg.min_addresses))
                ++hit21;
        }
        row.share_1to2 = row.passing_1 ? double(hit12) / double(row.passing_1) : 0.0;
        row.share_2to1 = row.passing_2 ? double(hit21) / double(row.passing_2) : 0.0;
        out.persistence.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::map<std::string, ChurnCurve> churn_curves(const EnrichedView& view, int d_max,
                                               int utc_offset_min) {
    const auto& clusters = *view.clusters;
    // (device, dba) -> sorted night presences
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<int64_t, IpAddr>>> groups;

    for (size_t i = 0; i < clusters.size(); ++i) {
        const auto& c = clusters[i];
        if (c.ip_truncated) continue;
        const auto& org = (*view.org)[i];
        if (!org || org->modality != Modality::Fixed || org->category != OrgCategory::ConsumerIsp)
            continue;
        auto [lo, hi] = night_index_range(c.t_start, c.t_end, utc_offset_min);
        for (int64_t night = lo; night <= hi; ++night)
            groups[{c.device_id, org->dba_name}].emplace_back(night, c.ip);
    }

    std::map<std::string, ChurnCurve> out;
    for (auto& [key, presences] : groups) {
        auto& curve = out[key.second];
        if (curve.pairs.empty()) {
            curve.pairs.assign(size_t(d_max) + 1, 0);
            curve.same_ip.assign(size_t(d_max) + 1, 0);
        }
        std::sort(presences.begin(), presences.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const size_t n = presences.size();
        for (size_t i = 0; i < n; ++i) {
            // d = 0: each presence pairs with itself, share 1 by construction
            ++curve.pairs[0];
            ++curve.same_ip[0];
            for (size_t j = i + 1; j < n; ++j) {
                const int64_t d = presences[j].first - presences[i].first;
                if (d > d_max) break;
                if (d == 0) continue; // same night, distinct clusters
                ++curve.pairs[size_t(d)];
                if (presences[i].second == presences[j].second) ++curve.same_ip[size_t(d)];
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ModalityShares modality_share(const EnrichedView& view, const geo::PolygonLayer& layer,
                              const geo::LocalProjection& projection, bool night_only) {
    ModalityShares out;
    const auto& clusters = *view.clusters;
    std::map<std::string, std::pair<uint64_t, uint64_t>> counts;
    for (size_t i = 0; i < clusters.size(); ++i) {
        const auto& org = (*view.org)[i];
        if (!org) continue;
        if (night_only && !(*view.night)[i]) continue;
        geo::PlanePoint p;
        try {
            p = projection.forward(clusters[i].point);
        } catch (const std::domain_error&) {
            continue;
        }
        auto poly = layer.locate(p);
        if (!poly) continue;
        auto& c = counts[layer.polygons()[*poly].id];
        if (org->modality == Modality::Mobile)
            ++c.first;
        else
            ++c.second;
    }
    out.counts = std::move(counts);
    for (const auto& poly : layer.polygons())
        if (!out.counts.count(poly.id)) out.missing.push_back(poly.id);
    return out;
}

// ---------------------------------------------------------------------------

AttenuationReport attenuation_analysis(const std::vector<std::pair<double, double>>& records) {
    AttenuationReport out;
    out.n = records.size();
    if (records.size() < 2) return out;

    std::vector<std::pair<double, double>> sorted = records;
    std::sort(sorted.begin(), sorted.end()); // by y_true, then y_imp

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : sorted) {
        mx += x;
        my += y;
    }
    mx /= double(sorted.size());
    my /= double(sorted.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : sorted) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    out.slope = sxx != 0.0 ? sxy / sxx : 0.0;
    out.intercept = my - out.slope * mx;

    // decile summary of imputed values, by decile of the true value
    const size_t n = sorted.size();
    for (int dec = 0; dec < 10; ++dec) {
        const size_t lo = n * size_t(dec) / 10;
        const size_t hi = n * size_t(dec + 1) / 10;
        if (hi <= lo) continue;
        AttenuationDecile row;
        row.n = hi - lo;
        std::vector<double> imp;
        imp.reserve(hi - lo);
        double tsum = 0.0;
        for (size_t i = lo; i < hi; ++i) {
            tsum += sorted[i].first;
            imp.push_back(sorted[i].second);
        }
        row.y_true_mean = tsum / double(row.n);
        std::sort(imp.begin(), imp.end());
        for (double q : kDefaultQuantiles) row.y_imp_quantiles.push_back(quantile_sorted(imp, q));
        out.deciles.push_back(std::move(row));
    }
    return out;
}

} // namespace ipgeo::metrics
