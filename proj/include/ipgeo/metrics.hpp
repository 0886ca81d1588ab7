#pragma once

#include "ipgeo/core.hpp"
#include "ipgeo/enrichment.hpp"
#include "ipgeo/polygon.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ipgeo::metrics {

// ---------------------------------------------------------------------------
// Quantiles and ECDFs

// Linear interpolation between order statistics (type-7): h = (n-1)q.
// `sorted` must be ascending.
double quantile_sorted(const std::vector<double>& sorted, double q);

constexpr double kDefaultQuantiles[] = {0.10, 0.25, 0.50, 0.75, 0.90};

struct EcdfTable {
    // (value, cumulative share), strictly increasing in value,
    // non-decreasing in share; final share is exactly 1.
    std::vector<std::pair<double, double>> points;
    uint64_t n = 0;
};

EcdfTable build_ecdf(std::vector<double> values);

// Evaluates the ECDF at x (right-continuous step function).
double ecdf_at(const EcdfTable& t, double x);

// Divergence between two cohorts: relative median gap and the
// Kolmogorov-Smirnov statistic.
struct CohortDivergence {
    double median_ratio = 0.0; // median(a)/median(b) - 1
    double ks_stat = 0.0;
};

CohortDivergence cohort_compare(const EcdfTable& a, const EcdfTable& b);

// ---------------------------------------------------------------------------
// Cohort grouping over error records

// Joined per-cluster context the estimators group on.
struct EnrichedView {
    const std::vector<LocationCluster>* clusters = nullptr;
    const std::vector<std::optional<OrgClass>>* org = nullptr; // per cluster
    const std::vector<uint8_t>* night = nullptr;               // per cluster
    std::vector<std::string> region_names;                     // by region bit
    std::vector<std::string> provider_names;                   // by provider_idx
};

enum class Dim : uint8_t {
    City,        // expands: one record may lie in several regions
    Provider,
    Dba,
    Modality,
    Category,
    ClassGroup,  // travel vs non_travel
    Night,
    AccuracyBin, // claimed accuracy class, "none" when absent
};

std::string_view dim_name(Dim d);
std::optional<Dim> parse_dim(std::string_view s);

struct CohortSummary {
    uint64_t n = 0;
    std::vector<double> quantiles; // aligned with the requested q list
    EcdfTable ecdf;
};

struct CohortResults {
    std::vector<double> q_list;
    std::map<std::string, CohortSummary> cohorts; // key: "dim=value|dim=value"
    uint64_t dropped_records = 0; // records the selector rejected
};

// Groups error records along `dims` and summarizes each cohort.
// `selector` may drop records (nullptr keeps everything).
CohortResults ecdf_and_quantiles(
    const std::vector<ErrorRecord>& errors, const EnrichedView& view,
    const std::vector<Dim>& dims,
    const std::vector<double>& q_list = {0.10, 0.25, 0.50, 0.75, 0.90},
    const std::function<bool(const ErrorRecord&, const LocationCluster&)>& selector = nullptr);

// ---------------------------------------------------------------------------
// Subnet aggregation and scale

struct ScaleConfig {
    std::vector<double> f_values = {0.5, 0.75, 0.9, 1.0};
    uint32_t min_devices = 10;
    uint32_t min_addresses = 10;
    double error_cap_m = 100e3; // hard discard above this
};

struct ProviderError {
    double mean_error_m = 0.0;
    uint64_t n = 0;
};

struct SubnetAggregate {
    SubnetKey key;
    uint32_t device_count = 0;
    uint32_t address_count = 0; // distinct full addresses (untruncated only)
    uint64_t report_count = 0;
    geo::PlanePoint center; // medioid of projected reports
    std::vector<geo::HullScale> scales; // aligned with cfg.f_values
    std::map<uint32_t, ProviderError> provider_error; // by provider_idx
    std::map<uint32_t, uint32_t> visit_pairs; // visits v -> #(device,ip) pairs

    bool passes(uint32_t min_devices, uint32_t min_addresses) const {
        return device_count >= min_devices && address_count >= min_addresses;
    }
};

// Aggregates the given cluster indices (the caller selects the cohort,
// e.g. fixed-line only) per /24 (or /48) subnet. Points are projected
// with `projection`; clusters outside its range are skipped.
std::map<SubnetKey, SubnetAggregate> subnet_aggregate(
    const std::vector<uint32_t>& cluster_indices, const std::vector<LocationCluster>& clusters,
    const std::vector<ErrorRecord>& errors, const geo::LocalProjection& projection,
    const ScaleConfig& cfg);

// Pearson correlation of (scale at f, mean error) across subnets that
// pass the device/address cuts and have a defined scale. Returns
// nullopt when fewer than 3 subnets qualify or variance vanishes.
struct Correlation {
    double r = 0.0;
    uint64_t n = 0;
};
std::optional<Correlation> scale_error_correlation(
    const std::map<SubnetKey, SubnetAggregate>& aggs, double f, uint32_t provider_idx,
    const ScaleConfig& cfg);

// Plain two-pass Pearson on paired vectors (sorted-by-caller order).
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pearson r with a two-sided p-value from the t distribution with n-2
// degrees of freedom. Optional weights give a weighted correlation
// (p-value still uses the unweighted count).
struct CorrelationTest {
    double r = 0.0;
    double p_value = 1.0;
    uint64_t n = 0;
};
std::optional<CorrelationTest> attribute_correlation(const std::vector<double>& a,
                                                     const std::vector<double>& b,
                                                     const std::vector<double>* weights = nullptr);

// ---------------------------------------------------------------------------
// Visit histogram (ephemeral-address signature)

struct VisitHistogram {
    std::map<uint32_t, uint64_t> pair_counts;   // v -> #(device,ip) pairs
    std::map<uint32_t, double> weighted_share;  // bin v gets v*pairs weight
    std::map<uint32_t, double> unweighted_share;
    uint64_t total_pairs = 0;
};

// Counts how often a single device revisits a single address, over the
// address-level clusters selected by `indices` whose subnet satisfies
// `subnet_filter` (nullptr keeps all).
VisitHistogram visit_histogram(const std::vector<uint32_t>& indices,
                               const std::vector<LocationCluster>& clusters,
                               const std::function<bool(const SubnetKey&)>& subnet_filter);

// ---------------------------------------------------------------------------
// Movement and persistence

struct PersistenceRow {
    uint32_t threshold = 0;
    uint64_t passing_1 = 0, passing_2 = 0;
    double share_1to2 = 0.0; // pass cuts(threshold) in P1 and base cuts in P2
    double share_2to1 = 0.0;
};

struct MovementReport {
    std::vector<std::pair<SubnetKey, double>> displacement_m; // sorted by key
    std::vector<PersistenceRow> persistence;
};

MovementReport subnet_movement(const std::map<SubnetKey, SubnetAggregate>& period1,
                               const std::map<SubnetKey, SubnetAggregate>& period2,
                               const ScaleConfig& cfg,
                               const std::vector<uint32_t>& thresholds = {10, 20, 50});

// ---------------------------------------------------------------------------
// Churn

struct ChurnCurve {
    // index d = 0..d_max; share(0) == 1 by construction
    std::vector<uint64_t> pairs;
    std::vector<uint64_t> same_ip;
    double share(size_t d) const {
        return pairs[d] ? double(same_ip[d]) / double(pairs[d]) : 0.0;
    }
};

// Likelihood that a device seen at night on one ISP holds the same
// address d days later. Denominator: pairs of night presences of one
// device on one ISP exactly d nights apart; numerator: pairs with equal
// address. Night-flagged, address-level, fixed-line consumer clusters.
std::map<std::string, ChurnCurve> churn_curves(const EnrichedView& view, int d_max,
                                               int utc_offset_min);

// ---------------------------------------------------------------------------
// Modality share per polygon

struct ModalityShares {
    std::map<std::string, std::pair<uint64_t, uint64_t>> counts; // id -> (mobile, fixed)
    std::vector<std::string> missing; // polygons with zero classified clusters
};

ModalityShares modality_share(const EnrichedView& view, const geo::PolygonLayer& layer,
                              const geo::LocalProjection& projection, bool night_only);

// ---------------------------------------------------------------------------
// Attenuation (imputed vs true polygon attributes)

struct AttenuationDecile {
    uint64_t n = 0;
    double y_true_mean = 0.0;
    std::vector<double> y_imp_quantiles; // q10..q90 of the imputed values
};

struct AttenuationReport {
    double slope = 0.0; // OLS of y_imp on y_true
    double intercept = 0.0;
    uint64_t n = 0;
    std::vector<AttenuationDecile> deciles; // by decile of y_true
};

AttenuationReport attenuation_analysis(const std::vector<std::pair<double, double>>& records);

} // namespace ipgeo::metrics
