#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ipgeo::geo {

// WGS-84 ellipsoid
constexpr double kSemiMajorM = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kSemiMinorM = kSemiMajorM * (1.0 - kFlattening);
constexpr double kPi = 3.14159265358979323846264338327950288;

struct GeoPoint {
    double lat = 0.0; // degrees, [-90, 90]
    double lon = 0.0; // degrees, [-180, 180]
};

struct PlanePoint {
    double x = 0.0; // meters east of projection origin
    double y = 0.0; // meters north of projection origin
};

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

// Thrown when the Vincenty lambda iteration fails to converge, which
// happens only for nearly antipodal pairs.
class AntipodalError : public std::domain_error {
public:
    AntipodalError() : std::domain_error("vincenty_distance: antipodal pair, no convergence") {}
};

// Inverse geodesic distance on the WGS-84 ellipsoid (Vincenty, 1975).
// Iteration capped at 200 rounds with a 1e-12 rad threshold; throws
// AntipodalError instead of returning an approximation.
double vincenty_distance(const GeoPoint& a, const GeoPoint& b);

// Local azimuthal equal-area projection about a fixed origin
// (Snyder's ellipsoidal oblique Lambert azimuthal equal-area, with the
// D correction that makes scale true at the origin). Valid within
// ~500 km of the origin; beyond that forward() throws.
class LocalProjection {
public:
    explicit LocalProjection(const GeoPoint& origin);

    PlanePoint forward(const GeoPoint& p) const; // std::domain_error out of range
    GeoPoint inverse(const PlanePoint& p) const;

    const GeoPoint& origin() const { return origin_; }

    static constexpr double kMaxRangeM = 500e3;

private:
    double authalic_beta(double phi) const; // geodetic -> authalic latitude (rad)
    double q_of_phi(double sin_phi) const;

    GeoPoint origin_;
    double lam0_, e_, e2_, qp_, rq_, beta0_, sb0_, cb0_, d_;
};

// Component-wise median; even counts average the two central order
// statistics. Throws std::invalid_argument on empty input.
PlanePoint medioid(const std::vector<PlanePoint>& points);

struct HullScale {
    double scale_m = 0.0; // sqrt of hull area
    double area_m2 = 0.0;
    bool degenerate = false; // fewer than 3 distinct points, or collinear
    size_t selected = 0;     // points kept by the f-fraction cut
};

// Physical scale of a point set: select the ceil(f*n) points nearest
// the medioid (ties broken by distance, x, y, input order), take the
// convex hull (monotone chain), and return the square root of its
// shoelace area. f in (0, 1].
HullScale hull_scale(const std::vector<PlanePoint>& points, double f);

// Monotone-chain convex hull, CCW, starting from the lexicographically
// smallest vertex; collinear boundary points are dropped.
std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> points);

// Shoelace area of a CCW simple polygon.
double polygon_area(const std::vector<PlanePoint>& ring);

inline double plane_distance(const PlanePoint& a, const PlanePoint& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace ipgeo::geo
