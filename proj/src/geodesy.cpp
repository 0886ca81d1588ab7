#include "ipgeo/geodesy.hpp"

#include <algorithm>
#include <cmath>

namespace ipgeo::geo {

double vincenty_distance(const GeoPoint& pa, const GeoPoint& pb) {
    constexpr double a = kSemiMajorM;
    constexpr double f = kFlattening;
    constexpr double b = kSemiMinorM;
    constexpr int kMaxIter = 200;
    constexpr double kTol = 1e-12; // radians

    const double phi1 = deg2rad(pa.lat), phi2 = deg2rad(pb.lat);
    const double L = deg2rad(pb.lon - pa.lon);

    const double u1 = std::atan((1.0 - f) * std::tan(phi1));
    const double u2 = std::atan((1.0 - f) * std::tan(phi2));
    const double su1 = std::sin(u1), cu1 = std::cos(u1);
    const double su2 = std::sin(u2), cu2 = std::cos(u2);

    double lambda = L;
    double sin_sigma = 0.0, cos_sigma = 1.0, sigma = 0.0;
    double cos2_alpha = 1.0, cos_2sm = 1.0;

    for (int it = 0;; ++it) {
        const double sl = std::sin(lambda), cl = std::cos(lambda);
        const double t1 = cu2 * sl;
        const double t2 = cu1 * su2 - su1 * cu2 * cl;
        sin_sigma = std::sqrt(t1 * t1 + t2 * t2);
        cos_sigma = su1 * su2 + cu1 * cu2 * cl;
        if (sin_sigma == 0.0) return 0.0; // coincident points
        sigma = std::atan2(sin_sigma, cos_sigma);
        const double sin_alpha = cu1 * cu2 * sl / sin_sigma;
        cos2_alpha = 1.0 - sin_alpha * sin_alpha;
        cos_2sm = cos2_alpha != 0.0 ? cos_sigma - 2.0 * su1 * su2 / cos2_alpha : 0.0;
        const double c = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
        const double prev = lambda;
        lambda = L + (1.0 - c) * f * sin_alpha *
                         (sigma + c * sin_sigma *
                                      (cos_2sm + c * cos_sigma * (2.0 * cos_2sm * cos_2sm - 1.0)));
        if (std::abs(lambda - prev) < kTol) break;
        if (it >= kMaxIter) throw AntipodalError();
    }

    const double u_sq = cos2_alpha * (a * a - b * b) / (b * b);
    const double big_a =
        1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
    const double big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
    const double delta_sigma =
        big_b * sin_sigma *
        (cos_2sm + big_b / 4.0 *
                       (cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm) -
                        big_b / 6.0 * cos_2sm * (-3.0 + 4.0 * sin_sigma * sin_sigma) *
                            (-3.0 + 4.0 * cos_2sm * cos_2sm)));
    return b * big_a * (sigma - delta_sigma);
}

// ---------------------------------------------------------------------------
// Local equal-area projection

double LocalProjection::q_of_phi(double sin_phi) const {
    if (e_ == 0.0) return 2.0 * sin_phi;
    const double es = e_ * sin_phi;
    return (1.0 - e2_) *
           (sin_phi / (1.0 - es * es) - (0.5 / e_) * std::log((1.0 - es) / (1.0 + es)));
}

double LocalProjection::authalic_beta(double phi) const {
    double r = q_of_phi(std::sin(phi)) / qp_;
    r = std::clamp(r, -1.0, 1.0);
    return std::asin(r);
}

LocalProjection::LocalProjection(const GeoPoint& origin) : origin_(origin) {
    e2_ = kFlattening * (2.0 - kFlattening);
    e_ = std::sqrt(e2_);
    qp_ = q_of_phi(1.0);
    rq_ = kSemiMajorM * std::sqrt(qp_ / 2.0);
    lam0_ = deg2rad(origin.lon);
    const double phi0 = deg2rad(origin.lat);
    beta0_ = authalic_beta(phi0);
    sb0_ = std::sin(beta0_);
    cb0_ = std::cos(beta0_);
    const double m0 = std::cos(phi0) / std::sqrt(1.0 - e2_ * std::sin(phi0) * std::sin(phi0));
    d_ = kSemiMajorM * m0 / (rq_ * cb0_);
}

PlanePoint LocalProjection::forward(const GeoPoint& p) const {
    const double beta = authalic_beta(deg2rad(p.lat));
    double dl = deg2rad(p.lon) - lam0_;
    if (dl > kPi) dl -= 2.0 * kPi;
    if (dl < -kPi) dl += 2.0 * kPi;
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double denom = 1.0 + sb0_ * sb + cb0_ * cb * std::cos(dl);
    if (denom < 1e-12) throw std::domain_error("project: point is antipodal to origin");
    const double big_b = rq_ * std::sqrt(2.0 / denom);
    PlanePoint out{big_b * d_ * cb * std::sin(dl),
                   (big_b / d_) * (cb0_ * sb - sb0_ * cb * std::cos(dl))};
    if (std::sqrt(out.x * out.x + out.y * out.y) > kMaxRangeM)
        throw std::domain_error("project: point beyond 500 km of projection origin");
    return out;
}

GeoPoint LocalProjection::inverse(const PlanePoint& p) const {
    const double xd = p.x / d_;
    const double yd = p.y * d_;
    const double rho = std::sqrt(xd * xd + yd * yd);
    if (rho == 0.0) return origin_;
    const double ce = 2.0 * std::asin(std::clamp(rho / (2.0 * rq_), -1.0, 1.0));
    const double sce = std::sin(ce), cce = std::cos(ce);
    const double sb = std::clamp(cce * sb0_ + yd * sce * cb0_ / rho, -1.0, 1.0);
    const double q = qp_ * sb;
    const double lam =
        lam0_ + std::atan2(xd * sce, rho * cb0_ * cce - yd * sb0_ * sce);

    // invert the authalic latitude by Newton iteration on q(phi)
    double phi = std::asin(std::clamp(q / 2.0, -1.0, 1.0));
    for (int i = 0; i < 30; ++i) {
        const double sp = std::sin(phi), cp = std::cos(phi);
        if (std::abs(cp) < 1e-12) break; // at a pole
        const double es = e_ * sp;
        const double fval = q / (1.0 - e2_) - sp / (1.0 - es * es) +
                            (0.5 / e_) * std::log((1.0 - es) / (1.0 + es));
        const double step = (1.0 - es * es) * (1.0 - es * es) / (2.0 * cp) * fval;
        phi += step;
        if (std::abs(step) < 1e-14) break;
    }
    return GeoPoint{rad2deg(phi), rad2deg(lam)};
}

// ---------------------------------------------------------------------------
// Planar statistics

PlanePoint medioid(const std::vector<PlanePoint>& points) {
    if (points.empty()) throw std::invalid_argument("medioid: empty point set");
    std::vector<double> xs(points.size()), ys(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    auto axis_median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    return PlanePoint{axis_median(xs), axis_median(ys)};
}

std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const PlanePoint& a, const PlanePoint& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const size_t n = pts.size();
    if (n < 3) return pts;
    auto cross = [](const PlanePoint& o, const PlanePoint& a, const PlanePoint& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<PlanePoint> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) { // lower hull
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) { // upper hull
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1); // last point equals the first
    return h;
}

double polygon_area(const std::vector<PlanePoint>& ring) {
    double acc = 0.0;
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const PlanePoint& p = ring[i];
        const PlanePoint& q = ring[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(acc);
}

HullScale hull_scale(const std::vector<PlanePoint>& points, double f) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("hull_scale: f outside (0, 1]");
    if (points.empty()) return HullScale{0.0, 0.0, true, 0};

    const PlanePoint med = medioid(points);
    struct Keyed {
        double d2;
        double x, y;
        size_t idx;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        const double dx = points[i].x - med.x, dy = points[i].y - med.y;
        keyed.push_back({dx * dx + dy * dy, points[i].x, points[i].y, i});
    }
    // tie order: distance, then x, y, input position
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.idx < b.idx;
    });
    const size_t n = points.size();
    size_t m = size_t(std::ceil(f * double(n)));
    m = std::min(std::max<size_t>(m, 1), n);

    std::vector<PlanePoint> sel;
    sel.reserve(m);
    for (size_t i = 0; i < m; ++i) sel.push_back(PlanePoint{keyed[i].x, keyed[i].y});

    HullScale out;
    out.selected = m;
    auto hull = convex_hull(std::move(sel));
    if (hull.size() < 3) {
        out.degenerate = true;
        return out;
    }
    out.area_m2 = polygon_area(hull);
    out.scale_m = std::sqrt(out.area_m2);
    if (out.area_m2 == 0.0) out.degenerate = true;
    return out;
}

} // namespace ipgeo::geo
