#include "ipgeo/polygon.hpp"

#include "ipgeo/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace ipgeo::geo {

std::optional<double> Polygon::attr_double(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end()) return std::nullopt;
    const std::string& s = it->second;
    double v;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

namespace {

bool on_segment(const PlanePoint& a, const PlanePoint& b, const PlanePoint& p) {
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
           p.y <= std::max(a.y, b.y);
}

// proper segment intersection (shared endpoints allowed)
bool segments_cross(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c,
                    const PlanePoint& d) {
    auto orient = [](const PlanePoint& p, const PlanePoint& q, const PlanePoint& r) {
        const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

void validate_ring(const std::vector<PlanePoint>& ring, const std::string& id) {
    if (ring.size() < 3) throw DataError("polygon '" + id + "': ring with fewer than 3 vertices");
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (they share a vertex)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                throw DataError("polygon '" + id + "': self-intersecting ring");
        }
    }
}

} // namespace

bool polygon_contains(const Polygon& poly, const PlanePoint& p) {
    if (p.x < poly.min_x || p.x > poly.max_x || p.y < poly.min_y || p.y > poly.max_y)
        return false;
    bool inside = false;
    for (const auto& ring : poly.rings) {
        const size_t n = ring.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const PlanePoint& a = ring[j];
            const PlanePoint& b = ring[i];
            if (on_segment(a, b, p)) return true; // boundary counts as inside
            if ((b.y > p.y) != (a.y > p.y)) {
                const double x_cross = (a.x - b.x) * (p.y - b.y) / (a.y - b.y) + b.x;
                if (p.x < x_cross) inside = !inside;
            }
        }
    }
    return inside;
}

void PolygonLayer::finalize() {
    for (auto& poly : polys_) {
        poly.min_x = poly.min_y = std::numeric_limits<double>::infinity();
        poly.max_x = poly.max_y = -std::numeric_limits<double>::infinity();
        for (const auto& ring : poly.rings) {
            validate_ring(ring, poly.id);
            for (const auto& v : ring) {
                poly.min_x = std::min(poly.min_x, v.x);
                poly.max_x = std::max(poly.max_x, v.x);
                poly.min_y = std::min(poly.min_y, v.y);
                poly.max_y = std::max(poly.max_y, v.y);
            }
        }
        if (poly.rings.empty()) throw DataError("polygon '" + poly.id + "': no rings");
    }
    std::sort(polys_.begin(), polys_.end(),
              [](const Polygon& a, const Polygon& b) { return a.id < b.id; });
}

PolygonLayer PolygonLayer::from_polygons(std::vector<Polygon> polys) {
    PolygonLayer layer;
    layer.polys_ = std::move(polys);
    layer.finalize();
    return layer;
}

PolygonLayer PolygonLayer::load(const std::string& path, const LocalProjection* projection) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open polygon layer: " + path);

    std::vector<Polygon> polys;
    std::string raw;
    size_t line_no = 0;
    auto err = [&](const std::string& what) {
        return DataError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto tokens = split(line, ' ');
        // collapse repeated spaces
        std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
        if (tokens[0] == "polygon") {
            if (tokens.size() != 2) throw err("polygon needs an id");
            polys.push_back(Polygon{});
            polys.back().id = tokens[1];
        } else if (tokens[0] == "attr") {
            if (polys.empty()) throw err("attr before any polygon");
            if (tokens.size() < 3) throw err("attr needs key and value");
            std::string value = tokens[2];
            for (size_t i = 3; i < tokens.size(); ++i) value += " " + tokens[i];
            polys.back().attrs[tokens[1]] = value;
        } else if (tokens[0] == "ring" || tokens[0] == "ring_xy") {
            if (polys.empty()) throw err("ring before any polygon");
            const bool planar = tokens[0] == "ring_xy";
            if (!planar && !projection) throw err("geographic ring without a projection");
            std::vector<PlanePoint> ring;
            for (size_t i = 1; i < tokens.size(); ++i) {
                auto parts = split(tokens[i], ',');
                if (parts.size() != 2) throw err("ring vertex must be two comma-separated numbers");
                double u, v;
                auto to_d = [](const std::string& s, double& out) {
                    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
                    return r.ec == std::errc() && r.ptr == s.data() + s.size();
                };
                if (!to_d(parts[0], u) || !to_d(parts[1], v)) throw err("bad ring coordinate");
                if (planar)
                    ring.push_back(PlanePoint{u, v});
                else
                    ring.push_back(projection->forward(GeoPoint{u, v}));
            }
            if (ring.size() >= 2 && ring.front().x == ring.back().x &&
                ring.front().y == ring.back().y)
                ring.pop_back(); // explicit closure tolerated
            polys.back().rings.push_back(std::move(ring));
        } else {
            throw err("unknown directive '" + tokens[0] + "'");
        }
    }
    return from_polygons(std::move(polys));
}

std::optional<size_t> PolygonLayer::locate(const PlanePoint& p) const {
    for (size_t i = 0; i < polys_.size(); ++i)
        if (polygon_contains(polys_[i], p)) return i;
    return std::nullopt;
}

} // namespace ipgeo::geo
