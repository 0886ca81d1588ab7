#pragma once

#include "ipgeo/geodesy.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipgeo::geo {

// One polygon with attributes; multiple rings follow the even-odd rule,
// so holes are just inner rings.
struct Polygon {
    std::string id;
    std::map<std::string, std::string> attrs;
    std::vector<std::vector<PlanePoint>> rings;

    double min_x = 0, min_y = 0, max_x = 0, max_y = 0; // bounding box

    std::optional<double> attr_double(const std::string& key) const;
};

// Tract-style attribute layer. Text format, one polygon per record:
//
//   polygon <id>
//     attr <key> <value...>
//     ring lat,lon lat,lon ...        (geographic; projected on load)
//     ring_xy x,y x,y ...             (already planar)
//
// Rings are validated on load: at least 3 vertices, closed (an explicit
// repeat of the first vertex is tolerated), no self-intersection.
class PolygonLayer {
public:
    // `projection` converts geographic rings to the planar frame; it may
    // be null when the file only carries ring_xy records.
    static PolygonLayer load(const std::string& path, const LocalProjection* projection);
    static PolygonLayer from_polygons(std::vector<Polygon> polys);

    // Even-odd containment; ordered by polygon id, so boundary points
    // and overlaps resolve to the id that sorts first. Returns the
    // polygon index or nullopt.
    std::optional<size_t> locate(const PlanePoint& p) const;

    const std::vector<Polygon>& polygons() const { return polys_; }

private:
    void finalize();
    std::vector<Polygon> polys_; // sorted by id
};

// Even-odd ray-cast containment for one polygon (all rings), boundary
// counts as inside.
bool polygon_contains(const Polygon& poly, const PlanePoint& p);

} // namespace ipgeo::geo
