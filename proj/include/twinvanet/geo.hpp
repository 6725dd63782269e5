#pragma once

#include <cmath>

namespace twinvanet {

// WGS84 coordinate in decimal degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool valid() const {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
           lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
  }

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat == b.lat && a.lon == b.lon;
  }
};

// Axis-aligned box; membership is closed (boundary points are inside).
struct BoundingBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool valid() const {
    return min_lon <= max_lon && min_lat <= max_lat &&
           GeoPoint{min_lat, min_lon}.valid() &&
           GeoPoint{max_lat, max_lon}.valid();
  }

  bool contains(const GeoPoint& p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat &&
           p.lat <= max_lat;
  }
};

// Study-area default: the Bursa region box, ordered min_lon, min_lat,
// max_lon, max_lat.
inline BoundingBox default_bounding_box() {
  return BoundingBox{28.456847, 40.103140, 29.388351, 40.318912};
}

}  // namespace twinvanet
