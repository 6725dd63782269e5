#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "twinvanet/geo.hpp"
#include "twinvanet/trajectory.hpp"

namespace twinvanet {

// One quantized grid cell with its aggregate features. The three *_norm
// fields are min-max scaled across all cells of the same build.
struct LocationFeature {
  std::int64_t lat_key = 0;  // llround(lat * 10^resolution)
  std::int64_t lon_key = 0;
  GeoPoint cell;  // quantized center: key / 10^resolution
  double mean_speed_norm = 0.0;
  double mean_stay_norm = 0.0;
  double visits_norm = 0.0;
  long raw_visit_count = 0;
  std::vector<GeoPoint> member_points;  // raw fixes that fell in this cell
};

// Groups records into cells of `resolution` coordinate decimal places
// (valid range [3, 6]; 4 is roughly an 11 m grid) and aggregates visit
// count, mean speed, and mean stay per cell. Cells are ordered by
// (lat_key, lon_key) so output is deterministic.
std::vector<LocationFeature> build_features(
    const std::vector<TrajectoryRecord>& records, int resolution = 4);

// n x 3 matrix of (mean_speed_norm, mean_stay_norm, visits_norm) rows,
// ready for the clustering routines.
Eigen::MatrixXd feature_matrix(const std::vector<LocationFeature>& features);

}  // namespace twinvanet
