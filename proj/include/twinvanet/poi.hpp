#pragma once

#include <string>
#include <vector>

#include "twinvanet/features.hpp"
#include "twinvanet/geo.hpp"

namespace twinvanet {

// One labeled cluster of cells with its geographic centroid.
struct PoiCluster {
  int label = 0;
  GeoPoint centroid_geo;  // unweighted mean of all member fixes
  long member_count = 0;  // raw fixes across the cluster's cells
  long cell_count = 0;
  double mean_speed_norm = 0.0;  // unweighted means over cells
  double mean_stay_norm = 0.0;
  double mean_visits_norm = 0.0;
  std::string address;  // empty until geocoded
};

// Aggregates cells by label. Clusters with no members are omitted; output
// is ordered by ascending label.
std::vector<PoiCluster> compute_centroids(
    const std::vector<int>& labels,
    const std::vector<LocationFeature>& features);

}  // namespace twinvanet
