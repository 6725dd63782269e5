#include "twinvanet/poi.hpp"

#include <map>
#include <stdexcept>

namespace twinvanet {

std::vector<PoiCluster> compute_centroids(
    const std::vector<int>& labels,
    const std::vector<LocationFeature>& features) {
  if (labels.size() != features.size()) {
    throw std::invalid_argument("labels and features differ in length");
  }
  struct Accumulator {
    double lat_sum = 0.0;
    double lon_sum = 0.0;
    long points = 0;
    long cells = 0;
    double speed_sum = 0.0;
    double stay_sum = 0.0;
    double visits_sum = 0.0;
  };
  std::map<int, Accumulator> by_label;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const LocationFeature& feat = features[i];
    Accumulator& acc = by_label[labels[i]];
    for (const GeoPoint& p : feat.member_points) {
      acc.lat_sum += p.lat;
      acc.lon_sum += p.lon;
      ++acc.points;
    }
    ++acc.cells;
    acc.speed_sum += feat.mean_speed_norm;
    acc.stay_sum += feat.mean_stay_norm;
    acc.visits_sum += feat.visits_norm;
  }
  std::vector<PoiCluster> clusters;
  clusters.reserve(by_label.size());
  for (const auto& [label, acc] : by_label) {
    if (acc.points == 0) continue;
    PoiCluster cluster;
    cluster.label = label;
    cluster.centroid_geo.lat = acc.lat_sum / static_cast<double>(acc.points);
    cluster.centroid_geo.lon = acc.lon_sum / static_cast<double>(acc.points);
    cluster.member_count = acc.points;
    cluster.cell_count = acc.cells;
    cluster.mean_speed_norm = acc.speed_sum / static_cast<double>(acc.cells);
    cluster.mean_stay_norm = acc.stay_sum / static_cast<double>(acc.cells);
    cluster.mean_visits_norm = acc.visits_sum / static_cast<double>(acc.cells);
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace twinvanet
