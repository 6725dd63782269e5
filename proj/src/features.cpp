#include "twinvanet/features.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace twinvanet {

namespace {

struct CellAccumulator {
  double speed_sum = 0.0;
  double stay_sum = 0.0;
  std::vector<GeoPoint> points;
};

}  // namespace

std::vector<LocationFeature> build_features(
    const std::vector<TrajectoryRecord>& records, int resolution) {
  if (resolution < 3 || resolution > 6) {
    throw std::invalid_argument("cell resolution must be in [3, 6], got " +
                                std::to_string(resolution));
  }
  double scale = 1.0;
  for (int i = 0; i < resolution; ++i) scale *= 10.0;

  // Ordered map keyed by the quantized pair keeps cell order deterministic.
  std::map<std::pair<std::int64_t, std::int64_t>, CellAccumulator> cells;
  for (const TrajectoryRecord& rec : records) {
    const std::int64_t lat_key = std::llround(rec.point.lat * scale);
    const std::int64_t lon_key = std::llround(rec.point.lon * scale);
    CellAccumulator& acc = cells[{lat_key, lon_key}];
    acc.speed_sum += rec.speed_kmh;
    acc.stay_sum += rec.stay_s;
    acc.points.push_back(rec.point);
  }

  std::vector<LocationFeature> features;
  features.reserve(cells.size());
  std::vector<double> speeds, stays, visits;
  speeds.reserve(cells.size());
  stays.reserve(cells.size());
  visits.reserve(cells.size());
  for (auto& [key, acc] : cells) {
    LocationFeature feat;
    feat.lat_key = key.first;
    feat.lon_key = key.second;
    feat.cell.lat = static_cast<double>(key.first) / scale;
    feat.cell.lon = static_cast<double>(key.second) / scale;
    feat.raw_visit_count = static_cast<long>(acc.points.size());
    const double count = static_cast<double>(acc.points.size());
    speeds.push_back(acc.speed_sum / count);
    stays.push_back(acc.stay_sum / count);
    visits.push_back(count);
    feat.member_points = std::move(acc.points);
    features.push_back(std::move(feat));
  }

  const std::vector<double> speed_norm = min_max_normalize(speeds);
  const std::vector<double> stay_norm = min_max_normalize(stays);
  const std::vector<double> visit_norm = min_max_normalize(visits);
  for (std::size_t i = 0; i < features.size(); ++i) {
    features[i].mean_speed_norm = speed_norm[i];
    features[i].mean_stay_norm = stay_norm[i];
    features[i].visits_norm = visit_norm[i];
  }
  return features;
}

Eigen::MatrixXd feature_matrix(const std::vector<LocationFeature>& features) {
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(features.size()), 3);
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    const LocationFeature& feat = features[static_cast<std::size_t>(i)];
    mat(i, 0) = feat.mean_speed_norm;
    mat(i, 1) = feat.mean_stay_norm;
    mat(i, 2) = feat.visits_norm;
  }
  return mat;
}

}  // namespace twinvanet
