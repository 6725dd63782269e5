#include "twinvanet/pipeline.hpp"

#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "twinvanet/csv.hpp"
#include "twinvanet/kpi.hpp"
#include "twinvanet/version.hpp"

namespace twinvanet {

IngestResult run_ingest(std::istream& in, const IngestOptions& opts) {
  IngestResult result;
  ParseOptions parse_opts;
  parse_opts.strict = opts.strict;
  ParseResult parsed = parse_records(in, parse_opts);
  result.rows_seen = parsed.rows_seen;
  result.parsed = static_cast<long>(parsed.records.size());
  result.parse_errors = static_cast<long>(parsed.errors.size());

  std::vector<TrajectoryRecord> records = std::move(parsed.records);
  if (opts.use_bbox) records = filter_bbox(records, opts.bbox);
  result.after_bbox = static_cast<long>(records.size());
  if (opts.time_from || opts.time_to) {
    const std::int64_t from =
        opts.time_from.value_or(std::numeric_limits<std::int64_t>::min());
    const std::int64_t to =
        opts.time_to.value_or(std::numeric_limits<std::int64_t>::max());
    records = filter_time_range(records, from, to);
  }
  result.after_time = static_cast<long>(records.size());

  GroupReport grouped = group_trips(records, opts.trip_gap_s);
  result.duplicate_timestamps_dropped = grouped.duplicate_timestamps_dropped;
  result.trips = static_cast<long>(grouped.trips.size());

  OutlierReport screened = remove_outlier_trips(grouped.trips, opts.outliers);
  result.trips_kept = static_cast<long>(screened.kept.size());
  result.outlier_trips_removed = screened.removed;

  for (const Trip& trip : screened.kept) {
    result.records.insert(result.records.end(), trip.records.begin(),
                          trip.records.end());
  }
  return result;
}

ClusterResult run_cluster(const std::vector<TrajectoryRecord>& records,
                          const ClusterOptions& opts) {
  ClusterResult result;
  result.features = build_features(records, opts.cell_resolution);
  if (result.features.empty()) {
    throw std::runtime_error(
        "feature building produced no cells (no input records)");
  }
  const Eigen::MatrixXd points = feature_matrix(result.features);

  KMeansOptions km;
  km.k = opts.k;
  km.max_iter = opts.max_iter;
  km.tol = opts.tol;
  km.restarts = opts.restarts;
  km.seed = opts.seed;
  result.kmeans = kmeans_fit(points, km);

  SomOptions som = opts.som;
  som.nodes = opts.k;
  som.seed = opts.seed;
  const SomGrid grid = som_fit(points, som);
  result.som_labels = som_assign(grid, points);

  result.pois = compute_centroids(result.kmeans.assignments, result.features);
  return result;
}

std::string render_cells(const std::vector<LocationFeature>& features,
                         const std::vector<int>& kmeans_labels,
                         const std::vector<int>& som_labels) {
  if (features.size() != kmeans_labels.size() ||
      features.size() != som_labels.size()) {
    throw std::invalid_argument("cells rendering: label count mismatch");
  }
  std::string out =
      "cell_lat,cell_lon,label_kmeans,label_som,speed_norm,stay_norm,"
      "visits_norm\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    const LocationFeature& feat = features[i];
    out += csv::format_double(feat.cell.lat);
    out += ',';
    out += csv::format_double(feat.cell.lon);
    out += ',';
    out += std::to_string(kmeans_labels[i]);
    out += ',';
    out += std::to_string(som_labels[i]);
    out += ',';
    out += csv::format_double(feat.mean_speed_norm);
    out += ',';
    out += csv::format_double(feat.mean_stay_norm);
    out += ',';
    out += csv::format_double(feat.visits_norm);
    out += '\n';
  }
  return out;
}

std::string render_poi_table(const std::vector<PoiCluster>& pois) {
  std::string out = "label,centroid_lat,centroid_lon,member_count,address\n";
  for (const PoiCluster& poi : pois) {
    out += std::to_string(poi.label);
    out += ',';
    out += csv::format_double(poi.centroid_geo.lat);
    out += ',';
    out += csv::format_double(poi.centroid_geo.lon);
    out += ',';
    out += std::to_string(poi.member_count);
    out += ',';
    out += csv::quote(poi.address);
    out += '\n';
  }
  return out;
}

std::vector<PoiCluster> parse_poi_table(std::istream& in) {
  std::vector<PoiCluster> pois;
  std::string line;
  bool header_seen = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() < 5) {
      throw std::runtime_error("poi table line " + std::to_string(line_no) +
                               ": expected 5 fields");
    }
    PoiCluster poi;
    bool ok = true;
    bool all_ok = true;
    poi.label = static_cast<int>(csv::parse_int(fields[0], &ok));
    all_ok &= ok;
    poi.centroid_geo.lat = csv::parse_double(fields[1], &ok);
    all_ok &= ok;
    poi.centroid_geo.lon = csv::parse_double(fields[2], &ok);
    all_ok &= ok;
    poi.member_count = csv::parse_int(fields[3], &ok);
    all_ok &= ok;
    if (!all_ok) {
      throw std::runtime_error("poi table line " + std::to_string(line_no) +
                               ": bad numeric field");
    }
    poi.address = fields[4];
    pois.push_back(std::move(poi));
  }
  return pois;
}

std::string render_manifest(
    const std::vector<std::pair<std::string, long>>& stage_counts,
    const std::vector<ManifestEntry>& files, std::uint64_t seed) {
  nlohmann::ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = seed;
  nlohmann::ordered_json counts;
  for (const auto& [key, value] : stage_counts) counts[key] = value;
  manifest["stage_counts"] = std::move(counts);
  nlohmann::ordered_json file_list = nlohmann::ordered_json::array();
  for (const ManifestEntry& entry : files) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(entry.content_hash));
    nlohmann::ordered_json item;
    item["name"] = entry.name;
    item["fnv1a64"] = hex;
    item["rows"] = entry.rows;
    file_list.push_back(std::move(item));
  }
  manifest["files"] = std::move(file_list);
  return manifest.dump(2) + "\n";
}

}  // namespace twinvanet
