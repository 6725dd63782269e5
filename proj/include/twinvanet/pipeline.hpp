#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twinvanet/features.hpp"
#include "twinvanet/geo.hpp"
#include "twinvanet/geocode.hpp"
#include "twinvanet/kmeans.hpp"
#include "twinvanet/poi.hpp"
#include "twinvanet/som.hpp"
#include "twinvanet/trajectory.hpp"

namespace twinvanet {

// Options for the record-extraction stage (parse, filter, trips, outliers).
struct IngestOptions {
  bool strict = false;
  bool use_bbox = true;
  BoundingBox bbox = default_bounding_box();
  std::optional<std::int64_t> time_from;  // inclusive, Unix seconds
  std::optional<std::int64_t> time_to;    // exclusive
  double trip_gap_s = 1800.0;
  OutlierPolicy outliers;
};

struct IngestResult {
  std::vector<TrajectoryRecord> records;  // kept trips, flattened in order
  long rows_seen = 0;
  long parsed = 0;
  long parse_errors = 0;
  long after_bbox = 0;
  long after_time = 0;
  long duplicate_timestamps_dropped = 0;
  long trips = 0;
  long trips_kept = 0;
  long outlier_trips_removed = 0;
};

IngestResult run_ingest(std::istream& in, const IngestOptions& opts);

struct ClusterOptions {
  int cell_resolution = 4;
  int k = 10;
  int max_iter = 300;
  double tol = 1e-6;
  int restarts = 10;
  std::uint64_t seed = 42;
  // SOM grid size follows k; lr0/sigma0/epochs are the trained defaults.
  SomOptions som;
};

struct ClusterResult {
  std::vector<LocationFeature> features;
  KMeansModel kmeans;
  std::vector<int> som_labels;
  std::vector<PoiCluster> pois;  // from the K-Means labeling, unannotated
};

ClusterResult run_cluster(const std::vector<TrajectoryRecord>& records,
                          const ClusterOptions& opts);

// Cells file: `cell_lat,cell_lon,label_kmeans,label_som,speed_norm,
// stay_norm,visits_norm`, one row per cell in feature order.
std::string render_cells(const std::vector<LocationFeature>& features,
                         const std::vector<int>& kmeans_labels,
                         const std::vector<int>& som_labels);

// POI table: `label,centroid_lat,centroid_lon,member_count,address`
// (address quoted). parse_poi_table reads the same shape back.
std::string render_poi_table(const std::vector<PoiCluster>& pois);
std::vector<PoiCluster> parse_poi_table(std::istream& in);

// JSON run manifest: tool version, seed, ordered per-stage counts, and
// FNV-1a fingerprints of the input and each output file's content.
struct ManifestEntry {
  std::string name;
  std::uint64_t content_hash = 0;
  long rows = 0;
};

std::string render_manifest(
    const std::vector<std::pair<std::string, long>>& stage_counts,
    const std::vector<ManifestEntry>& files, std::uint64_t seed);

}  // namespace twinvanet
