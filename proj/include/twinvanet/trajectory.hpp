#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twinvanet/geo.hpp"

namespace twinvanet {

// One raw GPS fix from the taxi fleet log.
struct TrajectoryRecord {
  std::string taxi_id;
  std::int64_t timestamp = 0;  // Unix seconds, UTC
  GeoPoint point;
  double speed_kmh = 0.0;
  double distance_m = 0.0;  // odometer delta since the previous fix
  double stay_s = 0.0;      // dwell time at this fix
};

// Maps CSV header names to record fields; override to ingest files with
// different column labels.
struct SchemaConfig {
  std::string taxi_id = "taxi_id";
  std::string timestamp = "timestamp";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string speed_kmh = "speed_kmh";
  std::string distance_m = "distance_m";
  std::string stay_s = "stay_s";
};

struct RowError {
  long line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<TrajectoryRecord> records;
  std::vector<RowError> errors;
  long rows_seen = 0;
};

struct ParseOptions {
  SchemaConfig schema;
  bool strict = false;  // strict: throw on the first malformed row
};

// Reads header + rows. Lenient mode skips malformed rows and reports them;
// strict mode throws std::runtime_error naming line and reason.
ParseResult parse_records(std::istream& in, const ParseOptions& opts = {});

// Serializes records back to CSV with the default schema header. Numeric
// fields use shortest round-trip formatting, so parse -> serialize -> parse
// is bit-identical.
std::string serialize_records(const std::vector<TrajectoryRecord>& records);

// Keeps records whose coordinates fall inside the closed box.
std::vector<TrajectoryRecord> filter_bbox(
    const std::vector<TrajectoryRecord>& records, const BoundingBox& box);

// Keeps records with from <= timestamp < to.
std::vector<TrajectoryRecord> filter_time_range(
    const std::vector<TrajectoryRecord>& records, std::int64_t from,
    std::int64_t to);

// Maximal run of one taxi's records with consecutive gaps <= the threshold.
struct Trip {
  std::string taxi_id;
  std::vector<TrajectoryRecord> records;  // sorted by strictly increasing time
};

struct GroupReport {
  std::vector<Trip> trips;
  long duplicate_timestamps_dropped = 0;
};

GroupReport group_trips(const std::vector<TrajectoryRecord>& records,
                        double gap_threshold_s = 1800.0);

// Outlier screening on per-trip aggregates (record count, total distance,
// mean speed) using the modified z-score 0.6745*(x - median)/MAD with the
// conventional 3.5 cutoff. MAD of zero means no measurable deviation and
// disables the test for that aggregate.
struct OutlierPolicy {
  double cutoff = 3.5;
  bool use_record_count = true;
  bool use_total_distance = true;
  bool use_mean_speed = true;
};

struct OutlierReport {
  std::vector<Trip> kept;
  long removed = 0;
};

OutlierReport remove_outlier_trips(const std::vector<Trip>& trips,
                                   const OutlierPolicy& policy = {});

// Per-trip aggregates, exposed for tests and diagnostics.
struct TripStats {
  double record_count = 0.0;
  double total_distance_m = 0.0;
  double mean_speed_kmh = 0.0;
};

TripStats trip_stats(const Trip& trip);

// Modified z-scores for one aggregate vector; MAD = 0 yields all zeros.
std::vector<double> modified_z_scores(const std::vector<double>& xs);

// Min-max scaling to [0, 1]; a constant vector maps to all zeros.
std::vector<double> min_max_normalize(const std::vector<double>& xs);

}  // namespace twinvanet
