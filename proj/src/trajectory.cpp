#include "twinvanet/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "twinvanet/csv.hpp"
#include "twinvanet/time_iso.hpp"

namespace twinvanet {

namespace {

// Column indices resolved from the header row; -1 = missing.
struct ColumnMap {
  int taxi_id = -1;
  int timestamp = -1;
  int lat = -1;
  int lon = -1;
  int speed_kmh = -1;
  int distance_m = -1;
  int stay_s = -1;
};

ColumnMap resolve_columns(const std::vector<std::string>& header,
                          const SchemaConfig& schema) {
  ColumnMap map;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string& name = header[static_cast<std::size_t>(i)];
    if (name == schema.taxi_id) map.taxi_id = i;
    else if (name == schema.timestamp) map.timestamp = i;
    else if (name == schema.lat) map.lat = i;
    else if (name == schema.lon) map.lon = i;
    else if (name == schema.speed_kmh) map.speed_kmh = i;
    else if (name == schema.distance_m) map.distance_m = i;
    else if (name == schema.stay_s) map.stay_s = i;
  }
  return map;
}

std::string missing_columns(const ColumnMap& map, const SchemaConfig& schema) {
  std::string missing;
  auto add = [&missing](const std::string& name) {
    if (!missing.empty()) missing += ", ";
    missing += name;
  };
  if (map.taxi_id < 0) add(schema.taxi_id);
  if (map.timestamp < 0) add(schema.timestamp);
  if (map.lat < 0) add(schema.lat);
  if (map.lon < 0) add(schema.lon);
  if (map.speed_kmh < 0) add(schema.speed_kmh);
  if (map.distance_m < 0) add(schema.distance_m);
  if (map.stay_s < 0) add(schema.stay_s);
  return missing;
}

// Accepts either an ISO-8601 UTC timestamp or raw Unix seconds.
bool parse_timestamp(const std::string& text, std::int64_t& out) {
  if (auto iso = parse_iso8601_utc(text)) {
    out = *iso;
    return true;
  }
  bool ok = false;
  std::int64_t v = csv::parse_int(text, &ok);
  if (ok) {
    out = v;
    return true;
  }
  return false;
}

}  // namespace

ParseResult parse_records(std::istream& in, const ParseOptions& opts) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    if (opts.strict) throw std::runtime_error("trajectory input is empty");
    return result;
  }
  const std::vector<std::string> header = csv::split_line(line);
  const ColumnMap columns = resolve_columns(header, opts.schema);
  const std::string missing = missing_columns(columns, opts.schema);
  if (!missing.empty()) {
    throw std::runtime_error("trajectory header missing columns: " + missing);
  }
  const std::size_t min_fields = static_cast<std::size_t>(
      std::max({columns.taxi_id, columns.timestamp, columns.lat, columns.lon,
                columns.speed_kmh, columns.distance_m, columns.stay_s}) +
      1);

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++result.rows_seen;
    const std::vector<std::string> fields = csv::split_line(line);
    std::string reason;
    TrajectoryRecord rec;
    if (fields.size() < min_fields) {
      reason = "expected at least " + std::to_string(min_fields) +
               " fields, got " + std::to_string(fields.size());
    } else {
      auto field = [&fields](int idx) -> const std::string& {
        return fields[static_cast<std::size_t>(idx)];
      };
      rec.taxi_id = field(columns.taxi_id);
      bool ok = true;
      if (rec.taxi_id.empty()) {
        reason = "empty taxi_id";
      } else if (!parse_timestamp(field(columns.timestamp), rec.timestamp)) {
        reason = "bad timestamp '" + field(columns.timestamp) + "'";
      } else {
        rec.point.lat = csv::parse_double(field(columns.lat), &ok);
        if (!ok) reason = "bad lat '" + field(columns.lat) + "'";
      }
      if (reason.empty()) {
        bool ok2 = true;
        rec.point.lon = csv::parse_double(field(columns.lon), &ok2);
        if (!ok2) reason = "bad lon '" + field(columns.lon) + "'";
      }
      if (reason.empty() && !rec.point.valid()) {
        reason = "coordinates out of range";
      }
      if (reason.empty()) {
        bool ok2 = true;
        rec.speed_kmh = csv::parse_double(field(columns.speed_kmh), &ok2);
        if (!ok2 || rec.speed_kmh < 0.0) {
          reason = "bad speed_kmh '" + field(columns.speed_kmh) + "'";
        }
      }
      if (reason.empty()) {
        bool ok2 = true;
        rec.distance_m = csv::parse_double(field(columns.distance_m), &ok2);
        if (!ok2 || rec.distance_m < 0.0) {
          reason = "bad distance_m '" + field(columns.distance_m) + "'";
        }
      }
      if (reason.empty()) {
        bool ok2 = true;
        rec.stay_s = csv::parse_double(field(columns.stay_s), &ok2);
        if (!ok2 || rec.stay_s < 0.0) {
          reason = "bad stay_s '" + field(columns.stay_s) + "'";
        }
      }
    }
    if (reason.empty()) {
      result.records.push_back(std::move(rec));
    } else if (opts.strict) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               reason);
    } else {
      result.errors.push_back({line_no, std::move(reason)});
    }
  }
  return result;
}

std::string serialize_records(const std::vector<TrajectoryRecord>& records) {
  const SchemaConfig schema;
  std::string out = schema.taxi_id + "," + schema.timestamp + "," +
                    schema.lat + "," + schema.lon + "," + schema.speed_kmh +
                    "," + schema.distance_m + "," + schema.stay_s + "\n";
  for (const TrajectoryRecord& rec : records) {
    out += csv::quote(rec.taxi_id);
    out += ',';
    out += format_iso8601_utc(rec.timestamp);
    out += ',';
    out += csv::format_double(rec.point.lat);
    out += ',';
    out += csv::format_double(rec.point.lon);
    out += ',';
    out += csv::format_double(rec.speed_kmh);
    out += ',';
    out += csv::format_double(rec.distance_m);
    out += ',';
    out += csv::format_double(rec.stay_s);
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryRecord> filter_bbox(
    const std::vector<TrajectoryRecord>& records, const BoundingBox& box) {
  std::vector<TrajectoryRecord> kept;
  kept.reserve(records.size());
  for (const TrajectoryRecord& rec : records) {
    if (box.contains(rec.point)) kept.push_back(rec);
  }
  return kept;
}

std::vector<TrajectoryRecord> filter_time_range(
    const std::vector<TrajectoryRecord>& records, std::int64_t from,
    std::int64_t to) {
  std::vector<TrajectoryRecord> kept;
  kept.reserve(records.size());
  for (const TrajectoryRecord& rec : records) {
    if (rec.timestamp >= from && rec.timestamp < to) kept.push_back(rec);
  }
  return kept;
}

GroupReport group_trips(const std::vector<TrajectoryRecord>& records,
                        double gap_threshold_s) {
  // Group by taxi, preserving first-seen taxi order for stable output.
  std::vector<std::string> taxi_order;
  std::unordered_map<std::string, std::vector<TrajectoryRecord>> by_taxi;
  for (const TrajectoryRecord& rec : records) {
    auto [it, inserted] = by_taxi.try_emplace(rec.taxi_id);
    if (inserted) taxi_order.push_back(rec.taxi_id);
    it->second.push_back(rec);
  }

  GroupReport report;
  for (const std::string& taxi : taxi_order) {
    std::vector<TrajectoryRecord>& recs = by_taxi[taxi];
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
    Trip current;
    current.taxi_id = taxi;
    for (const TrajectoryRecord& rec : recs) {
      if (!current.records.empty()) {
        const std::int64_t prev = current.records.back().timestamp;
        if (rec.timestamp == prev) {
          // Duplicate fix for the same second; keep the first.
          ++report.duplicate_timestamps_dropped;
          continue;
        }
        if (static_cast<double>(rec.timestamp - prev) > gap_threshold_s) {
          report.trips.push_back(std::move(current));
          current = Trip{};
          current.taxi_id = taxi;
        }
      }
      current.records.push_back(rec);
    }
    if (!current.records.empty()) report.trips.push_back(std::move(current));
  }
  return report;
}

TripStats trip_stats(const Trip& trip) {
  TripStats stats;
  stats.record_count = static_cast<double>(trip.records.size());
  double speed_sum = 0.0;
  for (const TrajectoryRecord& rec : trip.records) {
    stats.total_distance_m += rec.distance_m;
    speed_sum += rec.speed_kmh;
  }
  if (!trip.records.empty()) {
    stats.mean_speed_kmh = speed_sum / stats.record_count;
  }
  return stats;
}

std::vector<double> modified_z_scores(const std::vector<double>& xs) {
  std::vector<double> zs(xs.size(), 0.0);
  if (xs.empty()) return zs;
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = (n % 2 == 1)
                            ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::vector<double> devs(n);
  for (std::size_t i = 0; i < n; ++i) devs[i] = std::abs(xs[i] - median);
  std::vector<double> dev_sorted = devs;
  std::sort(dev_sorted.begin(), dev_sorted.end());
  const double mad = (n % 2 == 1)
                         ? dev_sorted[n / 2]
                         : 0.5 * (dev_sorted[n / 2 - 1] + dev_sorted[n / 2]);
  if (mad == 0.0) return zs;  // no measurable spread; test disabled
  for (std::size_t i = 0; i < n; ++i) {
    zs[i] = 0.6745 * (xs[i] - median) / mad;
  }
  return zs;
}

OutlierReport remove_outlier_trips(const std::vector<Trip>& trips,
                                   const OutlierPolicy& policy) {
  OutlierReport report;
  if (trips.empty()) return report;
  std::vector<double> counts, distances, speeds;
  counts.reserve(trips.size());
  distances.reserve(trips.size());
  speeds.reserve(trips.size());
  for (const Trip& trip : trips) {
    const TripStats stats = trip_stats(trip);
    counts.push_back(stats.record_count);
    distances.push_back(stats.total_distance_m);
    speeds.push_back(stats.mean_speed_kmh);
  }
  const std::vector<double> z_counts = modified_z_scores(counts);
  const std::vector<double> z_dist = modified_z_scores(distances);
  const std::vector<double> z_speed = modified_z_scores(speeds);
  for (std::size_t i = 0; i < trips.size(); ++i) {
    bool outlier = false;
    if (policy.use_record_count && std::abs(z_counts[i]) > policy.cutoff)
      outlier = true;
    if (policy.use_total_distance && std::abs(z_dist[i]) > policy.cutoff)
      outlier = true;
    if (policy.use_mean_speed && std::abs(z_speed[i]) > policy.cutoff)
      outlier = true;
    if (outlier) {
      ++report.removed;
    } else {
      report.kept.push_back(trips[i]);
    }
  }
  return report;
}

std::vector<double> min_max_normalize(const std::vector<double>& xs) {
  std::vector<double> out(xs.size(), 0.0);
  if (xs.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return out;  // constant input maps to zeros
  const double span = hi - lo;
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - lo) / span;
  return out;
}

}  // namespace twinvanet
