// Command-line front end: trajectory ingestion, POI clustering, reverse
// geocoding, beacon-traffic simulation, KPI sweeps, and report rendering.
//
// Exit codes: 0 success, 1 validation error, 2 runtime/IO error,
// 3 reference-value check failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twinvanet/config_file.hpp"
#include "twinvanet/csv.hpp"
#include "twinvanet/features.hpp"
#include "twinvanet/geo.hpp"
#include "twinvanet/geocode.hpp"
#include "twinvanet/kpi.hpp"
#include "twinvanet/logging.hpp"
#include "twinvanet/pipeline.hpp"
#include "twinvanet/sim.hpp"
#include "twinvanet/time_iso.hpp"
#include "twinvanet/version.hpp"

namespace {

using namespace twinvanet;

constexpr const char* kDefaultGeocodeUrl = "https://nominatim.openstreetmap.org";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Accepts YYYY-MM-DD (midnight UTC) or a full ISO-8601 UTC timestamp.
std::int64_t parse_time_flag(const std::string& text) {
  std::string full = text;
  if (full.size() == 10) full += "T00:00:00Z";
  const auto parsed = parse_iso8601_utc(full);
  if (!parsed) {
    throw std::invalid_argument(
        "bad time '" + text + "': expected YYYY-MM-DD or ISO-8601 UTC");
  }
  return *parsed;
}

BoundingBox parse_bbox_flag(const std::string& text) {
  const std::vector<std::string> parts = csv::split_line(text);
  if (parts.size() != 4) {
    throw std::invalid_argument(
        "bad bbox '" + text + "': expected min_lon,min_lat,max_lon,max_lat");
  }
  BoundingBox box;
  bool ok = true;
  bool all_ok = true;
  box.min_lon = csv::parse_double(parts[0], &ok);
  all_ok &= ok;
  box.min_lat = csv::parse_double(parts[1], &ok);
  all_ok &= ok;
  box.max_lon = csv::parse_double(parts[2], &ok);
  all_ok &= ok;
  box.max_lat = csv::parse_double(parts[3], &ok);
  all_ok &= ok;
  if (!all_ok || !box.valid()) {
    throw std::invalid_argument("bad bbox '" + text + "'");
  }
  return box;
}

ScenarioConfig scenario_from_file(const std::string& path) {
  const ConfigFile file = ConfigFile::load(path);
  ScenarioConfig c;
  const std::string deployment =
      file.get_string("scenario", "deployment", to_string(c.deployment));
  const auto parsed_deployment = parse_deployment(deployment);
  if (!parsed_deployment) {
    throw std::invalid_argument("config deployment '" + deployment +
                                "': expected physical|edge|cloud|hybrid");
  }
  c.deployment = *parsed_deployment;
  const std::string link = file.get_string("scenario", "link", "wifi");
  const auto parsed_link = parse_link(link);
  if (!parsed_link) {
    throw std::invalid_argument("config link '" + link +
                                "': expected wifi|cellular");
  }
  LinkParams wifi = wifi_link();
  wifi.data_rate_bps = file.get_double("wifi", "data_rate_bps", wifi.data_rate_bps);
  wifi.channel_access_window_s = file.get_double(
      "wifi", "channel_access_window_s", wifi.channel_access_window_s);
  LinkParams cellular = cellular_link();
  cellular.data_rate_bps =
      file.get_double("cellular", "data_rate_bps", cellular.data_rate_bps);
  cellular.channel_access_window_s =
      file.get_double("cellular", "channel_access_window_s",
                      cellular.channel_access_window_s);
  c.link = *parsed_link == LinkKind::WiFi ? wifi : cellular;
  c.n_vehicles = file.get_int("scenario", "n_vehicles", c.n_vehicles);
  c.beacon_interval_s =
      file.get_double("scenario", "beacon_interval_s", c.beacon_interval_s);
  c.message_size_bytes = file.get_int("scenario", "message_size_bytes",
                                      c.message_size_bytes);
  c.crypto_time_s = file.get_double("scenario", "crypto_time_s", c.crypto_time_s);
  c.sim_duration_s =
      file.get_double("scenario", "sim_duration_s", c.sim_duration_s);
  c.drain_grace_s = file.get_double("scenario", "drain_grace_s", c.drain_grace_s);
  c.seed = static_cast<std::uint64_t>(
      file.get_int("scenario", "seed", static_cast<long>(c.seed)));
  c.edge.per_message_processing_s =
      file.get_double("edge", "per_message_processing_s",
                      c.edge.per_message_processing_s);
  c.edge.reaction_latency_s =
      file.get_double("edge", "reaction_latency_s", c.edge.reaction_latency_s);
  c.edge.capacity = file.get_int("edge", "capacity", c.edge.capacity);
  c.cloud.per_message_processing_s =
      file.get_double("cloud", "per_message_processing_s",
                      c.cloud.per_message_processing_s);
  c.cloud.reaction_latency_s = file.get_double("cloud", "reaction_latency_s",
                                               c.cloud.reaction_latency_s);
  c.cloud.capacity = file.get_int("cloud", "capacity", c.cloud.capacity);
  return c;
}

struct ScenarioFlags {
  std::string config_path;
  std::string deployment;
  std::string link;
  long n = 0;
  double interval = 0.0;
  long size = 0;
  double crypto = 0.0;
  double duration = 0.0;
  double grace = 0.0;
  std::uint64_t seed = 0;
  CLI::Option* opt_deployment = nullptr;
  CLI::Option* opt_link = nullptr;
  CLI::Option* opt_n = nullptr;
  CLI::Option* opt_interval = nullptr;
  CLI::Option* opt_size = nullptr;
  CLI::Option* opt_crypto = nullptr;
  CLI::Option* opt_duration = nullptr;
  CLI::Option* opt_grace = nullptr;
  CLI::Option* opt_seed = nullptr;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Scenario config file (flags override file values)");
  flags.opt_deployment = cmd->add_option(
      "--deployment", flags.deployment, "physical|edge|cloud|hybrid");
  flags.opt_link = cmd->add_option("--link", flags.link, "wifi|cellular");
  flags.opt_n = cmd->add_option("--n", flags.n, "Vehicle count");
  flags.opt_interval =
      cmd->add_option("--interval", flags.interval, "Beacon interval (s)");
  flags.opt_size = cmd->add_option("--size", flags.size, "Message size (bytes)");
  flags.opt_crypto = cmd->add_option(
      "--crypto", flags.crypto, "Signature sign+verify time per message (s)");
  flags.opt_duration = cmd->add_option("--duration", flags.duration,
                                       "Beacon generation window (s)");
  flags.opt_grace = cmd->add_option(
      "--grace", flags.grace, "Extra drain time after the window (s)");
  flags.opt_seed = cmd->add_option("--seed", flags.seed, "Base RNG seed");
}

ScenarioConfig resolve_scenario(const ScenarioFlags& flags) {
  ScenarioConfig config;
  if (!flags.config_path.empty()) config = scenario_from_file(flags.config_path);
  if (flags.opt_deployment->count() > 0) {
    const auto parsed = parse_deployment(flags.deployment);
    if (!parsed) {
      throw std::invalid_argument("bad --deployment '" + flags.deployment +
                                  "': expected physical|edge|cloud|hybrid");
    }
    config.deployment = *parsed;
  }
  if (flags.opt_link->count() > 0) {
    const auto parsed = parse_link(flags.link);
    if (!parsed) {
      throw std::invalid_argument("bad --link '" + flags.link +
                                  "': expected wifi|cellular");
    }
    config.link = *parsed == LinkKind::WiFi ? wifi_link() : cellular_link();
  }
  if (flags.opt_n->count() > 0) config.n_vehicles = flags.n;
  if (flags.opt_interval->count() > 0) config.beacon_interval_s = flags.interval;
  if (flags.opt_size->count() > 0) config.message_size_bytes = flags.size;
  if (flags.opt_crypto->count() > 0) config.crypto_time_s = flags.crypto;
  if (flags.opt_duration->count() > 0) config.sim_duration_s = flags.duration;
  if (flags.opt_grace->count() > 0) config.drain_grace_s = flags.grace;
  if (flags.opt_seed->count() > 0) config.seed = flags.seed;
  return config;
}

long count_lines(const std::string& content) {
  long lines = 0;
  for (const char c : content) {
    if (c == '\n') ++lines;
  }
  return lines;
}

// ---- subcommand runners ----

struct IngestArgs {
  std::string in_path;
  std::string out_path;
  bool strict = false;
  bool no_bbox = false;
  std::string bbox_text;
  std::string date_from;
  std::string date_to;
  double trip_gap = 1800.0;
  double outlier_cutoff = 3.5;
  bool keep_outliers = false;
};

IngestResult ingest_from_args(const IngestArgs& args,
                              std::vector<RowError>* errors_out) {
  IngestOptions opts;
  opts.strict = args.strict;
  opts.use_bbox = !args.no_bbox;
  if (!args.bbox_text.empty()) opts.bbox = parse_bbox_flag(args.bbox_text);
  if (!args.date_from.empty()) opts.time_from = parse_time_flag(args.date_from);
  if (!args.date_to.empty()) opts.time_to = parse_time_flag(args.date_to);
  opts.trip_gap_s = args.trip_gap;
  opts.outliers.cutoff = args.outlier_cutoff;
  if (args.keep_outliers) {
    opts.outliers.use_record_count = false;
    opts.outliers.use_total_distance = false;
    opts.outliers.use_mean_speed = false;
  }
  std::ifstream in(args.in_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + args.in_path);
  (void)errors_out;
  return run_ingest(in, opts);
}

int run_ingest_cmd(const IngestArgs& args) {
  const IngestResult result = ingest_from_args(args, nullptr);
  write_file(args.out_path, serialize_records(result.records));
  log::info("ingest done",
            {{"rows", std::to_string(result.rows_seen)},
             {"parsed", std::to_string(result.parsed)},
             {"parse_errors", std::to_string(result.parse_errors)},
             {"after_bbox", std::to_string(result.after_bbox)},
             {"after_time", std::to_string(result.after_time)},
             {"trips", std::to_string(result.trips)},
             {"trips_kept", std::to_string(result.trips_kept)},
             {"records_out", std::to_string(result.records.size())}});
  return 0;
}

struct ClusterArgs {
  std::string in_path;
  std::string out_path;
  std::string pois_path;
  int k = 10;
  int resolution = 4;
  std::uint64_t seed = 42;
  int restarts = 10;
  int max_iter = 300;
  double tol = 1e-6;
};

int run_cluster_cmd(const ClusterArgs& args) {
  std::ifstream in(args.in_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + args.in_path);
  const ParseResult parsed = parse_records(in);
  ClusterOptions opts;
  opts.cell_resolution = args.resolution;
  opts.k = args.k;
  opts.seed = args.seed;
  opts.restarts = args.restarts;
  opts.max_iter = args.max_iter;
  opts.tol = args.tol;
  const ClusterResult result = run_cluster(parsed.records, opts);
  write_file(args.out_path,
             render_cells(result.features, result.kmeans.assignments,
                          result.som_labels));
  if (!args.pois_path.empty()) {
    write_file(args.pois_path, render_poi_table(result.pois));
  }
  log::info("cluster done",
            {{"cells", std::to_string(result.features.size())},
             {"k", std::to_string(args.k)},
             {"inertia", csv::format_double(result.kmeans.inertia)},
             {"iterations", std::to_string(result.kmeans.iterations_run)},
             {"pois", std::to_string(result.pois.size())}});
  return 0;
}

struct GeocodeArgs {
  std::string in_path;
  std::string out_path;
  std::string cache_path;
  std::string stub_path;
  std::string url;
  std::string user_agent;
  bool offline = false;
  int zoom = 18;
  double spacing = 1.0;
};

int run_geocode_cmd(const GeocodeArgs& args) {
  std::ifstream in(args.in_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + args.in_path);
  std::vector<PoiCluster> pois = parse_poi_table(in);

  StubProvider stub;
  std::unique_ptr<HttpProvider> http;
  GeocodeProvider* provider = nullptr;
  if (args.offline) {
    if (!args.stub_path.empty()) stub = StubProvider::from_file(args.stub_path);
    provider = &stub;
  } else {
    HttpProviderOptions opts;
    opts.base_url = args.url;
    if (opts.base_url.empty()) {
      const char* env = std::getenv("TWINVANET_GEOCODE_URL");
      opts.base_url = env != nullptr ? env : kDefaultGeocodeUrl;
    }
    if (args.user_agent.empty()) {
      throw std::invalid_argument(
          "--user-agent is required for live geocoding (or use --offline)");
    }
    opts.user_agent = args.user_agent;
    opts.zoom = args.zoom;
    http = std::make_unique<HttpProvider>(opts);
    provider = http.get();
  }

  SystemClock clock;
  GeocodeClientOptions client_opts;
  client_opts.cache_path = args.cache_path;
  client_opts.min_request_spacing_s = args.spacing;
  GeocodeClient client(*provider, clock, client_opts);
  const AnnotateReport report = annotate_pois(pois, client);
  write_file(args.out_path, render_poi_table(pois));
  for (const std::string& failure : report.failures) {
    log::warn("unresolved poi", {{"detail", failure}});
  }
  log::info("geocode done",
            {{"resolved", std::to_string(report.resolved)},
             {"unresolved", std::to_string(report.unresolved)},
             {"provider_calls", std::to_string(client.provider_calls())}});
  return 0;
}

int run_simulate_cmd(const ScenarioFlags& flags, const std::string& out_path,
                     bool dump_config) {
  const ScenarioConfig config = resolve_scenario(flags);
  if (dump_config) {
    std::cout << canonical_config_text(config);
    return 0;
  }
  validate(config);
  const SimMetrics metrics = run_scenario(config);
  KpiReport report;
  report.provenance.config_hash = fnv1a64(canonical_config_text(config));
  report.provenance.seed = config.seed;
  report.provenance.version = kVersion;
  KpiRow row;
  row.deployment = metrics.deployment;
  row.link = metrics.link;
  row.n_vehicles = metrics.n_vehicles;
  row.mean_latency_s = metrics.mean_latency_s;
  row.p95_latency_s = metrics.p95_latency_s;
  row.generated = metrics.generated;
  row.delivered = metrics.delivered;
  row.dropped = metrics.dropped;
  row.comp_speed_analytic =
      computation_speed(config.deployment, config.n_vehicles, config);
  report.rows.push_back(row);
  const std::string rendered = render_report(report);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_file(out_path, rendered);
  }
  log::info("simulate done",
            {{"deployment", to_string(config.deployment)},
             {"link", to_string(metrics.link)},
             {"n", std::to_string(config.n_vehicles)},
             {"mean_latency_s", csv::format_double(metrics.mean_latency_s)},
             {"delivered", std::to_string(metrics.delivered)}});
  return 0;
}

std::vector<long> parse_n_list(const std::string& text) {
  std::vector<long> values;
  for (const std::string& part : csv::split_line(text)) {
    bool ok = true;
    const long v = csv::parse_int(part, &ok);
    if (!ok || v < 1) {
      throw std::invalid_argument("bad --n-list entry '" + part + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("--n-list is empty");
  return values;
}

std::vector<SeriesSpec> parse_series(const std::string& text) {
  std::vector<SeriesSpec> series;
  for (const std::string& part : csv::split_line(text)) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("bad --series entry '" + part +
                                  "': expected deployment:link");
    }
    const auto deployment = parse_deployment(part.substr(0, colon));
    const auto link = parse_link(part.substr(colon + 1));
    if (!deployment || !link) {
      throw std::invalid_argument("bad --series entry '" + part + "'");
    }
    series.push_back({*deployment, *link});
  }
  if (series.empty()) throw std::invalid_argument("--series is empty");
  return series;
}

int run_sweep_cmd(const ScenarioFlags& flags, const std::string& out_path,
                  const std::string& n_list_text,
                  const std::string& series_text, bool check_reference,
                  bool dump_config) {
  const ScenarioConfig base = resolve_scenario(flags);
  if (dump_config) {
    std::cout << canonical_config_text(base);
    return 0;
  }
  if (check_reference) {
    const std::vector<std::string> failures = check_reference_values(base);
    if (!failures.empty()) {
      for (const std::string& failure : failures) {
        log::error("reference check failed", {{"detail", failure}});
      }
      return 3;
    }
    log::info("reference check passed", {});
    if (out_path.empty()) return 0;
  }
  SweepGrid grid = default_grid();
  if (!n_list_text.empty()) grid.n_list = parse_n_list(n_list_text);
  if (!series_text.empty()) grid.series = parse_series(series_text);
  const KpiReport report = sweep(grid, base);
  const std::string rendered = render_report(report);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_file(out_path, rendered);
  }
  log::info("sweep done", {{"rows", std::to_string(report.rows.size())},
                           {"out", out_path.empty() ? "-" : out_path}});
  return 0;
}

int run_report_cmd(const std::string& in_path, const std::string& table_path,
                   const std::string& format_text,
                   const std::string& latency_dir, bool check_reference) {
  if (check_reference) {
    const std::vector<std::string> failures = check_reference_values();
    if (!failures.empty()) {
      for (const std::string& failure : failures) {
        log::error("reference check failed", {{"detail", failure}});
      }
      return 3;
    }
    log::info("reference check passed", {});
  }
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + in_path);
  const KpiReport report = parse_report(in);
  TableFormat format = TableFormat::Csv;
  if (format_text == "markdown") {
    format = TableFormat::Markdown;
  } else if (format_text != "csv") {
    throw std::invalid_argument("bad --format '" + format_text +
                                "': expected csv|markdown");
  }
  const std::string table = emit_table(report, format);
  if (table_path.empty()) {
    std::cout << table;
  } else {
    write_file(table_path, table);
  }
  if (!latency_dir.empty()) {
    std::filesystem::create_directories(latency_dir);
    for (const auto& [name, content] : emit_latency_series(report)) {
      write_file((std::filesystem::path(latency_dir) / name).string(),
                 content);
    }
  }
  return 0;
}

struct PipelineArgs {
  IngestArgs ingest;
  ClusterArgs cluster;
  GeocodeArgs geocode;
  std::string out_dir;
};

int run_pipeline_cmd(const PipelineArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path out_dir(args.out_dir);

  const IngestResult ingested = ingest_from_args(args.ingest, nullptr);
  const std::string records_csv = serialize_records(ingested.records);
  write_file((out_dir / "records.csv").string(), records_csv);

  ClusterOptions cluster_opts;
  cluster_opts.cell_resolution = args.cluster.resolution;
  cluster_opts.k = args.cluster.k;
  cluster_opts.seed = args.cluster.seed;
  cluster_opts.restarts = args.cluster.restarts;
  cluster_opts.max_iter = args.cluster.max_iter;
  cluster_opts.tol = args.cluster.tol;
  ClusterResult clustered;
  try {
    clustered = run_cluster(ingested.records, cluster_opts);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("cluster stage: ") + e.what());
  }
  const std::string cells_csv =
      render_cells(clustered.features, clustered.kmeans.assignments,
                   clustered.som_labels);
  write_file((out_dir / "cells.csv").string(), cells_csv);

  StubProvider stub;
  std::unique_ptr<HttpProvider> http;
  GeocodeProvider* provider = nullptr;
  if (args.geocode.offline) {
    if (!args.geocode.stub_path.empty()) {
      stub = StubProvider::from_file(args.geocode.stub_path);
    }
    provider = &stub;
  } else {
    HttpProviderOptions opts;
    opts.base_url = args.geocode.url;
    if (opts.base_url.empty()) {
      const char* env = std::getenv("TWINVANET_GEOCODE_URL");
      opts.base_url = env != nullptr ? env : kDefaultGeocodeUrl;
    }
    if (args.geocode.user_agent.empty()) {
      throw std::invalid_argument(
          "--user-agent is required for live geocoding (or use --offline)");
    }
    opts.user_agent = args.geocode.user_agent;
    opts.zoom = args.geocode.zoom;
    http = std::make_unique<HttpProvider>(opts);
    provider = http.get();
  }
  SystemClock clock;
  GeocodeClientOptions client_opts;
  client_opts.cache_path = args.geocode.cache_path;
  client_opts.min_request_spacing_s = args.geocode.spacing;
  GeocodeClient client(*provider, clock, client_opts);
  const AnnotateReport annotated = annotate_pois(clustered.pois, client);
  const std::string pois_csv = render_poi_table(clustered.pois);
  write_file((out_dir / "pois.csv").string(), pois_csv);

  const std::vector<std::pair<std::string, long>> counts = {
      {"rows_seen", ingested.rows_seen},
      {"parsed", ingested.parsed},
      {"parse_errors", ingested.parse_errors},
      {"after_bbox", ingested.after_bbox},
      {"after_time", ingested.after_time},
      {"duplicate_timestamps_dropped", ingested.duplicate_timestamps_dropped},
      {"trips", ingested.trips},
      {"trips_kept", ingested.trips_kept},
      {"outlier_trips_removed", ingested.outlier_trips_removed},
      {"records", static_cast<long>(ingested.records.size())},
      {"cells", static_cast<long>(clustered.features.size())},
      {"pois", static_cast<long>(clustered.pois.size())},
      {"pois_resolved", annotated.resolved},
      {"pois_unresolved", annotated.unresolved},
  };
  const std::vector<ManifestEntry> files = {
      {"input:" + args.ingest.in_path, fnv1a64(read_file(args.ingest.in_path)),
       0},
      {"records.csv", fnv1a64(records_csv), count_lines(records_csv) - 1},
      {"cells.csv", fnv1a64(cells_csv), count_lines(cells_csv) - 1},
      {"pois.csv", fnv1a64(pois_csv), count_lines(pois_csv) - 1},
  };
  write_file((out_dir / "manifest.json").string(),
             render_manifest(counts, files, args.cluster.seed));
  log::info("pipeline done",
            {{"out_dir", args.out_dir},
             {"records", std::to_string(ingested.records.size())},
             {"cells", std::to_string(clustered.features.size())},
             {"pois", std::to_string(clustered.pois.size())}});
  return 0;
}

void add_ingest_flags(CLI::App* cmd, IngestArgs& args, bool require_io) {
  auto* in = cmd->add_option("--in", args.in_path, "Trajectory CSV input");
  if (require_io) in->required();
  cmd->add_flag("--strict", args.strict,
                "Fail on the first malformed row instead of skipping");
  cmd->add_flag("--no-bbox", args.no_bbox, "Disable the bounding-box filter");
  cmd->add_option("--bbox", args.bbox_text,
                  "Bounding box min_lon,min_lat,max_lon,max_lat");
  cmd->add_option("--date-from", args.date_from,
                  "Keep records at or after this UTC date/time");
  cmd->add_option("--date-to", args.date_to,
                  "Keep records before this UTC date/time");
  cmd->add_option("--trip-gap", args.trip_gap,
                  "Seconds of silence that split a trip");
  cmd->add_option("--outlier-cutoff", args.outlier_cutoff,
                  "Modified z-score cutoff for trip screening");
  cmd->add_flag("--keep-outliers", args.keep_outliers,
                "Skip outlier-trip removal");
}

void add_cluster_flags(CLI::App* cmd, ClusterArgs& args, bool require_io) {
  if (require_io) {
    cmd->add_option("--in", args.in_path, "Cleaned records CSV")->required();
    cmd->add_option("--out", args.out_path, "Cells CSV output")->required();
    cmd->add_option("--pois", args.pois_path, "POI table output (optional)");
  }
  cmd->add_option("--k", args.k, "Cluster count");
  cmd->add_option("--resolution", args.resolution,
                  "Cell coordinate decimal places (3-6)");
  cmd->add_option("--seed", args.seed, "Clustering RNG seed");
  cmd->add_option("--restarts", args.restarts, "Independent fit restarts");
  cmd->add_option("--max-iter", args.max_iter, "Iteration cap per fit");
  cmd->add_option("--tol", args.tol, "Centroid-shift stop threshold");
}

void add_geocode_flags(CLI::App* cmd, GeocodeArgs& args, bool require_io) {
  if (require_io) {
    cmd->add_option("--in", args.in_path, "POI table input")->required();
    cmd->add_option("--out", args.out_path, "Annotated POI table output")
        ->required();
  }
  cmd->add_option("--cache", args.cache_path, "Append-only address cache file");
  cmd->add_flag("--offline", args.offline,
                "No network use; resolve from the stub file and cache only");
  cmd->add_option("--stub", args.stub_path,
                  "Stub provider file (lat,lon,display_name lines)");
  cmd->add_option("--url", args.url,
                  "Reverse-geocoding base URL (or TWINVANET_GEOCODE_URL)");
  cmd->add_option("--user-agent", args.user_agent,
                  "User-Agent header, required for live use");
  cmd->add_option("--zoom", args.zoom, "Reverse-geocoding zoom level");
  cmd->add_option("--spacing", args.spacing,
                  "Minimum seconds between live requests");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Crowded-POI extraction from vehicle GPS traces and deterministic "
      "V2X beacon-traffic simulation under physical, edge, cloud, and "
      "hybrid deployments"};
  app.set_version_flag("--version", twinvanet::kVersion);
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Log debug detail");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Log warnings and errors only");

  IngestArgs ingest_args;
  CLI::App* ingest_cmd = app.add_subcommand(
      "ingest", "Parse, filter, and clean raw trajectory CSV");
  add_ingest_flags(ingest_cmd, ingest_args, true);
  ingest_cmd->add_option("--out", ingest_args.out_path, "Cleaned records CSV")
      ->required();

  ClusterArgs cluster_args;
  CLI::App* cluster_cmd = app.add_subcommand(
      "cluster", "Build cell features and label them with both clusterers");
  add_cluster_flags(cluster_cmd, cluster_args, true);

  GeocodeArgs geocode_args;
  CLI::App* geocode_cmd = app.add_subcommand(
      "geocode", "Resolve POI centroids to human-readable addresses");
  add_geocode_flags(geocode_cmd, geocode_args, true);

  ScenarioFlags simulate_flags;
  std::string simulate_out;
  bool simulate_dump = false;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run one beacon-traffic scenario and emit its metrics row");
  add_scenario_flags(simulate_cmd, simulate_flags);
  simulate_cmd->add_option("--out", simulate_out,
                           "Metrics CSV path (default: stdout)");
  simulate_cmd->add_flag("--dump-config", simulate_dump,
                         "Print the resolved config and exit");

  ScenarioFlags sweep_flags;
  std::string sweep_out;
  std::string sweep_n_list;
  std::string sweep_series;
  bool sweep_check = false;
  bool sweep_dump = false;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run the deployment/link/vehicle-count grid");
  add_scenario_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--out", sweep_out, "Report CSV path (default: stdout)");
  sweep_cmd->add_option("--n-list", sweep_n_list,
                        "Comma-separated vehicle counts");
  sweep_cmd->add_option("--series", sweep_series,
                        "Comma-separated deployment:link pairs");
  sweep_cmd->add_flag("--check-paper", sweep_check,
                      "Check the built-in published reference values; "
                      "exit 3 on mismatch");
  sweep_cmd->add_flag("--dump-config", sweep_dump,
                      "Print the resolved config and exit");

  std::string report_in;
  std::string report_table;
  std::string report_format = "csv";
  std::string report_latency_dir;
  bool report_check = false;
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Render speed tables and latency series from a sweep report");
  report_cmd->add_option("--in", report_in, "Report CSV input")->required();
  report_cmd->add_option("--speed-table", report_table,
                         "Speed table output (default: stdout)");
  report_cmd->add_option("--format", report_format, "csv|markdown");
  report_cmd->add_option("--latency-dir", report_latency_dir,
                         "Directory for per-series latency CSV files");
  report_cmd->add_flag("--check-paper", report_check,
                       "Check the built-in published reference values; "
                       "exit 3 on mismatch");

  PipelineArgs pipeline_args;
  bool pipeline_live = false;
  CLI::App* pipeline_cmd = app.add_subcommand(
      "pipeline",
      "Ingest, cluster, and geocode in one run, with a run manifest");
  add_ingest_flags(pipeline_cmd, pipeline_args.ingest, true);
  add_cluster_flags(pipeline_cmd, pipeline_args.cluster, false);
  add_geocode_flags(pipeline_cmd, pipeline_args.geocode, false);
  pipeline_cmd->add_option("--out-dir", pipeline_args.out_dir,
                           "Output directory")->required();
  pipeline_cmd->add_flag(
      "--live", pipeline_live,
      "Use the live geocoding endpoint instead of the offline stub");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (quiet) {
    twinvanet::log::threshold() = twinvanet::log::Level::Warn;
  } else if (verbosity > 0) {
    twinvanet::log::threshold() = twinvanet::log::Level::Debug;
  }

  try {
    if (app.got_subcommand(ingest_cmd)) return run_ingest_cmd(ingest_args);
    if (app.got_subcommand(cluster_cmd)) return run_cluster_cmd(cluster_args);
    if (app.got_subcommand(geocode_cmd)) return run_geocode_cmd(geocode_args);
    if (app.got_subcommand(simulate_cmd)) {
      return run_simulate_cmd(simulate_flags, simulate_out, simulate_dump);
    }
    if (app.got_subcommand(sweep_cmd)) {
      return run_sweep_cmd(sweep_flags, sweep_out, sweep_n_list, sweep_series,
                           sweep_check, sweep_dump);
    }
    if (app.got_subcommand(report_cmd)) {
      return run_report_cmd(report_in, report_table, report_format,
                            report_latency_dir, report_check);
    }
    if (app.got_subcommand(pipeline_cmd)) {
      pipeline_args.geocode.offline = !pipeline_live;
      return run_pipeline_cmd(pipeline_args);
    }
  } catch (const std::invalid_argument& e) {
    twinvanet::log::error(e.what(), {});
    return 1;
  } catch (const std::exception& e) {
    twinvanet::log::error(e.what(), {});
    return 2;
  }
  return 1;
}
