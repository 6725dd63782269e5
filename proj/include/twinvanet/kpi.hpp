#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "twinvanet/sim.hpp"

namespace twinvanet {

// FNV-1a 64-bit over bytes; used for config and file fingerprints.
std::uint64_t fnv1a64(const std::string& bytes);

// Canonical key=value rendering of a scenario config, one line per field.
// Hashing this text yields the config fingerprint recorded in reports.
std::string canonical_config_text(const ScenarioConfig& config);

struct KpiRow {
  Deployment deployment = Deployment::Physical;
  LinkKind link = LinkKind::WiFi;
  long n_vehicles = 0;
  double mean_latency_s = 0.0;
  double p95_latency_s = 0.0;
  long generated = 0;
  long delivered = 0;
  long dropped = 0;
  double comp_speed_analytic = 0.0;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
};

struct KpiReport {
  std::vector<KpiRow> rows;  // series-major, n ascending within a series
  Provenance provenance;
};

struct SeriesSpec {
  Deployment deployment = Deployment::Physical;
  LinkKind link = LinkKind::WiFi;
};

struct SweepGrid {
  std::vector<SeriesSpec> series;
  std::vector<long> n_list;
  LinkParams wifi = wifi_link();  // link parameters used per kind
  LinkParams cellular = cellular_link();
};

// The six reported series over n in {40, 80, ..., 200, 240, 300}:
// physical (WiFi-only V2V), cloud over cellular, edge and hybrid over both
// links.
SweepGrid default_grid();

// run_scenario per grid cell plus the analytic computation speed column.
// A failing cell aborts with the cell named in the error.
KpiReport sweep(const SweepGrid& grid, const ScenarioConfig& base);

// Report CSV: `# key=value` provenance comments, then the header
// `deployment,link,n_vehicles,mean_latency_s,p95_latency_s,generated,
// delivered,dropped,comp_speed_analytic`. Doubles use shortest
// round-trip formatting so parse_report(render_report(r)) == r.
std::string render_report(const KpiReport& report);
KpiReport parse_report(std::istream& in);

enum class TableFormat { Csv, Markdown };

// Computation-speed table, columns `n,physical,cloud,edge_hybrid`, fixed
// 6-decimal values. Throws std::invalid_argument on an empty report or
// when a column's deployment is missing from it.
std::string emit_table(const KpiReport& report, TableFormat format);

// One `n,mean_latency_s` series per (deployment, link), sorted by n.
// Returns (file name, content) pairs named latency_<deployment>_<link>.csv.
std::vector<std::pair<std::string, std::string>> emit_latency_series(
    const KpiReport& report);

// Built-in reference assertions on the analytic speed model: the published
// per-column speeds at n in {40..200} to 6 significant figures, the
// edge/hybrid column within 4.5% relative, and the cloud/edge speed ratio
// at n = 80 inside [1.65, 1.75]. Returns failure descriptions; empty means
// all assertions hold.
std::vector<std::string> check_reference_values(
    const ScenarioConfig& config = {});

}  // namespace twinvanet
