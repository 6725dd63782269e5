#include "twinvanet/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>

#include "twinvanet/csv.hpp"
#include "twinvanet/version.hpp"

namespace twinvanet {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string canonical_config_text(const ScenarioConfig& c) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  put("deployment", to_string(c.deployment));
  put("link", to_string(c.link.kind));
  put("link.data_rate_bps", csv::format_double(c.link.data_rate_bps));
  put("link.channel_access_window_s",
      csv::format_double(c.link.channel_access_window_s));
  put("n_vehicles", std::to_string(c.n_vehicles));
  put("beacon_interval_s", csv::format_double(c.beacon_interval_s));
  put("message_size_bytes", std::to_string(c.message_size_bytes));
  put("crypto_time_s", csv::format_double(c.crypto_time_s));
  put("sim_duration_s", csv::format_double(c.sim_duration_s));
  put("drain_grace_s", csv::format_double(c.drain_grace_s));
  put("seed", std::to_string(c.seed));
  put("edge.per_message_processing_s",
      csv::format_double(c.edge.per_message_processing_s));
  put("edge.reaction_latency_s",
      csv::format_double(c.edge.reaction_latency_s));
  put("edge.capacity", std::to_string(c.edge.capacity));
  put("cloud.per_message_processing_s",
      csv::format_double(c.cloud.per_message_processing_s));
  put("cloud.reaction_latency_s",
      csv::format_double(c.cloud.reaction_latency_s));
  put("cloud.capacity", std::to_string(c.cloud.capacity));
  return out;
}

SweepGrid default_grid() {
  SweepGrid grid;
  grid.series = {
      {Deployment::Physical, LinkKind::WiFi},
      {Deployment::CloudTwin, LinkKind::Cellular},
      {Deployment::EdgeTwin, LinkKind::WiFi},
      {Deployment::EdgeTwin, LinkKind::Cellular},
      {Deployment::HybridTwin, LinkKind::WiFi},
      {Deployment::HybridTwin, LinkKind::Cellular},
  };
  grid.n_list = {40, 80, 120, 160, 200, 240, 300};
  return grid;
}

KpiReport sweep(const SweepGrid& grid, const ScenarioConfig& base) {
  if (grid.series.empty() || grid.n_list.empty()) {
    throw std::invalid_argument("sweep grid is empty");
  }
  KpiReport report;
  report.provenance.config_hash = fnv1a64(canonical_config_text(base));
  report.provenance.seed = base.seed;
  report.provenance.version = kVersion;
  for (const SeriesSpec& series : grid.series) {
    for (const long n : grid.n_list) {
      ScenarioConfig config = base;
      config.deployment = series.deployment;
      config.link =
          series.link == LinkKind::WiFi ? grid.wifi : grid.cellular;
      config.n_vehicles = n;
      try {
        const SimMetrics metrics = run_scenario(config);
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
            computation_speed(series.deployment, n, config);
        report.rows.push_back(row);
      } catch (const std::exception& e) {
        throw std::runtime_error(
            std::string("sweep cell deployment=") +
            to_string(series.deployment) + " link=" + to_string(series.link) +
            " n=" + std::to_string(n) + ": " + e.what());
      }
    }
  }
  return report;
}

std::string render_report(const KpiReport& report) {
  std::string out;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(report.provenance.config_hash));
  out += std::string("# config_hash=") + hash_hex + "\n";
  out += "# seed=" + std::to_string(report.provenance.seed) + "\n";
  out += "# version=" + report.provenance.version + "\n";
  out +=
      "deployment,link,n_vehicles,mean_latency_s,p95_latency_s,generated,"
      "delivered,dropped,comp_speed_analytic\n";
  for (const KpiRow& row : report.rows) {
    out += to_string(row.deployment);
    out += ',';
    out += to_string(row.link);
    out += ',';
    out += std::to_string(row.n_vehicles);
    out += ',';
    out += csv::format_double(row.mean_latency_s);
    out += ',';
    out += csv::format_double(row.p95_latency_s);
    out += ',';
    out += std::to_string(row.generated);
    out += ',';
    out += std::to_string(row.delivered);
    out += ',';
    out += std::to_string(row.dropped);
    out += ',';
    out += csv::format_double(row.comp_speed_analytic);
    out += '\n';
  }
  return out;
}

KpiReport parse_report(std::istream& in) {
  KpiReport report;
  std::string line;
  bool header_seen = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      const std::string value = line.substr(eq + 1);
      while (!key.empty() && key.front() == ' ') key.erase(key.begin());
      while (!key.empty() && key.back() == ' ') key.pop_back();
      if (key == "config_hash") {
        report.provenance.config_hash =
            std::stoull(value, nullptr, 16);
      } else if (key == "seed") {
        report.provenance.seed = std::stoull(value);
      } else if (key == "version") {
        report.provenance.version = value;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column order is fixed; skip the header row
      continue;
    }
    const std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() < 9) {
      throw std::runtime_error("report line " + std::to_string(line_no) +
                               ": expected 9 fields");
    }
    KpiRow row;
    const auto deployment = parse_deployment(fields[0]);
    const auto link = parse_link(fields[1]);
    if (!deployment || !link) {
      throw std::runtime_error("report line " + std::to_string(line_no) +
                               ": bad deployment or link");
    }
    row.deployment = *deployment;
    row.link = *link;
    bool ok = true;
    bool all_ok = true;
    row.n_vehicles = csv::parse_int(fields[2], &ok);
    all_ok &= ok;
    row.mean_latency_s = csv::parse_double(fields[3], &ok);
    all_ok &= ok;
    row.p95_latency_s = csv::parse_double(fields[4], &ok);
    all_ok &= ok;
    row.generated = csv::parse_int(fields[5], &ok);
    all_ok &= ok;
    row.delivered = csv::parse_int(fields[6], &ok);
    all_ok &= ok;
    row.dropped = csv::parse_int(fields[7], &ok);
    all_ok &= ok;
    row.comp_speed_analytic = csv::parse_double(fields[8], &ok);
    all_ok &= ok;
    if (!all_ok) {
      throw std::runtime_error("report line " + std::to_string(line_no) +
                               ": bad numeric field");
    }
    report.rows.push_back(row);
  }
  return report;
}

namespace {

struct SpeedColumns {
  double physical = 0.0;
  double cloud = 0.0;
  double edge_hybrid = 0.0;
  bool have_physical = false, have_cloud = false, have_edge = false;
};

std::map<long, SpeedColumns> speed_columns(const KpiReport& report) {
  std::map<long, SpeedColumns> by_n;
  for (const KpiRow& row : report.rows) {
    SpeedColumns& cols = by_n[row.n_vehicles];
    switch (row.deployment) {
      case Deployment::Physical:
        cols.physical = row.comp_speed_analytic;
        cols.have_physical = true;
        break;
      case Deployment::CloudTwin:
        cols.cloud = row.comp_speed_analytic;
        cols.have_cloud = true;
        break;
      case Deployment::EdgeTwin:
      case Deployment::HybridTwin:
        cols.edge_hybrid = row.comp_speed_analytic;
        cols.have_edge = true;
        break;
    }
  }
  return by_n;
}

}  // namespace

std::string emit_table(const KpiReport& report, TableFormat format) {
  if (report.rows.empty()) throw std::invalid_argument("empty sweep");
  const std::map<long, SpeedColumns> by_n = speed_columns(report);
  for (const auto& [n, cols] : by_n) {
    if (!cols.have_physical || !cols.have_cloud || !cols.have_edge) {
      throw std::invalid_argument(
          "speed table needs physical, cloud, and edge or hybrid rows at n=" +
          std::to_string(n));
    }
  }
  std::string out;
  if (format == TableFormat::Csv) {
    out += "n,physical,cloud,edge_hybrid\n";
    for (const auto& [n, cols] : by_n) {
      out += std::to_string(n) + ',' + csv::format_fixed(cols.physical, 6) +
             ',' + csv::format_fixed(cols.cloud, 6) + ',' +
             csv::format_fixed(cols.edge_hybrid, 6) + '\n';
    }
  } else {
    out += "| n | physical | cloud | edge_hybrid |\n";
    out += "| ---: | ---: | ---: | ---: |\n";
    for (const auto& [n, cols] : by_n) {
      out += "| " + std::to_string(n) + " | " +
             csv::format_fixed(cols.physical, 6) + " | " +
             csv::format_fixed(cols.cloud, 6) + " | " +
             csv::format_fixed(cols.edge_hybrid, 6) + " |\n";
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> emit_latency_series(
    const KpiReport& report) {
  std::map<std::pair<Deployment, LinkKind>, std::map<long, double>> series;
  for (const KpiRow& row : report.rows) {
    series[{row.deployment, row.link}][row.n_vehicles] = row.mean_latency_s;
  }
  std::vector<std::pair<std::string, std::string>> files;
  files.reserve(series.size());
  for (const auto& [key, points] : series) {
    std::string content = "n,mean_latency_s\n";
    for (const auto& [n, latency] : points) {
      content += std::to_string(n) + ',' + csv::format_double(latency) + '\n';
    }
    files.emplace_back(std::string("latency_") + to_string(key.first) + '_' +
                           to_string(key.second) + ".csv",
                       std::move(content));
  }
  return files;
}

namespace {

// Published computation-speed reference (messages/s) at n = 40..200.
constexpr long kRefN[] = {40, 80, 120, 160, 200};
constexpr double kRefPhysical[] = {11.210762, 5.605381166, 3.736920777,
                                   2.802690583, 2.242152466};
constexpr double kRefEdgeHybrid[] = {33.632287, 33.01, 32.2577, 33.632287,
                                     33.632287};

bool within_6_sig_figs(double value, double reference) {
  const double magnitude = std::floor(std::log10(std::abs(reference)));
  const double tolerance = 0.5 * std::pow(10.0, magnitude - 5.0);
  return std::abs(value - reference) <= tolerance;
}

}  // namespace

std::vector<std::string> check_reference_values(const ScenarioConfig& config) {
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < std::size(kRefN); ++i) {
    const long n = kRefN[i];
    const double physical =
        computation_speed(Deployment::Physical, n, config);
    if (!within_6_sig_figs(physical, kRefPhysical[i])) {
      failures.push_back("physical speed at n=" + std::to_string(n) + ": " +
                         csv::format_double(physical) + " vs reference " +
                         csv::format_double(kRefPhysical[i]));
    }
    const double cloud = computation_speed(Deployment::CloudTwin, n, config);
    if (!within_6_sig_figs(cloud, 10.0 * kRefPhysical[i])) {
      failures.push_back("cloud speed at n=" + std::to_string(n) + ": " +
                         csv::format_double(cloud) + " vs reference " +
                         csv::format_double(10.0 * kRefPhysical[i]));
    }
    const double edge = computation_speed(Deployment::EdgeTwin, n, config);
    const double rel =
        std::abs(edge - kRefEdgeHybrid[i]) / kRefEdgeHybrid[i];
    if (!(rel <= 0.045)) {
      failures.push_back("edge speed at n=" + std::to_string(n) + ": " +
                         csv::format_double(edge) + " not within 4.5% of " +
                         csv::format_double(kRefEdgeHybrid[i]));
    }
    const double hybrid =
        computation_speed(Deployment::HybridTwin, n, config);
    if (hybrid != edge) {
      failures.push_back("hybrid speed at n=" + std::to_string(n) +
                         " differs from edge: " + csv::format_double(hybrid) +
                         " vs " + csv::format_double(edge));
    }
  }
  const double ratio = computation_speed(Deployment::CloudTwin, 80, config) /
                       computation_speed(Deployment::EdgeTwin, 80, config);
  if (!(ratio >= 1.65 && ratio <= 1.75)) {
    failures.push_back("cloud/edge speed ratio at n=80 outside [1.65, 1.75]: " +
                       csv::format_double(ratio));
  }
  return failures;
}

}  // namespace twinvanet
