#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "twinvanet/kpi.hpp"
#include "twinvanet/sim.hpp"

using namespace twinvanet;

namespace {

bool rows_equal(const KpiRow& a, const KpiRow& b) {
  return a.deployment == b.deployment && a.link == b.link &&
         a.n_vehicles == b.n_vehicles &&
         a.mean_latency_s == b.mean_latency_s &&
         a.p95_latency_s == b.p95_latency_s && a.generated == b.generated &&
         a.delivered == b.delivered && a.dropped == b.dropped &&
         a.comp_speed_analytic == b.comp_speed_analytic;
}

bool reports_equal(const KpiReport& a, const KpiReport& b) {
  if (a.provenance.config_hash != b.provenance.config_hash) return false;
  if (a.provenance.seed != b.provenance.seed) return false;
  if (a.provenance.version != b.provenance.version) return false;
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (!rows_equal(a.rows[i], b.rows[i])) return false;
  }
  return true;
}

ScenarioConfig fast_base() {
  ScenarioConfig base;
  base.sim_duration_s = 1.0;  // keeps multi-cell sweeps quick
  return base;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("the canonical config text names every knob and drives the hash") {
  const ScenarioConfig base;
  const std::string text = canonical_config_text(base);
  CHECK(text.find("deployment=physical\n") != std::string::npos);
  CHECK(text.find("link=wifi\n") != std::string::npos);
  CHECK(text.find("n_vehicles=40\n") != std::string::npos);
  CHECK(text.find("crypto_time_s=0.00223\n") != std::string::npos);
  CHECK(text.find("sim_duration_s=12.1\n") != std::string::npos);
  CHECK(text.find("seed=42\n") != std::string::npos);
  CHECK(text.find("edge.capacity=40\n") != std::string::npos);

  for (auto mutate : std::vector<void (*)(ScenarioConfig&)>{
           [](ScenarioConfig& c) { c.n_vehicles = 41; },
           [](ScenarioConfig& c) { c.crypto_time_s = 0.003; },
           [](ScenarioConfig& c) { c.seed = 43; },
           [](ScenarioConfig& c) { c.deployment = Deployment::EdgeTwin; },
           [](ScenarioConfig& c) { c.link = cellular_link(); }}) {
    ScenarioConfig changed = base;
    mutate(changed);
    CHECK(fnv1a64(canonical_config_text(changed)) !=
          fnv1a64(canonical_config_text(base)));
  }
}

TEST_CASE("a sweep emits one row per grid cell in declaration order") {
  SweepGrid grid;
  grid.series = {{Deployment::Physical, LinkKind::WiFi},
                 {Deployment::CloudTwin, LinkKind::Cellular},
                 {Deployment::EdgeTwin, LinkKind::Cellular}};
  grid.n_list = {10, 20, 30, 40, 50};
  const auto report = sweep(grid, fast_base());
  REQUIRE(report.rows.size() == 15);
  std::size_t i = 0;
  for (const auto& series : grid.series) {
    for (const long n : grid.n_list) {
      CHECK(report.rows[i].deployment == series.deployment);
      CHECK(report.rows[i].n_vehicles == n);
      ++i;
    }
  }
  // Physical reports the channel it actually used.
  CHECK(report.rows[0].link == LinkKind::WiFi);
  CHECK(report.provenance.config_hash ==
        fnv1a64(canonical_config_text(fast_base())));
  CHECK(report.provenance.seed == 42);
  CHECK(!report.provenance.version.empty());
}

TEST_CASE("an empty grid and a failing cell are rejected with context") {
  CHECK_THROWS_WITH_AS(sweep(SweepGrid{}, fast_base()),
                       doctest::Contains("sweep grid is empty"),
                       std::invalid_argument);
  SweepGrid grid;
  grid.series = {{Deployment::EdgeTwin, LinkKind::Cellular}};
  grid.n_list = {40};
  ScenarioConfig bad = fast_base();
  bad.edge.capacity = 0;
  CHECK_THROWS_WITH_AS(sweep(grid, bad), doctest::Contains("sweep cell"),
                       std::runtime_error);
}

TEST_CASE("reports round-trip exactly through render and parse") {
  SweepGrid grid;
  grid.series = {{Deployment::Physical, LinkKind::WiFi},
                 {Deployment::HybridTwin, LinkKind::Cellular}};
  grid.n_list = {40, 80};
  const auto report = sweep(grid, fast_base());
  const std::string text = render_report(report);
  std::istringstream in(text);
  const auto parsed = parse_report(in);
  CHECK(reports_equal(parsed, report));

  // A second render of the parsed report is byte-identical.
  CHECK(render_report(parsed) == text);
}

TEST_CASE("identical sweeps render byte-identical reports") {
  SweepGrid grid;
  grid.series = {{Deployment::EdgeTwin, LinkKind::WiFi},
                 {Deployment::CloudTwin, LinkKind::Cellular}};
  grid.n_list = {40, 120};
  const std::string a = render_report(sweep(grid, fast_base()));
  const std::string b = render_report(sweep(grid, fast_base()));
  CHECK(a == b);
  CHECK(a.find("# config_hash=") != std::string::npos);
  CHECK(a.find("# seed=42") != std::string::npos);
  CHECK(a.find("deployment,link,n_vehicles,mean_latency_s,p95_latency_s,"
               "generated,delivered,dropped,comp_speed_analytic") !=
        std::string::npos);
}

TEST_CASE("malformed report rows name the offending line") {
  std::istringstream missing("deployment,link,n\nphysical,wifi\n");
  CHECK_THROWS_WITH_AS(parse_report(missing), doctest::Contains("line 2"),
                       std::runtime_error);
  std::istringstream bad_kind(
      "header\nteleport,wifi,40,1,1,1,1,0,1\n");
  CHECK_THROWS_WITH_AS(parse_report(bad_kind),
                       doctest::Contains("bad deployment or link"),
                       std::runtime_error);
  std::istringstream bad_num(
      "header\nphysical,wifi,forty,1,1,1,1,0,1\n");
  CHECK_THROWS_WITH_AS(parse_report(bad_num),
                       doctest::Contains("bad numeric field"),
                       std::runtime_error);
}

TEST_CASE("the speed table prints the three columns at fixed six decimals") {
  SweepGrid grid;
  grid.series = {{Deployment::Physical, LinkKind::WiFi},
                 {Deployment::CloudTwin, LinkKind::Cellular},
                 {Deployment::EdgeTwin, LinkKind::Cellular}};
  grid.n_list = {40, 80};
  const auto report = sweep(grid, fast_base());

  const std::string csv = emit_table(report, TableFormat::Csv);
  const auto csv_lines = lines_of(csv);
  REQUIRE(csv_lines.size() == 3);
  CHECK(csv_lines[0] == "n,physical,cloud,edge_hybrid");
  CHECK(csv_lines[1] == "40,11.210762,112.107623,33.632287");
  CHECK(csv_lines[2] == "80,5.605381,56.053812,33.632287");

  const std::string md = emit_table(report, TableFormat::Markdown);
  const auto md_lines = lines_of(md);
  REQUIRE(md_lines.size() == 4);
  CHECK(md_lines[0] == "| n | physical | cloud | edge_hybrid |");
  CHECK(md_lines[2] == "| 40 | 11.210762 | 112.107623 | 33.632287 |");
  CHECK(md_lines[3] == "| 80 | 5.605381 | 56.053812 | 33.632287 |");
}

TEST_CASE("the speed table refuses empty or incomplete reports") {
  CHECK_THROWS_WITH_AS(emit_table(KpiReport{}, TableFormat::Csv),
                       doctest::Contains("empty sweep"),
                       std::invalid_argument);
  KpiReport only_physical;
  KpiRow row;
  row.deployment = Deployment::Physical;
  row.n_vehicles = 40;
  row.comp_speed_analytic = 11.2;
  only_physical.rows.push_back(row);
  CHECK_THROWS_WITH_AS(emit_table(only_physical, TableFormat::Csv),
                       doctest::Contains("n=40"), std::invalid_argument);
}

TEST_CASE("latency series split into one sorted file per deployment-link") {
  const auto report = sweep(default_grid(), fast_base());
  const auto files = emit_latency_series(report);
  REQUIRE(files.size() == 6);
  const std::vector<std::string> expected_names = {
      "latency_physical_wifi.csv", "latency_edge_wifi.csv",
      "latency_edge_cellular.csv", "latency_cloud_cellular.csv",
      "latency_hybrid_wifi.csv",   "latency_hybrid_cellular.csv"};
  for (std::size_t i = 0; i < files.size(); ++i) {
    CHECK(files[i].first == expected_names[i]);
    const auto lines = lines_of(files[i].second);
    REQUIRE(lines.size() == 8);  // header + the seven population sizes
    CHECK(lines[0] == "n,mean_latency_s");
    long prev_n = 0;
    for (std::size_t j = 1; j < lines.size(); ++j) {
      const long n = std::stol(lines[j].substr(0, lines[j].find(',')));
      CHECK(n > prev_n);
      prev_n = n;
    }
    CHECK(lines[1].rfind("40,", 0) == 0);
    CHECK(lines[7].rfind("300,", 0) == 0);
  }
}

TEST_CASE("the built-in reference assertions hold for the stock model") {
  const auto failures = check_reference_values();
  for (const auto& f : failures) MESSAGE(f);
  CHECK(failures.empty());
}

TEST_CASE("perturbing the verification cost breaks the reference assertions") {
  ScenarioConfig config;
  config.crypto_time_s = 0.003;
  const auto failures = check_reference_values(config);
  CHECK(!failures.empty());
}
