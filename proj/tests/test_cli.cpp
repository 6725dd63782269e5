#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* bin = std::getenv("TWINVANET_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "twinvanet_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int invocation = 0;
  const fs::path out_file =
      scratch_dir() / ("stdout_" + std::to_string(invocation) + ".txt");
  const fs::path err_file =
      scratch_dir() / ("stderr_" + std::to_string(invocation) + ".txt");
  ++invocation;
  const std::string command = binary_path() + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = (status >= 0 && WIFEXITED(status))
                         ? WEXITSTATUS(status)
                         : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

// Three stationary hotspots inside the study box, one taxi each, records a
// minute apart so every taxi forms a single trip. The per-record lat offset
// spreads each hotspot over three grid cells at resolution 4.
std::string raw_fixture() {
  const double spots[3][2] = {
      {40.2200, 29.0100}, {40.2800, 29.2500}, {40.1500, 28.6000}};
  const char* taxis[3] = {"a", "b", "c"};
  std::ostringstream out;
  out << "taxi_id,timestamp,lat,lon,speed_kmh,distance_m,stay_s\n";
  for (int t = 0; t < 3; ++t) {
    for (int j = 0; j < 12; ++j) {
      const int minute = j;
      char stamp[32];
      std::snprintf(stamp, sizeof stamp, "2019-01-01T08:%02d:00Z", minute);
      out << taxis[t] << ',' << stamp << ','
          << spots[t][0] + 0.0005 * (j % 3) << ',' << spots[t][1] << ','
          << 18 + (j % 5) << ",100,30\n";
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("--version exits zero and prints a version string") {
  const auto res = run_cli("--version");
  CHECK(res.exit_code == 0);
  CHECK(!res.out.empty());
}

TEST_CASE("unknown flags and missing subcommands exit with code 1") {
  CHECK(run_cli("simulate --bogus-flag 1").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("simulate prints the closed-form single-vehicle cloud latency") {
  const auto res = run_cli(
      "simulate --deployment cloud --link cellular --n 1 --duration 1");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("deployment,link,n_vehicles,mean_latency_s") !=
        std::string::npos);
  CHECK(res.out.find("cloud,cellular,1,0.1002478,0.1002478,10,10,0,") !=
        std::string::npos);
  CHECK(res.out.find("# config_hash=") != std::string::npos);
}

TEST_CASE("simulate --dump-config echoes the resolved configuration") {
  const auto res = run_cli(
      "simulate --deployment cloud --link cellular --n 1 --dump-config");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("deployment=cloud\n") != std::string::npos);
  CHECK(res.out.find("link=cellular\n") != std::string::npos);
  CHECK(res.out.find("n_vehicles=1\n") != std::string::npos);
  CHECK(res.out.find("sim_duration_s=12.1\n") != std::string::npos);
}

TEST_CASE("a config file seeds the scenario and flags override it") {
  const fs::path config = scratch_dir() / "scenario.conf";
  spit(config,
       "[scenario]\n"
       "deployment = cloud\n"
       "link = cellular\n"
       "n_vehicles = 7\n"
       "sim_duration_s = 1.5\n");
  const auto from_file =
      run_cli("simulate --config " + config.string() + " --dump-config");
  CHECK(from_file.exit_code == 0);
  CHECK(from_file.out.find("deployment=cloud\n") != std::string::npos);
  CHECK(from_file.out.find("n_vehicles=7\n") != std::string::npos);
  CHECK(from_file.out.find("sim_duration_s=1.5\n") != std::string::npos);

  const auto overridden = run_cli("simulate --config " + config.string() +
                                  " --n 9 --dump-config");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.out.find("n_vehicles=9\n") != std::string::npos);
}

TEST_CASE("invalid scenario values exit with code 1") {
  CHECK(run_cli("simulate --n 0").exit_code == 1);
  CHECK(run_cli("simulate --deployment teleport").exit_code == 1);
  CHECK(run_cli("sweep --n-list 40,zero").exit_code == 1);
  CHECK(run_cli("sweep --series cloud").exit_code == 1);
}

TEST_CASE("missing input files exit with code 2") {
  CHECK(run_cli("report --in /nonexistent/report.csv").exit_code == 2);
  const fs::path out = scratch_dir() / "unused.csv";
  CHECK(run_cli("ingest --in /nonexistent/raw.csv --out " + out.string())
            .exit_code == 2);
}

TEST_CASE("the built-in reference check passes stock and fails when skewed") {
  CHECK(run_cli("sweep --check-paper").exit_code == 0);
  CHECK(run_cli("sweep --check-paper --crypto 0.003").exit_code == 3);
  CHECK(run_cli("report --check-paper --in /nonexistent/x.csv").exit_code ==
        2);  // check passes, then the read fails
}

TEST_CASE("ingest, cluster, and report artifacts are reproducible") {
  const fs::path raw = scratch_dir() / "raw.csv";
  spit(raw, raw_fixture());
  const fs::path records = scratch_dir() / "records.csv";
  const auto ingest_res = run_cli("ingest --in " + raw.string() + " --out " +
                                  records.string());
  CHECK(ingest_res.exit_code == 0);
  const std::string records_text = slurp(records);
  CHECK(records_text.find("taxi_id") == 0);
  CHECK(records_text.find("\na,") != std::string::npos);

  const std::string records_before = slurp(records);
  const fs::path cells1 = scratch_dir() / "cells1.csv";
  const fs::path cells2 = scratch_dir() / "cells2.csv";
  const fs::path pois1 = scratch_dir() / "pois1.csv";
  const fs::path pois2 = scratch_dir() / "pois2.csv";
  const std::string cluster_args = "cluster --in " + records.string() +
                                   " --k 3 --resolution 4 --seed 7";
  CHECK(run_cli(cluster_args + " --out " + cells1.string() + " --pois " +
                pois1.string())
            .exit_code == 0);
  CHECK(run_cli(cluster_args + " --out " + cells2.string() + " --pois " +
                pois2.string())
            .exit_code == 0);
  CHECK(slurp(cells1) == slurp(cells2));
  CHECK(slurp(pois1) == slurp(pois2));
  CHECK(slurp(records) == records_before);  // inputs are never mutated

  const std::string cells_text = slurp(cells1);
  CHECK(cells_text.find("cell_lat,cell_lon,label_kmeans,label_som") == 0);
  // 3 hotspots x 3 cells each, plus the header line.
  long lines = 0;
  for (const char c : cells_text) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 10);
}

TEST_CASE("a sweep report renders a speed table in both formats") {
  const fs::path report = scratch_dir() / "sweep.csv";
  const auto sweep_res =
      run_cli("sweep --duration 1 --n-list 40,80 --series "
              "physical:wifi,cloud:cellular,edge:cellular --out " +
              report.string());
  CHECK(sweep_res.exit_code == 0);
  const std::string report_text = slurp(report);
  CHECK(report_text.find("physical,wifi,40,") != std::string::npos);

  const auto table = run_cli("report --in " + report.string());
  CHECK(table.exit_code == 0);
  CHECK(table.out.find("n,physical,cloud,edge_hybrid\n") == 0);
  CHECK(table.out.find("40,11.210762,112.107623,33.632287") !=
        std::string::npos);

  const auto markdown =
      run_cli("report --in " + report.string() + " --format markdown");
  CHECK(markdown.exit_code == 0);
  CHECK(markdown.out.find("| 40 | 11.210762 | 112.107623 | 33.632287 |") !=
        std::string::npos);

  const fs::path latency_dir = scratch_dir() / "latency";
  CHECK(run_cli("report --in " + report.string() + " --latency-dir " +
                latency_dir.string())
            .exit_code == 0);
  CHECK(fs::exists(latency_dir / "latency_physical_wifi.csv"));
  CHECK(fs::exists(latency_dir / "latency_cloud_cellular.csv"));
  CHECK(fs::exists(latency_dir / "latency_edge_cellular.csv"));
}

TEST_CASE("offline geocoding resolves addresses from the stub file") {
  const fs::path pois_in = scratch_dir() / "pois_in.csv";
  spit(pois_in,
       "label,centroid_lat,centroid_lon,member_count,address\n"
       "0,40.242136,28.971093,5,\n"
       "1,40.3,29.1,2,\n");
  const fs::path stub = scratch_dir() / "stub.csv";
  spit(stub,
       "40.242136,28.971093,\"Kultur Park, Osmangazi\"\n"
       "40.3,29.1,Plain Road\n");
  const fs::path pois_out = scratch_dir() / "pois_out.csv";
  const auto res = run_cli("geocode --in " + pois_in.string() + " --out " +
                           pois_out.string() + " --offline --stub " +
                           stub.string() + " --spacing 0");
  CHECK(res.exit_code == 0);
  const std::string out_text = slurp(pois_out);
  CHECK(out_text.find("\"Kultur Park, Osmangazi\"") != std::string::npos);
  CHECK(out_text.find("Plain Road") != std::string::npos);
}

TEST_CASE("live geocoding without a user agent is a validation error") {
  const fs::path pois_in = scratch_dir() / "pois_ua.csv";
  spit(pois_in,
       "label,centroid_lat,centroid_lon,member_count,address\n"
       "0,40.242136,28.971093,5,\n");
  const auto res = run_cli("geocode --in " + pois_in.string() + " --out " +
                           (scratch_dir() / "pois_ua_out.csv").string());
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("--user-agent") != std::string::npos);
}

TEST_CASE("the pipeline writes all four artifacts in one run") {
  const fs::path raw = scratch_dir() / "pipeline_raw.csv";
  spit(raw, raw_fixture());
  const fs::path out_dir = scratch_dir() / "pipeline_out";
  const auto res = run_cli("pipeline --in " + raw.string() + " --out-dir " +
                           out_dir.string() + " --k 3 --spacing 0");
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(out_dir / "records.csv"));
  CHECK(fs::exists(out_dir / "cells.csv"));
  CHECK(fs::exists(out_dir / "pois.csv"));
  CHECK(fs::exists(out_dir / "manifest.json"));

  const std::string manifest = slurp(out_dir / "manifest.json");
  CHECK(manifest.find("\"stage_counts\"") != std::string::npos);
  CHECK(manifest.find("\"fnv1a64\"") != std::string::npos);
  CHECK(manifest.find("\"cells\": 9") != std::string::npos);
  CHECK(manifest.find("\"records\": 36") != std::string::npos);

  const std::string pois = slurp(out_dir / "pois.csv");
  CHECK(pois.find("label,centroid_lat,centroid_lon,member_count,address") ==
        0);
  // Offline with no stub entries: clusters stay unannotated but present.
  long poi_lines = 0;
  for (const char c : pois) {
    if (c == '\n') ++poi_lines;
  }
  CHECK(poi_lines == 4);  // header + three clusters
}
