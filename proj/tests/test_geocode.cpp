#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "twinvanet/geocode.hpp"
#include "twinvanet/poi.hpp"

// Keep httplib (which drags in <resolv.h>) after the project headers so its
// platform macros cannot leak into the Eigen-backed includes above.
#ifdef TWINVANET_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

using namespace twinvanet;

namespace {

GeocodeResult ok_result(const std::string& display) {
  GeocodeResult r;
  r.status = GeocodeStatus::Ok;
  r.address.display = display;
  return r;
}

GeocodeResult err_result(GeocodeStatus status, double retry_after = 0.0) {
  GeocodeResult r;
  r.status = status;
  r.retry_after_s = retry_after;
  r.detail = "scripted failure";
  return r;
}

// Provider that replays a fixed sequence of results.
struct ScriptedProvider : GeocodeProvider {
  std::vector<GeocodeResult> script;
  std::size_t next = 0;
  long calls = 0;
  GeocodeResult reverse(const GeoPoint&) override {
    ++calls;
    if (next < script.size()) return script[next++];
    return err_result(GeocodeStatus::NetworkError);
  }
};

std::filesystem::path temp_file(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("twinvanet_geocode_test_" + name);
  std::filesystem::remove(path);
  return path;
}

struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port);
  }
  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

TEST_CASE("stub provider echoes the display name it was given") {
  StubProvider stub;
  stub.add({40.2421356, 28.9710929}, "Test Street");
  const auto res = stub.reverse({40.2421356, 28.9710929});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "Test Street");
}

TEST_CASE("stub provider reports unknown points as not found") {
  StubProvider stub;
  stub.add({40.2421356, 28.9710929}, "Test Street");
  const auto res = stub.reverse({41.0, 29.0});
  CHECK(res.status == GeocodeStatus::NotFound);
}

TEST_CASE("stub files load plain and comma-quoted display names") {
  const auto path = temp_file("stub.csv");
  {
    std::ofstream out(path);
    out << "# fixture\n";
    out << "40.242136,28.971093,\"Kultur Park, Osmangazi\"\n";
    out << "40.300000,29.100000,Plain Road\n";
  }
  auto stub = StubProvider::from_file(path.string());
  CHECK(stub.reverse({40.242136, 28.971093}).address.display ==
        "Kultur Park, Osmangazi");
  CHECK(stub.reverse({40.3, 29.1}).address.display == "Plain Road");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(StubProvider::from_file("/nonexistent/stub.csv"),
                  std::runtime_error);
  const auto bad = temp_file("stub_bad.csv");
  {
    std::ofstream out(bad);
    out << "40.0,29.0\n";  // missing display_name
  }
  CHECK_THROWS_WITH_AS(StubProvider::from_file(bad.string()),
                       doctest::Contains("line 1"), std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("repeat lookups are served from cache with one provider call") {
  StubProvider stub;
  stub.add({40.2, 29.0}, "Somewhere");
  FakeClock clock;
  GeocodeClient client(stub, clock);
  for (int i = 0; i < 5; ++i) {
    const auto res = client.reverse_geocode({40.2, 29.0});
    CHECK(res.status == GeocodeStatus::Ok);
    CHECK(res.address.display == "Somewhere");
  }
  CHECK(client.provider_calls() == 1);
  CHECK(client.cache_size() == 1);
}

TEST_CASE("points within a micro-degree share one cache entry") {
  StubProvider stub;
  stub.add({40.2000001, 29.0000002}, "Shared Cell");
  FakeClock clock;
  GeocodeClient client(stub, clock);
  CHECK(client.reverse_geocode({40.2000001, 29.0000002}).status ==
        GeocodeStatus::Ok);
  // 3e-7 degrees away: rounds to the same 6-decimal key, so no new call.
  const auto res = client.reverse_geocode({40.2000004, 29.0000002});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "Shared Cell");
  CHECK(client.provider_calls() == 1);
  CHECK(GeocodeClient::cache_key({40.2000001, 29.0000002}) ==
        GeocodeClient::cache_key({40.2000004, 29.0000002}));
}

TEST_CASE("live requests are spaced at least one second apart") {
  StubProvider stub;
  for (int i = 0; i < 5; ++i) {
    stub.add({40.2 + 0.01 * i, 29.0}, "Spot " + std::to_string(i));
  }
  FakeClock clock;
  GeocodeClient client(stub, clock);
  for (int i = 0; i < 5; ++i) {
    CHECK(client.reverse_geocode({40.2 + 0.01 * i, 29.0}).status ==
          GeocodeStatus::Ok);
  }
  CHECK(client.provider_calls() == 5);
  // Calls land at t = 0, 1000, 2000, 3000, 4000 ms.
  CHECK(clock.now_ms() == 4000);
  CHECK(clock.sleeps() == std::vector<std::int64_t>{1000, 1000, 1000, 1000});
}

TEST_CASE("transient network errors are retried with doubling backoff") {
  ScriptedProvider provider;
  provider.script = {err_result(GeocodeStatus::NetworkError),
                     err_result(GeocodeStatus::NetworkError),
                     ok_result("Eventually")};
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({40.2, 29.0});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "Eventually");
  CHECK(provider.calls == 3);
  // backoff 500, then spacing 500 to reach the 1 s slot, then backoff 1000.
  CHECK(clock.sleeps() == std::vector<std::int64_t>{500, 500, 1000});
}

TEST_CASE("a rate-limit retry hint overrides the default backoff") {
  ScriptedProvider provider;
  provider.script = {err_result(GeocodeStatus::RateLimited, 2.0),
                     ok_result("After Waiting")};
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({40.2, 29.0});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(provider.calls == 2);
  REQUIRE(clock.sleeps().size() >= 1);
  CHECK(clock.sleeps()[0] == 2000);
}

TEST_CASE("not-found answers are authoritative and never retried") {
  ScriptedProvider provider;
  provider.script = {err_result(GeocodeStatus::NotFound)};
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({40.2, 29.0});
  CHECK(res.status == GeocodeStatus::NotFound);
  CHECK(provider.calls == 1);
  CHECK(clock.sleeps().empty());
}

TEST_CASE("persistent failures surface after exactly max_attempts calls") {
  ScriptedProvider provider;
  provider.script = {err_result(GeocodeStatus::NetworkError),
                     err_result(GeocodeStatus::NetworkError),
                     err_result(GeocodeStatus::NetworkError)};
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({40.2, 29.0});
  CHECK(res.status == GeocodeStatus::NetworkError);
  CHECK(provider.calls == 3);
  CHECK(client.cache_size() == 0);
}

TEST_CASE("invalid coordinates short-circuit without touching the provider") {
  ScriptedProvider provider;
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({95.0, 29.0});
  CHECK(res.status == GeocodeStatus::NotFound);
  CHECK(provider.calls == 0);
}

TEST_CASE("the cache file persists results across client instances") {
  const auto path = temp_file("cache.csv");
  const GeoPoint point{40.2421356, 28.9710929};

  GeocodeClientOptions opts;
  opts.cache_path = path.string();
  {
    StubProvider stub;
    stub.add(point, "Green Square, Bursa");
    FakeClock clock;
    GeocodeClient client(stub, clock, opts);
    CHECK(client.reverse_geocode(point).status == GeocodeStatus::Ok);
    CHECK(client.provider_calls() == 1);
  }

  // Exact persisted form: 6-decimal key coordinates, ISO-8601 fetch time,
  // display quoted because it contains a comma.
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "40.242136,28.971093,1970-01-01T00:00:00Z,\"Green Square, Bursa\"");

  // A fresh client with an empty provider answers from the file alone.
  StubProvider empty;
  FakeClock clock2;
  GeocodeClient client2(empty, clock2, opts);
  const auto res = client2.reverse_geocode(point);
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "Green Square, Bursa");
  CHECK(client2.provider_calls() == 0);
  std::filesystem::remove(path);
}

TEST_CASE("later cache lines override earlier ones for the same key") {
  const auto path = temp_file("cache_dupe.csv");
  {
    std::ofstream out(path);
    out << "40.242136,28.971093,2026-01-01T00:00:00Z,Old Name\n";
    out << "40.242136,28.971093,2026-01-02T00:00:00Z,New Name\n";
  }
  StubProvider empty;
  FakeClock clock;
  GeocodeClientOptions opts;
  opts.cache_path = path.string();
  GeocodeClient client(empty, clock, opts);
  const auto res = client.reverse_geocode({40.242136, 28.971093});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "New Name");
  CHECK(client.provider_calls() == 0);
  std::filesystem::remove(path);
}

TEST_CASE("annotating clusters resolves every centroid the provider knows") {
  StubProvider stub;
  std::vector<PoiCluster> clusters(10);
  for (int i = 0; i < 10; ++i) {
    clusters[static_cast<std::size_t>(i)].label = i;
    clusters[static_cast<std::size_t>(i)].centroid_geo =
        GeoPoint{40.2 + 0.01 * i, 29.0};
    stub.add(clusters[static_cast<std::size_t>(i)].centroid_geo,
             "Address " + std::to_string(i));
  }
  FakeClock clock;
  GeocodeClient client(stub, clock);

  const auto report = annotate_pois(clusters, client);
  CHECK(report.resolved == 10);
  CHECK(report.unresolved == 0);
  CHECK(report.failures.empty());
  for (int i = 0; i < 10; ++i) {
    CHECK(clusters[static_cast<std::size_t>(i)].address ==
          "Address " + std::to_string(i));
  }
  const long calls_after_first = client.provider_calls();
  CHECK(calls_after_first == 10);

  // A second pass over the same clusters is answered from cache.
  const auto second = annotate_pois(clusters, client);
  CHECK(second.resolved == 10);
  CHECK(client.provider_calls() == calls_after_first);
}

TEST_CASE("a missing address is reported but does not stop annotation") {
  StubProvider stub;
  std::vector<PoiCluster> clusters(10);
  for (int i = 0; i < 10; ++i) {
    clusters[static_cast<std::size_t>(i)].label = i;
    clusters[static_cast<std::size_t>(i)].centroid_geo =
        GeoPoint{40.2 + 0.01 * i, 29.0};
    if (i != 3) {
      stub.add(clusters[static_cast<std::size_t>(i)].centroid_geo,
               "Address " + std::to_string(i));
    }
  }
  FakeClock clock;
  GeocodeClient client(stub, clock);
  const auto report = annotate_pois(clusters, client);
  CHECK(report.resolved == 9);
  CHECK(report.unresolved == 1);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].find("label 3") != std::string::npos);
  CHECK(report.failures[0].find("not-found") != std::string::npos);
  CHECK(clusters[3].address.empty());
  CHECK(clusters[4].address == "Address 4");
}

TEST_CASE("the http provider sends a nominatim-style request") {
  TestServer ts;
  std::string seen_path, seen_lat, seen_lon, seen_format, seen_zoom, seen_ua;
  ts.server.Get("/api/reverse", [&](const httplib::Request& req,
                                    httplib::Response& res) {
    seen_path = req.path;
    seen_lat = req.get_param_value("lat");
    seen_lon = req.get_param_value("lon");
    seen_format = req.get_param_value("format");
    seen_zoom = req.get_param_value("zoom");
    seen_ua = req.get_header_value("User-Agent");
    res.set_content(
        R"({"display_name":"Kultur Park, Osmangazi, Bursa",)"
        R"("address":{"suburb":"Osmangazi","city":"Bursa"}})",
        "application/json");
  });
  ts.start();

  HttpProviderOptions opts;
  opts.base_url = ts.base_url() + "/api";
  HttpProvider provider(opts);
  const auto res = provider.reverse({40.25, 28.97});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display == "Kultur Park, Osmangazi, Bursa");
  CHECK(res.address.components.at("suburb") == "Osmangazi");
  CHECK(res.address.components.at("city") == "Bursa");
  CHECK(seen_path == "/api/reverse");
  CHECK(seen_lat == "40.25");
  CHECK(seen_lon == "28.97");
  CHECK(seen_format == "jsonv2");
  CHECK(seen_zoom == "18");
  CHECK(seen_ua == "twinvanet/1.0");
}

TEST_CASE("http 404 and error bodies map to not-found") {
  TestServer ts;
  ts.server.Get("/reverse", [&](const httplib::Request& req,
                                httplib::Response& res) {
    if (req.get_param_value("lat") == "0") {
      res.status = 404;
      res.set_content("gone", "text/plain");
    } else {
      res.set_content(R"({"error":"Unable to geocode"})", "application/json");
    }
  });
  ts.start();

  HttpProviderOptions opts;
  opts.base_url = ts.base_url();
  HttpProvider provider(opts);

  const auto res404 = provider.reverse({0.0, 0.0});
  CHECK(res404.status == GeocodeStatus::NotFound);

  const auto res_err = provider.reverse({40.25, 28.97});
  CHECK(res_err.status == GeocodeStatus::NotFound);
  CHECK(res_err.detail == "Unable to geocode");
}

TEST_CASE("http 429 maps to rate-limited and carries the retry hint") {
  TestServer ts;
  ts.server.Get("/reverse", [](const httplib::Request&,
                               httplib::Response& res) {
    res.status = 429;
    res.set_header("Retry-After", "7");
    res.set_content("slow down", "text/plain");
  });
  ts.start();

  HttpProviderOptions opts;
  opts.base_url = ts.base_url();
  HttpProvider provider(opts);
  const auto res = provider.reverse({40.25, 28.97});
  CHECK(res.status == GeocodeStatus::RateLimited);
  CHECK(res.retry_after_s == 7.0);
}

TEST_CASE("an unreachable host maps to a network error") {
  TestServer ts;
  ts.start();
  const std::string dead_url = ts.base_url();
  ts.server.stop();
  if (ts.thread.joinable()) ts.thread.join();

  HttpProviderOptions opts;
  opts.base_url = dead_url;  // port is now closed
  opts.timeout_s = 2.0;
  HttpProvider provider(opts);
  const auto res = provider.reverse({40.25, 28.97});
  CHECK(res.status == GeocodeStatus::NetworkError);
}

TEST_CASE("live reverse geocoding smoke check" *
          doctest::description("set TWINVANET_LIVE_GEOCODE=1 to enable")) {
  if (std::getenv("TWINVANET_LIVE_GEOCODE") == nullptr) {
    MESSAGE("skipped: TWINVANET_LIVE_GEOCODE is not set");
    return;
  }
  HttpProviderOptions opts;
  opts.base_url = "https://nominatim.openstreetmap.org";
  HttpProvider provider(opts);
  FakeClock clock;
  GeocodeClient client(provider, clock);
  const auto res = client.reverse_geocode({40.24213565, 28.97109287});
  CHECK(res.status == GeocodeStatus::Ok);
  CHECK(res.address.display.find("Osmangazi") != std::string::npos);
}
