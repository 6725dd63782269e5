#include "twinvanet/geocode.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#ifdef TWINVANET_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "twinvanet/csv.hpp"
#include "twinvanet/logging.hpp"
#include "twinvanet/time_iso.hpp"

namespace twinvanet {

const char* to_string(GeocodeStatus status) {
  switch (status) {
    case GeocodeStatus::Ok: return "ok";
    case GeocodeStatus::NotFound: return "not-found";
    case GeocodeStatus::RateLimited: return "rate-limited";
    case GeocodeStatus::NetworkError: return "network-error";
  }
  return "unknown";
}

std::int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

namespace {

std::pair<std::int64_t, std::int64_t> rounded_key(const GeoPoint& p) {
  return {std::llround(p.lat * 1e6), std::llround(p.lon * 1e6)};
}

}  // namespace

void StubProvider::add(const GeoPoint& point, const std::string& display) {
  entries_[rounded_key(point)] = display;
}

StubProvider StubProvider::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stub file: " + path);
  StubProvider stub;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() < 3) {
      throw std::runtime_error("stub file line " + std::to_string(line_no) +
                               ": expected lat,lon,display_name");
    }
    bool ok_lat = false, ok_lon = false;
    GeoPoint p;
    p.lat = csv::parse_double(fields[0], &ok_lat);
    p.lon = csv::parse_double(fields[1], &ok_lon);
    if (!ok_lat || !ok_lon || !p.valid()) {
      throw std::runtime_error("stub file line " + std::to_string(line_no) +
                               ": bad coordinates");
    }
    stub.add(p, fields[2]);
  }
  return stub;
}

GeocodeResult StubProvider::reverse(const GeoPoint& point) {
  GeocodeResult result;
  const auto it = entries_.find(rounded_key(point));
  if (it == entries_.end()) {
    result.status = GeocodeStatus::NotFound;
    result.detail = "no stub entry for point";
    return result;
  }
  result.status = GeocodeStatus::Ok;
  result.address.display = it->second;
  return result;
}

HttpProvider::HttpProvider(HttpProviderOptions opts) : opts_(std::move(opts)) {
  // Split base_url into origin and an optional path prefix.
  const std::string& url = opts_.base_url;
  std::size_t scheme_end = url.find("://");
  std::size_t path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    origin_ = url;
  } else {
    origin_ = url.substr(0, path_start);
    path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
}

GeocodeResult HttpProvider::reverse(const GeoPoint& point) {
  GeocodeResult result;
  httplib::Client client(origin_);
  client.set_connection_timeout(static_cast<time_t>(opts_.timeout_s), 0);
  client.set_read_timeout(static_cast<time_t>(opts_.timeout_s), 0);
  client.set_follow_location(true);

  const std::string path = path_prefix_ + "/reverse?lat=" +
                           csv::format_double(point.lat) +
                           "&lon=" + csv::format_double(point.lon) +
                           "&format=jsonv2&zoom=" + std::to_string(opts_.zoom);
  httplib::Headers headers = {{"User-Agent", opts_.user_agent}};
  httplib::Result res = client.Get(path, headers);
  if (!res) {
    result.status = GeocodeStatus::NetworkError;
    result.detail = "transport error: " + httplib::to_string(res.error());
    return result;
  }
  if (res->status == 429) {
    result.status = GeocodeStatus::RateLimited;
    result.detail = "HTTP 429";
    if (res->has_header("Retry-After")) {
      bool ok = false;
      const double v = csv::parse_double(res->get_header_value("Retry-After"), &ok);
      if (ok && v >= 0.0) result.retry_after_s = v;
    }
    return result;
  }
  if (res->status == 404) {
    result.status = GeocodeStatus::NotFound;
    result.detail = "HTTP 404";
    return result;
  }
  if (res->status != 200) {
    result.status = GeocodeStatus::NetworkError;
    result.detail = "HTTP " + std::to_string(res->status);
    return result;
  }
  nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded()) {
    result.status = GeocodeStatus::NetworkError;
    result.detail = "unparseable response body";
    return result;
  }
  if (body.contains("error")) {
    result.status = GeocodeStatus::NotFound;
    result.detail = body["error"].is_string()
                        ? body["error"].get<std::string>()
                        : "provider reported error";
    return result;
  }
  if (!body.contains("display_name") || !body["display_name"].is_string()) {
    result.status = GeocodeStatus::NotFound;
    result.detail = "response lacks display_name";
    return result;
  }
  result.status = GeocodeStatus::Ok;
  result.address.display = body["display_name"].get<std::string>();
  if (body.contains("address") && body["address"].is_object()) {
    for (const auto& [key, value] : body["address"].items()) {
      if (value.is_string()) {
        result.address.components[key] = value.get<std::string>();
      }
    }
  }
  return result;
}

GeocodeClient::GeocodeClient(GeocodeProvider& provider, Clock& clock,
                             GeocodeClientOptions opts)
    : provider_(provider), clock_(clock), opts_(std::move(opts)) {
  if (!opts_.cache_path.empty()) load_cache();
}

std::pair<std::int64_t, std::int64_t> GeocodeClient::cache_key(
    const GeoPoint& p) {
  return rounded_key(p);
}

void GeocodeClient::load_cache() {
  std::ifstream in(opts_.cache_path);
  if (!in) return;  // first run: no cache yet
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const std::vector<std::string> fields = csv::split_line(line);
    if (fields.size() < 4) continue;  // tolerate partial trailing writes
    bool ok_lat = false, ok_lon = false;
    const double lat = csv::parse_double(fields[0], &ok_lat);
    const double lon = csv::parse_double(fields[1], &ok_lon);
    if (!ok_lat || !ok_lon) continue;
    // Later lines win so appends act as updates.
    cache_[rounded_key({lat, lon})] = fields[3];
  }
}

void GeocodeClient::append_cache(
    const std::pair<std::int64_t, std::int64_t>& key,
    const std::string& display) {
  if (opts_.cache_path.empty()) return;
  std::ofstream out(opts_.cache_path, std::ios::app);
  if (!out) {
    log::warn("geocode cache not writable", {{"path", opts_.cache_path}});
    return;
  }
  out << csv::format_fixed(static_cast<double>(key.first) / 1e6, 6) << ','
      << csv::format_fixed(static_cast<double>(key.second) / 1e6, 6) << ','
      << format_iso8601_utc(clock_.now_ms() / 1000) << ','
      << csv::quote(display) << '\n';
}

GeocodeResult GeocodeClient::reverse_geocode(const GeoPoint& point) {
  GeocodeResult result;
  if (!point.valid()) {
    result.status = GeocodeStatus::NotFound;
    result.detail = "invalid coordinates";
    return result;
  }
  const auto key = rounded_key(point);
  if (const auto it = cache_.find(key); it != cache_.end()) {
    result.status = GeocodeStatus::Ok;
    result.address.display = it->second;
    return result;
  }

  double backoff_s = opts_.backoff_initial_s;
  const int attempts = opts_.max_attempts < 1 ? 1 : opts_.max_attempts;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    // Keep live requests spaced at least min_request_spacing_s apart.
    const std::int64_t spacing_ms =
        static_cast<std::int64_t>(opts_.min_request_spacing_s * 1000.0);
    if (last_request_ms_ >= 0) {
      const std::int64_t due = last_request_ms_ + spacing_ms;
      const std::int64_t now = clock_.now_ms();
      if (now < due) clock_.sleep_ms(due - now);
    }
    last_request_ms_ = clock_.now_ms();
    ++provider_calls_;
    result = provider_.reverse(point);

    if (result.status == GeocodeStatus::Ok) {
      cache_[key] = result.address.display;
      append_cache(key, result.address.display);
      return result;
    }
    if (result.status == GeocodeStatus::NotFound) return result;  // no retry
    if (attempt + 1 >= attempts) return result;

    double wait_s = backoff_s;
    if (result.status == GeocodeStatus::RateLimited &&
        result.retry_after_s > 0.0) {
      wait_s = result.retry_after_s;
    }
    clock_.sleep_ms(static_cast<std::int64_t>(wait_s * 1000.0));
    backoff_s *= 2.0;
  }
  return result;
}

AnnotateReport annotate_pois(std::vector<PoiCluster>& clusters,
                             GeocodeClient& client) {
  AnnotateReport report;
  for (PoiCluster& cluster : clusters) {
    const GeocodeResult result = client.reverse_geocode(cluster.centroid_geo);
    if (result.status == GeocodeStatus::Ok) {
      cluster.address = result.address.display;
      ++report.resolved;
    } else {
      cluster.address.clear();
      ++report.unresolved;
      report.failures.push_back("label " + std::to_string(cluster.label) +
                                ": " + to_string(result.status) +
                                (result.detail.empty() ? ""
                                                       : " (" + result.detail +
                                                             ")"));
    }
  }
  return report;
}

}  // namespace twinvanet
