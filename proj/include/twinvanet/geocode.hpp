#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twinvanet/geo.hpp"
#include "twinvanet/poi.hpp"

namespace twinvanet {

struct Address {
  std::string display;
  std::map<std::string, std::string> components;  // road, suburb, ...
};

enum class GeocodeStatus { Ok, NotFound, RateLimited, NetworkError };

const char* to_string(GeocodeStatus status);

struct GeocodeResult {
  GeocodeStatus status = GeocodeStatus::NetworkError;
  Address address;            // valid when status == Ok
  double retry_after_s = 0.0;  // server hint when RateLimited, else 0
  std::string detail;          // human-readable error context
};

// Injectable clock so rate limiting and backoff are testable without
// real waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;  // Unix epoch milliseconds
  virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_ms(std::int64_t ms) override;
};

class FakeClock : public Clock {
 public:
  explicit FakeClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() override { return now_; }
  void sleep_ms(std::int64_t ms) override {
    if (ms > 0) now_ += ms;
    sleeps_.push_back(ms);
  }
  void advance_ms(std::int64_t ms) { now_ += ms; }
  const std::vector<std::int64_t>& sleeps() const { return sleeps_; }

 private:
  std::int64_t now_;
  std::vector<std::int64_t> sleeps_;
};

class GeocodeProvider {
 public:
  virtual ~GeocodeProvider() = default;
  virtual GeocodeResult reverse(const GeoPoint& point) = 0;
};

// In-memory provider for tests and offline runs. Lookup key is the
// coordinate pair rounded to 6 decimals, same as the cache key.
class StubProvider : public GeocodeProvider {
 public:
  void add(const GeoPoint& point, const std::string& display);
  // File lines: `lat,lon,display_name` (display quoted if it has commas).
  static StubProvider from_file(const std::string& path);
  GeocodeResult reverse(const GeoPoint& point) override;

 private:
  std::map<std::pair<std::int64_t, std::int64_t>, std::string> entries_;
};

struct HttpProviderOptions {
  std::string base_url;  // e.g. https://nominatim.openstreetmap.org
  std::string user_agent = "twinvanet/1.0";
  int zoom = 18;
  double timeout_s = 10.0;
};

// Nominatim-style provider: GET /reverse?lat=..&lon=..&format=jsonv2&zoom=..
// Parses display_name plus the address component map. HTTP 429 maps to
// RateLimited (Retry-After honored), a body with an "error" key or 404 maps
// to NotFound, transport failures map to NetworkError.
class HttpProvider : public GeocodeProvider {
 public:
  explicit HttpProvider(HttpProviderOptions opts);
  GeocodeResult reverse(const GeoPoint& point) override;

 private:
  HttpProviderOptions opts_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // path part of base_url, if any
};

struct GeocodeClientOptions {
  std::string cache_path;  // empty disables persistence
  double min_request_spacing_s = 1.0;
  int max_attempts = 3;
  double backoff_initial_s = 0.5;  // doubles per retry
};

// Caching, rate-limited, retrying front of a provider. Single-threaded:
// one client handle must not be shared across threads.
class GeocodeClient {
 public:
  GeocodeClient(GeocodeProvider& provider, Clock& clock,
                GeocodeClientOptions opts = {});

  // Cache first; on miss, a rate-limited provider call with retries.
  GeocodeResult reverse_geocode(const GeoPoint& point);

  long provider_calls() const { return provider_calls_; }
  std::size_t cache_size() const { return cache_.size(); }

  static std::pair<std::int64_t, std::int64_t> cache_key(const GeoPoint& p);

 private:
  void load_cache();
  void append_cache(const std::pair<std::int64_t, std::int64_t>& key,
                    const std::string& display);

  GeocodeProvider& provider_;
  Clock& clock_;
  GeocodeClientOptions opts_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::string> cache_;
  std::int64_t last_request_ms_ = -1;
  long provider_calls_ = 0;
};

struct AnnotateReport {
  long resolved = 0;
  long unresolved = 0;
  std::vector<std::string> failures;  // "label 3: NotFound" style lines
};

// Fills cluster.address in place; failures are recorded, never fatal.
AnnotateReport annotate_pois(std::vector<PoiCluster>& clusters,
                             GeocodeClient& client);

}  // namespace twinvanet
