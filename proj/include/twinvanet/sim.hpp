#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twinvanet {

enum class Deployment { Physical, EdgeTwin, CloudTwin, HybridTwin };
enum class LinkKind { WiFi, Cellular };

const char* to_string(Deployment d);
const char* to_string(LinkKind k);
std::optional<Deployment> parse_deployment(const std::string& name);
std::optional<LinkKind> parse_link(const std::string& name);

struct LinkParams {
  LinkKind kind = LinkKind::WiFi;
  double data_rate_bps = 6e6;
  double channel_access_window_s = 0.046;
};

LinkParams wifi_link();      // 6 Mbps shared channel, 46 ms access windows
LinkParams cellular_link();  // 100 Mbps, contention-free

struct ServerParams {
  double per_message_processing_s = 0.0;  // base unit; see service scaling
  double reaction_latency_s = 0.0;
  long capacity = 0;  // max connected vehicles; 0 = unbounded
};

// One simulation cell. Service scaling at the processing stations models
// load-dependent cost per message:
//   Physical    n x crypto_time      (serialized peer verifications)
//   CloudTwin   n x cloud unit       (state mirror grows with fleet)
//   Edge/Hybrid min(n, capacity) x edge unit
// Hybrid routes every message through the edge; messages from vehicles
// beyond edge capacity continue over a cellular WAN hop to the cloud,
// mirrored there at a flat per-message cost.
// Physical is vehicle-to-vehicle only: it always runs on the WiFi channel
// and ignores the configured link.
struct ScenarioConfig {
  Deployment deployment = Deployment::Physical;
  LinkParams link = wifi_link();
  long n_vehicles = 40;
  double beacon_interval_s = 0.1;
  long message_size_bytes = 310;
  double crypto_time_s = 0.00223;
  double sim_duration_s = 12.1;  // beacons are generated in [0, duration)
  double drain_grace_s = 0.25;   // in-flight work may finish until
                                 // duration + grace, then counts in-flight
  std::uint64_t seed = 42;
  ServerParams edge{0.00223 / 3.0, 0.05, 40};
  ServerParams cloud{0.000223, 0.1, 0};
};

// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig& config);

enum class EventKind {
  BeaconGenerated,
  ChannelGranted,
  TransmissionDone,
  ProcessingDone,
  Delivered,
};

const char* to_string(EventKind k);

struct TraceEvent {
  std::int64_t t_ns = 0;
  EventKind kind = EventKind::BeaconGenerated;
  int vehicle_id = 0;
  std::int64_t message_id = 0;
};

struct ChannelGrant {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;  // exclusive occupancy end
};

// Optional observer output; events appear in execution order.
struct SimTrace {
  std::vector<TraceEvent> events;
  std::vector<ChannelGrant> channel_grants;
};

struct SimMetrics {
  Deployment deployment = Deployment::Physical;
  LinkKind link = LinkKind::WiFi;  // link actually simulated
  long n_vehicles = 0;

  std::vector<double> latencies_s;  // delivered messages, delivery order
  double mean_latency_s = 0.0;      // 0 when nothing was delivered
  double p95_latency_s = 0.0;       // nearest-rank percentile

  long generated = 0;
  long delivered = 0;
  long dropped = 0;
  long in_flight = 0;  // generated - delivered - dropped

  double server_busy_s = 0.0;  // all processing stations combined
  double channel_busy_s = 0.0;
  long verify_served = 0;
  long edge_served = 0;
  long cloud_served = 0;
  double verify_busy_s = 0.0;
  double edge_busy_s = 0.0;
  double cloud_busy_s = 0.0;
};

bool operator==(const SimMetrics& a, const SimMetrics& b);

// Integer-nanosecond discrete-event run; deterministic given config.
SimMetrics run_scenario(const ScenarioConfig& config,
                        SimTrace* trace = nullptr);

// Mean latency over delivered messages; throws std::domain_error when the
// run delivered nothing.
double latency_kpi(const SimMetrics& metrics);

// size * 8 / rate, in seconds.
double transmission_time(long message_size_bytes, const LinkParams& link);

// Analytic companion of the simulator's service scaling (seconds).
double processing_time(Deployment d, long n_vehicles,
                       const ScenarioConfig& config = {});

// 1 / processing_time (messages fully processed per second).
double computation_speed(Deployment d, long n_vehicles,
                         const ScenarioConfig& config = {});

}  // namespace twinvanet
