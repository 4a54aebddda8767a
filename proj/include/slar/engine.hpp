#pragma once

// Seeded discrete-event simulation of N/2 flows (node i -> node i + N/2)
// over a mobile network running one of the four LAR variants.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "slar/geo.hpp"
#include "slar/link.hpp"
#include "slar/mobility.hpp"
#include "slar/node_id.hpp"
#include "slar/routing.hpp"

namespace slar::engine {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ReplyMode { ReversePath, Flood };

struct Scenario {
  int nodes = 10;
  double duration = 10.0;       // seconds of traffic per flow
  double drain = 1.0;           // extra time for in-flight packets
  double send_rate = 50.0;      // packets per second per flow
  int packets_per_flow = 0;     // cap on generated packets; 0 = no cap
  mobility::MobilityConfig mobility;
  std::optional<int> malicious_count;  // overrides malicious_fraction
  double malicious_fraction = 0.1;
  routing::Protocol protocol = routing::Protocol::SecureDlar;
  double tx_range = 200.0;
  link::LinkTiming timing;
  std::size_t string_bits = 10;
  routing::Substitution attack = routing::Substitution::ResponderMessage;
  ReplyMode reply_mode = ReplyMode::ReversePath;
  double mobility_tick = 0.010;
  double route_timeout = 0.100;
  double discovery_timeout = 0.250;
  // How long a packet may wait at its source for a route before a failed
  // discovery drops it.
  double buffer_lifetime = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
  int resolved_malicious() const;
};

struct FlowMetrics {
  NodeId src;
  NodeId dst;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  double delay_sum = 0.0;  // seconds
  std::uint64_t mitm_detections = 0;
  std::uint64_t route_rediscoveries = 0;

  double delivery_pct() const;
  std::optional<double> avg_total_delay() const;
};

struct MetricsReport {
  std::vector<FlowMetrics> flows;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  double delivery_pct = 0.0;
  std::optional<double> avg_total_delay;  // seconds, absent if nothing delivered
  std::uint64_t mitm_detections = 0;
  std::uint64_t route_rediscoveries = 0;

  /// Stable textual form; equal reports serialize to equal bytes.
  std::string to_text() const;
};

/// Raw per-packet and per-flow record collected while a scenario runs.
struct PacketRecord {
  std::size_t flow = 0;
  double send_time = 0.0;
  std::optional<double> delivery_time;
  // Start of the charged delay. Route discovery is billed to the packet that
  // opened the discovery epoch; packets queued behind it are charged from
  // route installation.
  std::optional<double> charged_from;

  double delay() const { return *delivery_time - charged_from.value_or(send_time); }
};

struct RawLog {
  std::vector<NodeId> flow_src;
  std::vector<NodeId> flow_dst;
  std::vector<PacketRecord> packets;
  std::vector<std::uint64_t> mitm_detections;  // per flow
  std::vector<std::uint64_t> rediscoveries;    // per flow
};

MetricsReport compute_metrics(const RawLog& log);

/// Poisson send times in [0, duration].
std::vector<double> gen_traffic(double rate, double duration, std::mt19937_64& rng);

/// adjacency[i] lists every j != i with distance <= tx_range, ascending.
std::vector<std::vector<std::uint32_t>> neighbor_discovery(const std::vector<Vec2>& positions,
                                                           double tx_range);

/// Hooks for observing protocol decisions; used by tests and tracing.
struct Observer {
  virtual ~Observer() = default;
  /// A node accepted a request and rebroadcasts `forwarded`. `node_pos` is
  /// the forwarder's position when it decided.
  virtual void on_forward(double /*time*/, NodeId /*node*/, Vec2 /*node_pos*/,
                          const routing::RouteRequest& /*received*/,
                          const routing::RouteRequest& /*forwarded*/) {}
  virtual void on_event(double /*time*/, NodeId /*node*/, std::string_view /*action*/,
                        std::string_view /*reason*/) {}
};

/// Runs one scenario. Deterministic for a fixed scenario (including seed).
/// Throws ConfigError when the scenario is invalid.
MetricsReport run(const Scenario& scenario, Observer* observer = nullptr);

/// Writes one line per protocol action: time, node, action, reason.
class TraceWriter : public Observer {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void on_event(double time, NodeId node, std::string_view action,
                std::string_view reason) override;

 private:
  std::ostream& out_;
};

}  // namespace slar::engine
