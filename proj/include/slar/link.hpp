#pragma once

// Pairwise Wi-Fi Direct sessions, modelled as a timed state machine
// (discovery, group-owner negotiation, WPS, address configuration), and the
// tamper-proof out-of-band channel used for SAS comparison.

#include <stdexcept>
#include <string_view>
#include <utility>

#include "slar/crypto.hpp"
#include "slar/node_id.hpp"

namespace slar::link {

enum class WfdPhase { Idle, Discovery, GoNegotiation, Wps, AddrConfig, Established };

std::string_view to_string(WfdPhase phase);

/// Delays in seconds.
struct LinkTiming {
  double discovery = 0.002;
  double go_negotiation = 0.002;
  double wps = 0.003;
  double addr_config = 0.003;
  double per_hop_tx = 0.001;
  double oob = 0.002;

  double session_total() const { return discovery + go_negotiation + wps + addr_config; }
  void validate() const;
};

class OutOfRange : public std::runtime_error {
 public:
  OutOfRange() : std::runtime_error("endpoints are outside transmission range") {}
};

class WfdSession {
 public:
  WfdSession(NodeId a, NodeId b);

  NodeId endpoint_a() const { return a_; }
  NodeId endpoint_b() const { return b_; }
  WfdPhase phase() const { return phase_; }
  /// Meaningful once negotiation has run.
  NodeId group_owner() const { return group_owner_; }
  bool has_group_owner() const { return phase_ >= WfdPhase::GoNegotiation; }

  /// Moves to the next phase and returns the time that phase takes.
  /// Throws std::logic_error once Established.
  double advance(const LinkTiming& timing);
  void reset() { phase_ = WfdPhase::Idle; }

 private:
  NodeId a_;
  NodeId b_;
  NodeId group_owner_{};
  WfdPhase phase_ = WfdPhase::Idle;
};

struct Established {
  WfdSession session;
  double total_delay;
};

/// Runs every phase in order. The smaller id becomes group owner.
/// Throws OutOfRange when `separation > tx_range`, std::invalid_argument
/// when a == b.
Established establish(NodeId a, NodeId b, double separation, double tx_range,
                      const LinkTiming& timing);

class OobChannel {
 public:
  OobChannel(NodeId a, NodeId b) : a_(a), b_(b) {}
  NodeId endpoint_a() const { return a_; }
  NodeId endpoint_b() const { return b_; }

 private:
  NodeId a_;
  NodeId b_;
};

struct OobResult {
  bool match;
  double delay;
};

/// Compares the strings each endpoint computed locally. Nothing in the
/// in-band path can reach these values.
OobResult oob_compare(const OobChannel& ch, const crypto::AuthString& s_a,
                      const crypto::AuthString& s_b, const LinkTiming& timing);

}  // namespace slar::link
