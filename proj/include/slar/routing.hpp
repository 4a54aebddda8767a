#pragma once

// Route discovery for request-zone LAR (RLAR) and distance-based LAR (DLAR),
// plain and secure. Handlers are deterministic transition functions over a
// node's state; the engine owns scheduling and delivery.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "slar/crypto.hpp"
#include "slar/geo.hpp"
#include "slar/link.hpp"
#include "slar/node_id.hpp"

namespace slar::routing {

using MsgId = std::uint64_t;

enum class Protocol { Rlar, Dlar, SecureRlar, SecureDlar };

std::string_view to_string(Protocol p);
/// Accepts "rlar", "dlar", "secure_rlar", "secure_dlar".
std::optional<Protocol> parse_protocol(std::string_view name);
std::span<const Protocol> all_protocols();
bool is_secure(Protocol p);
bool is_zone_based(Protocol p);

enum class NodeRole { Honest, MaliciousMitm };

struct RlarFields {
  RequestZone zone;
  Vec2 src_pos;
  bool src_in_zone = false;
};

struct DlarFields {
  double dist = 0.0;
  Vec2 dest_pos;
};

struct RouteRequest {
  MsgId msg_id = 0;
  NodeId src;
  NodeId dst;
  std::variant<RlarFields, DlarFields> fields;
  std::optional<crypto::Commitment> commitment;
  std::vector<NodeId> hop_trace;
};

struct RouteReply {
  MsgId msg_id = 0;
  double dst_time = 0.0;
  double dst_speed = 0.0;
  Vec2 dst_pos;
  std::vector<NodeId> reverse_path;
};

/// Where a node last learned another node to be.
struct LocationRecord {
  Vec2 pos;
  double time = 0.0;
  double speed = 0.0;
};

class NoDestinationInfo : public std::runtime_error {
 public:
  NoDestinationInfo() : std::runtime_error("no location record for destination") {}
};

class DuplicateCache {
 public:
  bool contains(MsgId id) const { return seen_.contains(id); }
  void insert(MsgId id) { seen_.insert(id); }
  std::size_t size() const { return seen_.size(); }

 private:
  std::unordered_set<MsgId> seen_;
};

struct NodeState {
  NodeId id;
  NodeRole role = NodeRole::Honest;
  Vec2 pos;
  double speed = 0.0;
  DuplicateCache seen;
  /// Requests accepted but waiting on a handshake with the previous hop.
  std::unordered_set<MsgId> pending;
  std::unordered_map<NodeId, LocationRecord> locations;
};

// -- request handling -------------------------------------------------------

/// Builds a fresh request from `node` to `dst` and marks it seen at the
/// source. RLAR requests carry the request zone derived from the last
/// location record; DLAR requests carry the source's distance to it.
RouteRequest initiate_rreq(NodeState& node, NodeId dst, Protocol protocol, MsgId msg_id,
                           double now, std::optional<crypto::Commitment> commitment = {});

enum class DiscardReason { Duplicate, OutOfZone, Farther, MitmDetected };
std::string_view to_string(DiscardReason r);

struct Discard {
  DiscardReason reason;
};
struct Forward {
  RouteRequest request;
};
struct Reply {
  RouteReply reply;
};
struct StartHandshake {
  NodeId with;
};
using RreqAction = std::variant<Discard, Forward, Reply, StartHandshake>;

/// Zone or distance test only; no duplicate check.
bool eligible(const RouteRequest& req, Vec2 pos);

/// Plain modes decide immediately. Secure modes run the eligibility test,
/// park the request as pending and ask for a handshake with the previous
/// hop; the engine then calls accept_rreq or reject_rreq.
RreqAction handle_rreq(NodeState& node, const RouteRequest& req, Protocol protocol, double now);

/// Commits to a request: Forward (trace extended, DLAR distance rewritten,
/// commitment replaced) or Reply when this node is the destination.
RreqAction accept_rreq(NodeState& node, const RouteRequest& req, double now,
                       std::optional<crypto::Commitment> own_commitment = {});

/// Drops a pending request after a failed handshake.
RreqAction reject_rreq(NodeState& node, const RouteRequest& req);

// -- replies ----------------------------------------------------------------

struct ForwardReverse {
  NodeId next;
};
struct DeliverToSource {
  std::vector<NodeId> route;
};
struct BrokenReversePath {
  NodeId unreachable;
};
using RrepAction = std::variant<ForwardReverse, DeliverToSource, BrokenReversePath>;

/// `reachable(next)` tells whether this node can currently transmit to
/// `next`. At the source the route is installed and the destination's
/// location record refreshed. Throws std::logic_error if the node is not on
/// the reverse path.
RrepAction handle_rrep(NodeState& node, const RouteReply& rep,
                       const std::function<bool(NodeId)>& reachable);

// -- alternates after a failed handshake ------------------------------------

struct NeighborInfo {
  NodeId id;
  Vec2 pos;
  bool eligible = true;
};

std::optional<NodeId> select_alternate_neighbor(std::span<const NeighborInfo> neighbors,
                                                Vec2 dest_pos, const std::set<NodeId>& excluded);

// -- handshake --------------------------------------------------------------

enum class HandshakeStage { SentCommit, GotPeerMsg, SentOpen, Verified, Detected };

struct HandshakeState {
  HandshakeStage stage = HandshakeStage::SentCommit;
  crypto::PrivateKey own_private;
  crypto::RandomString own_string;
  std::optional<crypto::Concatenation> peer_concat;
  std::optional<crypto::SharedKey> shared;
};

/// One endpoint's material for a single handshake.
struct HandshakeParty {
  NodeId id;
  crypto::PublicKey own_public;
  crypto::Bytes nonce;
  HandshakeState state;

  crypto::Concatenation concatenation() const;
  /// Commitment the initiator sends along with its route request.
  crypto::Commitment commitment() const;
};

HandshakeParty make_party(NodeId id, const crypto::DhParams& params,
                          const crypto::PrivateKey& priv, std::size_t k, crypto::Rng& rng);

enum class Substitution {
  /// Relays every handshake message unmodified.
  Passive,
  /// Replaces the responder's concatenation on its way to the initiator,
  /// with a random string that differs from the intercepted one.
  ResponderMessage,
  /// Also replaces the initiator's commitment and opening with its own.
  BothSides,
};

struct Attacker {
  NodeId id;
  crypto::PrivateKey own_private;
  crypto::PublicKey own_public;
  crypto::RandomString to_initiator;
  crypto::RandomString to_responder;
  crypto::Bytes nonce;
  Substitution mode = Substitution::ResponderMessage;
};

Attacker make_attacker(NodeId id, const crypto::DhParams& params, std::size_t k,
                       Substitution mode, crypto::Rng& rng);

struct HandshakeEstablished {
  crypto::SharedKey initiator_key;
  crypto::SharedKey responder_key;
  double delay;
};
struct MitmDetected {
  double delay;
};
using HandshakeOutcome = std::variant<HandshakeEstablished, MitmDetected>;

/// Commit, peer message, open, SAS computation on both sides, out-of-band
/// comparison and key derivation. Both parties' states are updated.
HandshakeOutcome run_handshake(HandshakeParty& initiator, HandshakeParty& responder,
                               const std::optional<Attacker>& attacker,
                               const crypto::DhParams& params, const link::LinkTiming& timing);

// -- attacker ---------------------------------------------------------------

enum class Traffic { Handshake, Data, RouteRequest, RouteReply };
enum class AttackEffect { None, Substitute, Drop, SpoofReply };

/// What a node in `role` does to traffic it relays. Malicious nodes act
/// honestly for flows they are an endpoint of.
///
/// Without the security association an attacker answers every route request
/// it overhears as if it reached the destination, pulling the flow through
/// itself, then drops the data. In secure modes the same attacker
/// must first get through the per-hop handshake, where it substitutes key
/// material.
AttackEffect attacker_act(NodeRole role, Protocol protocol, Traffic traffic, bool flow_endpoint);

/// Reply an attacker fabricates for `req`: the reverse path claims the
/// destination sits one hop past the attacker.
RouteReply spoof_reply(const NodeState& attacker, const RouteRequest& req, double now);

}  // namespace slar::routing
