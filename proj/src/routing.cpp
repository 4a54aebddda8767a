#include "slar/routing.hpp"

#include <algorithm>
#include <array>

namespace slar::routing {

namespace {

constexpr std::array<Protocol, 4> kProtocols = {Protocol::Rlar, Protocol::Dlar,
                                                Protocol::SecureRlar, Protocol::SecureDlar};

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Rlar: return "rlar";
    case Protocol::Dlar: return "dlar";
    case Protocol::SecureRlar: return "secure_rlar";
    case Protocol::SecureDlar: return "secure_dlar";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (auto p : kProtocols) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::span<const Protocol> all_protocols() { return kProtocols; }

bool is_secure(Protocol p) { return p == Protocol::SecureRlar || p == Protocol::SecureDlar; }
bool is_zone_based(Protocol p) { return p == Protocol::Rlar || p == Protocol::SecureRlar; }

std::string_view to_string(DiscardReason r) {
  switch (r) {
    case DiscardReason::Duplicate: return "duplicate";
    case DiscardReason::OutOfZone: return "out-of-zone";
    case DiscardReason::Farther: return "farther";
    case DiscardReason::MitmDetected: return "mitm-detected";
  }
  return "?";
}

RouteRequest initiate_rreq(NodeState& node, NodeId dst, Protocol protocol, MsgId msg_id,
                           double now, std::optional<crypto::Commitment> commitment) {
  auto it = node.locations.find(dst);
  if (it == node.locations.end()) throw NoDestinationInfo();
  const LocationRecord& rec = it->second;

  RouteRequest req;
  req.msg_id = msg_id;
  req.src = node.id;
  req.dst = dst;
  if (is_zone_based(protocol)) {
    const auto ez = expected_zone(rec.pos, rec.speed, rec.time, std::max(now, rec.time));
    const auto zone = request_zone(node.pos, ez);
    req.fields = RlarFields{zone, node.pos, distance(node.pos, ez.center) <= ez.radius};
  } else {
    req.fields = DlarFields{distance(node.pos, rec.pos), rec.pos};
  }
  if (is_secure(protocol)) req.commitment = commitment;
  req.hop_trace.push_back(node.id);
  node.seen.insert(msg_id);
  return req;
}

bool eligible(const RouteRequest& req, Vec2 pos) {
  if (const auto* r = std::get_if<RlarFields>(&req.fields)) return contains(r->zone, pos);
  const auto& d = std::get<DlarFields>(req.fields);
  return distance(pos, d.dest_pos) <= d.dist;
}

RreqAction handle_rreq(NodeState& node, const RouteRequest& req, Protocol protocol, double now) {
  if (node.seen.contains(req.msg_id) || node.pending.contains(req.msg_id)) {
    return Discard{DiscardReason::Duplicate};
  }
  // An attacker tries to insert itself into every discovery it overhears,
  // whatever the protocol's forwarding rule says.
  const bool attacking =
      node.role == NodeRole::MaliciousMitm && node.id != req.src && node.id != req.dst;
  if (!attacking && !eligible(req, node.pos)) {
    return Discard{std::holds_alternative<RlarFields>(req.fields) ? DiscardReason::OutOfZone
                                                                  : DiscardReason::Farther};
  }
  if (is_secure(protocol)) {
    node.pending.insert(req.msg_id);
    return StartHandshake{req.hop_trace.back()};
  }
  return accept_rreq(node, req, now);
}

RreqAction accept_rreq(NodeState& node, const RouteRequest& req, double now,
                       std::optional<crypto::Commitment> own_commitment) {
  node.pending.erase(req.msg_id);
  node.seen.insert(req.msg_id);

  if (node.id == req.dst) {
    RouteReply rep;
    rep.msg_id = req.msg_id;
    rep.dst_time = now;
    rep.dst_speed = node.speed;
    rep.dst_pos = node.pos;
    rep.reverse_path.assign(req.hop_trace.rbegin(), req.hop_trace.rend());
    rep.reverse_path.insert(rep.reverse_path.begin(), node.id);
    return Reply{std::move(rep)};
  }

  RouteRequest fwd = req;
  fwd.hop_trace.push_back(node.id);
  if (auto* d = std::get_if<DlarFields>(&fwd.fields)) d->dist = distance(node.pos, d->dest_pos);
  fwd.commitment = own_commitment;
  return Forward{std::move(fwd)};
}

RreqAction reject_rreq(NodeState& node, const RouteRequest& req) {
  node.pending.erase(req.msg_id);
  return Discard{DiscardReason::MitmDetected};
}

RrepAction handle_rrep(NodeState& node, const RouteReply& rep,
                       const std::function<bool(NodeId)>& reachable) {
  const auto& path = rep.reverse_path;
  auto it = std::find(path.begin(), path.end(), node.id);
  if (it == path.end()) throw std::logic_error("handle_rrep: node is not on the reverse path");

  if (std::next(it) == path.end()) {
    node.locations[path.front()] = LocationRecord{rep.dst_pos, rep.dst_time, rep.dst_speed};
    return DeliverToSource{std::vector<NodeId>(path.rbegin(), path.rend())};
  }
  const NodeId next = *std::next(it);
  if (!reachable(next)) return BrokenReversePath{next};
  return ForwardReverse{next};
}

std::optional<NodeId> select_alternate_neighbor(std::span<const NeighborInfo> neighbors,
                                                Vec2 dest_pos, const std::set<NodeId>& excluded) {
  std::optional<NodeId> best;
  double best_dist = 0.0;
  for (const auto& n : neighbors) {
    if (!n.eligible || excluded.contains(n.id)) continue;
    const double d = distance(n.pos, dest_pos);
    if (!best || d < best_dist || (d == best_dist && n.id < *best)) {
      best = n.id;
      best_dist = d;
    }
  }
  return best;
}

crypto::Concatenation HandshakeParty::concatenation() const {
  return crypto::Concatenation{own_public, state.own_string};
}

crypto::Commitment HandshakeParty::commitment() const {
  return crypto::commit(concatenation(), nonce);
}

HandshakeParty make_party(NodeId id, const crypto::DhParams& params,
                          const crypto::PrivateKey& priv, std::size_t k, crypto::Rng& rng) {
  HandshakeParty p;
  p.id = id;
  p.own_public = crypto::gen_public(params, priv);
  p.state.own_private = priv;
  p.state.own_string = crypto::draw_random_string(k, rng);
  p.nonce = crypto::draw_nonce(rng);
  return p;
}

Attacker make_attacker(NodeId id, const crypto::DhParams& params, std::size_t k,
                       Substitution mode, crypto::Rng& rng) {
  Attacker a;
  a.id = id;
  a.own_private = crypto::draw_private(params, rng);
  a.own_public = crypto::gen_public(params, a.own_private);
  a.to_initiator = crypto::draw_random_string(k, rng);
  a.to_responder = crypto::draw_random_string(k, rng);
  a.nonce = crypto::draw_nonce(rng);
  a.mode = mode;
  return a;
}

HandshakeOutcome run_handshake(HandshakeParty& initiator, HandshakeParty& responder,
                               const std::optional<Attacker>& attacker,
                               const crypto::DhParams& params, const link::LinkTiming& timing) {
  const bool active = attacker && attacker->mode != Substitution::Passive;
  const bool both_sides = active && attacker->mode == Substitution::BothSides;

  // Commit phase: c_s travels with the route request.
  initiator.state.stage = HandshakeStage::SentCommit;
  crypto::Commitment to_responder_commit = initiator.commitment();
  crypto::Concatenation attacker_toward_responder;
  if (both_sides) {
    attacker_toward_responder = {attacker->own_public, attacker->to_responder};
    to_responder_commit = crypto::commit(attacker_toward_responder, attacker->nonce);
  }

  // Responder answers with m_n.
  crypto::Concatenation to_initiator_msg = responder.concatenation();
  if (active) {
    crypto::RandomString fake = attacker->to_initiator;
    if (fake == responder.state.own_string) {
      // A substitution has to change the value it replaces.
      auto bits = fake.bits.bits();
      bits.front() ^= 1u;
      fake.bits = crypto::BitString(std::move(bits));
    }
    to_initiator_msg = {attacker->own_public, fake};
  }
  initiator.state.peer_concat = to_initiator_msg;
  initiator.state.stage = HandshakeStage::GotPeerMsg;

  // Open phase: w = (m_s, nonce).
  crypto::OpenParam w{initiator.concatenation(), initiator.nonce};
  if (both_sides) w = crypto::OpenParam{attacker_toward_responder, attacker->nonce};
  initiator.state.stage = HandshakeStage::SentOpen;

  const double delay = 2.0 * timing.per_hop_tx + timing.oob;
  try {
    responder.state.peer_concat = crypto::open_verify(to_responder_commit, w);
  } catch (const crypto::CommitmentMismatch&) {
    initiator.state.stage = HandshakeStage::Detected;
    responder.state.stage = HandshakeStage::Detected;
    return MitmDetected{2.0 * timing.per_hop_tx};
  }
  responder.state.stage = HandshakeStage::GotPeerMsg;

  const auto s_initiator = crypto::auth_string(initiator.state.own_string,
                                               initiator.state.peer_concat->random_string);
  const auto s_responder = crypto::auth_string(responder.state.peer_concat->random_string,
                                               responder.state.own_string);

  const link::OobChannel oob(initiator.id, responder.id);
  const auto cmp = link::oob_compare(oob, s_initiator, s_responder, timing);
  if (!cmp.match) {
    initiator.state.stage = HandshakeStage::Detected;
    responder.state.stage = HandshakeStage::Detected;
    initiator.state.shared.reset();
    responder.state.shared.reset();
    return MitmDetected{delay};
  }

  initiator.state.shared = crypto::shared_key(params, initiator.state.peer_concat->public_key,
                                              initiator.state.own_private);
  responder.state.shared = crypto::shared_key(params, responder.state.peer_concat->public_key,
                                              responder.state.own_private);
  initiator.state.stage = HandshakeStage::Verified;
  responder.state.stage = HandshakeStage::Verified;
  return HandshakeEstablished{*initiator.state.shared, *responder.state.shared, delay};
}

AttackEffect attacker_act(NodeRole role, Protocol protocol, Traffic traffic, bool flow_endpoint) {
  if (role != NodeRole::MaliciousMitm || flow_endpoint) return AttackEffect::None;
  switch (traffic) {
    case Traffic::Handshake:
      return is_secure(protocol) ? AttackEffect::Substitute : AttackEffect::None;
    case Traffic::Data:
      return AttackEffect::Drop;
    case Traffic::RouteRequest:
      return is_secure(protocol) ? AttackEffect::None : AttackEffect::SpoofReply;
    case Traffic::RouteReply:
      return AttackEffect::None;
  }
  return AttackEffect::None;
}

RouteReply spoof_reply(const NodeState& attacker, const RouteRequest& req, double now) {
  RouteReply rep;
  rep.msg_id = req.msg_id;
  rep.dst_time = now;
  rep.dst_speed = attacker.speed;
  rep.dst_pos = attacker.pos;
  rep.reverse_path.push_back(req.dst);
  rep.reverse_path.push_back(attacker.id);
  rep.reverse_path.insert(rep.reverse_path.end(), req.hop_trace.rbegin(), req.hop_trace.rend());
  return rep;
}

}  // namespace slar::routing
