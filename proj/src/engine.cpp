#include "slar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <queue>
#include <unordered_set>
#include <utility>
#include <variant>

#include <fmt/format.h>

#include "slar/crypto.hpp"

namespace slar::engine {

namespace {

using routing::MsgId;
using routing::RouteReply;
using routing::RouteRequest;

// Independent random streams derived from the scenario seed.
enum class Stream : std::uint64_t { Mobility = 1, Traffic = 2, Crypto = 3, Roles = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

using RequestPtr = std::shared_ptr<const RouteRequest>;
using ReplyPtr = std::shared_ptr<const RouteReply>;
using RoutePtr = std::shared_ptr<const std::vector<NodeId>>;

struct EvTick {};
struct EvPacketSend {
  std::size_t packet;
};
struct EvRreq {
  std::uint32_t to;
  std::uint32_t from;
  RequestPtr req;
};
struct EvHandshakeDone {
  std::uint32_t node;
  std::uint32_t peer;
  RequestPtr req;
  bool established;
};
struct EvRrep {
  std::uint32_t to;
  ReplyPtr rep;
  bool flooded;
};
struct EvData {
  std::size_t packet;
  RoutePtr route;
  std::size_t hop;
  std::uint64_t epoch;
};
struct EvRouteTimeout {
  std::size_t flow;
  std::uint64_t epoch;
};
struct EvDiscoveryTimeout {
  std::size_t flow;
  MsgId msg;
};

using Payload = std::variant<EvTick, EvPacketSend, EvRreq, EvHandshakeDone, EvRrep, EvData,
                             EvRouteTimeout, EvDiscoveryTimeout>;

struct Event {
  double time;
  std::uint64_t seq;
  Payload payload;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Flow {
  NodeId src;
  NodeId dst;
  RoutePtr route;
  std::uint64_t route_epoch = 0;
  bool timeout_pending = false;
  std::optional<MsgId> discovering;
  std::vector<std::size_t> buffered;
  std::uint64_t discoveries = 0;
};

using NodeMsg = std::pair<std::uint32_t, MsgId>;

class Simulation {
 public:
  Simulation(const Scenario& s, Observer* observer)
      : s_(s),
        observer_(observer),
        n_(static_cast<std::uint32_t>(s.nodes)),
        end_time_(s.duration + s.drain),
        crypto_rng_(make_stream(s.seed, Stream::Crypto)) {}

  MetricsReport run();

 private:
  void setup();
  void schedule(double time, Payload payload) {
    if (time > end_time_) return;
    queue_.push(Event{time, seq_++, std::move(payload)});
  }

  void handle(const EvTick&);
  void handle(const EvPacketSend&);
  void handle(const EvRreq&);
  void handle(const EvHandshakeDone&);
  void handle(const EvRrep&);
  void handle(const EvData&);
  void handle(const EvRouteTimeout&);
  void handle(const EvDiscoveryTimeout&);

  void refresh_topology();
  bool adjacent(std::uint32_t a, std::uint32_t b) const { return adj_[a * n_ + b] != 0; }
  double link_delay(std::uint32_t a, std::uint32_t b);
  bool flow_endpoint(std::uint32_t node, MsgId msg) const;

  void start_discovery(std::size_t flow_idx);
  void broadcast(std::uint32_t from, const RequestPtr& req);
  void apply(std::uint32_t node, routing::RreqAction action, const RouteRequest& received);
  void send_reply(std::uint32_t from, const ReplyPtr& rep);
  void flood_reply(std::uint32_t from, const ReplyPtr& rep);
  void step_reply(std::uint32_t at, const ReplyPtr& rep);
  void install_route(MsgId msg, std::vector<NodeId> route);
  void send_data(std::size_t packet, const RoutePtr& route, std::size_t hop, std::uint64_t epoch);

  void note(std::uint32_t node, std::string_view action, std::string_view reason = {}) {
    if (observer_) observer_->on_event(now_, NodeId{node}, action, reason);
  }

  const Scenario& s_;
  Observer* observer_;
  std::uint32_t n_;
  double end_time_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;

  std::vector<routing::NodeState> nodes_;
  std::vector<mobility::Kinematics> kinematics_;
  std::vector<std::mt19937_64> mobility_rng_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> sessions_;

  crypto::DhParams params_;
  std::vector<crypto::PrivateKey> private_keys_;
  std::mt19937_64 crypto_rng_;

  std::vector<Flow> flows_;
  std::map<MsgId, std::size_t> msg_flow_;
  MsgId next_msg_ = 1;
  std::map<NodeMsg, routing::HandshakeParty> parties_;
  std::map<NodeMsg, std::set<NodeId>> offered_;
  std::map<NodeMsg, std::set<NodeId>> failed_;
  std::vector<std::unordered_set<MsgId>> reply_seen_;

  RawLog log_;
};

void Simulation::setup() {
  const auto& mob = s_.mobility;
  nodes_.resize(n_);
  kinematics_.resize(n_);
  mobility_rng_.reserve(n_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    mobility_rng_.push_back(make_stream(s_.seed, Stream::Mobility, i));
    kinematics_[i] = mobility::sample_initial(mob, mobility_rng_[i]);
    nodes_[i].id = NodeId{i};
    nodes_[i].pos = kinematics_[i].pos;
    nodes_[i].speed = kinematics_[i].speed;
  }

  // Malicious roles: a seeded permutation prefix, so a larger count only
  // adds attackers to the smaller count's set.
  std::vector<std::uint32_t> order(n_);
  std::iota(order.begin(), order.end(), 0u);
  auto role_rng = make_stream(s_.seed, Stream::Roles);
  std::shuffle(order.begin(), order.end(), role_rng);
  const int malicious = s_.resolved_malicious();
  for (int i = 0; i < malicious; ++i) nodes_[order[i]].role = routing::NodeRole::MaliciousMitm;

  params_ = crypto::draw_params(crypto_rng_);
  private_keys_.reserve(n_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    private_keys_.push_back(crypto::draw_private(params_, crypto_rng_));
  }

  reply_seen_.resize(n_);
  adj_.assign(std::size_t{n_} * n_, 0);
  refresh_topology();

  const std::uint32_t half = n_ / 2;
  flows_.resize(half);
  log_.flow_src.resize(half);
  log_.flow_dst.resize(half);
  log_.mitm_detections.assign(half, 0);
  log_.rediscoveries.assign(half, 0);
  for (std::uint32_t f = 0; f < half; ++f) {
    Flow& flow = flows_[f];
    flow.src = NodeId{f};
    flow.dst = NodeId{f + half};
    log_.flow_src[f] = flow.src;
    log_.flow_dst[f] = flow.dst;
    // Bootstrap: the source knows where its destination starts and how fast
    // it moves.
    const auto& d = kinematics_[flow.dst.value];
    nodes_[f].locations[flow.dst] = routing::LocationRecord{d.pos, 0.0, d.speed};

    auto traffic_rng = make_stream(s_.seed, Stream::Traffic, f);
    auto times = gen_traffic(s_.send_rate, s_.duration, traffic_rng);
    if (s_.packets_per_flow > 0 && times.size() > static_cast<std::size_t>(s_.packets_per_flow)) {
      times.resize(static_cast<std::size_t>(s_.packets_per_flow));
    }
    for (double t : times) {
      log_.packets.push_back(PacketRecord{f, t, std::nullopt, std::nullopt});
    }
  }
  for (std::size_t p = 0; p < log_.packets.size(); ++p) {
    schedule(log_.packets[p].send_time, EvPacketSend{p});
  }
  schedule(s_.mobility_tick, EvTick{});
}

void Simulation::refresh_topology() {
  std::vector<Vec2> positions(n_);
  for (std::uint32_t i = 0; i < n_; ++i) positions[i] = nodes_[i].pos;
  neighbors_ = neighbor_discovery(positions, s_.tx_range);
  std::fill(adj_.begin(), adj_.end(), 0);
  for (std::uint32_t i = 0; i < n_; ++i) {
    for (auto j : neighbors_[i]) adj_[i * n_ + j] = 1;
  }
  // Sessions live until the pair leaves range.
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (!adjacent(it->first, it->second)) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

double Simulation::link_delay(std::uint32_t a, std::uint32_t b) {
  const auto key = std::minmax(a, b);
  double delay = s_.timing.per_hop_tx;
  if (sessions_.insert({key.first, key.second}).second) {
    delay += link::establish(NodeId{a}, NodeId{b}, distance(nodes_[a].pos, nodes_[b].pos),
                             s_.tx_range, s_.timing)
                 .total_delay;
  }
  return delay;
}

bool Simulation::flow_endpoint(std::uint32_t node, MsgId msg) const {
  const Flow& f = flows_[msg_flow_.at(msg)];
  return f.src.value == node || f.dst.value == node;
}

MetricsReport Simulation::run() {
  setup();
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    std::visit([this](const auto& payload) { handle(payload); }, ev.payload);
  }
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    log_.rediscoveries[f] = flows_[f].discoveries > 0 ? flows_[f].discoveries - 1 : 0;
  }
  return compute_metrics(log_);
}

void Simulation::handle(const EvTick&) {
  for (std::uint32_t i = 0; i < n_; ++i) {
    kinematics_[i] =
        mobility::advance(kinematics_[i], s_.mobility_tick, s_.mobility, mobility_rng_[i]);
    nodes_[i].pos = kinematics_[i].pos;
  }
  refresh_topology();
  schedule(now_ + s_.mobility_tick, EvTick{});
}

void Simulation::handle(const EvPacketSend& ev) {
  Flow& flow = flows_[log_.packets[ev.packet].flow];
  if (flow.route) {
    send_data(ev.packet, flow.route, 0, flow.route_epoch);
    return;
  }
  flow.buffered.push_back(ev.packet);
  if (!flow.discovering) start_discovery(log_.packets[ev.packet].flow);
}

void Simulation::start_discovery(std::size_t flow_idx) {
  Flow& flow = flows_[flow_idx];
  const MsgId msg = next_msg_++;
  msg_flow_[msg] = flow_idx;
  flow.discovering = msg;
  ++flow.discoveries;

  routing::NodeState& src = nodes_[flow.src.value];
  std::optional<crypto::Commitment> commitment;
  if (routing::is_secure(s_.protocol)) {
    auto party = routing::make_party(src.id, params_, private_keys_[src.id.value], s_.string_bits,
                                     crypto_rng_);
    commitment = party.commitment();
    parties_.emplace(NodeMsg{src.id.value, msg}, std::move(party));
  }
  auto req = std::make_shared<const RouteRequest>(
      routing::initiate_rreq(src, flow.dst, s_.protocol, msg, now_, commitment));
  note(src.id.value, flow.discoveries > 1 ? "rediscover" : "discover", fmt::format("msg={}", msg));
  broadcast(src.id.value, req);
  schedule(now_ + s_.discovery_timeout, EvDiscoveryTimeout{flow_idx, msg});
}

void Simulation::broadcast(std::uint32_t from, const RequestPtr& req) {
  auto& offered = offered_[NodeMsg{from, req->msg_id}];
  for (auto to : neighbors_[from]) {
    offered.insert(NodeId{to});
    schedule(now_ + link_delay(from, to), EvRreq{to, from, req});
  }
}

void Simulation::handle(const EvRreq& ev) {
  routing::NodeState& node = nodes_[ev.to];
  auto action = routing::handle_rreq(node, *ev.req, s_.protocol, now_);
  if (const auto* hs = std::get_if<routing::StartHandshake>(&action)) {
    const std::uint32_t peer = hs->with.value;
    routing::HandshakeParty initiator = parties_.at(NodeMsg{peer, ev.req->msg_id});
    auto responder = routing::make_party(node.id, params_, private_keys_[ev.to], s_.string_bits,
                                         crypto_rng_);
    std::optional<routing::Attacker> attacker;
    for (std::uint32_t side : {ev.to, peer}) {
      const auto effect = routing::attacker_act(nodes_[side].role, s_.protocol,
                                                routing::Traffic::Handshake,
                                                flow_endpoint(side, ev.req->msg_id));
      if (effect == routing::AttackEffect::Substitute && !attacker) {
        attacker = routing::make_attacker(NodeId{side}, params_, s_.string_bits, s_.attack,
                                          crypto_rng_);
      }
    }
    note(ev.to, "handshake", fmt::format("peer={} msg={}", peer, ev.req->msg_id));
    const auto outcome =
        routing::run_handshake(initiator, responder, attacker, params_, s_.timing);
    const bool ok = std::holds_alternative<routing::HandshakeEstablished>(outcome);
    const double delay = ok ? std::get<routing::HandshakeEstablished>(outcome).delay
                            : std::get<routing::MitmDetected>(outcome).delay;
    schedule(now_ + delay, EvHandshakeDone{ev.to, peer, ev.req, ok});
    return;
  }
  if (std::holds_alternative<routing::Forward>(action) &&
      routing::attacker_act(node.role, s_.protocol, routing::Traffic::RouteRequest,
                            flow_endpoint(ev.to, ev.req->msg_id)) ==
          routing::AttackEffect::SpoofReply) {
    note(ev.to, "spoof-reply", fmt::format("msg={}", ev.req->msg_id));
    step_reply(ev.to, std::make_shared<const RouteReply>(routing::spoof_reply(node, *ev.req, now_)));
    return;
  }
  apply(ev.to, std::move(action), *ev.req);
}

void Simulation::handle(const EvHandshakeDone& ev) {
  routing::NodeState& node = nodes_[ev.node];
  const RouteRequest& req = *ev.req;
  if (ev.established) {
    // The node may have moved during the handshake; the forwarding rule is
    // applied again at its current position.
    const bool attacking = node.role == routing::NodeRole::MaliciousMitm && node.id != req.src &&
                           node.id != req.dst;
    if (!attacking && req.dst != node.id && !routing::eligible(req, node.pos)) {
      node.pending.erase(req.msg_id);
      note(ev.node, "discard", "moved-out");
      return;
    }
    std::optional<crypto::Commitment> commitment;
    if (req.dst != node.id) {
      auto party = routing::make_party(node.id, params_, private_keys_[ev.node], s_.string_bits,
                                       crypto_rng_);
      commitment = party.commitment();
      parties_.insert_or_assign(NodeMsg{ev.node, req.msg_id}, std::move(party));
    }
    apply(ev.node, routing::accept_rreq(node, req, now_, commitment), req);
    return;
  }

  apply(ev.node, routing::reject_rreq(node, req), req);
  ++log_.mitm_detections[msg_flow_.at(req.msg_id)];

  // The upstream node drops the failed neighbour and re-offers the request
  // to the best remaining eligible one it has not offered it to yet.
  const NodeMsg key{ev.peer, req.msg_id};
  auto& failed = failed_[key];
  failed.insert(node.id);
  std::set<NodeId> excluded = failed;
  const auto& offered = offered_[key];
  excluded.insert(offered.begin(), offered.end());
  for (NodeId hop : req.hop_trace) excluded.insert(hop);

  std::vector<routing::NeighborInfo> candidates;
  for (auto j : neighbors_[ev.peer]) {
    candidates.push_back({NodeId{j}, nodes_[j].pos, routing::eligible(req, nodes_[j].pos)});
  }
  const Vec2 target = nodes_[ev.peer].locations.contains(req.dst)
                          ? nodes_[ev.peer].locations.at(req.dst).pos
                          : std::visit(
                                [](const auto& f) {
                                  using T = std::decay_t<decltype(f)>;
                                  if constexpr (std::is_same_v<T, routing::DlarFields>) {
                                    return f.dest_pos;
                                  } else {
                                    return Vec2{(f.zone.min_corner.x + f.zone.max_corner.x) / 2,
                                                (f.zone.min_corner.y + f.zone.max_corner.y) / 2};
                                  }
                                },
                                req.fields);
  if (auto alt = routing::select_alternate_neighbor(candidates, target, excluded)) {
    offered_[key].insert(*alt);
    note(ev.peer, "reoffer", fmt::format("to={} msg={}", alt->value, req.msg_id));
    schedule(now_ + link_delay(ev.peer, alt->value), EvRreq{alt->value, ev.peer, ev.req});
  }
}

void Simulation::apply(std::uint32_t node, routing::RreqAction action,
                       const RouteRequest& received) {
  std::visit(
      [&](auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, routing::Discard>) {
          note(node, "discard", routing::to_string(a.reason));
        } else if constexpr (std::is_same_v<T, routing::Forward>) {
          note(node, "forward", fmt::format("msg={}", a.request.msg_id));
          if (observer_) observer_->on_forward(now_, NodeId{node}, nodes_[node].pos, received,
                                               a.request);
          broadcast(node, std::make_shared<const RouteRequest>(std::move(a.request)));
        } else if constexpr (std::is_same_v<T, routing::Reply>) {
          note(node, "reply", fmt::format("msg={}", a.reply.msg_id));
          send_reply(node, std::make_shared<const RouteReply>(std::move(a.reply)));
        }
      },
      action);
}

void Simulation::send_reply(std::uint32_t from, const ReplyPtr& rep) {
  if (s_.reply_mode == ReplyMode::Flood) {
    flood_reply(from, rep);
    return;
  }
  step_reply(from, rep);
}

void Simulation::step_reply(std::uint32_t at, const ReplyPtr& rep) {
  auto action = routing::handle_rrep(nodes_[at], *rep, [&](NodeId next) {
    return adjacent(at, next.value);
  });
  if (const auto* fwd = std::get_if<routing::ForwardReverse>(&action)) {
    schedule(now_ + link_delay(at, fwd->next.value), EvRrep{fwd->next.value, rep, false});
  } else if (auto* done = std::get_if<routing::DeliverToSource>(&action)) {
    note(at, "route-installed", fmt::format("msg={} hops={}", rep->msg_id, done->route.size() - 1));
    install_route(rep->msg_id, std::move(done->route));
  } else {
    note(at, "broken-reverse-path", fmt::format("msg={}", rep->msg_id));
    flood_reply(at, rep);
  }
}

void Simulation::flood_reply(std::uint32_t from, const ReplyPtr& rep) {
  if (!reply_seen_[from].insert(rep->msg_id).second) return;
  for (auto to : neighbors_[from]) {
    schedule(now_ + link_delay(from, to), EvRrep{to, rep, true});
  }
}

void Simulation::handle(const EvRrep& ev) {
  if (!ev.flooded) {
    step_reply(ev.to, ev.rep);
    return;
  }
  if (NodeId{ev.to} == ev.rep->reverse_path.back()) {
    if (reply_seen_[ev.to].insert(ev.rep->msg_id).second) step_reply(ev.to, ev.rep);
    return;
  }
  flood_reply(ev.to, ev.rep);
}

void Simulation::install_route(MsgId msg, std::vector<NodeId> route) {
  Flow& flow = flows_[msg_flow_.at(msg)];
  // Late replies to an abandoned discovery are ignored.
  if (flow.discovering != msg) return;
  flow.discovering.reset();
  flow.route = std::make_shared<const std::vector<NodeId>>(std::move(route));
  ++flow.route_epoch;
  flow.timeout_pending = false;
  auto pending = std::move(flow.buffered);
  flow.buffered.clear();
  for (std::size_t i = 1; i < pending.size(); ++i) log_.packets[pending[i]].charged_from = now_;
  for (auto p : pending) send_data(p, flow.route, 0, flow.route_epoch);
}

void Simulation::send_data(std::size_t packet, const RoutePtr& route, std::size_t hop,
                           std::uint64_t epoch) {
  const std::uint32_t at = (*route)[hop].value;
  if (hop + 1 == route->size()) {
    log_.packets[packet].delivery_time = now_;
    return;
  }
  const std::size_t flow_idx = log_.packets[packet].flow;
  Flow& flow = flows_[flow_idx];
  const bool endpoint = NodeId{at} == flow.src || NodeId{at} == flow.dst;
  if (hop > 0 && routing::attacker_act(nodes_[at].role, s_.protocol, routing::Traffic::Data,
                                       endpoint) == routing::AttackEffect::Drop) {
    note(at, "drop", "mitm");
    return;
  }
  const std::uint32_t next = (*route)[hop + 1].value;
  if (!adjacent(at, next)) {
    note(at, "link-break", fmt::format("next={}", next));
    if (flow.route_epoch == epoch && flow.route && !flow.timeout_pending) {
      flow.timeout_pending = true;
      schedule(now_ + s_.route_timeout, EvRouteTimeout{flow_idx, epoch});
    }
    return;
  }
  schedule(now_ + link_delay(at, next), EvData{packet, route, hop + 1, epoch});
}

void Simulation::handle(const EvData& ev) { send_data(ev.packet, ev.route, ev.hop, ev.epoch); }

void Simulation::handle(const EvRouteTimeout& ev) {
  Flow& flow = flows_[ev.flow];
  if (flow.route_epoch != ev.epoch || !flow.route) return;
  note(flow.src.value, "route-timeout");
  flow.route.reset();
  flow.timeout_pending = false;
}

void Simulation::handle(const EvDiscoveryTimeout& ev) {
  Flow& flow = flows_[ev.flow];
  if (flow.discovering != ev.msg) return;
  note(flow.src.value, "discovery-timeout", fmt::format("msg={}", ev.msg));
  flow.discovering.reset();
  // Packets that have waited past their lifetime are dropped; the oldest
  // survivor keeps the epoch's discovery charge.
  std::erase_if(flow.buffered, [&](std::size_t p) {
    return now_ - log_.packets[p].send_time >= s_.buffer_lifetime;
  });
  if (!flow.buffered.empty()) start_discovery(ev.flow);
}

}  // namespace

void Scenario::validate() const {
  if (nodes < 2) throw ConfigError("nodes must be at least 2");
  if (nodes % 2 != 0) throw ConfigError("nodes must be even (flows pair node i with i + N/2)");
  if (!(duration >= 0.0)) throw ConfigError("duration must be >= 0");
  if (!(drain >= 0.0)) throw ConfigError("drain must be >= 0");
  if (!(send_rate > 0.0)) throw ConfigError("send_rate must be > 0");
  if (packets_per_flow < 0) throw ConfigError("packets_per_flow must be >= 0");
  if (!(tx_range > 0.0)) throw ConfigError("tx_range must be > 0");
  if (!(mobility_tick > 0.0)) throw ConfigError("mobility_tick must be > 0");
  if (!(route_timeout >= 0.0)) throw ConfigError("route_timeout must be >= 0");
  if (!(discovery_timeout > 0.0)) throw ConfigError("discovery_timeout must be > 0");
  if (!(buffer_lifetime >= 0.0)) throw ConfigError("buffer_lifetime must be >= 0");
  if (string_bits == 0) throw ConfigError("string_bits must be > 0");
  if (malicious_count && (*malicious_count < 0 || *malicious_count >= nodes)) {
    throw ConfigError("malicious count must be in [0, nodes)");
  }
  if (!malicious_count && !(malicious_fraction >= 0.0 && malicious_fraction < 1.0)) {
    throw ConfigError("malicious_fraction must be in [0, 1)");
  }
  try {
    mobility.validate();
    timing.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int Scenario::resolved_malicious() const {
  if (malicious_count) return *malicious_count;
  return static_cast<int>(std::lround(malicious_fraction * nodes));
}

double FlowMetrics::delivery_pct() const {
  if (packets_sent == 0) return 0.0;
  return 100.0 * static_cast<double>(packets_delivered) / static_cast<double>(packets_sent);
}

std::optional<double> FlowMetrics::avg_total_delay() const {
  if (packets_delivered == 0) return std::nullopt;
  return delay_sum / static_cast<double>(packets_delivered);
}

std::string MetricsReport::to_text() const {
  std::string out;
  auto delay_text = [](const std::optional<double>& d) {
    return d ? fmt::format("{:.6f}", *d * 1000.0) : std::string("na");
  };
  out += fmt::format(
      "aggregate sent={} delivered={} delivery_pct={:.4f} avg_delay_ms={} mitm_detections={} "
      "rediscoveries={}\n",
      packets_sent, packets_delivered, delivery_pct, delay_text(avg_total_delay), mitm_detections,
      route_rediscoveries);
  for (const auto& f : flows) {
    out += fmt::format(
        "flow src={} dst={} sent={} delivered={} delivery_pct={:.4f} avg_delay_ms={} "
        "mitm_detections={} rediscoveries={}\n",
        f.src.value, f.dst.value, f.packets_sent, f.packets_delivered, f.delivery_pct(),
        delay_text(f.avg_total_delay()), f.mitm_detections, f.route_rediscoveries);
  }
  return out;
}

MetricsReport compute_metrics(const RawLog& log) {
  MetricsReport report;
  report.flows.resize(log.flow_src.size());
  for (std::size_t f = 0; f < report.flows.size(); ++f) {
    report.flows[f].src = log.flow_src[f];
    report.flows[f].dst = log.flow_dst[f];
    if (f < log.mitm_detections.size()) report.flows[f].mitm_detections = log.mitm_detections[f];
    if (f < log.rediscoveries.size()) report.flows[f].route_rediscoveries = log.rediscoveries[f];
  }
  double delay_sum = 0.0;
  for (const auto& p : log.packets) {
    auto& f = report.flows.at(p.flow);
    ++f.packets_sent;
    if (p.delivery_time) {
      ++f.packets_delivered;
      f.delay_sum += p.delay();
      delay_sum += p.delay();
    }
  }
  for (const auto& f : report.flows) {
    report.packets_sent += f.packets_sent;
    report.packets_delivered += f.packets_delivered;
    report.mitm_detections += f.mitm_detections;
    report.route_rediscoveries += f.route_rediscoveries;
  }
  if (report.packets_sent > 0) {
    report.delivery_pct = 100.0 * static_cast<double>(report.packets_delivered) /
                          static_cast<double>(report.packets_sent);
  }
  if (report.packets_delivered > 0) {
    report.avg_total_delay = delay_sum / static_cast<double>(report.packets_delivered);
  }
  return report;
}

std::vector<double> gen_traffic(double rate, double duration, std::mt19937_64& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("gen_traffic: rate must be positive");
  std::vector<double> times;
  std::exponential_distribution<double> gap(rate);
  double t = gap(rng);
  while (t <= duration) {
    times.push_back(t);
    t += gap(rng);
  }
  return times;
}

std::vector<std::vector<std::uint32_t>> neighbor_discovery(const std::vector<Vec2>& positions,
                                                           double tx_range) {
  const auto n = positions.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(positions[i], positions[j]) <= tx_range) {
        adj[i].push_back(static_cast<std::uint32_t>(j));
        adj[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

MetricsReport run(const Scenario& scenario, Observer* observer) {
  scenario.validate();
  Simulation sim(scenario, observer);
  return sim.run();
}

void TraceWriter::on_event(double time, NodeId node, std::string_view action,
                           std::string_view reason) {
  out_ << fmt::format("t={:.6f} node={} action={}", time, node.value, action);
  if (!reason.empty()) out_ << " reason=" << reason;
  out_ << '\n';
}

}  // namespace slar::engine
