// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Details for each check follow its verdict line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "slar/crypto.hpp"
#include "slar/engine.hpp"
#include "slar/geo.hpp"
#include "slar/mobility.hpp"
#include "slar/routing.hpp"
#include "slar/sweep.hpp"

using namespace slar;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(bool ok, std::string_view name, const std::string& detail) {
  fmt::print("{} {}\n", ok ? "PASS" : "FAIL", name);
  if (!detail.empty()) fmt::print("     {}\n", detail);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// -- crypto -----------------------------------------------------------------

void crypto_correctness() {
  const auto t0 = Clock::now();
  crypto::Rng rng(2024);

  int key_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto params = crypto::draw_params(rng);
    const auto rs = crypto::draw_private(params, rng);
    const auto rn = crypto::draw_private(params, rng);
    if (crypto::shared_key(params, crypto::gen_public(params, rn), rs) !=
        crypto::shared_key(params, crypto::gen_public(params, rs), rn)) {
      ++key_mismatch;
    }
  }

  // Every exponent 0..2^12 against a running product, for the boundary
  // moduli and a random sample of moduli up to 2^16.
  std::vector<std::uint64_t> moduli{2, 3, 4, 255, 256, 257, 65521, 65535, 65536};
  std::uniform_int_distribution<std::uint64_t> mod(2, 1u << 16);
  while (moduli.size() < 200) moduli.push_back(mod(rng));
  long long pow_checks = 0;
  int pow_mismatch = 0;
  for (auto m : moduli) {
    std::uniform_int_distribution<std::uint64_t> base(0, m - 1);
    const std::uint64_t b = base(rng);
    std::uint64_t expected = 1 % m;
    for (unsigned e = 0; e <= (1u << 12); ++e) {
      if (crypto::mod_pow(b, e, m) != expected) ++pow_mismatch;
      expected = expected * b % m;
      ++pow_checks;
    }
  }

  // Every 4-bit string under several keys: each opens to itself and to
  // nothing else.
  std::vector<crypto::Concatenation> msgs;
  for (std::uint64_t g : {1u, 2u, 19u, 22u}) {
    for (int v = 0; v < 16; ++v) {
      std::vector<std::uint8_t> bits;
      for (int i = 3; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((v >> i) & 1));
      msgs.push_back({crypto::PublicKey{g}, crypto::RandomString{crypto::BitString(bits)}});
    }
  }
  int commit_fail = 0;
  for (const auto& m : msgs) {
    const auto nonce = crypto::draw_nonce(rng);
    const auto c = crypto::commit(m, nonce);
    for (const auto& other : msgs) {
      bool opened = false;
      try {
        opened = crypto::open_verify(c, {other, nonce}) == m;
      } catch (const crypto::CommitmentMismatch&) {
      }
      if (opened != (other == m)) ++commit_fail;
    }
  }

  const double secs = seconds_since(t0);
  verdict(key_mismatch == 0 && pow_mismatch == 0 && commit_fail == 0 && secs < 10.0,
          "crypto correctness",
          fmt::format("key mismatches {}/1000, mod_pow mismatches {}/{} ({} moduli), "
                      "4-bit commitment failures {}/{}, {:.2f} s",
                      key_mismatch, pow_mismatch, pow_checks, moduli.size(), commit_fail,
                      msgs.size() * msgs.size(), secs));
}

// -- handshake ----------------------------------------------------------------

void mitm() {
  const auto t0 = Clock::now();
  crypto::Rng rng(7);
  const link::LinkTiming timing;
  int detected = 0;
  int established = 0;
  int equal_keys = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto params = crypto::draw_params(rng);
    auto a = routing::make_party(NodeId{0}, params, crypto::draw_private(params, rng), 10, rng);
    auto b = routing::make_party(NodeId{1}, params, crypto::draw_private(params, rng), 10, rng);
    const auto att = routing::make_attacker(NodeId{2}, params, 10,
                                            routing::Substitution::ResponderMessage, rng);
    if (std::holds_alternative<routing::MitmDetected>(
            routing::run_handshake(a, b, att, params, timing))) {
      ++detected;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto params = crypto::draw_params(rng);
    auto a = routing::make_party(NodeId{0}, params, crypto::draw_private(params, rng), 10, rng);
    auto b = routing::make_party(NodeId{1}, params, crypto::draw_private(params, rng), 10, rng);
    const auto out = routing::run_handshake(a, b, std::nullopt, params, timing);
    if (const auto* e = std::get_if<routing::HandshakeEstablished>(&out)) {
      ++established;
      if (e->initiator_key == e->responder_key) ++equal_keys;
    }
  }
  const double secs = seconds_since(t0);
  verdict(detected == 1000 && established == 1000 && equal_keys == 1000 && secs < 10.0,
          "MITM soundness and completeness",
          fmt::format("attacked: {}/1000 detected; honest: {}/1000 established, {}/1000 equal "
                      "keys; {:.2f} s",
                      detected, established, equal_keys, secs));
}

// -- geometry -----------------------------------------------------------------

void geometry() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::uniform_real_distribution<double> radius(0.0, 400.0);
  std::uniform_real_distribution<double> probe(-200.0, 1200.0);
  int disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    const Vec2 src{coord(rng), coord(rng)};
    const ExpectedZone ez{{coord(rng), coord(rng)}, radius(rng)};
    const Vec2 p{probe(rng), probe(rng)};

    double x0 = src.x, x1 = src.x, y0 = src.y, y1 = src.y;
    for (int deg = 0; deg < 360; ++deg) {
      const double a = deg * std::numbers::pi / 180.0;
      const double x = ez.center.x + ez.radius * std::cos(a);
      const double y = ez.center.y + ez.radius * std::sin(a);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    const bool oracle = x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1;
    if (contains(request_zone(src, ez), p) != oracle) ++disagreements;
  }
  verdict(disagreements == 0, "geometry oracle equivalence",
          fmt::format("{} disagreements over 100000 draws", disagreements));
}

// -- mobility -----------------------------------------------------------------

void mobility_containment() {
  const mobility::MobilityConfig config;  // speeds uniform in [2, 40]
  const double tick = 0.010;
  // Sub-steps split a tick without changing the trajectory, and keep more
  // than one leg renewal per step vanishingly rare.
  const int sub = 40;
  mobility::Rng init(5);
  int violations = 0;
  double leg_sum = 0.0;
  long long legs = 0;
  for (int n = 0; n < 100; ++n) {
    mobility::Rng rng(1000 + n);
    auto k = mobility::sample_initial(config, init);
    leg_sum += k.leg_remaining;
    ++legs;
    for (int t = 0; t < 10000; ++t) {
      for (int s = 0; s < sub; ++s) {
        const double travel = k.speed * tick / sub;
        const auto next = mobility::advance(k, tick / sub, config, rng);
        if (travel > k.leg_remaining) {
          // A leg drawn this step: its length is what remains plus what was
          // already covered on it.
          leg_sum += next.leg_remaining + (travel - k.leg_remaining);
          ++legs;
        }
        k = next;
      }
      const bool ok = mobility::inside_region(k.pos, config) && k.speed >= config.speed_min &&
                      k.speed <= config.speed_max && k.leg_remaining >= 0.0;
      if (!ok) ++violations;
    }
  }
  const double mean = leg_sum / static_cast<double>(legs);
  const bool ok = violations == 0 && std::abs(mean - 25.0) <= 0.05 * 25.0;
  verdict(ok, "mobility containment",
          fmt::format("{} boundary violations over 10^6 node-ticks; mean leg {:.3f} over {} legs "
                      "(target 25 +/- 5%)",
                      violations, mean, legs));
}

// -- forwarding -----------------------------------------------------------------

struct ForwardChecker : engine::Observer {
  int forwards = 0;
  int dist_violations = 0;
  int zone_violations = 0;
  int duplicates = 0;
  // Message ids restart with every scenario.
  std::set<std::pair<std::uint32_t, routing::MsgId>> seen;

  void on_forward(double, NodeId node, Vec2 pos, const routing::RouteRequest& received,
                  const routing::RouteRequest& forwarded) override {
    ++forwards;
    if (!seen.insert({node.value, forwarded.msg_id}).second) ++duplicates;
    if (const auto* in = std::get_if<routing::DlarFields>(&received.fields)) {
      const auto& out = std::get<routing::DlarFields>(forwarded.fields);
      if (out.dist > in->dist) ++dist_violations;
    } else {
      const auto& z = std::get<routing::RlarFields>(received.fields).zone;
      if (!contains(z, pos)) ++zone_violations;
    }
  }
};

void forwarding() {
  ForwardChecker dlar;
  ForwardChecker rlar;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    for (bool zone : {false, true}) {
      engine::Scenario s;
      s.nodes = 40;
      s.duration = 2.0;
      s.seed = seed;
      s.mobility = mobility::MobilityConfig::fixed_speed(5);
      // Alternate plain and secure variants across seeds.
      const bool secure = seed % 2 == 0;
      s.protocol = zone ? (secure ? routing::Protocol::SecureRlar : routing::Protocol::Rlar)
                        : (secure ? routing::Protocol::SecureDlar : routing::Protocol::Dlar);
      ForwardChecker& checker = zone ? rlar : dlar;
      checker.seen.clear();
      engine::run(s, &checker);
    }
  }
  const bool ok = dlar.dist_violations == 0 && rlar.zone_violations == 0 &&
                  dlar.duplicates == 0 && rlar.duplicates == 0 && dlar.forwards > 0 &&
                  rlar.forwards > 0;
  verdict(ok, "forwarding invariants",
          fmt::format("DLAR: {} forwards, {} distance increases, {} duplicates; RLAR: {} "
                      "forwards, {} out-of-zone forwarders, {} duplicates",
                      dlar.forwards, dlar.dist_violations, dlar.duplicates, rlar.forwards,
                      rlar.zone_violations, rlar.duplicates));
}

// -- trends -----------------------------------------------------------------

struct Point {
  double delivery = 0.0;
  double delay = 0.0;  // ms, mean over seeds that delivered
};
using Table = std::map<std::pair<double, std::string>, Point>;

Table averaged(const std::vector<sweep::CsvRow>& rows) {
  Table t;
  for (const auto& s : sweep::summarize(rows)) {
    t[{s.sweep_value, s.protocol}] = {s.delivery_pct, s.avg_delay_ms.value_or(NAN)};
  }
  return t;
}

std::vector<double> xs(const Table& t) {
  std::set<double> v;
  for (const auto& [k, _] : t) v.insert(k.first);
  return {v.begin(), v.end()};
}

void trends() {
  const auto t0 = Clock::now();
  const auto protocols = routing::all_protocols();
  const std::vector<routing::Protocol> all(protocols.begin(), protocols.end());
  std::map<sweep::Family, Table> fam;
  for (auto f : {sweep::Family::Density, sweep::Family::Malicious, sweep::Family::Speed}) {
    fam[f] = averaged(sweep::run_sweep(sweep::make_spec(f, engine::Scenario{}, all, 10)));
  }
  const double secs = seconds_since(t0);
  const std::vector<std::string> names{"rlar", "dlar", "secure_rlar", "secure_dlar"};

  for (auto f : {sweep::Family::Density, sweep::Family::Malicious, sweep::Family::Speed}) {
    const auto& t = fam[f];
    fmt::print("     {} sweep (delivery % / delay ms, 10-seed means)\n", sweep::to_string(f));
    for (double x : xs(t)) {
      std::string line = fmt::format("       {:>4}", x);
      for (const auto& p : names) {
        const auto& pt = t.at({x, p});
        line += fmt::format("  {:>11} {:5.1f}/{:5.2f}", p, pt.delivery, pt.delay);
      }
      fmt::print("{}\n", line);
    }
  }

  // Secure beats plain wherever at least 10% of the nodes are malicious.
  {
    double sum = 0.0;
    int n = 0;
    std::vector<std::string> bad;
    for (auto& [f, t] : fam) {
      for (double x : xs(t)) {
        const int nodes = f == sweep::Family::Density ? static_cast<int>(x) : 40;
        const double mal = f == sweep::Family::Malicious ? x : std::lround(0.1 * nodes);
        if (mal < 0.1 * nodes) continue;
        for (std::string p : {"rlar", "dlar"}) {
          const double gap = t.at({x, "secure_" + p}).delivery - t.at({x, p}).delivery;
          sum += gap;
          ++n;
          if (!(gap > 0.0)) bad.push_back(fmt::format("{}={} {} gap {:.2f}", sweep::to_string(f), x, p, gap));
        }
      }
    }
    const double avg = sum / n;
    verdict(bad.empty() && avg >= 15.0, "trend: secure delivers more than plain",
            fmt::format("average gap {:.2f} pp over {} points (need >= 15); non-positive: {}", avg,
                        n, bad.empty() ? "none" : fmt::format("{}", fmt::join(bad, "; "))));
  }

  const auto& density = fam[sweep::Family::Density];
  {
    double sum = 0.0;
    std::vector<std::string> bad;
    for (double x : xs(density)) {
      const double gap = density.at({x, "secure_dlar"}).delivery -
                         density.at({x, "secure_rlar"}).delivery;
      sum += gap;
      if (gap < 0.0) bad.push_back(fmt::format("N={} {:.2f}", x, gap));
    }
    const double avg = sum / static_cast<double>(xs(density).size());
    verdict(bad.empty() && avg > 0.0, "trend: secure DLAR delivery >= secure RLAR",
            fmt::format("average gap {:.2f} pp; below: {}", avg,
                        bad.empty() ? "none" : fmt::format("{}", fmt::join(bad, "; "))));
  }
  {
    std::vector<std::string> bad;
    for (double x : xs(density)) {
      const double d = density.at({x, "secure_dlar"}).delay;
      const double r = density.at({x, "secure_rlar"}).delay;
      if (!(d < r)) bad.push_back(fmt::format("N={} {:.2f} vs {:.2f} ms", x, d, r));
    }
    verdict(bad.empty(), "trend: secure DLAR delay < secure RLAR",
            fmt::format("violations: {}", bad.empty() ? "none" : fmt::format("{}", fmt::join(bad, "; "))));
  }
  {
    std::vector<std::string> bad;
    for (auto f : {sweep::Family::Malicious, sweep::Family::Speed}) {
      const auto& t = fam[f];
      const auto v = xs(t);
      for (const auto& p : names) {
        double worst = -INFINITY;
        for (std::size_t i = 0; i < v.size(); ++i) {
          for (std::size_t j = i + 1; j < v.size(); ++j) {
            worst = std::max(worst, t.at({v[j], p}).delivery - t.at({v[i], p}).delivery);
          }
        }
        if (worst > 2.0) bad.push_back(fmt::format("{} {} rises {:.2f} pp", sweep::to_string(f), p, worst));
      }
    }
    verdict(bad.empty(), "trend: delivery non-increasing in malicious count and speed",
            fmt::format("tolerance 2 pp; violations: {}", bad.empty() ? "none" : fmt::format("{}", fmt::join(bad, "; "))));
  }
  {
    const auto& t = fam[sweep::Family::Malicious];
    std::vector<std::string> parts;
    bool ok = true;
    for (std::string p : {"rlar", "dlar"}) {
      double lo = INFINITY, hi = -INFINITY, sum = 0.0;
      const auto v = xs(t);
      for (double x : v) {
        const double d = t.at({x, p}).delay;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        sum += d;
      }
      const double rel = (hi - lo) / (sum / static_cast<double>(v.size()));
      ok = ok && rel < 0.10;
      parts.push_back(fmt::format("{} spread {:.1f}% of mean", p, 100.0 * rel));
    }
    verdict(ok, "trend: plain delay insensitive to malicious count",
            fmt::format("need < 10%; {}", fmt::join(parts, ", ")));
  }
  verdict(secs < 600.0, "trend: suite runtime", fmt::format("{:.1f} s for three families (need < 600)", secs));
}

// -- determinism ----------------------------------------------------------------

void determinism() {
  bool ok = true;
  for (auto p : routing::all_protocols()) {
    engine::Scenario s;
    s.nodes = 40;
    s.protocol = p;
    s.seed = 11;
    ok = ok && engine::run(s).to_text() == engine::run(s).to_text();
  }
  engine::Scenario base;
  base.duration = 2.0;
  const auto protocols = routing::all_protocols();
  auto spec = sweep::make_spec(sweep::Family::Malicious, base, {protocols.begin(), protocols.end()}, 2);
  const auto a = sweep::run_sweep(spec);
  spec.workers = 1;
  const auto b = sweep::run_sweep(spec);
  std::string ca, cb;
  for (const auto& r : a) ca += sweep::to_csv_line(r) + "\n";
  for (const auto& r : b) cb += sweep::to_csv_line(r) + "\n";
  ok = ok && ca == cb;
  verdict(ok, "determinism",
          fmt::format("4 full reports and {} CSV rows compared byte for byte", a.size()));
}

}  // namespace

int main() {
  crypto_correctness();
  mitm();
  geometry();
  mobility_containment();
  forwarding();
  determinism();
  trends();
  fmt::print("{} criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
