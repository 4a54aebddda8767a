#include <vector>

#include "doctest.h"
#include "slar/link.hpp"

using namespace slar;
using namespace slar::link;

namespace {

crypto::AuthString sas(std::string_view bits) {
  return crypto::AuthString{crypto::BitString::from_text(bits)};
}

}  // namespace

TEST_CASE("session phases run in order") {
  const LinkTiming t;
  WfdSession s(NodeId{3}, NodeId{1});
  CHECK(s.phase() == WfdPhase::Idle);
  CHECK_FALSE(s.has_group_owner());
  const std::vector<WfdPhase> order{WfdPhase::Discovery, WfdPhase::GoNegotiation, WfdPhase::Wps,
                                    WfdPhase::AddrConfig, WfdPhase::Established};
  const std::vector<double> cost{t.discovery, t.go_negotiation, t.wps, t.addr_config, 0.0};
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(s.advance(t) == cost[i]);
    CHECK(s.phase() == order[i]);
  }
  CHECK(s.group_owner() == NodeId{1});
  CHECK_THROWS_AS(s.advance(t), std::logic_error);
  s.reset();
  CHECK(s.phase() == WfdPhase::Idle);
  CHECK(to_string(WfdPhase::GoNegotiation) == "go-negotiation");
}

TEST_CASE("establish sums phase delays") {
  LinkTiming zero{0, 0, 0, 0, 0, 0};
  CHECK(establish(NodeId{0}, NodeId{1}, 100, 200, zero).total_delay == 0.0);

  const LinkTiming t;
  const auto e = establish(NodeId{7}, NodeId{2}, 200, 200, t);
  CHECK(e.total_delay == doctest::Approx(0.010));
  CHECK(e.total_delay == doctest::Approx(t.session_total()));
  CHECK(e.session.phase() == WfdPhase::Established);
  CHECK(e.session.group_owner() == NodeId{2});
}

TEST_CASE("establish rejects bad endpoints") {
  const LinkTiming t;
  CHECK_THROWS_AS(establish(NodeId{0}, NodeId{1}, 250, 200, t), OutOfRange);
  CHECK_THROWS_AS(establish(NodeId{4}, NodeId{4}, 10, 200, t), std::invalid_argument);
  CHECK_THROWS_AS(WfdSession(NodeId{4}, NodeId{4}), std::invalid_argument);
}

TEST_CASE("timing validation") {
  CHECK_NOTHROW(LinkTiming{}.validate());
  LinkTiming t;
  t.oob = -1;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("out-of-band comparison is exact equality") {
  const LinkTiming t;
  const OobChannel ch(NodeId{0}, NodeId{1});
  // Every pair of 3-bit strings.
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      std::string sa;
      std::string sb;
      for (int i = 2; i >= 0; --i) {
        sa.push_back((a >> i) & 1 ? '1' : '0');
        sb.push_back((b >> i) & 1 ? '1' : '0');
      }
      const auto r = oob_compare(ch, sas(sa), sas(sb), t);
      CHECK(r.match == (a == b));
      CHECK(r.delay == t.oob);
    }
  }
}
