#include "slar/link.hpp"

namespace slar::link {

std::string_view to_string(WfdPhase phase) {
  switch (phase) {
    case WfdPhase::Idle: return "idle";
    case WfdPhase::Discovery: return "discovery";
    case WfdPhase::GoNegotiation: return "go-negotiation";
    case WfdPhase::Wps: return "wps";
    case WfdPhase::AddrConfig: return "addr-config";
    case WfdPhase::Established: return "established";
  }
  return "?";
}

void LinkTiming::validate() const {
  for (double d : {discovery, go_negotiation, wps, addr_config, per_hop_tx, oob}) {
    if (!(d >= 0.0)) throw std::invalid_argument("link timing values must be >= 0");
  }
}

WfdSession::WfdSession(NodeId a, NodeId b) : a_(a), b_(b) {
  if (a == b) throw std::invalid_argument("session endpoints must differ");
}

double WfdSession::advance(const LinkTiming& timing) {
  switch (phase_) {
    case WfdPhase::Idle:
      phase_ = WfdPhase::Discovery;
      return timing.discovery;
    case WfdPhase::Discovery:
      phase_ = WfdPhase::GoNegotiation;
      group_owner_ = std::min(a_, b_);
      return timing.go_negotiation;
    case WfdPhase::GoNegotiation:
      phase_ = WfdPhase::Wps;
      return timing.wps;
    case WfdPhase::Wps:
      phase_ = WfdPhase::AddrConfig;
      return timing.addr_config;
    case WfdPhase::AddrConfig:
      phase_ = WfdPhase::Established;
      return 0.0;
    case WfdPhase::Established:
      break;
  }
  throw std::logic_error("session already established");
}

Established establish(NodeId a, NodeId b, double separation, double tx_range,
                      const LinkTiming& timing) {
  if (a == b) throw std::invalid_argument("establish: endpoints must differ");
  if (separation > tx_range) throw OutOfRange();
  WfdSession session(a, b);
  double total = 0.0;
  while (session.phase() != WfdPhase::Established) total += session.advance(timing);
  return Established{session, total};
}

OobResult oob_compare(const OobChannel&, const crypto::AuthString& s_a,
                      const crypto::AuthString& s_b, const LinkTiming& timing) {
  return OobResult{s_a == s_b, timing.oob};
}

}  // namespace slar::link
