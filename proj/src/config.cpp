#include "slar/config.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace slar::config {

namespace {

using engine::ConfigError;

constexpr std::array<std::string_view, 29> kKeys = {
    "nodes",         "duration",        "drain",
    "send_rate",     "packets_per_flow", "speed",
    "speed_min",     "speed_max",       "region_width",
    "region_height", "mean_leg",        "malicious",
    "malicious_fraction", "protocol",   "tx_range",
    "discovery_ms",  "go_negotiation_ms", "wps_ms",
    "addr_config_ms", "per_hop_tx_ms",  "oob_ms",
    "string_bits",   "attack",          "reply_mode",
    "mobility_tick_ms", "route_timeout_ms", "discovery_timeout_ms",
    "buffer_lifetime_ms", "seed",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string text(value);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
  }
}

long long to_int(std::string_view key, std::string_view value) {
  long long v = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, value));
  }
  return v;
}

}  // namespace

std::span<const std::string_view> known_keys() { return kKeys; }

std::pair<std::string, std::string> split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("expected KEY=VALUE, got '{}'", text));
  }
  auto key = trim(text.substr(0, eq));
  if (key.empty()) throw ConfigError(fmt::format("empty key in '{}'", text));
  return {std::string(key), std::string(trim(text.substr(eq + 1)))};
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    kv.push_back(split_assignment(t));
  }
  return kv;
}

KeyValues load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  return parse_key_values(in);
}

void apply(engine::Scenario& s, std::string_view key, std::string_view value) {
  auto num = [&] { return to_double(key, value); };
  auto ms = [&] { return to_double(key, value) / 1000.0; };

  if (key == "nodes") {
    s.nodes = static_cast<int>(to_int(key, value));
  } else if (key == "duration") {
    s.duration = num();
  } else if (key == "drain") {
    s.drain = num();
  } else if (key == "send_rate") {
    s.send_rate = num();
  } else if (key == "packets_per_flow") {
    s.packets_per_flow = static_cast<int>(to_int(key, value));
  } else if (key == "speed") {
    s.mobility.speed_min = s.mobility.speed_max = num();
  } else if (key == "speed_min") {
    s.mobility.speed_min = num();
  } else if (key == "speed_max") {
    s.mobility.speed_max = num();
  } else if (key == "region_width") {
    s.mobility.region_width = num();
  } else if (key == "region_height") {
    s.mobility.region_height = num();
  } else if (key == "mean_leg") {
    s.mobility.mean_leg = num();
  } else if (key == "malicious") {
    s.malicious_count = static_cast<int>(to_int(key, value));
  } else if (key == "malicious_fraction") {
    s.malicious_count.reset();
    s.malicious_fraction = num();
  } else if (key == "protocol") {
    auto p = routing::parse_protocol(value);
    if (!p) {
      throw ConfigError(fmt::format(
          "unknown protocol '{}' (valid: rlar, dlar, secure_rlar, secure_dlar)", value));
    }
    s.protocol = *p;
  } else if (key == "tx_range") {
    s.tx_range = num();
  } else if (key == "discovery_ms") {
    s.timing.discovery = ms();
  } else if (key == "go_negotiation_ms") {
    s.timing.go_negotiation = ms();
  } else if (key == "wps_ms") {
    s.timing.wps = ms();
  } else if (key == "addr_config_ms") {
    s.timing.addr_config = ms();
  } else if (key == "per_hop_tx_ms") {
    s.timing.per_hop_tx = ms();
  } else if (key == "oob_ms") {
    s.timing.oob = ms();
  } else if (key == "string_bits") {
    const auto k = to_int(key, value);
    if (k <= 0) throw ConfigError("string_bits must be positive");
    s.string_bits = static_cast<std::size_t>(k);
  } else if (key == "attack") {
    if (value == "responder") {
      s.attack = routing::Substitution::ResponderMessage;
    } else if (value == "passive") {
      s.attack = routing::Substitution::Passive;
    } else if (value == "both") {
      s.attack = routing::Substitution::BothSides;
    } else {
      throw ConfigError(
          fmt::format("unknown attack '{}' (valid: responder, both, passive)", value));
    }
  } else if (key == "reply_mode") {
    if (value == "reverse_path") {
      s.reply_mode = engine::ReplyMode::ReversePath;
    } else if (value == "flood") {
      s.reply_mode = engine::ReplyMode::Flood;
    } else {
      throw ConfigError(fmt::format("unknown reply_mode '{}' (valid: reverse_path, flood)", value));
    }
  } else if (key == "mobility_tick_ms") {
    s.mobility_tick = ms();
  } else if (key == "route_timeout_ms") {
    s.route_timeout = ms();
  } else if (key == "discovery_timeout_ms") {
    s.discovery_timeout = ms();
  } else if (key == "buffer_lifetime_ms") {
    s.buffer_lifetime = ms();
  } else if (key == "seed") {
    s.seed = static_cast<std::uint64_t>(to_int(key, value));
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

void apply_all(engine::Scenario& scenario, const KeyValues& kv) {
  for (const auto& [k, v] : kv) apply(scenario, k, v);
}

}  // namespace slar::config
