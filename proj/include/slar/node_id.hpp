#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace slar {

/// Unique node identifier, the stand-in for a vehicle's MAC address.
struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

}  // namespace slar

template <>
struct std::hash<slar::NodeId> {
  std::size_t operator()(const slar::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
