#pragma once

#include <compare>

namespace slar {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Disc where a source expects the destination to be at the time a route
/// request is issued.
struct ExpectedZone {
  Vec2 center;
  double radius = 0.0;
};

/// Closed axis-aligned rectangle. Only nodes inside it relay an RLAR request.
struct RequestZone {
  Vec2 min_corner;
  Vec2 max_corner;

  friend bool operator==(const RequestZone&, const RequestZone&) = default;
};

double distance(Vec2 a, Vec2 b);

/// Zone of radius `avg_speed * (t1 - t0)` centred on the last known
/// destination position. Throws std::invalid_argument if t1 < t0 or the
/// speed is negative.
ExpectedZone expected_zone(Vec2 dest_pos, double avg_speed, double t0, double t1);

/// Smallest axis-aligned rectangle containing `src_pos` and the whole disc.
RequestZone request_zone(Vec2 src_pos, const ExpectedZone& ez);

bool contains(const RequestZone& zone, Vec2 p);

}  // namespace slar
