#include "slar/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slar {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

ExpectedZone expected_zone(Vec2 dest_pos, double avg_speed, double t0, double t1) {
  if (t1 < t0) {
    throw std::invalid_argument("expected_zone: t1 precedes t0");
  }
  if (avg_speed < 0.0) {
    throw std::invalid_argument("expected_zone: negative speed");
  }
  return ExpectedZone{dest_pos, avg_speed * (t1 - t0)};
}

RequestZone request_zone(Vec2 src_pos, const ExpectedZone& ez) {
  const Vec2 disc_min{ez.center.x - ez.radius, ez.center.y - ez.radius};
  const Vec2 disc_max{ez.center.x + ez.radius, ez.center.y + ez.radius};
  return RequestZone{
      {std::min(src_pos.x, disc_min.x), std::min(src_pos.y, disc_min.y)},
      {std::max(src_pos.x, disc_max.x), std::max(src_pos.y, disc_max.y)}};
}

bool contains(const RequestZone& zone, Vec2 p) {
  return zone.min_corner.x <= p.x && p.x <= zone.max_corner.x &&
         zone.min_corner.y <= p.y && p.y <= zone.max_corner.y;
}

}  // namespace slar
