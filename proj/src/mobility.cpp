#include "slar/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace slar::mobility {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normalize_heading(double h) {
  h = std::fmod(h, kTwoPi);
  if (h < 0.0) h += kTwoPi;
  if (h >= kTwoPi) h = 0.0;
  return h;
}

double draw_heading(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  return normalize_heading(dist(rng));
}

double draw_leg(const MobilityConfig& config, Rng& rng) {
  std::exponential_distribution<double> dist(1.0 / config.mean_leg);
  return dist(rng);
}

// Distance along `dir` (one axis) before leaving [0, limit]. Infinity when
// not moving along the axis.
double time_to_wall(double p, double dir, double limit) {
  if (dir > 0.0) return (limit - p) / dir;
  if (dir < 0.0) return (0.0 - p) / dir;
  return std::numeric_limits<double>::infinity();
}

// Travels `dist` along the current heading, reflecting off walls.
void travel(Kinematics& k, double dist, const MobilityConfig& config) {
  double dx = std::cos(k.heading);
  double dy = std::sin(k.heading);
  bool reflected = false;
  while (dist > 0.0) {
    const double tx = time_to_wall(k.pos.x, dx, config.region_width);
    const double ty = time_to_wall(k.pos.y, dy, config.region_height);
    const double t_hit = std::max(0.0, std::min(tx, ty));
    if (t_hit >= dist) {
      k.pos.x += dx * dist;
      k.pos.y += dy * dist;
      break;
    }
    k.pos.x += dx * t_hit;
    k.pos.y += dy * t_hit;
    dist -= t_hit;
    // Corner hits flip both components.
    if (tx <= ty) {
      dx = -dx;
      k.pos.x = dx < 0.0 ? config.region_width : 0.0;
    }
    if (ty <= tx) {
      dy = -dy;
      k.pos.y = dy < 0.0 ? config.region_height : 0.0;
    }
    reflected = true;
  }
  k.pos.x = std::clamp(k.pos.x, 0.0, config.region_width);
  k.pos.y = std::clamp(k.pos.y, 0.0, config.region_height);
  if (reflected) k.heading = normalize_heading(std::atan2(dy, dx));
}

}  // namespace

MobilityConfig MobilityConfig::fixed_speed(double speed) {
  MobilityConfig c;
  c.speed_min = speed;
  c.speed_max = speed;
  return c;
}

void MobilityConfig::validate() const {
  if (!(region_width > 0.0) || !(region_height > 0.0)) {
    throw std::invalid_argument("mobility: region dimensions must be positive");
  }
  if (!(speed_min > 0.0) || !(speed_max > 0.0) || speed_min > speed_max) {
    throw std::invalid_argument("mobility: speeds must be positive with min <= max");
  }
  if (!(mean_leg > 0.0)) throw std::invalid_argument("mobility: mean leg must be positive");
}

bool inside_region(Vec2 p, const MobilityConfig& config) {
  return p.x >= 0.0 && p.x <= config.region_width && p.y >= 0.0 && p.y <= config.region_height;
}

Kinematics sample_initial(const MobilityConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, config.region_width);
  std::uniform_real_distribution<double> uy(0.0, config.region_height);
  std::uniform_real_distribution<double> uv(config.speed_min, config.speed_max);
  Kinematics k;
  k.pos.x = ux(rng);
  k.pos.y = uy(rng);
  k.speed = std::clamp(uv(rng), config.speed_min, config.speed_max);
  k.heading = draw_heading(rng);
  k.leg_remaining = draw_leg(config, rng);
  return k;
}

Kinematics advance(Kinematics k, double dt, const MobilityConfig& config, Rng& rng) {
  if (dt < 0.0) throw std::invalid_argument("advance: negative time step");
  double remaining = k.speed * dt;
  while (remaining > 0.0) {
    if (k.leg_remaining <= 0.0) {
      k.heading = draw_heading(rng);
      k.leg_remaining = draw_leg(config, rng);
      continue;
    }
    const double step = std::min(remaining, k.leg_remaining);
    travel(k, step, config);
    remaining -= step;
    k.leg_remaining -= step;
    if (k.leg_remaining < 0.0) k.leg_remaining = 0.0;
  }
  return k;
}

}  // namespace slar::mobility
