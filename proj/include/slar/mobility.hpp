#pragma once

// Random-direction motion inside a rectangular region. Each node travels a
// straight leg whose length is exponentially distributed, then picks a new
// uniformly random heading. Walls reflect the normal velocity component.

#include <random>

#include "slar/geo.hpp"

namespace slar::mobility {

using Rng = std::mt19937_64;

struct MobilityConfig {
  double region_width = 1000.0;
  double region_height = 1000.0;
  double speed_min = 2.0;
  double speed_max = 40.0;
  double mean_leg = 25.0;

  /// Every node moves at exactly `speed`.
  static MobilityConfig fixed_speed(double speed);
  /// Throws std::invalid_argument when a field is non-positive or the speed
  /// range is inverted.
  void validate() const;
};

struct Kinematics {
  Vec2 pos;
  double heading = 0.0;  // radians in [0, 2*pi)
  double speed = 0.0;
  double leg_remaining = 0.0;
};

Kinematics sample_initial(const MobilityConfig& config, Rng& rng);

/// Moves the node for `dt` seconds. New legs are drawn lazily, only when
/// distance is still left to travel, so splitting one step into two
/// consumes the same random draws.
Kinematics advance(Kinematics k, double dt, const MobilityConfig& config, Rng& rng);

bool inside_region(Vec2 p, const MobilityConfig& config);

}  // namespace slar::mobility
