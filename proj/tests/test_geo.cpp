#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "slar/geo.hpp"

using namespace slar;

namespace {

// Bounding box of the source plus the disc sampled every degree.
RequestZone sampled_zone(Vec2 src, const ExpectedZone& ez) {
  RequestZone z{src, src};
  for (int deg = 0; deg < 360; ++deg) {
    const double a = deg * std::numbers::pi / 180.0;
    const Vec2 p{ez.center.x + ez.radius * std::cos(a), ez.center.y + ez.radius * std::sin(a)};
    z.min_corner = {std::min(z.min_corner.x, p.x), std::min(z.min_corner.y, p.y)};
    z.max_corner = {std::max(z.max_corner.x, p.x), std::max(z.max_corner.y, p.y)};
  }
  return z;
}

}  // namespace

TEST_CASE("distance") {
  CHECK(distance({0, 0}, {3, 4}) == 5.0);
  CHECK(distance({7, 7}, {7, 7}) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 a{u(rng), u(rng)};
    const Vec2 b{u(rng), u(rng)};
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    CHECK(distance(a, b) == doctest::Approx(std::sqrt(dx * dx + dy * dy)).epsilon(1e-12));
    CHECK(distance(a, b) == distance(b, a));
  }
}

TEST_CASE("expected zone radius is speed times elapsed time") {
  auto ez = expected_zone({500, 500}, 10, 0, 5);
  CHECK(ez.center == Vec2{500, 500});
  CHECK(ez.radius == 50.0);
  CHECK(expected_zone({1, 2}, 10, 3, 3).radius == 0.0);
  CHECK(expected_zone({0, 0}, 40, 1, 3.5).radius == 100.0);
  CHECK_THROWS_AS(expected_zone({0, 0}, 10, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(expected_zone({0, 0}, -1, 0, 1), std::invalid_argument);
}

TEST_CASE("request zone examples") {
  const ExpectedZone ez{{500, 500}, 50};
  CHECK(request_zone({0, 0}, ez) == RequestZone{{0, 0}, {550, 550}});
  CHECK(request_zone({0, 0}, ez) == sampled_zone({0, 0}, ez));
  // Source inside the disc: the disc's bounding box.
  CHECK(request_zone({500, 480}, ez) == RequestZone{{450, 450}, {550, 550}});
  // Source northeast of the destination.
  CHECK(request_zone({600, 600}, ez) == RequestZone{{450, 450}, {600, 600}});
  CHECK(request_zone({600, 600}, ez) == sampled_zone({600, 600}, ez));
}

TEST_CASE("contains is boundary inclusive") {
  const RequestZone z{{0, 0}, {550, 550}};
  CHECK(contains(z, {300, 200}));
  CHECK_FALSE(contains(z, {600, 100}));
  CHECK(contains(z, {550, 550}));
  CHECK(contains(z, {0, 0}));
  CHECK_FALSE(contains(z, {-1e-9, 10}));
}

TEST_CASE("request zone covers the source and the sampled disc and is minimal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  std::uniform_real_distribution<double> radius(0.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 src{coord(rng), coord(rng)};
    const ExpectedZone ez{{coord(rng), coord(rng)}, radius(rng)};
    const auto z = request_zone(src, ez);
    CHECK(contains(z, src));
    for (int deg = 0; deg < 360; ++deg) {
      const double a = deg * std::numbers::pi / 180.0;
      const Vec2 p{ez.center.x + ez.radius * std::cos(a), ez.center.y + ez.radius * std::sin(a)};
      // Rounding in cos/sin can land a hair outside the exact box.
      const RequestZone grown{{z.min_corner.x - 1e-9, z.min_corner.y - 1e-9},
                              {z.max_corner.x + 1e-9, z.max_corner.y + 1e-9}};
      REQUIRE(contains(grown, p));
    }
    // Minimality: every side touches the source or the disc.
    const double eps = 1e-6;
    CHECK((z.min_corner.x == src.x || z.min_corner.x == ez.center.x - ez.radius));
    CHECK((z.max_corner.y == src.y || z.max_corner.y == ez.center.y + ez.radius));
    const RequestZone shrunk{{z.min_corner.x + eps, z.min_corner.y}, z.max_corner};
    const bool src_out = !contains(shrunk, src);
    const bool disc_out = !contains(shrunk, {ez.center.x - ez.radius, ez.center.y});
    CHECK((src_out || disc_out));
  }
}

TEST_CASE("southwest source matches the rectangle inequalities") {
  // S southwest of the disc: X_s <= x <= X_d + R and Y_s <= y <= Y_d + R.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r = 100.0 * u(rng);
    const Vec2 d{300 + 600 * u(rng), 300 + 600 * u(rng)};
    const Vec2 s{(d.x - r) * u(rng), (d.y - r) * u(rng)};
    const Vec2 p{1000 * u(rng), 1000 * u(rng)};
    const bool paper = s.x <= p.x && p.x <= d.x + r && s.y <= p.y && p.y <= d.y + r;
    CHECK(contains(request_zone(s, {d, r}), p) == paper);
  }
}
