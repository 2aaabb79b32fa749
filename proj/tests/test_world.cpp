#include <catch2/catch_amalgamated.hpp>

#include "infotrack/geometry.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/sensor.hpp"
#include "infotrack/target.hpp"
#include "oracles.hpp"

using namespace infotrack;
using Catch::Matchers::WithinAbs;

namespace {

WorldMap big_empty() { return WorldMap{{-1000.0, -1000.0, 1000.0, 1000.0}, {}}; }

SensorSpec noiseless_sensor() {
  SensorSpec s;
  s.sigma_r = 0.0;
  s.sigma_b = 0.0;
  return s;
}

}  // namespace

TEST_CASE("wrap_to_pi maps into (-pi, pi]") {
  CHECK(wrap_to_pi(kPi) == kPi);
  CHECK(wrap_to_pi(-kPi) == kPi);
  CHECK_THAT(wrap_to_pi(3.0 * kPi), WithinAbs(kPi, 1e-12));
  CHECK_THAT(wrap_to_pi(kTwoPi - 0.01), WithinAbs(-0.01, 1e-12));
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double a = wrap_to_pi(rng.uniform(-50.0, 50.0));
    REQUIRE(a > -kPi);
    REQUIRE(a <= kPi);
  }
}

TEST_CASE("action set has 12 fixed primitives, index = 3*nu_index + omega_index") {
  const auto& acts = action_set();
  REQUIRE(acts.size() == 12);
  CHECK(acts[0].nu == 0.0);
  CHECK(acts[0].omega == 0.0);
  CHECK(acts[1].omega == -kPi / 2.0);
  CHECK(acts[2].omega == kPi / 2.0);
  CHECK(acts[3].nu == 1.0);
  CHECK(acts[11].nu == 3.0);
  CHECK(acts[11].omega == kPi / 2.0);
}

TEST_CASE("step_robot straight line and rotation in place") {
  const WorldMap map = big_empty();
  Pose p = step_robot({0, 0, 0}, {1.0, 0.0}, 0.5, map);
  CHECK_THAT(p.x, WithinAbs(0.5, 1e-15));
  CHECK_THAT(p.y, WithinAbs(0.0, 1e-15));
  CHECK_THAT(p.theta, WithinAbs(0.0, 1e-15));

  p = step_robot({0, 0, 0}, {0.0, kPi / 2.0}, 0.5, map);
  CHECK_THAT(p.x, WithinAbs(0.0, 1e-15));
  CHECK_THAT(p.y, WithinAbs(0.0, 1e-15));
  CHECK_THAT(p.theta, WithinAbs(kPi / 4.0, 1e-12));
}

TEST_CASE("step_robot curved primitive matches the arc formula") {
  const WorldMap map = big_empty();
  const Pose p = step_robot({0, 0, 0}, {2.0, kPi / 2.0}, 0.5, map);
  CHECK_THAT(p.x, WithinAbs(0.9003163, 1e-6));
  CHECK_THAT(p.y, WithinAbs(0.3729081, 1e-6));
  CHECK_THAT(p.theta, WithinAbs(0.7853982, 1e-6));
  const Pose arc = oracles::exact_arc({0, 0, 0}, 2.0, kPi / 2.0, 0.5);
  CHECK_THAT(p.x, WithinAbs(arc.x, 1e-12));
  CHECK_THAT(p.y, WithinAbs(arc.y, 1e-12));
}

TEST_CASE("step_robot with omega = 0 moves exactly nu*tau along the heading") {
  const WorldMap map = big_empty();
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const Pose p{rng.uniform(-5, 5), rng.uniform(-5, 5), wrap_to_pi(rng.uniform(-kPi, kPi))};
    const double nu = rng.uniform(0.0, 3.0);
    const Pose q = step_robot(p, {nu, 0.0}, 0.5, map);
    REQUIRE(q.x == p.x + nu * 0.5 * std::cos(p.theta));
    REQUIRE(q.y == p.y + nu * 0.5 * std::sin(p.theta));
    REQUIRE(q.theta == p.theta);
  }
}

TEST_CASE("two steps compose to the exact 2*tau arc for all primitives") {
  const WorldMap map = big_empty();
  const double tau = 0.5;
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose p{rng.uniform(-5, 5), rng.uniform(-5, 5), wrap_to_pi(rng.uniform(-kPi, kPi))};
    for (const auto& a : action_set()) {
      const Pose two = step_robot(step_robot(p, a, tau, map), a, tau, map);
      const Pose arc = oracles::exact_arc(p, a.nu, a.omega, 2.0 * tau);
      REQUIRE_THAT(two.x, WithinAbs(arc.x, 1e-9));
      REQUIRE_THAT(two.y, WithinAbs(arc.y, 1e-9));
      REQUIRE_THAT(wrap_to_pi(two.theta - arc.theta), WithinAbs(0.0, 1e-9));
    }
  }
}

TEST_CASE("step_robot clips position but keeps heading on collision") {
  WorldMap map{{0, 0, 10, 10}, {{4, 4, 6, 6}}};
  const Pose start{3.5, 5.0, 0.0};
  const Pose hit = step_robot(start, {3.0, kPi / 2.0}, 0.5, map);
  CHECK(hit.x == start.x);
  CHECK(hit.y == start.y);
  CHECK_THAT(hit.theta, WithinAbs(kPi / 4.0, 1e-12));

  const Pose wall = step_robot({9.9, 5.0, 0.0}, {3.0, 0.0}, 0.5, map);
  CHECK(wall.x == 9.9);
  CHECK(wall.theta == 0.0);
}

TEST_CASE("step_target integrates the noiseless double integrator") {
  const WorldMap map = big_empty();
  Rng rng(5);
  const TargetState y = step_target(TargetState{0, 0, 1, 0}, map, 0.0, 0.5, rng);
  CHECK_THAT(y.v(0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(y.v(1), WithinAbs(0.0, 1e-15));
  CHECK_THAT(y.v(2), WithinAbs(1.0, 1e-15));
  CHECK_THAT(y.v(3), WithinAbs(0.0, 1e-15));
}

TEST_CASE("step_target reflects specularly off a wall") {
  const WorldMap map{{0, 0, 20, 20}, {}};
  Rng rng(5);
  // 0.1 m from the east wall, moving straight at it.
  const TargetState y0{19.9, 10.0, 1.0, 0.0};
  const TargetState y1 = step_target(y0, map, 0.0, 0.5, rng, /*reflect_noise_scale=*/0.0);
  CHECK_THAT(y1.v(2), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(y1.v(0), WithinAbs(19.4, 1e-12));
  CHECK(map.in_free_space(y1.position()));
}

TEST_CASE("reflection preserves speed when the perturbation is disabled") {
  const WorldMap map{{0, 0, 20, 20}, {{8, 8, 12, 12}}};
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    TargetState y{rng.uniform(0.2, 19.8), rng.uniform(0.2, 19.8), rng.uniform(-4, 4),
                  rng.uniform(-4, 4)};
    if (!map.in_free_space(y.position())) continue;
    const double speed_before = y.velocity().norm();
    const TargetState y2 = step_target(y, map, 0.0, 0.5, rng, 0.0);
    REQUIRE_THAT(y2.velocity().norm(), WithinAbs(speed_before, 1e-12));
    REQUIRE(map.in_free_space(y2.position()));
  }
}

TEST_CASE("process noise sample covariance matches W within 3 percent") {
  const TargetModel m = TargetModel::double_integrator(0.5, 0.01);
  const Eigen::Matrix4d chol = m.noise_cholesky();
  Rng rng(2024);
  const int n = 100000;
  Eigen::Matrix4d sum2 = Eigen::Matrix4d::Zero();
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector4d w = sample_process_noise(chol, rng);
    sum += w;
    sum2 += w * w.transpose();
  }
  const Eigen::Vector4d mean = sum / n;
  const Eigen::Matrix4d S = sum2 / n - mean * mean.transpose();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double scale = std::sqrt(m.W(i, i) * m.W(j, j));
      REQUIRE_THAT(S(i, j), WithinAbs(m.W(i, j), 0.03 * scale));
    }
  }
}

TEST_CASE("observe reports range and bearing for visible targets") {
  const WorldMap map = big_empty();
  const SensorSpec spec = noiseless_sensor();
  Rng rng(3);

  Measurement z = observe({0, 0, 0}, TargetState{5, 0, 0, 0}, spec, map, rng);
  REQUIRE(z.detected);
  CHECK_THAT(z.r, WithinAbs(5.0, 1e-12));
  CHECK_THAT(z.alpha, WithinAbs(0.0, 1e-12));

  z = observe({0, 0, 0}, TargetState{3, 4, 0, 0}, spec, map, rng);
  REQUIRE(z.detected);
  CHECK_THAT(z.r, WithinAbs(5.0, 1e-12));
  CHECK_THAT(z.alpha, WithinAbs(0.9272952, 1e-6));
}

TEST_CASE("observe respects the 120 degree field of view") {
  const WorldMap map = big_empty();
  const SensorSpec spec = noiseless_sensor();
  Rng rng(3);
  const double bearing = 70.0 * kPi / 180.0;
  const TargetState y{5.0 * std::cos(bearing), 5.0 * std::sin(bearing), 0, 0};
  const Measurement z = observe({0, 0, 0}, y, spec, map, rng);
  CHECK_FALSE(z.detected);
}

TEST_CASE("observe respects max range and line of sight") {
  const SensorSpec spec = noiseless_sensor();
  Rng rng(3);
  CHECK_FALSE(observe({0, 0, 0}, TargetState{10.5, 0, 0, 0}, spec, big_empty(), rng).detected);

  const WorldMap occluded{{-20, -20, 20, 20}, {{2, -1, 3, 1}}};
  CHECK_FALSE(observe({0, 0, 0}, TargetState{5, 0, 0, 0}, spec, occluded, rng).detected);
  // Same geometry but the target is off to the side of the obstacle.
  CHECK(observe({0, 0, 0}, TargetState{5, 4, 0, 0}, spec, occluded, rng).detected);
}

TEST_CASE("shrinking range or fov never creates a detection") {
  Rng rng(99);
  const WorldMap map{{-20, -20, 20, 20}, {{2, 2, 5, 5}, {-8, -6, -4, -2}}};
  for (int i = 0; i < 10000; ++i) {
    const Pose pose{rng.uniform(-19, 19), rng.uniform(-19, 19), wrap_to_pi(rng.uniform(-kPi, kPi))};
    const Vec2 target{rng.uniform(-19, 19), rng.uniform(-19, 19)};
    SensorSpec wide;
    wide.max_range = rng.uniform(1.0, 15.0);
    wide.fov = rng.uniform(0.2, kTwoPi);
    SensorSpec narrow = wide;
    narrow.max_range = wide.max_range * rng.uniform(0.2, 1.0);
    narrow.fov = wide.fov * rng.uniform(0.2, 1.0);
    const bool before = detectable(pose, target, wide, map);
    const bool after = detectable(pose, target, narrow, map);
    if (after) REQUIRE(before);
  }
}

TEST_CASE("closest_obstacle defaults to (max_range, pi) in open space") {
  const SensorSpec spec = noiseless_sensor();
  const WorldMap map = WorldMap::named("empty-100");
  const ObstacleReading r = closest_obstacle({50, 50, 0}, spec, map);
  CHECK_FALSE(r.found);
  CHECK(r.range == spec.max_range);
  CHECK(r.bearing == kPi);
}

TEST_CASE("closest_obstacle finds the perpendicular foot of a facing wall") {
  const SensorSpec spec = noiseless_sensor();
  const WorldMap map{{-20, -20, 20, 20}, {{2, -1, 3, 1}}};
  const ObstacleReading r = closest_obstacle({0, 0, 0}, spec, map);
  REQUIRE(r.found);
  CHECK_THAT(r.range, WithinAbs(2.0, 1e-12));
  CHECK_THAT(r.bearing, WithinAbs(0.0, 1e-12));
}

TEST_CASE("closest_obstacle is limited to the field of view") {
  const SensorSpec spec = noiseless_sensor();
  const WorldMap map{{-20, -20, 20, 20}, {{2, -1, 3, 1}}};
  // Heading away from the only obstacle: nothing visible.
  const ObstacleReading r = closest_obstacle({0, 0, kPi}, spec, map);
  CHECK_FALSE(r.found);
  CHECK(r.range == spec.max_range);
  CHECK(r.bearing == kPi);
  const ObstacleReading brute = oracles::brute_force_closest_obstacle({0, 0, kPi}, spec, map);
  CHECK_FALSE(brute.found);
}

TEST_CASE("closest_obstacle agrees with dense surface sampling") {
  SensorSpec spec = noiseless_sensor();
  const WorldMap map{{0, 0, 30, 30}, {{7, 7, 11, 11}, {19, 7, 23, 11}, {7, 19, 11, 23}}};
  Rng rng(1234);
  for (int i = 0; i < 300; ++i) {
    Pose pose{rng.uniform(0.5, 29.5), rng.uniform(0.5, 29.5), wrap_to_pi(rng.uniform(-kPi, kPi))};
    if (!map.in_free_space(pose.position())) continue;
    spec.fov = rng.uniform(0.5, kTwoPi);
    const ObstacleReading fast = closest_obstacle(pose, spec, map);
    const ObstacleReading brute = oracles::brute_force_closest_obstacle(pose, spec, map, 0.001);
    REQUIRE(fast.found == brute.found);
    if (fast.found) {
      REQUIRE_THAT(fast.range, WithinAbs(brute.range, 1e-3));
    }
  }
}

TEST_CASE("map layouts load from JSON and validate invariants") {
  const WorldMap m = WorldMap::from_json(nlohmann::json::parse(
      R"({"bounds": [0, 0, 40, 30], "obstacles": [[5, 5, 10, 10], [20, 12, 24, 18]]})"));
  CHECK(m.bounds.xmax == 40.0);
  REQUIRE(m.obstacles.size() == 2);

  CHECK_THROWS_AS(WorldMap::from_json(nlohmann::json::parse(
                      R"({"bounds": [0, 0, 10, 10], "obstacles": [[5, 5, 12, 6]]})")),
                  ConfigError);
  CHECK_THROWS_AS(WorldMap::from_json(nlohmann::json::parse(
                      R"({"bounds": [0, 0, 10, 10], "obstacles": [[2, 2, 5, 5], [4, 4, 6, 6]]})")),
                  ConfigError);
  CHECK_THROWS_AS(WorldMap::named("no-such-map"), ConfigError);

  for (const char* name : {"empty-100", "empty-50", "empty-27", "obstacle-30"}) {
    const WorldMap built_in = WorldMap::named(name);
    CHECK_NOTHROW(built_in.validate());
  }
  CHECK(WorldMap::named("obstacle-30").obstacles.size() == 4);
}
