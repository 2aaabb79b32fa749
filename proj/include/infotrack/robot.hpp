#pragma once

#include <array>
#include <cmath>

#include "infotrack/angles.hpp"
#include "infotrack/geometry.hpp"

namespace infotrack {

/// SE(2) robot configuration. theta is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

/// One (linear velocity, angular velocity) pair applied for a sampling period.
struct MotionPrimitive {
  double nu = 0.0;     // m/s
  double omega = 0.0;  // rad/s
};

inline constexpr int kNumActions = 12;

/// The fixed 12-primitive action set: nu in {0,1,2,3} m/s crossed with
/// omega in {0, -pi/2, +pi/2} rad/s. Index = 3*nu_index + omega_index.
inline const std::array<MotionPrimitive, kNumActions>& action_set() {
  static const std::array<MotionPrimitive, kNumActions> actions = [] {
    std::array<MotionPrimitive, kNumActions> a{};
    const double nus[4] = {0.0, 1.0, 2.0, 3.0};
    const double omegas[3] = {0.0, -kPi / 2.0, kPi / 2.0};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) {
        a[3 * i + j] = {nus[i], omegas[j]};
      }
    }
    return a;
  }();
  return actions;
}

/// Differential-drive step over one sampling period tau:
///   x  += nu tau sinc(omega tau / 2) cos(theta + omega tau / 2)
///   y  += nu tau sinc(omega tau / 2) sin(theta + omega tau / 2)
///   th += tau omega
/// which coincides with exact constant-arc integration. If the new position
/// penetrates an obstacle or the outer wall, the position is clipped back to
/// the pre-move position while the heading update is kept.
inline Pose step_robot(const Pose& pose, const MotionPrimitive& a, double tau,
                       const WorldMap& map) {
  const double half = a.omega * tau / 2.0;
  const double ds = a.nu * tau * sinc(half);
  Pose next;
  next.x = pose.x + ds * std::cos(pose.theta + half);
  next.y = pose.y + ds * std::sin(pose.theta + half);
  next.theta = wrap_to_pi(pose.theta + tau * a.omega);
  if (!map.in_free_space(next.position())) {
    next.x = pose.x;
    next.y = pose.y;
  }
  return next;
}

/// Polar coordinates of a world point in the robot frame.
struct PolarPoint {
  double range = 0.0;
  double bearing = 0.0;  // (-pi, pi]
};

inline PolarPoint to_robot_frame(const Pose& pose, const Vec2& p) {
  const double dx = p.x() - pose.x;
  const double dy = p.y() - pose.y;
  return {std::hypot(dx, dy), wrap_to_pi(std::atan2(dy, dx) - pose.theta)};
}

}  // namespace infotrack
