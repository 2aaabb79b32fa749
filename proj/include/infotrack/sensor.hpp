#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "infotrack/angles.hpp"
#include "infotrack/errors.hpp"
#include "infotrack/geometry.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/rng.hpp"
#include "infotrack/target.hpp"

namespace infotrack {

/// Range-bearing sensor with a limited field of view.
struct SensorSpec {
  double max_range = 10.0;        // meters
  double fov = 2.0 * kPi / 3.0;   // total aperture, radians (120 degrees)
  double sigma_r = 0.2;           // range noise std, meters
  double sigma_b = 0.01;          // bearing noise std, radians

  void validate() const {
    if (max_range <= 0.0) throw ConfigError("sensor max_range must be positive");
    if (fov <= 0.0 || fov > kTwoPi) throw ConfigError("sensor fov must be in (0, 2pi]");
    if (sigma_r < 0.0 || sigma_b < 0.0) throw ConfigError("sensor noise stds must be nonnegative");
  }
};

/// Per-target sensor reading. r and alpha are meaningful only when detected.
struct Measurement {
  int target_id = 0;
  bool detected = false;
  double r = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

/// Deterministic detection test: within range, within the field of view, and
/// with a clear line of sight.
inline bool detectable(const Pose& pose, const Vec2& point, const SensorSpec& spec,
                       const WorldMap& map) {
  const PolarPoint pol = to_robot_frame(pose, point);
  if (pol.range > spec.max_range) return false;
  if (std::abs(pol.bearing) > spec.fov / 2.0) return false;
  return map.line_of_sight(pose.position(), point);
}

/// Noisy range-bearing observation of one target. Undetected targets yield
/// detected = false. Range noise may push r past max_range (no clipping);
/// a negative noisy range is floored at zero.
inline Measurement observe(const Pose& pose, const TargetState& y, const SensorSpec& spec,
                           const WorldMap& map, Rng& rng, int target_id = 0) {
  Measurement z;
  z.target_id = target_id;
  if (!detectable(pose, y.position(), spec, map)) return z;
  const PolarPoint pol = to_robot_frame(pose, y.position());
  z.detected = true;
  z.r = std::max(0.0, pol.range + rng.normal(0.0, spec.sigma_r));
  z.alpha = wrap_to_pi(pol.bearing + rng.normal(0.0, spec.sigma_b));
  return z;
}

/// Closest wall/obstacle surface point in the robot frame, or the documented
/// default when nothing is in range and in view.
struct ObstacleReading {
  double range = 0.0;
  double bearing = kPi;
  bool found = false;

  static ObstacleReading none(const SensorSpec& spec) { return {spec.max_range, kPi, false}; }
};

namespace detail {

/// Ray (origin o, unit direction d) vs segment a-b. Returns the ray parameter
/// s >= 0 of the crossing, if any.
inline std::optional<double> ray_segment_intersection(const Vec2& o, const Vec2& d, const Vec2& a,
                                                      const Vec2& b) {
  const Vec2 e = b - a;
  const double denom = d.x() * (-e.y()) - d.y() * (-e.x());
  if (std::abs(denom) < 1e-14) return std::nullopt;
  const Vec2 rhs = a - o;
  const double s = (rhs.x() * (-e.y()) - rhs.y() * (-e.x())) / denom;
  const double u = (d.x() * rhs.y() - d.y() * rhs.x()) / denom;
  if (s < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return s;
}

}  // namespace detail

/// Nearest surface point over all wall/obstacle faces that lies within the
/// sensor range and field of view. Candidate minimizers per face: the
/// perpendicular foot (clamped to the face), the face endpoints, and the
/// crossings of the two field-of-view boundary rays with the face.
inline ObstacleReading closest_obstacle(const Pose& pose, const SensorSpec& spec,
                                        const WorldMap& map) {
  const Vec2 o = pose.position();
  const double half_fov = spec.fov / 2.0;

  ObstacleReading best = ObstacleReading::none(spec);
  double best_range = std::numeric_limits<double>::infinity();

  auto try_point = [&](const Vec2& p) {
    const PolarPoint pol = to_robot_frame(pose, p);
    if (pol.range > spec.max_range) return;
    if (std::abs(pol.bearing) > half_fov + 1e-9) return;
    if (pol.range < best_range) {
      best_range = pol.range;
      best = {pol.range, pol.bearing, true};
    }
  };

  const Vec2 ray_lo{std::cos(pose.theta - half_fov), std::sin(pose.theta - half_fov)};
  const Vec2 ray_hi{std::cos(pose.theta + half_fov), std::sin(pose.theta + half_fov)};

  for (const Segment& face : map.all_faces()) {
    const Vec2 e = face.b - face.a;
    const double len2 = e.squaredNorm();
    if (len2 > 0.0) {
      const double u = std::clamp((o - face.a).dot(e) / len2, 0.0, 1.0);
      try_point(face.a + u * e);
    }
    try_point(face.a);
    try_point(face.b);
    if (spec.fov < kTwoPi) {
      for (const Vec2& d : {ray_lo, ray_hi}) {
        if (const auto s = detail::ray_segment_intersection(o, d, face.a, face.b)) {
          try_point(o + *s * d);
        }
      }
    }
  }
  return best;
}

}  // namespace infotrack
