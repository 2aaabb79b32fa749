#pragma once

#include <Eigen/Dense>

#include "infotrack/geometry.hpp"
#include "infotrack/rng.hpp"

namespace infotrack {

/// Planar double-integrator target state (px, py, vx, vy), positions first.
struct TargetState {
  Eigen::Vector4d v = Eigen::Vector4d::Zero();

  TargetState() = default;
  TargetState(double px, double py, double vx, double vy) { v << px, py, vx, vy; }

  Vec2 position() const { return v.head<2>(); }
  Vec2 velocity() const { return v.tail<2>(); }
};

/// Known linear target model
///   y' = A y + w,  w ~ N(0, W)
///   A = [[I2, tau I2], [0, I2]],  W = q [[tau^3/3 I2, tau^2/2 I2],
///                                        [tau^2/2 I2, tau   I2]]
struct TargetModel {
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  double tau = 0.5;
  double q = 0.0;

  static TargetModel double_integrator(double tau, double q) {
    TargetModel m;
    m.tau = tau;
    m.q = q;
    m.A.setIdentity();
    m.A(0, 2) = tau;
    m.A(1, 3) = tau;
    const double t3 = q * tau * tau * tau / 3.0;
    const double t2 = q * tau * tau / 2.0;
    const double t1 = q * tau;
    m.W.setZero();
    m.W(0, 0) = t3;
    m.W(1, 1) = t3;
    m.W(2, 2) = t1;
    m.W(3, 3) = t1;
    m.W(0, 2) = m.W(2, 0) = t2;
    m.W(1, 3) = m.W(3, 1) = t2;
    return m;
  }

  /// Lower Cholesky factor of W (zero when q = 0).
  Eigen::Matrix4d noise_cholesky() const {
    if (q <= 0.0) return Eigen::Matrix4d::Zero();
    return Eigen::LLT<Eigen::Matrix4d>(W).matrixL();
  }
};

/// Draws a process-noise sample w ~ N(0, W).
inline Eigen::Vector4d sample_process_noise(const Eigen::Matrix4d& noise_chol, Rng& rng) {
  Eigen::Vector4d z;
  z << rng.normal(), rng.normal(), rng.normal(), rng.normal();
  return noise_chol * z;
}

/// One target step: y' = A y + w. When the nominal position step crosses a
/// wall or obstacle face, the velocity component normal to that face is
/// negated, both velocity components receive Gaussian noise with
/// std = reflect_noise_scale * speed, and the position step is re-integrated
/// from the pre-step position. Up to four reflections are applied, then the
/// position is clamped into free space.
inline TargetState step_target(const TargetState& y, const WorldMap& map, const TargetModel& m,
                               const Eigen::Matrix4d& noise_chol, Rng& rng,
                               double reflect_noise_scale = 0.1) {
  Eigen::Vector4d nominal = m.A * y.v;
  if (m.q > 0.0) nominal += sample_process_noise(noise_chol, rng);

  const Vec2 p0 = y.position();
  Vec2 p1 = nominal.head<2>();
  Vec2 vel = nominal.tail<2>();

  for (int i = 0; i < 4; ++i) {
    const auto crossing = map.first_face_crossing(p0, p1);
    if (!crossing) break;
    if (crossing->axis == 0) {
      vel.x() = -vel.x();
    } else {
      vel.y() = -vel.y();
    }
    if (reflect_noise_scale > 0.0) {
      const double s = reflect_noise_scale * vel.norm();
      vel.x() += rng.normal(0.0, s);
      vel.y() += rng.normal(0.0, s);
    }
    p1 = p0 + m.tau * vel;
  }
  if (!map.in_free_space(p1)) p1 = map.project_to_free(p1);

  TargetState out;
  out.v << p1.x(), p1.y(), vel.x(), vel.y();
  return out;
}

inline TargetState step_target(const TargetState& y, const WorldMap& map, double q, double tau,
                               Rng& rng, double reflect_noise_scale = 0.1) {
  const TargetModel m = TargetModel::double_integrator(tau, q);
  return step_target(y, map, m, m.noise_cholesky(), rng, reflect_noise_scale);
}

}  // namespace infotrack
