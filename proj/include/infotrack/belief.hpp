#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "infotrack/angles.hpp"
#include "infotrack/errors.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/sensor.hpp"
#include "infotrack/target.hpp"

namespace infotrack {

/// Range below which the observation Jacobian is considered degenerate.
inline constexpr double kDegenerateRangeEps = 1e-6;

/// Gaussian target belief: mean (px, py, vx, vy) and 4x4 SPD covariance.
struct GaussianBelief {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();

  static GaussianBelief isotropic(const Eigen::Vector4d& mean, double var) {
    return {mean, var * Eigen::Matrix4d::Identity()};
  }
};

/// Kalman prediction through the known linear target model.
inline GaussianBelief kf_predict(const GaussianBelief& b, const TargetModel& m) {
  GaussianBelief out;
  out.mean = m.A * b.mean;
  out.cov = m.A * b.cov * m.A.transpose() + m.W;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

/// Predicted range-bearing measurement h(x, y) at the belief mean.
inline Eigen::Vector2d predict_measurement(const Pose& pose, const Eigen::Vector4d& mean) {
  const double dx = mean(0) - pose.x;
  const double dy = mean(1) - pose.y;
  return {std::hypot(dx, dy), wrap_to_pi(std::atan2(dy, dx) - pose.theta)};
}

/// Jacobian of h with respect to the target state, evaluated at the mean:
///   (1/r) [[y1-x1, y2-x2, 0, 0], [-sin(x_th + alpha), cos(x_th + alpha), 0, 0]]
/// Velocity columns are zero. Throws DegenerateRange when the robot sits on
/// top of the belief mean.
inline Eigen::Matrix<double, 2, 4> obs_jacobian(const Pose& pose, const Eigen::Vector4d& mean) {
  const double dx = mean(0) - pose.x;
  const double dy = mean(1) - pose.y;
  const double r = std::hypot(dx, dy);
  if (!(r > kDegenerateRangeEps)) {
    throw DegenerateRange("observation Jacobian undefined at range " + std::to_string(r));
  }
  const double alpha = wrap_to_pi(std::atan2(dy, dx) - pose.theta);
  Eigen::Matrix<double, 2, 4> H;
  H << dx / r, dy / r, 0.0, 0.0,                                                  //
      -std::sin(pose.theta + alpha) / r, std::cos(pose.theta + alpha) / r, 0.0, 0.0;
  return H;
}

/// EKF measurement update with the range-bearing model, R = diag(sigma_r^2,
/// sigma_b^2). The innovation bearing is wrapped to (-pi, pi] and the
/// covariance is updated in Joseph form. An undetected measurement returns the
/// belief unchanged (predict-only tracking).
inline GaussianBelief ekf_update(const GaussianBelief& b, const Measurement& z, const Pose& pose,
                                 const SensorSpec& spec) {
  if (!z.detected) return b;

  const Eigen::Matrix<double, 2, 4> H = obs_jacobian(pose, b.mean);
  Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
  R(0, 0) = spec.sigma_r * spec.sigma_r;
  R(1, 1) = spec.sigma_b * spec.sigma_b;

  const Eigen::Vector2d zhat = predict_measurement(pose, b.mean);
  Eigen::Vector2d innovation;
  innovation << z.r - zhat(0), wrap_to_pi(z.alpha - zhat(1));

  const Eigen::Matrix2d S = H * b.cov * H.transpose() + R;
  const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
  if (!std::isfinite(det) || det <= 1e-18) {
    throw SingularInnovation("innovation covariance not invertible, det = " + std::to_string(det));
  }
  Eigen::Matrix2d S_inv;
  S_inv << S(1, 1), -S(0, 1), -S(1, 0), S(0, 0);
  S_inv /= det;

  const Eigen::Matrix<double, 4, 2> K = b.cov * H.transpose() * S_inv;

  GaussianBelief out;
  out.mean = b.mean + K * innovation;
  const Eigen::Matrix4d I_KH = Eigen::Matrix4d::Identity() - K * H;
  out.cov = I_KH * b.cov * I_KH.transpose() + K * R * K.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

/// Natural-log determinant of the covariance via Cholesky.
inline double log_det_cov(const GaussianBelief& b) {
  const Eigen::LLT<Eigen::Matrix4d> llt(b.cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("covariance is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace infotrack
