#pragma once

// Independent reference implementations used only by tests. These are kept
// deliberately separate from the library code paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "infotrack/belief.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/sensor.hpp"

namespace oracles {

/// Exact unicycle arc integration over duration dt (closed form, no sinc).
inline infotrack::Pose exact_arc(const infotrack::Pose& p, double nu, double omega, double dt) {
  infotrack::Pose out;
  if (omega == 0.0) {
    out.x = p.x + nu * dt * std::cos(p.theta);
    out.y = p.y + nu * dt * std::sin(p.theta);
    out.theta = p.theta;
    return out;
  }
  out.x = p.x + (nu / omega) * (std::sin(p.theta + omega * dt) - std::sin(p.theta));
  out.y = p.y - (nu / omega) * (std::cos(p.theta + omega * dt) - std::cos(p.theta));
  out.theta = infotrack::wrap_to_pi(p.theta + omega * dt);
  return out;
}

/// Textbook Kalman update in the simple (I - KH) Sigma form, written directly
/// from the filter equations with dynamically sized matrices.
struct KalmanResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline KalmanResult textbook_kalman_update(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                           const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                                           const Eigen::VectorXd& innovation) {
  const Eigen::MatrixXd S = H * cov * H.transpose() + R;
  const Eigen::MatrixXd K = cov * H.transpose() * S.inverse();
  KalmanResult out;
  out.mean = mean + K * innovation;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  out.cov = (I - K * H) * cov;
  return out;
}

/// Brute-force nearest visible surface point: samples each face densely and
/// filters by range and field of view.
inline infotrack::ObstacleReading brute_force_closest_obstacle(const infotrack::Pose& pose,
                                                               const infotrack::SensorSpec& spec,
                                                               const infotrack::WorldMap& map,
                                                               double step = 0.002) {
  infotrack::ObstacleReading best = infotrack::ObstacleReading::none(spec);
  double best_range = std::numeric_limits<double>::infinity();
  for (const auto& face : map.all_faces()) {
    const infotrack::Vec2 e = face.b - face.a;
    const double len = e.norm();
    const int n = std::max(2, static_cast<int>(len / step));
    for (int k = 0; k <= n; ++k) {
      const infotrack::Vec2 p = face.a + (static_cast<double>(k) / n) * e;
      const auto pol = infotrack::to_robot_frame(pose, p);
      if (pol.range > spec.max_range) continue;
      if (std::abs(pol.bearing) > spec.fov / 2.0) continue;
      if (pol.range < best_range) {
        best_range = pol.range;
        best = {pol.range, pol.bearing, true};
      }
    }
  }
  return best;
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Eigen::Matrix4d random_spd(infotrack::Rng& rng, double lo, double hi) {
  Eigen::Matrix4d M;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) M(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::Matrix4d> qr(M);
  const Eigen::Matrix4d Q = qr.householderQ();
  Eigen::Vector4d evals;
  for (int i = 0; i < 4; ++i) evals(i) = rng.uniform(lo, hi);
  return Q * evals.asDiagonal() * Q.transpose();
}

/// Q-value fixed point of a finite MDP by value iteration.
/// transition[s][a] = next state, reward_fn(s, a, s') = reward.
template <typename RewardFn>
inline std::vector<std::vector<double>> value_iteration(
    const std::vector<std::vector<int>>& transition, RewardFn reward_fn, double gamma,
    int sweeps) {
  const int S = static_cast<int>(transition.size());
  const int A = static_cast<int>(transition[0].size());
  std::vector<std::vector<double>> Q(S, std::vector<double>(A, 0.0));
  for (int it = 0; it < sweeps; ++it) {
    std::vector<std::vector<double>> next(S, std::vector<double>(A, 0.0));
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const int s2 = transition[s][a];
        double vmax = Q[s2][0];
        for (int a2 = 1; a2 < A; ++a2) vmax = std::max(vmax, Q[s2][a2]);
        next[s][a] = reward_fn(s, a, s2) + gamma * vmax;
      }
    }
    Q = next;
  }
  return Q;
}

}  // namespace oracles
