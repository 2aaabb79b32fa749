#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "infotrack/belief.hpp"
#include "infotrack/env.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/rng.hpp"
#include "infotrack/sensor.hpp"

namespace infotrack {

struct PlannerConfig {
  int horizon = 3;
  double gamma = 0.99;
  double prune_eps = 5.0;  // nodes trailing the depth-best by more are dropped

  static PlannerConfig no_pruning(int horizon, double gamma) {
    return {horizon, gamma, std::numeric_limits<double>::infinity()};
  }
};

namespace planner_detail {

struct PlanNode {
  Pose pose;
  std::vector<GaussianBelief> beliefs;
  double score = 0.0;
  int first_action = -1;
};

/// Deterministic belief advance under the maximum-likelihood-measurement
/// assumption: Kalman predict, plus a covariance-only EKF update whenever the
/// predicted mean is observable from the pose. The mean is unchanged by an
/// update with zero innovation.
inline void advance_beliefs(std::vector<GaussianBelief>& beliefs, const Pose& pose,
                            const WorldMap& map, const SensorSpec& spec,
                            const TargetModel& model) {
  for (auto& b : beliefs) {
    b = kf_predict(b, model);
    if (!detectable(pose, b.mean.head<2>(), spec, map)) continue;
    Measurement ml;
    ml.detected = true;
    const Eigen::Vector2d zhat = predict_measurement(pose, b.mean);
    ml.r = zhat(0);
    ml.alpha = zhat(1);
    try {
      b = ekf_update(b, ml, pose, spec);
    } catch (const DegenerateRange&) {
      // Pose on top of the mean; keep the predicted belief.
    }
  }
}

}  // namespace planner_detail

/// Finite-horizon search over motion-primitive sequences. Expands the 12-ary
/// tree breadth-first; each node scores the Kalman-predicted beliefs with the
/// tracking reward, discounted along the path. Per depth, nodes whose
/// accumulated score trails the best by more than prune_eps are pruned.
/// Returns the first action of the best leaf (lowest-index tie-break).
inline int plan(const Pose& pose, const std::vector<GaussianBelief>& beliefs, const WorldMap& map,
                const SensorSpec& spec, const TargetModel& model, const RewardWeights& weights,
                const PlannerConfig& cfg) {
  using planner_detail::PlanNode;
  std::vector<PlanNode> level{PlanNode{pose, beliefs, 0.0, -1}};

  for (int depth = 1; depth <= cfg.horizon; ++depth) {
    std::vector<PlanNode> next;
    next.reserve(level.size() * kNumActions);
    const double discount = std::pow(cfg.gamma, depth - 1);
    for (const PlanNode& node : level) {
      for (int a = 0; a < kNumActions; ++a) {
        PlanNode child;
        child.pose = step_robot(node.pose, action_set()[static_cast<std::size_t>(a)], model.tau, map);
        child.beliefs = node.beliefs;
        planner_detail::advance_beliefs(child.beliefs, child.pose, map, spec, model);
        const double r =
            reward(child.beliefs, closest_obstacle(child.pose, spec, map), weights);
        child.score = node.score + discount * r;
        child.first_action = depth == 1 ? a : node.first_action;
        next.push_back(std::move(child));
      }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const PlanNode& n : next) best = std::max(best, n.score);
    if (std::isfinite(cfg.prune_eps)) {
      std::erase_if(next, [&](const PlanNode& n) { return n.score < best - cfg.prune_eps; });
    }
    level = std::move(next);
  }

  int best_action = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& n : level) {
    if (n.score > best_score) {
      best_score = n.score;
      best_action = n.first_action;
    }
  }
  return best_action;
}

/// Uniform lower-bound comparator policy.
inline int random_policy(Rng& rng) { return rng.uniform_int(kNumActions); }

}  // namespace infotrack
