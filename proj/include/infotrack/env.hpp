#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "infotrack/belief.hpp"
#include "infotrack/errors.hpp"
#include "infotrack/geometry.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/rng.hpp"
#include "infotrack/sensor.hpp"
#include "infotrack/target.hpp"

namespace infotrack {

/// Weights of the tracking reward
///   R = -kappa_m sum_i L_i - kappa_d SD(L_1..L_N) - kappa_o o_r^{-2}
/// where L_i = log det Sigma_i of the posterior belief. The obstacle term is
/// dropped when no obstacle is in range and in view.
struct RewardWeights {
  double kappa_m = 0.2;
  double kappa_d = 0.1;
  double kappa_o = 1.0;

  void validate() const {
    if (kappa_m < 0.0 || kappa_d < 0.0 || kappa_o < 0.0) {
      throw ConfigError("reward weights must be nonnegative");
    }
  }
};

/// Optional feature scaling for training stability: radial features divided
/// by the sensor max range, angles by pi, log-dets by 50. Off by default.
struct FeatureScaling {
  bool enabled = false;
  double range_divisor = 10.0;
  double logdet_divisor = 50.0;
};

struct EnvConfig {
  std::string map_name = "empty-100";
  WorldMap map = WorldMap::named("empty-100");
  int n_targets = 1;
  int horizon = 100;  // T steps per episode
  double tau = 0.5;
  double q = 0.01;
  SensorSpec sensor;
  RewardWeights weights;
  double max_target_offset = 8.0;  // target start within this radius of the robot
  double max_belief_offset = 5.0;  // belief mean start within this radius of the target
  double initial_cov = 30.0;       // Sigma_0 = initial_cov * I4
  double reflect_noise_scale = 0.1;
  bool scale_features = false;

  int feature_dim() const { return 6 * n_targets + 2; }

  FeatureScaling scaling() const {
    return {scale_features, sensor.max_range, 50.0};
  }

  void use_map(const std::string& name_or_path) {
    map_name = name_or_path;
    map = WorldMap::resolve(name_or_path);
  }

  void validate() const {
    if (n_targets < 1) throw ConfigError("n_targets must be >= 1");
    if (horizon <= 0) throw ConfigError("horizon must be positive");
    if (tau <= 0.0) throw ConfigError("tau must be positive");
    if (q < 0.0) throw ConfigError("q must be nonnegative");
    sensor.validate();
    weights.validate();
    map.validate();
  }
};

inline std::vector<double> log_dets(const std::vector<GaussianBelief>& beliefs) {
  std::vector<double> out;
  out.reserve(beliefs.size());
  for (const auto& b : beliefs) out.push_back(log_det_cov(b));
  return out;
}

/// Population standard deviation.
inline double population_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return std::sqrt(var);
}

inline double reward_from_logdets(const std::vector<double>& logdets,
                                  const ObstacleReading& obstacle, const RewardWeights& w) {
  double sum = 0.0;
  for (double l : logdets) sum += l;
  double r = -w.kappa_m * sum - w.kappa_d * population_sd(logdets);
  if (obstacle.found) {
    const double o_r = std::max(obstacle.range, 1e-6);  // keeps the penalty finite on contact
    r -= w.kappa_o / (o_r * o_r);
  }
  return r;
}

/// Eq-style tracking reward on the posterior beliefs.
inline double reward(const std::vector<GaussianBelief>& beliefs_next,
                     const ObstacleReading& obstacle_next, const RewardWeights& w) {
  return reward_from_logdets(log_dets(beliefs_next), obstacle_next, w);
}

/// RL state vector: per target (range, bearing, speed, velocity direction,
/// log det Sigma, observed flag), all relative coordinates in the robot
/// frame, followed by the closest-obstacle polar coordinates. Length 6N+2.
inline Eigen::VectorXd featurize(const Pose& pose, const std::vector<GaussianBelief>& beliefs,
                                 const std::vector<bool>& observed,
                                 const ObstacleReading& obstacle,
                                 const FeatureScaling& scaling = {}) {
  if (beliefs.size() != observed.size()) {
    throw DimensionMismatch("featurize: beliefs and observed flags differ in length");
  }
  const int n = static_cast<int>(beliefs.size());
  Eigen::VectorXd s(6 * n + 2);
  const double r_div = scaling.enabled ? scaling.range_divisor : 1.0;
  const double a_div = scaling.enabled ? kPi : 1.0;
  const double l_div = scaling.enabled ? scaling.logdet_divisor : 1.0;
  for (int i = 0; i < n; ++i) {
    const auto& b = beliefs[i];
    const PolarPoint pos = to_robot_frame(pose, b.mean.head<2>());
    const double vx = b.mean(2), vy = b.mean(3);
    const double speed = std::hypot(vx, vy);
    const double vdir = speed > 1e-12 ? wrap_to_pi(std::atan2(vy, vx) - pose.theta) : 0.0;
    s(6 * i + 0) = pos.range / r_div;
    s(6 * i + 1) = pos.bearing / a_div;
    s(6 * i + 2) = speed;
    s(6 * i + 3) = vdir / a_div;
    s(6 * i + 4) = log_det_cov(b) / l_div;
    s(6 * i + 5) = observed[i] ? 1.0 : 0.0;
  }
  s(6 * n + 0) = obstacle.range / r_div;
  s(6 * n + 1) = obstacle.bearing / a_div;
  return s;
}

struct StepResult {
  Eigen::VectorXd features;
  double reward = 0.0;
  bool done = false;
};

/// The target-tracking MDP: robot simulation, target simulation, Bayes
/// filtering and reward, driven by a single owned random stream. One instance
/// is single-threaded; independent instances may run in parallel.
class TrackingEnv {
 public:
  TrackingEnv(EnvConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        model_(TargetModel::double_integrator(cfg_.tau, cfg_.q)),
        noise_chol_(model_.noise_cholesky()),
        rng_(seed) {
    cfg_.validate();
    reset();
  }

  const EnvConfig& config() const { return cfg_; }
  const TargetModel& model() const { return model_; }
  const Pose& pose() const { return pose_; }
  const std::vector<TargetState>& targets() const { return targets_; }
  const std::vector<GaussianBelief>& beliefs() const { return beliefs_; }
  const std::vector<bool>& observed() const { return observed_; }
  const ObstacleReading& obstacle() const { return obstacle_; }
  const Eigen::VectorXd& features() const { return features_; }
  const std::vector<double>& last_logdets() const { return logdets_; }
  double last_reward() const { return last_reward_; }
  int last_action() const { return last_action_; }
  int t() const { return t_; }
  bool done() const { return done_; }

  void reseed(std::uint64_t seed) { rng_ = Rng(seed); }

  /// Starts a new episode: robot uniform over free space, true targets within
  /// max_target_offset of the robot, belief means within max_belief_offset of
  /// their targets, Sigma_0 isotropic, all velocities zero.
  const Eigen::VectorXd& reset() {
    const Vec2 rp = sample_free_position();
    pose_.x = rp.x();
    pose_.y = rp.y();
    pose_.theta = wrap_to_pi(rng_.uniform(-kPi, kPi));

    targets_.clear();
    beliefs_.clear();
    observed_.assign(cfg_.n_targets, false);
    for (int i = 0; i < cfg_.n_targets; ++i) {
      const Vec2 tp = sample_free_disc(rp, cfg_.max_target_offset);
      targets_.push_back(TargetState{tp.x(), tp.y(), 0.0, 0.0});
      const Vec2 bp = sample_disc(tp, cfg_.max_belief_offset);
      Eigen::Vector4d mean;
      mean << bp.x(), bp.y(), 0.0, 0.0;
      beliefs_.push_back(GaussianBelief::isotropic(mean, cfg_.initial_cov));
      observed_[i] = detectable(pose_, tp, cfg_.sensor, cfg_.map);
    }
    obstacle_ = closest_obstacle(pose_, cfg_.sensor, cfg_.map);
    logdets_ = log_dets(beliefs_);
    last_reward_ = 0.0;
    last_action_ = -1;
    t_ = 0;
    done_ = false;
    features_ = featurize(pose_, beliefs_, observed_, obstacle_, cfg_.scaling());
    return features_;
  }

  /// Advances the MDP one step: robot motion, target motion, observation,
  /// filter predict/update, reward on the posterior beliefs, featurization.
  /// With suppress_detections the same world step runs but every measurement
  /// is discarded before filtering (counterfactual analysis; the random
  /// stream advances identically).
  StepResult step(int action_index, bool suppress_detections = false) {
    if (done_) throw EpisodeFinished("episode is finished; call reset()");
    if (action_index < 0 || action_index >= kNumActions) {
      throw ConfigError("action index out of range: " + std::to_string(action_index));
    }

    pose_ = step_robot(pose_, action_set()[static_cast<std::size_t>(action_index)], cfg_.tau,
                       cfg_.map);
    for (auto& y : targets_) {
      y = step_target(y, cfg_.map, model_, noise_chol_, rng_, cfg_.reflect_noise_scale);
    }

    for (int i = 0; i < cfg_.n_targets; ++i) {
      Measurement z = observe(pose_, targets_[i], cfg_.sensor, cfg_.map, rng_, i);
      if (suppress_detections) z.detected = false;
      beliefs_[i] = kf_predict(beliefs_[i], model_);
      if (z.detected) {
        try {
          beliefs_[i] = ekf_update(beliefs_[i], z, pose_, cfg_.sensor);
        } catch (const DegenerateRange&) {
          // Robot sits on the belief mean; fall back to predict-only.
          z.detected = false;
        }
      }
      observed_[i] = z.detected;
    }

    obstacle_ = closest_obstacle(pose_, cfg_.sensor, cfg_.map);
    logdets_ = log_dets(beliefs_);
    last_reward_ = reward_from_logdets(logdets_, obstacle_, cfg_.weights);
    last_action_ = action_index;
    ++t_;
    done_ = t_ >= cfg_.horizon;
    features_ = featurize(pose_, beliefs_, observed_, obstacle_, cfg_.scaling());
    return {features_, last_reward_, done_};
  }

 private:
  Vec2 sample_disc(const Vec2& center, double radius) {
    const double r = radius * std::sqrt(rng_.uniform01());
    const double phi = rng_.uniform(-kPi, kPi);
    return {center.x() + r * std::cos(phi), center.y() + r * std::sin(phi)};
  }

  Vec2 sample_free_position() {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec2 p{rng_.uniform(cfg_.map.bounds.xmin, cfg_.map.bounds.xmax),
                   rng_.uniform(cfg_.map.bounds.ymin, cfg_.map.bounds.ymax)};
      if (cfg_.map.in_free_space(p)) return p;
    }
    throw InitFailure("could not sample a free-space position in 1000 attempts");
  }

  Vec2 sample_free_disc(const Vec2& center, double radius) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec2 p = sample_disc(center, radius);
      if (cfg_.map.in_free_space(p)) return p;
    }
    throw InitFailure("could not sample a free-space position in a disc in 1000 attempts");
  }

  EnvConfig cfg_;
  TargetModel model_;
  Eigen::Matrix4d noise_chol_;
  Rng rng_;

  Pose pose_;
  std::vector<TargetState> targets_;
  std::vector<GaussianBelief> beliefs_;
  std::vector<bool> observed_;
  ObstacleReading obstacle_;
  std::vector<double> logdets_;
  Eigen::VectorXd features_;
  double last_reward_ = 0.0;
  int last_action_ = -1;
  int t_ = 0;
  bool done_ = false;
};

}  // namespace infotrack
