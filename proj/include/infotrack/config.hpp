#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infotrack/agent.hpp"
#include "infotrack/env.hpp"
#include "infotrack/errors.hpp"
#include "infotrack/rng.hpp"

namespace infotrack {

inline nlohmann::json to_json(const SensorSpec& s) {
  return {{"max_range", s.max_range}, {"fov", s.fov}, {"sigma_r", s.sigma_r}, {"sigma_b", s.sigma_b}};
}

inline nlohmann::json to_json(const RewardWeights& w) {
  return {{"kappa_m", w.kappa_m}, {"kappa_d", w.kappa_d}, {"kappa_o", w.kappa_o}};
}

inline nlohmann::json to_json(const EnvConfig& c) {
  nlohmann::json j;
  j["map_name"] = c.map_name;
  j["map"] = c.map.to_json();
  j["n_targets"] = c.n_targets;
  j["horizon"] = c.horizon;
  j["tau"] = c.tau;
  j["q"] = c.q;
  j["sensor"] = to_json(c.sensor);
  j["weights"] = to_json(c.weights);
  j["max_target_offset"] = c.max_target_offset;
  j["max_belief_offset"] = c.max_belief_offset;
  j["initial_cov"] = c.initial_cov;
  j["reflect_noise_scale"] = c.reflect_noise_scale;
  j["scale_features"] = c.scale_features;
  return j;
}

inline EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  c.map_name = j.value("map_name", c.map_name);
  if (j.contains("map")) {
    c.map = WorldMap::from_json(j.at("map"));
  } else {
    c.map = WorldMap::resolve(c.map_name);
  }
  c.n_targets = j.value("n_targets", c.n_targets);
  c.horizon = j.value("horizon", c.horizon);
  c.tau = j.value("tau", c.tau);
  c.q = j.value("q", c.q);
  if (j.contains("sensor")) {
    const auto& s = j.at("sensor");
    c.sensor.max_range = s.value("max_range", c.sensor.max_range);
    c.sensor.fov = s.value("fov", c.sensor.fov);
    c.sensor.sigma_r = s.value("sigma_r", c.sensor.sigma_r);
    c.sensor.sigma_b = s.value("sigma_b", c.sensor.sigma_b);
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    c.weights.kappa_m = w.value("kappa_m", c.weights.kappa_m);
    c.weights.kappa_d = w.value("kappa_d", c.weights.kappa_d);
    c.weights.kappa_o = w.value("kappa_o", c.weights.kappa_o);
  }
  c.max_target_offset = j.value("max_target_offset", c.max_target_offset);
  c.max_belief_offset = j.value("max_belief_offset", c.max_belief_offset);
  c.initial_cov = j.value("initial_cov", c.initial_cov);
  c.reflect_noise_scale = j.value("reflect_noise_scale", c.reflect_noise_scale);
  c.scale_features = j.value("scale_features", c.scale_features);
  c.validate();
  return c;
}

/// Full training-run configuration (Algorithm-level hyperparameters follow
/// the paper's target-tracking experiments; network width and learning rate
/// default to the single-target setting).
struct TrainConfig {
  EnvConfig env;
  QMode mode = QMode::kDqn;
  int hidden_width = 128;
  int hidden_layers = 3;
  double lr = 1e-3;
  double gamma = 0.99;
  int trajectories = 100;  // M
  std::uint64_t seed = 1;
  int batch_size = 64;
  std::size_t replay_capacity = 1000;
  int target_sync_every = 50;
  double eps_start = 1.0;
  double eps_end = 0.01;
  double anneal_fraction = 0.5;  // fraction of total env steps spent annealing
  int eval_every = 0;            // 0 = auto: every trajectory (every 2nd for N > 1)
  int eval_episodes = 5;
  double eval_epsilon = 0.05;
  std::string out_dir;
  /// Optional early stop: end training once the window-4 moving average of
  /// eval means reaches this value.
  std::optional<double> stop_at_eval_mean;

  int effective_eval_every() const {
    if (eval_every > 0) return eval_every;
    return env.n_targets > 1 ? 2 : 1;
  }

  AgentConfig agent_config() const {
    AgentConfig a;
    a.input_dim = env.feature_dim();
    a.hidden_width = hidden_width;
    a.hidden_layers = hidden_layers;
    a.n_actions = kNumActions;
    a.lr = lr;
    a.gamma = gamma;
    a.mode = mode;
    a.batch_size = batch_size;
    a.replay_capacity = replay_capacity;
    a.target_sync_every = target_sync_every;
    return a;
  }

  void validate() const {
    env.validate();
    agent_config().validate();
    if (trajectories <= 0) throw ConfigError("trajectories must be positive");
    if (eval_episodes <= 0) throw ConfigError("eval_episodes must be positive");
    if (eps_start < 0.0 || eps_start > 1.0 || eps_end < 0.0 || eps_end > 1.0) {
      throw ConfigError("epsilon endpoints must lie in [0, 1]");
    }
    if (anneal_fraction < 0.0 || anneal_fraction > 1.0) {
      throw ConfigError("anneal_fraction must lie in [0, 1]");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["env"] = infotrack::to_json(env);
    j["mode"] = to_string(mode);
    j["hidden_width"] = hidden_width;
    j["hidden_layers"] = hidden_layers;
    j["lr"] = lr;
    j["gamma"] = gamma;
    j["trajectories"] = trajectories;
    j["seed"] = seed;
    j["batch_size"] = batch_size;
    j["replay_capacity"] = replay_capacity;
    j["target_sync_every"] = target_sync_every;
    j["eps_start"] = eps_start;
    j["eps_end"] = eps_end;
    j["anneal_fraction"] = anneal_fraction;
    j["eval_every"] = eval_every;
    j["eval_episodes"] = eval_episodes;
    j["eval_epsilon"] = eval_epsilon;
    return j;
  }
};

/// Canonical hash of a configuration; any field change changes the hash.
inline std::string config_hash(const TrainConfig& cfg) {
  const std::uint64_t h = fnv1a64(cfg.to_json().dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline std::string config_hash(const EnvConfig& cfg) {
  const std::uint64_t h = fnv1a64(to_json(cfg).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace infotrack
