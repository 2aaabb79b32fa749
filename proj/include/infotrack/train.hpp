#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infotrack/agent.hpp"
#include "infotrack/checkpoint.hpp"
#include "infotrack/config.hpp"
#include "infotrack/env.hpp"
#include "infotrack/episode_log.hpp"
#include "infotrack/metrics.hpp"
#include "infotrack/planner.hpp"
#include "infotrack/version.hpp"

namespace infotrack {

/// Control policy evaluated by the harness. Implementations may read the
/// feature vector (learned policies) or the underlying pose/beliefs
/// (model-based planners). This is also the extension point for other
/// Q-learning variants.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int select(const TrackingEnv& env, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

class QPolicy : public Policy {
 public:
  QPolicy(const Mlp& net, double epsilon) : net_(&net), epsilon_(epsilon) {}

  int select(const TrackingEnv& env, Rng& rng) override {
    return act(net_->forward(env.features()), epsilon_, rng);
  }

  std::string name() const override { return "q-network"; }

 private:
  const Mlp* net_;
  double epsilon_;
};

class RandomPolicy : public Policy {
 public:
  int select(const TrackingEnv&, Rng& rng) override { return random_policy(rng); }
  std::string name() const override { return "random"; }
};

class BaselinePolicy : public Policy {
 public:
  explicit BaselinePolicy(const PlannerConfig& cfg) : cfg_(cfg) {}

  int select(const TrackingEnv& env, Rng&) override {
    return plan(env.pose(), env.beliefs(), env.config().map, env.config().sensor, env.model(),
                env.config().weights, cfg_);
  }

  std::string name() const override { return "baseline"; }

 private:
  PlannerConfig cfg_;
};

struct EvalSummary {
  SummaryStats sum;            // per-episode cumulative -sum_i log det Sigma_i
  SummaryStats per_step_mean;  // same metric averaged over steps
  std::vector<double> episode_sums;
  int episodes = 0;
  int feature_dim = 0;
  std::string policy;
};

/// Runs `episodes` evaluation episodes with per-episode random streams split
/// from `seed`. When log_dir is nonempty, one episode log is written per
/// episode as episode_<k>.jsonl.
inline EvalSummary evaluate_policy(Policy& policy, const EnvConfig& env_cfg, int episodes,
                                   std::uint64_t seed, const std::string& log_dir = "") {
  EvalSummary out;
  out.episodes = episodes;
  out.feature_dim = env_cfg.feature_dim();
  out.policy = policy.name();
  const std::string hash = config_hash(env_cfg);

  if (!log_dir.empty()) std::filesystem::create_directories(log_dir);

  std::vector<double> per_step_means;
  for (int ep = 0; ep < episodes; ++ep) {
    TrackingEnv env(env_cfg, derive_stream(seed, "eval-env", static_cast<std::uint64_t>(ep)));
    Rng policy_rng(derive_stream(seed, "eval-policy", static_cast<std::uint64_t>(ep)));

    std::unique_ptr<EpisodeLogWriter> log;
    if (!log_dir.empty()) {
      log = std::make_unique<EpisodeLogWriter>(log_dir + "/episode_" + std::to_string(ep) + ".jsonl",
                                               env, seed, hash, policy.name());
    }

    double score = 0.0;
    int steps = 0;
    while (!env.done()) {
      const int a = policy.select(env, policy_rng);
      env.step(a);
      double step_logdet = 0.0;
      for (double l : env.last_logdets()) step_logdet += l;
      score -= step_logdet;
      ++steps;
      if (log) log->record_step(env);
    }
    out.episode_sums.push_back(score);
    per_step_means.push_back(score / std::max(steps, 1));
  }
  out.sum = summarize(out.episode_sums);
  out.per_step_mean = summarize(per_step_means);
  return out;
}

inline nlohmann::json to_json(const EvalSummary& s) {
  return {{"policy", s.policy},
          {"episodes", s.episodes},
          {"feature_dim", s.feature_dim},
          {"sum", {{"mean", s.sum.mean}, {"std", s.sum.stddev}, {"min", s.sum.min}, {"max", s.sum.max}}},
          {"per_step",
           {{"mean", s.per_step_mean.mean},
            {"std", s.per_step_mean.stddev},
            {"min", s.per_step_mean.min},
            {"max", s.per_step_mean.max}}},
          {"episode_sums", s.episode_sums}};
}

struct TrainOutput {
  Mlp final_net;
  Mlp best_net;
  double best_eval = -std::numeric_limits<double>::infinity();
  int best_trajectory = 0;
  std::vector<RunRecord> records;
  int trajectories_run = 0;
  long env_steps = 0;
  long train_steps = 0;
  std::string status;  // "completed", "stopped-early" or "diverged"
  std::string run_dir;
};

namespace train_detail {

inline void write_records(const std::string& dir, const std::vector<RunRecord>& records) {
  std::ofstream raw(dir + "/records.jsonl", std::ios::trunc);
  for (const auto& r : records) raw << r.to_json().dump() << "\n";

  std::vector<double> means;
  means.reserve(records.size());
  for (const auto& r : records) means.push_back(r.eval_mean);
  const std::vector<double> smoothed = moving_average(means, 4);
  std::ofstream sm(dir + "/records_smoothed.jsonl", std::ios::trunc);
  for (std::size_t i = 0; i < records.size(); ++i) {
    nlohmann::json j{{"trajectory", records[i].trajectory}, {"eval_mean_smoothed", smoothed[i]}};
    sm << j.dump() << "\n";
  }
}

inline void write_meta(const std::string& dir, const TrainConfig& cfg, const TrainOutput& out,
                       double wall_s) {
  nlohmann::json meta;
  meta["config_hash"] = config_hash(cfg);
  meta["seed"] = cfg.seed;
  meta["version"] = kVersion;
  meta["status"] = out.status;
  meta["trajectories_run"] = out.trajectories_run;
  meta["env_steps"] = out.env_steps;
  meta["train_steps"] = out.train_steps;
  meta["best_trajectory"] = out.best_trajectory;
  meta["best_eval"] = out.best_eval;
  meta["wall_time_s"] = wall_s;
  std::ofstream f(dir + "/meta.json", std::ios::trunc);
  f << meta.dump(2) << "\n";
}

}  // namespace train_detail

/// Q-network training loop: M trajectories of T steps with epsilon-greedy
/// exploration, one training step per environment step once the replay buffer
/// holds a batch, and periodic semi-greedy evaluation that appends one
/// RunRecord per evaluation point. Artifacts (config, records, checkpoints,
/// metadata) are written under cfg.out_dir when set. On numeric divergence
/// the partial outputs are preserved and NonFiniteLoss is rethrown.
inline TrainOutput train(const TrainConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto wall_seconds = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  TrainOutput out;
  out.run_dir = cfg.out_dir;
  const bool persist = !cfg.out_dir.empty();
  if (persist) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(cfg.out_dir + "/config.json", std::ios::trunc);
    nlohmann::json j = cfg.to_json();
    j["config_hash"] = config_hash(cfg);
    j["version"] = kVersion;
    f << j.dump(2) << "\n";
  }

  TrackingEnv env(cfg.env, derive_stream(cfg.seed, "train-env"));
  DqnAgent agent(cfg.agent_config(), derive_stream(cfg.seed, "agent"));
  const long total_steps = static_cast<long>(cfg.trajectories) * cfg.env.horizon;
  const EpsilonSchedule schedule{cfg.eps_start, cfg.eps_end,
                                 static_cast<long>(cfg.anneal_fraction * total_steps)};
  const int eval_cadence = cfg.effective_eval_every();

  out.best_net = agent.net();
  out.status = "completed";

  auto finalize = [&](const char* status) {
    out.status = status;
    out.final_net = agent.net();
    out.train_steps = agent.train_steps();
    if (persist) {
      save_checkpoint(out.final_net, cfg.out_dir + "/qnet_final.ckpt");
      save_checkpoint(out.best_net, cfg.out_dir + "/qnet_best.ckpt");
      train_detail::write_records(cfg.out_dir, out.records);
      train_detail::write_meta(cfg.out_dir, cfg, out, wall_seconds());
    }
  };

  try {
    for (int traj = 1; traj <= cfg.trajectories; ++traj) {
      env.reset();
      while (!env.done()) {
        const Eigen::VectorXd s = env.features();
        const double eps = schedule.at(out.env_steps);
        const int a = agent.select_action(s, eps);
        const StepResult step = env.step(a);
        agent.record(Transition{s, a, step.reward, step.features, step.done});
        agent.learn();
        ++out.env_steps;
      }
      out.trajectories_run = traj;

      if (traj % eval_cadence == 0) {
        QPolicy policy(agent.net(), cfg.eval_epsilon);
        const EvalSummary eval =
            evaluate_policy(policy, cfg.env, cfg.eval_episodes,
                            derive_stream(cfg.seed, "train-eval", static_cast<std::uint64_t>(traj)));
        RunRecord rec{traj, eval.sum.mean, eval.sum.stddev, wall_seconds()};
        out.records.push_back(rec);
        if (eval.sum.mean > out.best_eval) {
          out.best_eval = eval.sum.mean;
          out.best_trajectory = traj;
          out.best_net = agent.net();
        }
        if (cfg.stop_at_eval_mean && out.records.size() >= 1) {
          std::vector<double> means;
          for (const auto& r : out.records) means.push_back(r.eval_mean);
          if (moving_average(means, 4).back() >= *cfg.stop_at_eval_mean) {
            finalize("stopped-early");
            return out;
          }
        }
      }
    }
  } catch (const NonFiniteLoss&) {
    finalize("diverged");
    throw;
  }

  finalize("completed");
  return out;
}

}  // namespace infotrack
