#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infotrack/errors.hpp"
#include "infotrack/mlp.hpp"
#include "infotrack/robot.hpp"
#include "infotrack/rng.hpp"

namespace infotrack {

enum class QMode { kDqn, kDoubleDqn };

inline std::string to_string(QMode m) { return m == QMode::kDqn ? "dqn" : "double-dqn"; }

inline QMode qmode_from_string(const std::string& s) {
  if (s == "dqn") return QMode::kDqn;
  if (s == "double-dqn" || s == "ddqn") return QMode::kDoubleDqn;
  throw ConfigError("unknown agent mode: " + s);
}

/// One experience tuple.
struct Transition {
  Eigen::VectorXd s;
  int a = 0;
  double r = 0.0;
  Eigen::VectorXd s_next;
  bool done = false;
};

/// Fixed-capacity ring buffer with uniform batch sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }

  void add(Transition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const {
    if (items_.size() < batch) {
      throw DimensionMismatch("replay buffer holds fewer items than the batch size");
    }
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      out.push_back(&items_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(items_.size())))]);
    }
    return out;
  }

  const Transition& at(std::size_t i) const { return items_[i]; }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> items_;
};

/// Greedy action with lowest-index tie-breaking.
inline int argmax_action(const Eigen::VectorXd& q) {
  int best = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return best;
}

/// Epsilon-greedy selection over the given action values.
inline int act(const Eigen::VectorXd& q_values, double epsilon, Rng& rng) {
  if (rng.uniform01() < epsilon) {
    return rng.uniform_int(static_cast<int>(q_values.size()));
  }
  return argmax_action(q_values);
}

/// Temporal-difference targets for a batch:
///   done:        r
///   dqn:         r + gamma * max_a' Q_target(s', a')
///   double-dqn:  r + gamma * Q_target(s', argmax_a' Q_net(s', a'))
inline Eigen::VectorXd td_targets(const std::vector<const Transition*>& batch, const Mlp& net,
                                  const Mlp& target_net, double gamma, QMode mode) {
  const int B = static_cast<int>(batch.size());
  const int in = net.input_dim();
  Eigen::MatrixXd next(in, B);
  for (int i = 0; i < B; ++i) next.col(i) = batch[static_cast<std::size_t>(i)]->s_next;

  const Eigen::MatrixXd q_target = target_net.forward_batch(next);
  Eigen::MatrixXd q_online;
  if (mode == QMode::kDoubleDqn) q_online = net.forward_batch(next);

  Eigen::VectorXd targets(B);
  for (int i = 0; i < B; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    if (t.done) {
      targets(i) = t.r;
      continue;
    }
    double bootstrap;
    if (mode == QMode::kDqn) {
      bootstrap = q_target.col(i).maxCoeff();
    } else {
      const int a_star = argmax_action(q_online.col(i));
      bootstrap = q_target(a_star, i);
    }
    targets(i) = t.r + gamma * bootstrap;
  }
  return targets;
}

/// One optimization step on the mean-squared TD error of the batch. Gradients
/// flow only through the taken action of each sample. Returns the pre-update
/// loss; throws NonFiniteLoss on NaN/Inf.
inline double train_step(Mlp& net, AdamOptimizer& opt,
                         const std::vector<const Transition*>& batch,
                         const Eigen::VectorXd& targets) {
  const int B = static_cast<int>(batch.size());
  if (targets.size() != B) throw DimensionMismatch("targets and batch size differ");
  Eigen::MatrixXd X(net.input_dim(), B);
  for (int i = 0; i < B; ++i) X.col(i) = batch[static_cast<std::size_t>(i)]->s;

  Mlp::Tape tape;
  const Eigen::MatrixXd q = net.forward_batch(X, tape);

  double loss = 0.0;
  Eigen::MatrixXd grad_out = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  for (int i = 0; i < B; ++i) {
    const int a = batch[static_cast<std::size_t>(i)]->a;
    const double err = q(a, i) - targets(i);
    loss += err * err;
    grad_out(a, i) = 2.0 * err / static_cast<double>(B);
  }
  loss /= static_cast<double>(B);
  if (!std::isfinite(loss)) throw NonFiniteLoss("TD loss is not finite: " + std::to_string(loss));

  const Mlp::Gradients g = net.backward(tape, grad_out);
  opt.step(net, g);
  return loss;
}

/// Copies all parameters of net into target_net.
inline void sync_target(const Mlp& net, Mlp& target_net) { target_net = net; }

/// Linear anneal from eps_start to eps_end over the first anneal_steps
/// environment steps, constant afterwards.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.01;
  long anneal_steps = 1;

  double at(long env_step) const {
    if (anneal_steps <= 0 || env_step >= anneal_steps) return eps_end;
    const double frac = static_cast<double>(env_step) / static_cast<double>(anneal_steps);
    return eps_start + frac * (eps_end - eps_start);
  }
};

struct AgentConfig {
  int input_dim = 8;
  int hidden_width = 128;
  int hidden_layers = 3;
  int n_actions = kNumActions;
  double lr = 1e-3;
  double gamma = 0.99;
  QMode mode = QMode::kDqn;
  int batch_size = 64;
  std::size_t replay_capacity = 1000;
  int target_sync_every = 50;

  std::vector<int> layer_sizes() const {
    std::vector<int> sizes{input_dim};
    for (int i = 0; i < hidden_layers; ++i) sizes.push_back(hidden_width);
    sizes.push_back(n_actions);
    return sizes;
  }

  void validate() const {
    if (input_dim <= 0 || hidden_width <= 0 || hidden_layers <= 0 || n_actions <= 0) {
      throw ConfigError("network sizes must be positive");
    }
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("gamma must lie in [0, 1)");
    if (batch_size <= 0 || replay_capacity == 0 || target_sync_every <= 0) {
      throw ConfigError("batch, replay capacity and sync cadence must be positive");
    }
  }
};

/// Q-network learner: online net, target net, replay buffer and optimizer.
/// learn() performs one training step when the buffer holds a batch, syncing
/// the target network every target_sync_every training steps.
class DqnAgent {
 public:
  DqnAgent(const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed), buffer_(cfg.replay_capacity), opt_(cfg.lr) {
    cfg_.validate();
    Rng init_rng(derive_stream(seed, "net-init"));
    net_ = Mlp(cfg_.layer_sizes(), init_rng);
    target_ = net_;
  }

  const AgentConfig& config() const { return cfg_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const Mlp& target_net() const { return target_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long train_steps() const { return train_steps_; }
  long sync_count() const { return sync_count_; }

  int select_action(const Eigen::VectorXd& features, double epsilon) {
    return act(net_.forward(features), epsilon, rng_);
  }

  void record(Transition t) { buffer_.add(std::move(t)); }

  std::optional<double> learn() {
    if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return std::nullopt;
    const auto batch = buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_);
    const Eigen::VectorXd targets = td_targets(batch, net_, target_, cfg_.gamma, cfg_.mode);
    const double loss = train_step(net_, opt_, batch, targets);
    ++train_steps_;
    if (train_steps_ % cfg_.target_sync_every == 0) {
      sync_target(net_, target_);
      ++sync_count_;
    }
    return loss;
  }

 private:
  AgentConfig cfg_;
  Rng rng_;
  Mlp net_;
  Mlp target_;
  ReplayBuffer buffer_;
  AdamOptimizer opt_;
  long train_steps_ = 0;
  long sync_count_ = 0;
};

}  // namespace infotrack
