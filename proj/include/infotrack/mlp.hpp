#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "infotrack/errors.hpp"
#include "infotrack/rng.hpp"

namespace infotrack {

/// Fully connected network with rectified-linear hidden units and a linear
/// output layer. Weights and biases are public; layer l maps
/// sizes[l] -> sizes[l+1] via weights[l] (out x in, row-major semantics) and
/// biases[l].
class Mlp {
 public:
  Mlp() = default;

  /// Glorot-uniform initialization: W ~ U(+-sqrt(6/(fan_in+fan_out))), b = 0.
  Mlp(std::vector<int> sizes, Rng& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw DimensionMismatch("network needs at least input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int fan_in = sizes_[l];
      const int fan_out = sizes_[l + 1];
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      Eigen::MatrixXd w(fan_out, fan_in);
      for (int i = 0; i < fan_out; ++i) {
        for (int j = 0; j < fan_in; ++j) {
          w(i, j) = rng.uniform(-limit, limit);
        }
      }
      weights.push_back(std::move(w));
      biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t num_layers() const { return weights.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
    }
    return n;
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    if (x.size() != input_dim()) {
      throw DimensionMismatch("forward: input size " + std::to_string(x.size()) + " != " +
                              std::to_string(input_dim()));
    }
    Eigen::VectorXd h = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      h = (weights[l] * h + biases[l]).eval();
      if (l + 1 < weights.size()) h = h.cwiseMax(0.0);
    }
    return h;
  }

  /// Batched forward; columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const {
    if (X.rows() != input_dim()) throw DimensionMismatch("forward_batch: input rows mismatch");
    Eigen::MatrixXd h = X;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      h = ((weights[l] * h).colwise() + biases[l]).eval();
      if (l + 1 < weights.size()) h = h.cwiseMax(0.0);
    }
    return h;
  }

  /// Per-layer gradients, same shapes as weights/biases.
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  /// Forward pass that keeps post-activation values for backprop.
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = input, .. [L] = output
  };

  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X, Tape& tape) const {
    if (X.rows() != input_dim()) throw DimensionMismatch("forward_batch: input rows mismatch");
    tape.activations.clear();
    tape.activations.reserve(weights.size() + 1);
    tape.activations.push_back(X);
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Eigen::MatrixXd h = (weights[l] * tape.activations.back()).colwise() + biases[l];
      if (l + 1 < weights.size()) h = h.cwiseMax(0.0);
      tape.activations.push_back(std::move(h));
    }
    return tape.activations.back();
  }

  /// Backpropagation of dLoss/dOutput through the tape. The rectifier
  /// derivative is taken as 1 for strictly positive activations.
  Gradients backward(const Tape& tape, const Eigen::MatrixXd& grad_output) const {
    const std::size_t L = weights.size();
    Gradients g;
    g.weights.resize(L);
    g.biases.resize(L);
    Eigen::MatrixXd delta = grad_output;
    for (std::size_t l = L; l-- > 0;) {
      g.weights[l] = delta * tape.activations[l].transpose();
      g.biases[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = (weights[l].transpose() * delta).eval();
        delta = delta.array() * (tape.activations[l].array() > 0.0).cast<double>();
      }
    }
    return g;
  }

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

 private:
  std::vector<int> sizes_;
};

/// Adam with the usual defaults (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  double learning_rate() const { return lr_; }
  long step_count() const { return t_; }

  void step(Mlp& net, const Mlp::Gradients& g) {
    if (m_w_.empty()) {
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        m_w_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        v_w_.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        m_b_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        v_b_.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      m_w_[l] = beta1_ * m_w_[l] + (1.0 - beta1_) * g.weights[l];
      v_w_[l] = beta2_ * v_w_[l] + (1.0 - beta2_) * g.weights[l].cwiseProduct(g.weights[l]);
      net.weights[l] -=
          (lr_ * (m_w_[l] / bc1).array() / ((v_w_[l] / bc2).array().sqrt() + eps_)).matrix();
      m_b_[l] = beta1_ * m_b_[l] + (1.0 - beta1_) * g.biases[l];
      v_b_[l] = beta2_ * v_b_[l] + (1.0 - beta2_) * g.biases[l].cwiseProduct(g.biases[l]);
      net.biases[l] -=
          (lr_ * (m_b_[l] / bc1).array() / ((v_b_[l] / bc2).array().sqrt() + eps_)).matrix();
    }
  }

  void reset() {
    t_ = 0;
    m_w_.clear();
    v_w_.clear();
    m_b_.clear();
    v_b_.clear();
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

}  // namespace infotrack
