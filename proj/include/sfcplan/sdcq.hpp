#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sfcplan/dense_net.hpp"
#include "sfcplan/replay_buffer.hpp"

namespace sfcplan {

struct AgentConfig {
  int obs_dim = 66;
  int bins = 60;  // discretization levels per action dimension
  std::vector<int> hidden{256, 256};
  double gamma = 0.98;
  double lr = 3e-4;
  double lr_kappa = 3e-4;
  double kappa_init = 1.0;
  double kappa_min = 1e-3;
  double kappa_max = 1e3;
  double target_entropy = 0.0;
  double polyak = 0.005;
  std::uint64_t init_seed = 0;
};

// Discrete-continuous Q pair. The discrete head maps an observation to
// 3 * bins values, one per (dimension, level); the greedy policy takes each
// dimension's argmax independently, the behavior policy samples each
// dimension from a softmax sharpened by the inverse temperature kappa. The
// continuous critic scores (observation, action) pairs and is the regression
// target for all 3 * bins discrete values, which costs one critic sweep per
// level instead of an argmax over the joint lattice.
class SdcqAgent {
 public:
  explicit SdcqAgent(const AgentConfig& cfg);

  static double binCenter(int k, int bins) {
    return (2.0 * k + 1.0) / bins - 1.0;
  }

  const AgentConfig& config() const { return cfg_; }
  double kappa() const { return kappa_; }
  long trainSteps() const { return train_steps_; }
  const DenseNet& discreteNet() const { return qd_; }
  const DenseNet& criticNet() const { return qc_; }
  const DenseNet& targetNet() const { return qc_target_; }
  // Mutable access supports finite-difference probes and surgical overrides;
  // production code should let trainStep own the parameters.
  DenseNet& discreteNet() { return qd_; }
  DenseNet& criticNet() { return qc_; }
  DenseNet& targetNet() { return qc_target_; }

  Eigen::Vector3d continuousAction(const std::array<int, 3>& levels) const;
  std::array<int, 3> greedyBins(const Eigen::VectorXd& obs) const;
  Eigen::Vector3d greedyAction(const Eigen::VectorXd& obs) const;

  // bins x 3, column d = softmax_k(kappa * q_d(obs)[k]).
  Eigen::MatrixXd boltzmannProbs(const Eigen::VectorXd& obs) const;
  std::array<int, 3> sampleBins(const Eigen::VectorXd& obs, std::mt19937_64& rng) const;
  double policyEntropy(const Eigen::VectorXd& obs) const;

  struct LossResult {
    double loss = 0.0;
    DenseNet::Gradients grads;
  };

  // Fits every (dimension, level) output to the frozen critic's value of the
  // companion action with that dimension substituted by the level's center.
  // obs is obs_dim x B, companions 3 x B (one behavior sample per column).
  // Deterministic given its inputs, which keeps it finite-difference testable.
  LossResult discreteLoss(const Eigen::MatrixXd& obs,
                          const Eigen::Matrix3Xd& companions) const;

  struct CriticResult {
    double loss = 0.0;
    DenseNet::Gradients grads;
  };

  // One-step TD regression of the critic against the target critic with
  // entropy bonus: y = r + gamma * (Q'(s', a') + kappa * H(s')) on non-final
  // transitions, y = r on final ones. next_actions / next_entropy hold the
  // pre-sampled behavior action and policy entropy at each successor state.
  CriticResult criticLoss(const std::vector<Transition>& batch,
                          const Eigen::Matrix3Xd& next_actions,
                          const Eigen::VectorXd& next_entropy) const;

  struct TrainDiag {
    double loss_d = 0.0;
    double loss_q = 0.0;
    double kappa = 0.0;
    double mean_entropy = 0.0;
  };

  // Full update on one batch: samples companion and successor actions, takes
  // both gradient steps from the same parameter snapshot, then blends the
  // target net and adapts kappa. With apply=false everything is computed but
  // no state changes, which must leave parameters bit-identical.
  TrainDiag trainStep(const std::vector<Transition>& batch, std::mt19937_64& rng,
                      bool apply = true);

  // Dual ascent on log kappa toward the entropy target: entropy above target
  // sharpens the policy, below softens it. Clamped to [kappa_min, kappa_max].
  void updateTemperature(double mean_entropy);

  void save(const std::string& path) const;
  static SdcqAgent load(const std::string& path);

  // Self-contained copy of the acting side (discrete head + temperature),
  // cheap enough to hand to sampler threads each cycle.
  struct Policy {
    DenseNet qd;
    double kappa = 1.0;
    int bins = 60;

    std::array<int, 3> greedyBins(const Eigen::VectorXd& obs) const;
    Eigen::Vector3d greedy(const Eigen::VectorXd& obs) const;
    std::array<int, 3> sampleBins(const Eigen::VectorXd& obs, std::mt19937_64& rng) const;
    Eigen::Vector3d sample(const Eigen::VectorXd& obs, std::mt19937_64& rng) const;
  };
  Policy policy() const;

 private:
  AgentConfig cfg_;
  DenseNet qd_;         // obs -> 3 * bins
  DenseNet qc_;         // [obs; action] -> 1
  DenseNet qc_target_;  // Polyak trail of qc_
  AdamOptimizer opt_d_, opt_c_;
  double kappa_ = 1.0;
  long train_steps_ = 0;
};

}  // namespace sfcplan
