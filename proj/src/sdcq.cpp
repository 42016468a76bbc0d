#include "sfcplan/sdcq.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

constexpr std::uint32_t kAgentVersion = 1;
constexpr char kAgentMagic[4] = {'S', 'F', 'C', 'A'};
constexpr int kChunk = 4096;  // critic batch columns evaluated at once

std::vector<int> withEnds(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> widths;
  widths.push_back(in);
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  return widths;
}

// Row vector of net outputs over a wide batch without materializing every
// hidden activation at full width.
Eigen::RowVectorXd forwardChunked(const DenseNet& net, const Eigen::MatrixXd& X) {
  Eigen::RowVectorXd out(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); c += kChunk) {
    const Eigen::Index w = std::min<Eigen::Index>(kChunk, X.cols() - c);
    out.segment(c, w) = net.forwardBatch(X.middleCols(c, w)).row(0);
  }
  return out;
}

Eigen::MatrixXd softmaxColumns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Eigen::VectorXd shifted =
        logits.col(c).array() - logits.col(c).maxCoeff();
    const Eigen::VectorXd e = shifted.array().exp();
    p.col(c) = e / e.sum();
  }
  return p;
}

double columnEntropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  return h;
}

// bins x 3 view of a stacked 3*bins output vector.
Eigen::MatrixXd perDim(const Eigen::VectorXd& q, int bins) {
  Eigen::MatrixXd m(bins, 3);
  for (int d = 0; d < 3; ++d) m.col(d) = q.segment(d * bins, bins);
  return m;
}

std::array<int, 3> argmaxPerDim(const Eigen::VectorXd& q, int bins) {
  std::array<int, 3> out{};
  for (int d = 0; d < 3; ++d) {
    int best = 0;
    for (int k = 1; k < bins; ++k)
      if (q[d * bins + k] > q[d * bins + best]) best = k;
    out[d] = best;
  }
  return out;
}

std::array<int, 3> sampleFromProbs(const Eigen::MatrixXd& probs,
                                   std::mt19937_64& rng) {
  std::array<int, 3> out{};
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int bins = static_cast<int>(probs.rows());
  for (int d = 0; d < 3; ++d) {
    const double u = u01(rng);
    double acc = 0.0;
    int pick = bins - 1;
    for (int k = 0; k < bins; ++k) {
      acc += probs(k, d);
      if (u <= acc) {
        pick = k;
        break;
      }
    }
    out[d] = pick;
  }
  return out;
}

Eigen::Vector3d centersOf(const std::array<int, 3>& levels, int bins) {
  return {SdcqAgent::binCenter(levels[0], bins), SdcqAgent::binCenter(levels[1], bins),
          SdcqAgent::binCenter(levels[2], bins)};
}

template <typename T>
void writeRaw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T readRaw(std::istream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CheckpointError("truncated checkpoint: " + path);
  return v;
}

}  // namespace

SdcqAgent::SdcqAgent(const AgentConfig& cfg)
    : cfg_(cfg),
      qd_(withEnds(cfg.obs_dim, cfg.hidden, 3 * cfg.bins), cfg.init_seed),
      qc_(withEnds(cfg.obs_dim + 3, cfg.hidden, 1), cfg.init_seed + 1),
      qc_target_(qc_),
      opt_d_(qd_, cfg.lr),
      opt_c_(qc_, cfg.lr),
      kappa_(cfg.kappa_init) {}

Eigen::Vector3d SdcqAgent::continuousAction(const std::array<int, 3>& levels) const {
  return centersOf(levels, cfg_.bins);
}

std::array<int, 3> SdcqAgent::greedyBins(const Eigen::VectorXd& obs) const {
  return argmaxPerDim(qd_.forward(obs), cfg_.bins);
}

Eigen::Vector3d SdcqAgent::greedyAction(const Eigen::VectorXd& obs) const {
  return continuousAction(greedyBins(obs));
}

Eigen::MatrixXd SdcqAgent::boltzmannProbs(const Eigen::VectorXd& obs) const {
  return softmaxColumns(kappa_ * perDim(qd_.forward(obs), cfg_.bins));
}

std::array<int, 3> SdcqAgent::sampleBins(const Eigen::VectorXd& obs,
                                         std::mt19937_64& rng) const {
  return sampleFromProbs(boltzmannProbs(obs), rng);
}

double SdcqAgent::policyEntropy(const Eigen::VectorXd& obs) const {
  const Eigen::MatrixXd p = boltzmannProbs(obs);
  return columnEntropy(p.col(0)) + columnEntropy(p.col(1)) + columnEntropy(p.col(2));
}

SdcqAgent::LossResult SdcqAgent::discreteLoss(const Eigen::MatrixXd& obs,
                                              const Eigen::Matrix3Xd& companions) const {
  const int bins = cfg_.bins;
  const Eigen::Index B = obs.cols();
  const int rows = 3 * bins;

  DenseNet::Cache cache;
  const Eigen::MatrixXd qd = qd_.forwardBatch(obs, cache);  // rows x B

  // Critic input for output (d, k) of sample b: [obs_b; companion_b] with
  // action dimension d replaced by the k-th level center.
  Eigen::MatrixXd critic_in(cfg_.obs_dim + 3, B * rows);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (int d = 0; d < 3; ++d) {
      for (int k = 0; k < bins; ++k) {
        const Eigen::Index col = b * rows + d * bins + k;
        critic_in.col(col).head(cfg_.obs_dim) = obs.col(b);
        critic_in.col(col).tail<3>() = companions.col(b);
        critic_in(cfg_.obs_dim + d, col) = binCenter(k, bins);
      }
    }
  }
  const Eigen::RowVectorXd targets = forwardChunked(qc_, critic_in);

  Eigen::MatrixXd diff(rows, B);
  for (Eigen::Index b = 0; b < B; ++b)
    diff.col(b) = qd.col(b) - targets.segment(b * rows, rows).transpose();

  LossResult res;
  res.loss = diff.squaredNorm() / static_cast<double>(B);
  res.grads = qd_.makeGradients();
  qd_.backwardBatch(cache, diff * (2.0 / static_cast<double>(B)), res.grads);
  return res;
}

SdcqAgent::CriticResult SdcqAgent::criticLoss(const std::vector<Transition>& batch,
                                              const Eigen::Matrix3Xd& next_actions,
                                              const Eigen::VectorXd& next_entropy) const {
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(cfg_.obs_dim + 3, B), xn(cfg_.obs_dim + 3, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    x.col(b).head(cfg_.obs_dim) = batch[b].obs;
    x.col(b).tail<3>() = batch[b].alpha;
    xn.col(b).head(cfg_.obs_dim) = batch[b].next_obs;
    xn.col(b).tail<3>() = next_actions.col(b);
  }

  DenseNet::Cache cache;
  const Eigen::RowVectorXd pred = qc_.forwardBatch(x, cache).row(0);
  const Eigen::RowVectorXd qnext = forwardChunked(qc_target_, xn);

  Eigen::RowVectorXd y(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    y[b] = batch[b].reward;
    if (!batch[b].done)
      y[b] += cfg_.gamma * (qnext[b] + kappa_ * next_entropy[b]);
  }

  const Eigen::RowVectorXd diff = pred - y;
  CriticResult res;
  res.loss = diff.squaredNorm() / static_cast<double>(B);
  res.grads = qc_.makeGradients();
  qc_.backwardBatch(cache, diff * (2.0 / static_cast<double>(B)), res.grads);
  return res;
}

SdcqAgent::TrainDiag SdcqAgent::trainStep(const std::vector<Transition>& batch,
                                          std::mt19937_64& rng, bool apply) {
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd obs(cfg_.obs_dim, B);
  for (Eigen::Index b = 0; b < B; ++b) obs.col(b) = batch[b].obs;

  // Successor behavior actions and entropies, then companion actions at the
  // current observations; sampled in that fixed order for reproducibility.
  Eigen::Matrix3Xd next_actions(3, B);
  Eigen::VectorXd next_entropy(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Eigen::MatrixXd p =
        softmaxColumns(kappa_ * perDim(qd_.forward(batch[b].next_obs), cfg_.bins));
    next_actions.col(b) = centersOf(sampleFromProbs(p, rng), cfg_.bins);
    next_entropy[b] =
        columnEntropy(p.col(0)) + columnEntropy(p.col(1)) + columnEntropy(p.col(2));
  }
  Eigen::Matrix3Xd companions(3, B);
  for (Eigen::Index b = 0; b < B; ++b)
    companions.col(b) = centersOf(sampleBins(batch[b].obs, rng), cfg_.bins);

  const CriticResult critic = criticLoss(batch, next_actions, next_entropy);
  const LossResult discrete = discreteLoss(obs, companions);

  TrainDiag diag;
  diag.loss_q = critic.loss;
  diag.loss_d = discrete.loss;
  diag.mean_entropy = next_entropy.mean();
  if (apply) {
    opt_c_.step(qc_, critic.grads);
    opt_d_.step(qd_, discrete.grads);
    qc_target_.blendFrom(qc_, cfg_.polyak);
    updateTemperature(diag.mean_entropy);
    ++train_steps_;
  }
  diag.kappa = kappa_;
  return diag;
}

void SdcqAgent::updateTemperature(double mean_entropy) {
  double log_kappa = std::log(kappa_);
  log_kappa += cfg_.lr_kappa * kappa_ * (mean_entropy - cfg_.target_entropy);
  kappa_ = std::clamp(std::exp(log_kappa), cfg_.kappa_min, cfg_.kappa_max);
}

void SdcqAgent::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
  os.write(kAgentMagic, 4);
  writeRaw(os, kAgentVersion);
  writeRaw(os, static_cast<std::uint32_t>(cfg_.obs_dim));
  writeRaw(os, static_cast<std::uint32_t>(cfg_.bins));
  writeRaw(os, static_cast<std::uint32_t>(cfg_.hidden.size()));
  for (int h : cfg_.hidden) writeRaw(os, static_cast<std::uint32_t>(h));
  writeRaw(os, cfg_.gamma);
  writeRaw(os, cfg_.lr);
  writeRaw(os, cfg_.lr_kappa);
  writeRaw(os, cfg_.kappa_min);
  writeRaw(os, cfg_.kappa_max);
  writeRaw(os, cfg_.target_entropy);
  writeRaw(os, cfg_.polyak);
  writeRaw(os, cfg_.init_seed);
  writeRaw(os, kappa_);
  writeRaw(os, static_cast<std::int64_t>(train_steps_));
  qd_.save(os);
  qc_.save(os);
  qc_target_.save(os);
  if (!os) throw CheckpointError("failed writing checkpoint: " + path);
}

SdcqAgent SdcqAgent::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kAgentMagic, 4) != 0)
    throw CheckpointError("bad checkpoint magic: " + path);
  if (readRaw<std::uint32_t>(is, path) != kAgentVersion)
    throw CheckpointError("unsupported checkpoint version: " + path);

  AgentConfig cfg;
  cfg.obs_dim = static_cast<int>(readRaw<std::uint32_t>(is, path));
  cfg.bins = static_cast<int>(readRaw<std::uint32_t>(is, path));
  const auto nh = readRaw<std::uint32_t>(is, path);
  cfg.hidden.resize(nh);
  for (auto& h : cfg.hidden) h = static_cast<int>(readRaw<std::uint32_t>(is, path));
  cfg.gamma = readRaw<double>(is, path);
  cfg.lr = readRaw<double>(is, path);
  cfg.lr_kappa = readRaw<double>(is, path);
  cfg.kappa_min = readRaw<double>(is, path);
  cfg.kappa_max = readRaw<double>(is, path);
  cfg.target_entropy = readRaw<double>(is, path);
  cfg.polyak = readRaw<double>(is, path);
  cfg.init_seed = readRaw<std::uint64_t>(is, path);
  const double kappa = readRaw<double>(is, path);
  const auto steps = readRaw<std::int64_t>(is, path);

  SdcqAgent agent(cfg);
  agent.qd_ = DenseNet::load(is);
  agent.qc_ = DenseNet::load(is);
  agent.qc_target_ = DenseNet::load(is);
  agent.kappa_ = kappa;
  agent.train_steps_ = steps;
  agent.opt_d_ = AdamOptimizer(agent.qd_, cfg.lr);
  agent.opt_c_ = AdamOptimizer(agent.qc_, cfg.lr);
  return agent;
}

SdcqAgent::Policy SdcqAgent::policy() const {
  Policy p;
  p.qd = qd_;
  p.kappa = kappa_;
  p.bins = cfg_.bins;
  return p;
}

std::array<int, 3> SdcqAgent::Policy::greedyBins(const Eigen::VectorXd& obs) const {
  return argmaxPerDim(qd.forward(obs), bins);
}

Eigen::Vector3d SdcqAgent::Policy::greedy(const Eigen::VectorXd& obs) const {
  return centersOf(greedyBins(obs), bins);
}

std::array<int, 3> SdcqAgent::Policy::sampleBins(const Eigen::VectorXd& obs,
                                                 std::mt19937_64& rng) const {
  return sampleFromProbs(softmaxColumns(kappa * perDim(qd.forward(obs), bins)), rng);
}

Eigen::Vector3d SdcqAgent::Policy::sample(const Eigen::VectorXd& obs,
                                          std::mt19937_64& rng) const {
  return centersOf(sampleBins(obs, rng), bins);
}

}  // namespace sfcplan
