#include "sfcplan/dense_net.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "sfcplan/errors.hpp"

namespace sfcplan {

void DenseNet::Gradients::setZero() {
  for (auto& g : dW) g.setZero();
  for (auto& g : db) g.setZero();
}

void DenseNet::Gradients::axpy(double scale, const Gradients& other) {
  for (std::size_t l = 0; l < dW.size(); ++l) {
    dW[l] += scale * other.dW[l];
    db[l] += scale * other.db[l];
  }
}

DenseNet::DenseNet(const std::vector<int>& widths, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("network needs at least two widths");
  std::mt19937_64 rng(seed);
  layers_.resize(widths.size() - 1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer& layer = layers_[l];
    const int fan_in = widths[l], fan_out = widths[l + 1];
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    layer.W.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.W(r, c) = dist(rng);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    layer.relu = (l + 2 < widths.size());  // all but the output layer
  }
}

std::size_t DenseNet::numParams() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.W.size() + l.b.size();
  return n;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (const auto& l : layers_) {
    h = (l.W * h + l.b).eval();
    if (l.relu) h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::MatrixXd DenseNet::forwardBatch(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd h = X;
  for (const auto& l : layers_) {
    h = ((l.W * h).colwise() + l.b).eval();
    if (l.relu) h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::MatrixXd DenseNet::forwardBatch(const Eigen::MatrixXd& X, Cache& cache) const {
  cache.inputs.assign(layers_.size(), {});
  cache.pre.assign(layers_.size(), {});
  Eigen::MatrixXd h = X;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    cache.inputs[l] = h;
    cache.pre[l] = (layers_[l].W * h).colwise() + layers_[l].b;
    h = layers_[l].relu ? cache.pre[l].cwiseMax(0.0) : cache.pre[l];
  }
  return h;
}

Eigen::MatrixXd DenseNet::backwardBatch(const Cache& cache,
                                        const Eigen::MatrixXd& upstream,
                                        Gradients& grads) const {
  Eigen::MatrixXd delta = upstream;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    if (layers_[l].relu)
      delta = delta.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    grads.dW[l].noalias() += delta * cache.inputs[l].transpose();
    grads.db[l] += delta.rowwise().sum();
    if (l > 0) delta = (layers_[l].W.transpose() * delta).eval();
  }
  return layers_.empty() ? delta : (layers_[0].W.transpose() * delta).eval();
}

DenseNet::Gradients DenseNet::makeGradients() const {
  Gradients g;
  g.dW.reserve(layers_.size());
  g.db.reserve(layers_.size());
  for (const auto& l : layers_) {
    g.dW.push_back(Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()));
    g.db.push_back(Eigen::VectorXd::Zero(l.b.size()));
  }
  return g;
}

void DenseNet::blendFrom(const DenseNet& source, double rho) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].W = (1.0 - rho) * layers_[l].W + rho * source.layers_[l].W;
    layers_[l].b = (1.0 - rho) * layers_[l].b + rho * source.layers_[l].b;
  }
}

namespace {
constexpr char kNetMagic[4] = {'S', 'F', 'C', 'W'};

template <typename T>
void writeRaw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T readRaw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CheckpointError("truncated network payload");
  return v;
}
}  // namespace

void DenseNet::save(std::ostream& os) const {
  os.write(kNetMagic, 4);
  writeRaw(os, static_cast<std::uint32_t>(layers_.size()));
  for (const auto& l : layers_) {
    writeRaw(os, static_cast<std::uint32_t>(l.W.rows()));
    writeRaw(os, static_cast<std::uint32_t>(l.W.cols()));
    writeRaw(os, static_cast<std::uint8_t>(l.relu ? 1 : 0));
    os.write(reinterpret_cast<const char*>(l.W.data()),
             static_cast<std::streamsize>(sizeof(double) * l.W.size()));
    os.write(reinterpret_cast<const char*>(l.b.data()),
             static_cast<std::streamsize>(sizeof(double) * l.b.size()));
  }
  if (!os) throw CheckpointError("failed writing network payload");
}

DenseNet DenseNet::load(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kNetMagic, 4) != 0)
    throw CheckpointError("bad network magic");
  const auto n = readRaw<std::uint32_t>(is);
  DenseNet net;
  net.layers_.resize(n);
  for (auto& l : net.layers_) {
    const auto rows = readRaw<std::uint32_t>(is);
    const auto cols = readRaw<std::uint32_t>(is);
    l.relu = readRaw<std::uint8_t>(is) != 0;
    l.W.resize(rows, cols);
    l.b.resize(rows);
    is.read(reinterpret_cast<char*>(l.W.data()),
            static_cast<std::streamsize>(sizeof(double) * l.W.size()));
    is.read(reinterpret_cast<char*>(l.b.data()),
            static_cast<std::streamsize>(sizeof(double) * l.b.size()));
    if (!is) throw CheckpointError("truncated network payload");
  }
  return net;
}

AdamOptimizer::AdamOptimizer(const DenseNet& net, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_ = net.makeGradients();
  v_ = net.makeGradients();
}

void AdamOptimizer::step(DenseNet& net, const DenseNet::Gradients& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    m_.dW[l] = beta1_ * m_.dW[l] + (1.0 - beta1_) * grads.dW[l];
    v_.dW[l] = beta2_ * v_.dW[l] + (1.0 - beta2_) * grads.dW[l].cwiseAbs2();
    layers[l].W.array() -=
        lr_ * (m_.dW[l].array() / bc1) / ((v_.dW[l].array() / bc2).sqrt() + eps_);

    m_.db[l] = beta1_ * m_.db[l] + (1.0 - beta1_) * grads.db[l];
    v_.db[l] = beta2_ * v_.db[l] + (1.0 - beta2_) * grads.db[l].cwiseAbs2();
    layers[l].b.array() -=
        lr_ * (m_.db[l].array() / bc1) / ((v_.db[l].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace sfcplan
