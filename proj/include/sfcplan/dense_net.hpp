#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sfcplan {

// Fully connected network, ReLU hidden layers, linear output, double
// precision throughout. Batches are column-major: one sample per column.
class DenseNet {
 public:
  struct Layer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
    bool relu = false;
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
    void setZero();
    void axpy(double scale, const Gradients& other);  // this += scale * other
  };

  // Forward-pass intermediates kept for the backward pass.
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // inputs[l] feeds layer l
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of layer l
  };

  DenseNet() = default;
  // widths = {in, hidden..., out}; He-uniform weight init, zero biases.
  DenseNet(const std::vector<int>& widths, std::uint64_t seed);

  int inputSize() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().W.cols()); }
  int outputSize() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().W.rows()); }
  std::size_t numLayers() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  std::size_t numParams() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forwardBatch(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd forwardBatch(const Eigen::MatrixXd& X, Cache& cache) const;

  // Accumulates parameter gradients for upstream dL/d(output) and returns
  // dL/d(input). `grads` must match the topology (allocate via makeGradients).
  Eigen::MatrixXd backwardBatch(const Cache& cache, const Eigen::MatrixXd& upstream,
                                Gradients& grads) const;

  Gradients makeGradients() const;

  // In-place Polyak blend: this = (1 - rho) * this + rho * source.
  void blendFrom(const DenseNet& source, double rho);

  void save(std::ostream& os) const;
  static DenseNet load(std::istream& is);

 private:
  std::vector<Layer> layers_;
};

// Bias-corrected Adam over a DenseNet's parameters.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const DenseNet& net, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(DenseNet& net, const DenseNet::Gradients& grads);
  long steps() const { return t_; }
  double learningRate() const { return lr_; }

 private:
  double lr_ = 3e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  DenseNet::Gradients m_, v_;
};

}  // namespace sfcplan
