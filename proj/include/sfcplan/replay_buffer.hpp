#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <mutex>
#include <random>
#include <vector>

namespace sfcplan {

struct Transition {
  Eigen::VectorXd obs;
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();  // continuous action taken
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool done = false;  // collision, jerk violation, or arrival (not horizon)
};

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
// append and sample are safe to call from different threads.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void append(Transition t);
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const;

  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::vector<Transition> data_;
  std::size_t head_ = 0;
  std::uint64_t insertions_ = 0;
};

}  // namespace sfcplan
