#include "sfcplan/replay_buffer.hpp"

#include <stdexcept>

namespace sfcplan {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  data_.reserve(capacity);
}

void ReplayBuffer::append(Transition t) {
  std::lock_guard<std::mutex> lock(mu_);
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++insertions_;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return data_.size();
}

std::uint64_t ReplayBuffer::insertions() const {
  std::lock_guard<std::mutex> lock(mu_);
  return insertions_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (data_.empty()) throw std::runtime_error("sampling from empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(data_[pick(rng)]);
  return out;
}

}  // namespace sfcplan
