#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "dlau/error.hpp"

namespace dlau {

/// Bounded FIFO between pipeline stages. A push into a full queue is refused
/// and counted as a producer stall; nothing is ever dropped.
template <typename T>
class FifoModel {
 public:
  explicit FifoModel(std::size_t depth) : depth_(depth) {
    if (depth == 0) throw InvalidArgument("fifo depth must be >= 1");
  }

  std::size_t depth() const { return depth_; }
  std::size_t occupancy() const { return queue_.size(); }
  bool full() const { return queue_.size() >= depth_; }
  bool empty() const { return queue_.empty(); }

  bool try_push(const T& value) {
    if (full()) {
      ++stall_count_;
      return false;
    }
    queue_.push_back(value);
    ++push_count_;
    max_occupancy_ = std::max(max_occupancy_, queue_.size());
    return true;
  }

  const T* front() const { return queue_.empty() ? nullptr : &queue_.front(); }

  std::optional<T> pop() {
    if (queue_.empty()) return std::nullopt;
    T v = std::move(queue_.front());
    queue_.pop_front();
    ++pop_count_;
    return v;
  }

  std::uint64_t push_count() const { return push_count_; }
  std::uint64_t pop_count() const { return pop_count_; }
  std::uint64_t stall_count() const { return stall_count_; }
  std::size_t max_occupancy() const { return max_occupancy_; }

 private:
  std::size_t depth_;
  std::deque<T> queue_;
  std::uint64_t push_count_ = 0;
  std::uint64_t pop_count_ = 0;
  std::uint64_t stall_count_ = 0;
  std::size_t max_occupancy_ = 0;
};

}  // namespace dlau
