#pragma once

#include <algorithm>
#include <vector>

#include "permkit/common.hpp"

namespace permkit::detail {

/// Bounded collector of the k smallest neighbors under the (dist, id) order.
/// `worst()` is the current k-th best distance (inf while not full), which
/// doubles as the shrinking search radius in tree/graph searches.
class TopK {
 public:
  explicit TopK(size_t k) : k_(k) { heap_.reserve(k); }

  bool full() const { return heap_.size() == k_; }
  double worst() const {
    return full() ? heap_.front().dist : std::numeric_limits<double>::infinity();
  }

  void offer(uint32_t id, double dist) {
    const Neighbor cand{id, dist};
    if (heap_.size() < k_) {
      heap_.push_back(cand);
      std::push_heap(heap_.begin(), heap_.end(), neighbor_less);
    } else if (neighbor_less(cand, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), neighbor_less);
      heap_.back() = cand;
      std::push_heap(heap_.begin(), heap_.end(), neighbor_less);
    }
  }

  /// Ascending (dist, id); consumes the heap.
  std::vector<Neighbor> take_sorted() {
    std::sort_heap(heap_.begin(), heap_.end(), neighbor_less);
    return std::move(heap_);
  }

 private:
  size_t k_;
  std::vector<Neighbor> heap_;  // max-heap on (dist, id)
};

}  // namespace permkit::detail
