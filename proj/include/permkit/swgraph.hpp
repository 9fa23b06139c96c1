#pragma once

#include <span>

#include "permkit/common.hpp"
#include "permkit/dataset.hpp"
#include "permkit/spaces.hpp"

namespace permkit {

/// Small-world proximity graph: nodes are inserted one by one, each located
/// by running the greedy retrieval algorithm over the graph built so far and
/// connected bidirectionally to its nearest located neighbors.
class SwGraph {
 public:
  struct Params {
    uint32_t nn = 10;        // neighbors connected per insertion
    uint32_t attempts = 2;   // greedy restarts per insertion
    uint64_t rng_seed = 0;
    unsigned num_threads = 1;  // accepted for interface parity; build is
                               // sequential so that snapshots are repeatable
  };

  static SwGraph build(const DataSet& dataset, const Space& space, const Params& params);

  /// Multi-restart greedy search: per attempt, start at a random node and
  /// walk to the neighbor closest to the query until a local minimum; the
  /// candidate pool is every node evaluated across attempts.
  QueryResult knn_search(const ObjectRef& query, uint32_t k, uint32_t attempts,
                         uint64_t rng_seed) const;

  /// Same walk with explicit start nodes (one attempt per start); the
  /// random-start form draws starts and calls this.
  QueryResult knn_search_from(const ObjectRef& query, uint32_t k,
                              std::span<const uint32_t> starts) const;

  size_t size() const { return adjacency_.size(); }
  const std::vector<uint32_t>& neighbors_of(uint32_t id) const { return adjacency_[id]; }
  uint32_t nn() const { return nn_; }
  uint32_t build_attempts() const { return attempts_; }
  const BuildStats& build_stats() const { return build_stats_; }
  uint64_t memory_bytes() const;

  struct Raw;
  Raw raw() const;
  static SwGraph from_raw(Raw raw, const DataSet& dataset, const Space& space);

 private:
  SwGraph() = default;

  const DataSet* dataset_ = nullptr;
  Space space_;
  std::vector<std::vector<uint32_t>> adjacency_;
  BuildStats build_stats_;
};

struct SwGraph::Raw {
  uint32_t nn;
  uint32_t attempts;
  std::vector<std::vector<uint32_t>> adjacency;
};

}  // namespace permkit
