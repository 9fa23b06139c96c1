#pragma once

#include <optional>

#include "permkit/common.hpp"
#include "permkit/dataset.hpp"
#include "permkit/detail/topk.hpp"
#include "permkit/spaces.hpp"

namespace permkit {

/// Polynomial pruner: with the query inside the pivot ball, the outer
/// partition is skipped when (R - d(pi,q))^beta * alpha_left > r, and
/// symmetrically for the inner partition. beta=1, alpha=1 is the exact
/// metric test.
struct PrunerParams {
  double alpha_left = 1.0;
  double alpha_right = 1.0;
  uint32_t beta = 1;  // 1 or 2
};

/// Default beta per space kind: 2 for the KL-divergence, 1 otherwise.
inline uint32_t default_beta(SpaceKind kind) { return kind == SpaceKind::KLDiv ? 2 : 1; }

/// Vantage-point tree over the original space: median-radius ball
/// partitioning with leaf buckets, searched as a decreasing-radius scan.
class VpTree {
 public:
  struct Params {
    uint32_t bucket_size = 50;
    uint64_t rng_seed = 0;
  };

  struct Node {
    uint32_t pivot_id = 0;
    double radius = 0.0;
    int32_t left = -1;   // -1 = absent
    int32_t right = -1;
    uint32_t bucket_begin = 0;  // leaf: range into ids(); internal: begin==end
    uint32_t bucket_end = 0;
    bool leaf() const { return left < 0 && right < 0 && bucket_end >= bucket_begin; }
  };

  static VpTree build(const DataSet& dataset, const Space& space, const Params& params);

  QueryResult knn_search(const ObjectRef& query, uint32_t k, const PrunerParams& pruner) const;

  size_t dataset_size() const { return n_; }
  bool empty_tree() const { return nodes_.empty() && ids_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<uint32_t>& ids() const { return ids_; }
  int32_t root() const { return root_; }
  const BuildStats& build_stats() const { return build_stats_; }
  uint64_t memory_bytes() const;

  struct Raw;
  Raw raw() const;
  static VpTree from_raw(Raw raw, const DataSet& dataset, const Space& space);

 private:
  VpTree() = default;
  int32_t build_node(std::vector<uint32_t>& pool, class VpBuildCtx& ctx);
  void attach_bucket_rows();
  void search_node(int32_t at, const ObjectRef& query, const PrunerParams& pruner,
                   detail::TopK& top, uint64_t& dist_comps) const;

  const DataSet* dataset_ = nullptr;
  Space space_;
  uint32_t bucket_size_ = 50;
  size_t n_ = 0;
  int32_t root_ = -1;
  std::vector<Node> nodes_;
  std::vector<uint32_t> ids_;  // leaf buckets, each a contiguous range
  // Dense-space fast path: bucket rows copied into one contiguous block in
  // ids_ order (plus the parallel log rows for cached KL).
  std::vector<double> bucket_rows_;
  std::vector<double> bucket_logs_;
  BuildStats build_stats_;
};

struct VpTree::Raw {
  uint32_t bucket_size;
  int32_t root;
  std::vector<Node> nodes;
  std::vector<uint32_t> ids;
};

// ---- tuning ---------------------------------------------------------------

struct VpTuneGrid {
  double alpha_min = 0x1p-10;
  double alpha_max = 0x1p10;
  uint32_t grid_points = 9;   // per axis, log-spaced
  uint32_t iterations = 8;    // shrink steps (factor 2 each)
  uint32_t num_queries = 100;
  uint32_t bucket_size = 50;
  std::optional<uint32_t> beta_override;
  uint64_t rng_seed = 0;
};

struct VpTuneTraceEntry {
  PrunerParams params;
  double recall;
  double mean_dist_comps;
  double est_speedup;  // brute-force distance computations / method's
};

struct VpTuneResult {
  PrunerParams params;
  double recall = 0.0;
  double est_speedup = 0.0;
  bool reached = false;  // recall band attained
  std::vector<VpTuneTraceEntry> trace;
};

/// Shrinking-grid search over (alpha_left, alpha_right) on a sample small
/// enough for exact oracle computation. Selects, among cells whose recall
/// falls in [band_lo, band_hi], the one with the fewest distance
/// computations (the deterministic speed-up proxy); reports best-found with
/// reached=false when the band is never attained.
VpTuneResult tune_vptree(const DataSet& sample, const Space& space, double band_lo,
                         double band_hi, uint32_t k, const VpTuneGrid& grid);

}  // namespace permkit
