#include "permkit/vptree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "permkit/rng.hpp"

namespace permkit {

class VpBuildCtx {
 public:
  VpBuildCtx(const DataSet& ds, const Space& space, uint64_t seed)
      : ds_(ds), space_(space), eng_(make_engine(seed, 0x59e)) {}

  const DataSet& ds_;
  const Space& space_;
  RandomEngine eng_;
  uint64_t dist_comps = 0;
};

VpTree VpTree::build(const DataSet& dataset, const Space& space, const Params& params) {
  if (params.bucket_size < 1) throw std::invalid_argument("vptree: bucket_size must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  VpTree tree;
  tree.dataset_ = &dataset;
  tree.space_ = space;
  tree.bucket_size_ = params.bucket_size;
  tree.n_ = dataset.size();
  tree.ids_.reserve(tree.n_);

  VpBuildCtx ctx(dataset, space, params.rng_seed);
  std::vector<uint32_t> pool(tree.n_);
  std::iota(pool.begin(), pool.end(), 0u);
  tree.root_ = tree.n_ == 0 ? -1 : tree.build_node(pool, ctx);
  tree.attach_bucket_rows();

  tree.build_stats_.dist_comps = ctx.dist_comps;
  tree.build_stats_.build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  tree.build_stats_.index_bytes = tree.memory_bytes();
  return tree;
}

int32_t VpTree::build_node(std::vector<uint32_t>& pool, VpBuildCtx& ctx) {
  const int32_t at = static_cast<int32_t>(nodes_.size());
  if (pool.size() <= bucket_size_) {
    Node leaf;
    leaf.bucket_begin = static_cast<uint32_t>(ids_.size());
    ids_.insert(ids_.end(), pool.begin(), pool.end());
    leaf.bucket_end = static_cast<uint32_t>(ids_.size());
    nodes_.push_back(leaf);
    return at;
  }

  nodes_.emplace_back();
  const size_t pick = static_cast<size_t>(rand_below(ctx.eng_, pool.size()));
  const uint32_t pivot = pool[pick];
  pool.erase(pool.begin() + static_cast<ptrdiff_t>(pick));

  // Distances from the pivot to every remaining partition member.
  std::vector<double> dists(pool.size());
  const ObjectRef pref{&ctx.ds_, pivot};
  for (size_t i = 0; i < pool.size(); ++i) {
    dists[i] = ctx.space_.distance(pref, {&ctx.ds_, pool[i]});
    ++ctx.dist_comps;
  }
  std::vector<double> med(dists);
  const size_t mid = (med.size() - 1) / 2;  // lower median
  std::nth_element(med.begin(), med.begin() + mid, med.end());
  const double radius = med[mid];

  // Boundary rule: d <= R goes left. Relative order preserved so that the
  // build is deterministic for a given seed.
  std::vector<uint32_t> left, right;
  for (size_t i = 0; i < pool.size(); ++i)
    (dists[i] <= radius ? left : right).push_back(pool[i]);
  pool.clear();
  pool.shrink_to_fit();

  const int32_t l = left.empty() ? -1 : build_node(left, ctx);
  const int32_t r = right.empty() ? -1 : build_node(right, ctx);

  Node& node = nodes_[at];
  node.pivot_id = pivot;
  node.radius = radius;
  node.left = l;
  node.right = r;
  node.bucket_begin = node.bucket_end = 0;
  // Mark as internal even when both children are empty buckets pruned away.
  if (node.left < 0 && node.right < 0) node.bucket_end = 0, node.bucket_begin = 1;
  return at;
}

void VpTree::attach_bucket_rows() {
  if (dataset_->kind() != ObjectKind::Dense || ids_.empty()) return;
  const size_t dim = dataset_->dim();
  bucket_rows_.resize(ids_.size() * dim);
  for (size_t i = 0; i < ids_.size(); ++i)
    std::copy_n(dataset_->row(ids_[i]), dim, bucket_rows_.data() + i * dim);
  if (dataset_->has_log_cache()) {
    bucket_logs_.resize(ids_.size() * dim);
    for (size_t i = 0; i < ids_.size(); ++i)
      std::copy_n(dataset_->log_row(ids_[i]), dim, bucket_logs_.data() + i * dim);
  }
}

uint64_t VpTree::memory_bytes() const {
  return nodes_.size() * sizeof(Node) + ids_.size() * sizeof(uint32_t) +
         (bucket_rows_.size() + bucket_logs_.size()) * sizeof(double);
}

namespace {

double polynomial(double x, uint32_t beta) { return beta == 2 ? x * x : x; }

}  // namespace

void VpTree::search_node(int32_t at, const ObjectRef& query, const PrunerParams& pruner,
                         detail::TopK& top, uint64_t& dist_comps) const {
  const Node& node = nodes_[at];
  if (node.leaf()) {
    const size_t dim = dataset_->dim();
    for (uint32_t i = node.bucket_begin; i < node.bucket_end; ++i) {
      double d;
      if (!bucket_rows_.empty()) {
        // Contiguous bucket storage; same distance kernels as everywhere else.
        const std::span<const double> row{bucket_rows_.data() + i * dim, dim};
        const double* row_log = bucket_logs_.empty() ? nullptr : bucket_logs_.data() + i * dim;
        const std::span<const double> q = query.ds->dense_row(query.id);
        const double* q_log = query.ds->log_row(query.id);
        switch (space_.kind) {
          case SpaceKind::L2: d = l2(row, q); break;
          case SpaceKind::KLDiv:
            d = space_.query_mode == QueryMode::Left ? kl_divergence(row, q, row_log, q_log)
                                                     : kl_divergence(q, row, q_log, row_log);
            break;
          case SpaceKind::JSDiv: d = js_divergence(row, q, row_log, q_log); break;
          default: d = space_.query_distance({dataset_, ids_[i]}, query); break;
        }
      } else {
        d = space_.query_distance({dataset_, ids_[i]}, query);
      }
      ++dist_comps;
      top.offer(ids_[i], d);
    }
    return;
  }

  const double dpq = space_.query_distance({dataset_, node.pivot_id}, query);
  ++dist_comps;
  top.offer(node.pivot_id, dpq);

  const bool inside = dpq <= node.radius;
  const int32_t first = inside ? node.left : node.right;
  const int32_t second = inside ? node.right : node.left;
  if (first >= 0) search_node(first, query, pruner, top, dist_comps);
  if (second < 0) return;

  const double r = top.worst();
  if (inside) {
    if (polynomial(node.radius - dpq, pruner.beta) * pruner.alpha_left > r) return;
  } else {
    if (polynomial(dpq - node.radius, pruner.beta) * pruner.alpha_right > r) return;
  }
  search_node(second, query, pruner, top, dist_comps);
}

QueryResult VpTree::knn_search(const ObjectRef& query, uint32_t k,
                               const PrunerParams& pruner) const {
  if (k < 1) throw std::invalid_argument("vptree: k must be >= 1");
  if (!(pruner.alpha_left > 0.0) || !(pruner.alpha_right > 0.0))
    throw std::invalid_argument("vptree: alpha parameters must be positive");
  if (pruner.beta != 1 && pruner.beta != 2)
    throw std::invalid_argument("vptree: beta must be 1 or 2");

  const auto t0 = std::chrono::steady_clock::now();
  QueryResult res;
  detail::TopK top(k);
  if (root_ >= 0) search_node(root_, query, pruner, top, res.stats.dist_comps);
  res.neighbors = top.take_sorted();
  res.stats.candidates = res.stats.dist_comps;
  res.stats.elapsed_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

VpTree::Raw VpTree::raw() const { return Raw{bucket_size_, root_, nodes_, ids_}; }

VpTree VpTree::from_raw(Raw raw, const DataSet& dataset, const Space& space) {
  VpTree tree;
  tree.dataset_ = &dataset;
  tree.space_ = space;
  tree.bucket_size_ = raw.bucket_size;
  tree.n_ = dataset.size();
  tree.root_ = raw.root;
  tree.nodes_ = std::move(raw.nodes);
  tree.ids_ = std::move(raw.ids);
  tree.attach_bucket_rows();
  tree.build_stats_.index_bytes = tree.memory_bytes();
  return tree;
}

// ---- tuning ---------------------------------------------------------------

namespace {

struct TuneSetup {
  DataSet index_part;
  DataSet query_part;
  std::vector<std::vector<Neighbor>> gold;
};

TuneSetup tune_setup(const DataSet& sample, const Space& space, uint32_t k,
                     const VpTuneGrid& grid) {
  const uint32_t n = static_cast<uint32_t>(sample.size());
  const uint32_t nq = std::min(grid.num_queries, n / 2);
  if (nq == 0) throw std::invalid_argument("tune_vptree: sample too small");
  RandomEngine eng = make_engine(grid.rng_seed, 0x7e57);
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(eng, order);

  TuneSetup s;
  s.query_part = sample.subset({order.data(), nq});
  s.index_part = sample.subset({order.data() + nq, n - nq});
  if (space.kind == SpaceKind::KLDiv || space.kind == SpaceKind::JSDiv) {
    s.query_part.ensure_log_cache();
    s.index_part.ensure_log_cache();
  }

  s.gold.resize(nq);
  for (uint32_t q = 0; q < nq; ++q) {
    detail::TopK top(k);
    for (uint32_t i = 0; i < s.index_part.size(); ++i)
      top.offer(i, space.query_distance({&s.index_part, i}, {&s.query_part, q}));
    s.gold[q] = top.take_sorted();
  }
  return s;
}

double overlap_recall(const std::vector<Neighbor>& got, const std::vector<Neighbor>& gold,
                      uint32_t k) {
  uint32_t hits = 0;
  for (const auto& g : gold)
    for (const auto& r : got)
      if (r.id == g.id) {
        ++hits;
        break;
      }
  return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace

VpTuneResult tune_vptree(const DataSet& sample, const Space& space, double band_lo,
                         double band_hi, uint32_t k, const VpTuneGrid& grid) {
  if (grid.grid_points < 1 || grid.iterations < 1)
    throw std::invalid_argument("tune_vptree: empty grid specification");
  if (!(band_lo <= band_hi)) throw std::invalid_argument("tune_vptree: invalid recall band");

  const TuneSetup setup = tune_setup(sample, space, k, grid);
  const uint32_t beta = grid.beta_override.value_or(default_beta(space.kind));
  VpTree tree = VpTree::build(setup.index_part, space,
                              {grid.bucket_size, splitmix64(grid.rng_seed)});
  const double brute_comps = static_cast<double>(setup.index_part.size());
  const uint32_t nq = static_cast<uint32_t>(setup.query_part.size());

  VpTuneResult result;
  auto evaluate = [&](double al, double ar) {
    double rec = 0.0, comps = 0.0;
    for (uint32_t q = 0; q < nq; ++q) {
      const QueryResult r = tree.knn_search({&setup.query_part, q}, k, {al, ar, beta});
      rec += overlap_recall(r.neighbors, setup.gold[q], k);
      comps += static_cast<double>(r.stats.dist_comps);
    }
    rec /= nq;
    comps /= nq;
    result.trace.push_back({{al, ar, beta}, rec, comps, brute_comps / comps});
    return std::pair{rec, comps};
  };

  // Log-space grid, iteratively re-centered on the best cell with the step
  // halved, until the step is below 1% of the value.
  double center_l = 0.5 * (std::log2(grid.alpha_min) + std::log2(grid.alpha_max));
  double center_r = center_l;
  double step = grid.grid_points > 1 ? (std::log2(grid.alpha_max) - std::log2(grid.alpha_min)) /
                                           (grid.grid_points - 1)
                                     : 1.0;
  const double min_step = std::log2(1.01);

  double best_rec = -1.0, best_comps = 0.0;
  double best_l = center_l, best_r = center_r;
  bool reached = false;

  for (uint32_t it = 0; it < grid.iterations && step >= min_step; ++it) {
    const double half = 0.5 * (grid.grid_points - 1);
    for (uint32_t gi = 0; gi < grid.grid_points; ++gi) {
      for (uint32_t gj = 0; gj < grid.grid_points; ++gj) {
        const double ll = center_l + (gi - half) * step;
        const double lr = center_r + (gj - half) * step;
        const auto [rec, comps] = evaluate(std::exp2(ll), std::exp2(lr));
        const bool in_band = rec >= band_lo && rec <= band_hi;
        bool better;
        if (in_band && !reached) {
          better = true;
        } else if (in_band == reached) {
          if (in_band) {
            better = comps < best_comps;
          } else {
            // Distance to the band, then efficiency.
            const double d_new = rec < band_lo ? band_lo - rec : rec - band_hi;
            const double d_old = best_rec < band_lo ? band_lo - best_rec : best_rec - band_hi;
            better = d_new < d_old || (d_new == d_old && comps < best_comps);
          }
        } else {
          better = false;  // never replace an in-band best with an out-of-band cell
        }
        if (best_rec < 0.0 || better) {
          best_rec = rec;
          best_comps = comps;
          best_l = ll;
          best_r = lr;
          reached = reached || in_band;
        }
      }
    }
    center_l = best_l;
    center_r = best_r;
    step *= 0.5;
  }

  result.params = {std::exp2(best_l), std::exp2(best_r), beta};
  result.recall = best_rec;
  result.est_speedup = brute_comps / best_comps;
  result.reached = reached;
  return result;
}

}  // namespace permkit
