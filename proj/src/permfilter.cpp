#include "permkit/permfilter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "permkit/detail/topk.hpp"
#include "permkit/parallel.hpp"

namespace permkit {

const char* perm_distance_name(PermDistance d) {
  switch (d) {
    case PermDistance::Spearman: return "spearman";
    case PermDistance::Footrule: return "footrule";
    case PermDistance::Hamming: return "hamming";
  }
  return "?";
}

PermFilterIndex PermFilterIndex::build(const DataSet& dataset, const Space& space,
                                       const Params& params, const DataSet* explicit_pivots) {
  if (params.m < 1) throw std::invalid_argument("permfilter: m must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  PermFilterIndex idx;
  idx.dataset_ = &dataset;
  idx.space_copy_ = space;
  idx.pivots_ = explicit_pivots ? PivotSet::from_objects(*explicit_pivots)
                                : PivotSet::select(dataset, params.m, params.rng_seed);
  idx.m_ = idx.pivots_.size();
  idx.mode_ = params.mode;
  idx.n_ = dataset.size();

  std::vector<rank_t> perms = compute_permutations(dataset, idx.pivots_, space, params.num_threads);
  if (params.mode == PermMode::Full) {
    idx.perms_ = std::move(perms);
  } else {
    const rank_t b = params.b.value_or(static_cast<rank_t>(std::max<uint32_t>(1, idx.m_ / 2)));
    if (b < 1 || b > idx.m_) throw std::invalid_argument("permfilter: b out of [1, m]");
    idx.b_ = b;
    idx.bits_.reserve(idx.n_ * bit_words(idx.m_));
    for (size_t i = 0; i < idx.n_; ++i)
      binarize_into({perms.data() + i * idx.m_, idx.m_}, b, idx.m_, idx.bits_);
  }

  idx.build_stats_.dist_comps = static_cast<uint64_t>(idx.n_) * idx.m_;
  idx.build_stats_.build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

uint64_t PermFilterIndex::memory_bytes() const {
  return perms_.size() * sizeof(rank_t) + bits_.size() * sizeof(uint64_t) +
         pivots_.objects().memory_bytes();
}

QueryResult PermFilterIndex::knn_search(const ObjectRef& query, uint32_t k, const Gamma& gamma,
                                        PermDistance perm_distance) const {
  if (k < 1) throw std::invalid_argument("permfilter: k must be >= 1");
  const uint64_t g_raw = gamma.resolve(n_);
  if (g_raw < k) throw std::invalid_argument("permfilter: gamma must be >= k");
  const uint64_t g = std::min<uint64_t>(g_raw, n_);
  const bool binary = perm_distance == PermDistance::Hamming;
  if (binary != (mode_ == PermMode::Binary))
    throw std::invalid_argument("permfilter: permutation distance does not match index mode");

  const auto t0 = std::chrono::steady_clock::now();
  QueryResult res;

  const Permutation qperm = compute_permutation(query, pivots_, space_copy_);
  res.stats.dist_comps += m_;

  // Filtering: permutation distance to every stored point, then incremental
  // selection of the g nearest (partial selection, no full sort).
  struct Entry {
    int64_t pdist;
    uint32_t id;
  };
  std::vector<Entry> entries(n_);
  if (binary) {
    const BitPermutation qbits = binarize(qperm, b_);
    const size_t w = bit_words(m_);
    for (size_t i = 0; i < n_; ++i) {
      entries[i].pdist = hamming_words(qbits.words, {bits_.data() + i * w, w});
      entries[i].id = static_cast<uint32_t>(i);
    }
  } else {
    for (size_t i = 0; i < n_; ++i) {
      const std::span<const rank_t> p{perms_.data() + i * m_, m_};
      entries[i].pdist = perm_distance == PermDistance::Spearman ? spearman_rho(p, qperm)
                                                                 : footrule(p, qperm);
      entries[i].id = static_cast<uint32_t>(i);
    }
  }
  const auto entry_less = [](const Entry& a, const Entry& b) {
    if (a.pdist != b.pdist) return a.pdist < b.pdist;
    return a.id < b.id;
  };
  if (g < n_) std::nth_element(entries.begin(), entries.begin() + g, entries.end(), entry_less);
  std::sort(entries.begin(), entries.begin() + g, entry_less);

  // Refinement with the original distance.
  detail::TopK top(k);
  for (uint64_t c = 0; c < g; ++c) {
    const uint32_t id = entries[c].id;
    top.offer(id, space_copy_.query_distance({dataset_, id}, query));
  }
  res.stats.dist_comps += g;
  res.stats.candidates = g;
  res.neighbors = top.take_sorted();
  res.stats.elapsed_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

PermFilterIndex::Raw PermFilterIndex::raw() const {
  Raw r;
  r.pivot_objects = pivots_.objects();
  r.mode = mode_;
  r.m = m_;
  r.b = b_;
  r.perms = perms_;
  r.bits = bits_;
  return r;
}

PermFilterIndex PermFilterIndex::from_raw(Raw raw, const DataSet& dataset, const Space& space) {
  PermFilterIndex idx;
  idx.dataset_ = &dataset;
  idx.space_copy_ = space;
  idx.pivots_ = PivotSet::from_objects(std::move(raw.pivot_objects));
  if (space.kind == SpaceKind::KLDiv) idx.pivots_.objects().ensure_log_cache();
  idx.mode_ = raw.mode;
  idx.m_ = raw.m;
  idx.b_ = raw.b;
  idx.n_ = dataset.size();
  idx.perms_ = std::move(raw.perms);
  idx.bits_ = std::move(raw.bits);
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

}  // namespace permkit
