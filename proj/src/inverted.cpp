#include "permkit/inverted.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "permkit/detail/topk.hpp"
#include "permkit/parallel.hpp"

namespace permkit {

namespace {

struct PivotPos {
  uint16_t pivot;
  rank_t pos;  // 1-based rank of this pivot for the point
};

// For every point, its m_i closest pivots as (pivot, position) pairs in
// ascending position order. Deterministic for any worker count.
std::vector<PivotPos> closest_pivots(const DataSet& ds, const PivotSet& pivots,
                                     const Space& space, uint32_t m_i, unsigned num_threads) {
  const uint32_t m = pivots.size();
  std::vector<PivotPos> out(ds.size() * m_i);
  parallel_for(ds.size(), num_threads, [&](uint64_t i) {
    thread_local std::vector<double> dists;
    thread_local std::vector<uint32_t> order;
    dists.resize(m);
    order.resize(m);
    const ObjectRef x{&ds, static_cast<uint32_t>(i)};
    for (uint32_t p = 0; p < m; ++p) dists[p] = space.induce_distance(x, pivots.pivot(p));
    std::iota(order.begin(), order.end(), 0u);
    const auto less = [&](uint32_t a, uint32_t b) {
      if (dists[a] != dists[b]) return dists[a] < dists[b];
      return a < b;
    };
    if (m_i < m) std::nth_element(order.begin(), order.begin() + m_i, order.end(), less);
    std::sort(order.begin(), order.begin() + m_i, less);
    for (uint32_t r = 0; r < m_i; ++r)
      out[i * m_i + r] = {static_cast<uint16_t>(order[r]), static_cast<rank_t>(r + 1)};
  });
  return out;
}

std::vector<PivotPos> query_pivots(const ObjectRef& query, const PivotSet& pivots,
                                   const Space& space, uint32_t m_s) {
  DataSet tmp;  // single-point wrapper so the bulk helper can be reused
  const DataSet& qds = *query.ds;
  uint32_t one[1] = {query.id};
  tmp = qds.subset(std::span<const uint32_t>(one, 1));
  return closest_pivots(tmp, pivots, space, m_s, 1);
}

}  // namespace

// ---------------------------------------------------------------- MI-file

MiFileIndex MiFileIndex::build(const DataSet& dataset, const Space& space, const Params& params,
                               const DataSet* explicit_pivots) {
  if (params.m < 1) throw std::invalid_argument("mifile: m must be >= 1");
  if (params.m_i < 1 || params.m_i > params.m)
    throw std::invalid_argument("mifile: m_i out of [1, m]");
  const auto t0 = std::chrono::steady_clock::now();

  MiFileIndex idx;
  idx.dataset_ = &dataset;
  idx.space_ = space;
  idx.pivots_ = explicit_pivots ? PivotSet::from_objects(*explicit_pivots)
                                : PivotSet::select(dataset, params.m, params.rng_seed);
  idx.m_ = idx.pivots_.size();
  idx.m_i_ = std::min(params.m_i, idx.m_);
  idx.n_ = dataset.size();
  idx.lists_.resize(idx.m_);

  const auto pairs = closest_pivots(dataset, idx.pivots_, space, idx.m_i_, params.num_threads);
  for (size_t i = 0; i < idx.n_; ++i)
    for (uint32_t r = 0; r < idx.m_i_; ++r) {
      const PivotPos& pp = pairs[i * idx.m_i_ + r];
      idx.lists_[pp.pivot].push_back({pp.pos, static_cast<uint32_t>(i)});
    }
  for (auto& list : idx.lists_)
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) {
      if (a.pos != b.pos) return a.pos < b.pos;
      return a.id < b.id;
    });

  idx.build_stats_.dist_comps = static_cast<uint64_t>(idx.n_) * idx.m_;
  idx.build_stats_.build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

uint64_t MiFileIndex::memory_bytes() const {
  uint64_t b = pivots_.objects().memory_bytes();
  for (const auto& l : lists_) b += l.size() * sizeof(Posting);
  return b;
}

std::pair<std::vector<MiFileIndex::AccEntry>, int64_t> MiFileIndex::accumulate(
    const ObjectRef& query, uint32_t m_s, std::optional<uint32_t> max_pos_diff,
    AccumMetric metric) const {
  if (m_s < 1 || m_s > m_i_) throw std::invalid_argument("mifile: m_s out of [1, m_i]");

  const auto qpiv = query_pivots(query, pivots_, space_, m_s);

  const int64_t mm = static_cast<int64_t>(m_);
  const bool footrule_metric = metric == AccumMetric::Footrule;
  // Exact reconstruction: every point posts to every list and all lists are
  // read in full, so zero-initialized accumulators equal the permutation
  // distance itself. Otherwise start from the pessimistic "all remaining
  // ranks equal m" value and subtract per posting.
  const bool exact = m_s == m_ && m_i_ == m_ && !max_pos_diff.has_value();
  const int64_t per_pivot_init = footrule_metric ? mm : mm * mm;
  const int64_t init = exact ? 0 : static_cast<int64_t>(m_s) * per_pivot_init;

  std::vector<int64_t> acc(n_, init);
  std::vector<char> seen(n_, 0);
  std::vector<uint32_t> touched;

  for (const PivotPos& qp : qpiv) {
    const auto& list = lists_[qp.pivot];
    const int64_t qpos = qp.pos;
    auto lo = list.begin();
    auto hi = list.end();
    if (max_pos_diff) {
      const int64_t d = *max_pos_diff;
      const rank_t pos_lo = static_cast<rank_t>(std::max<int64_t>(1, qpos - d));
      lo = std::lower_bound(list.begin(), list.end(), pos_lo,
                            [](const Posting& p, rank_t v) { return p.pos < v; });
      if (qpos + d < static_cast<int64_t>(m_)) {
        const rank_t pos_hi = static_cast<rank_t>(qpos + d);
        hi = std::upper_bound(list.begin(), list.end(), pos_hi,
                              [](rank_t v, const Posting& p) { return v < p.pos; });
      }
    }
    for (auto it = lo; it != hi; ++it) {
      const int64_t diff = std::abs(static_cast<int64_t>(it->pos) - qpos);
      const int64_t term = footrule_metric ? diff : diff * diff;
      if (!seen[it->id]) {
        seen[it->id] = 1;
        touched.push_back(it->id);
      }
      acc[it->id] += exact ? term : term - per_pivot_init;
    }
  }

  std::sort(touched.begin(), touched.end());
  std::vector<AccEntry> entries;
  entries.reserve(touched.size());
  for (uint32_t id : touched) entries.push_back({id, acc[id]});
  return {std::move(entries), init};
}

QueryResult MiFileIndex::knn_search(const ObjectRef& query, uint32_t k,
                                    const SearchParams& sp) const {
  if (k < 1) throw std::invalid_argument("mifile: k must be >= 1");
  const uint64_t g_raw = sp.gamma.resolve(n_);
  if (g_raw < k) throw std::invalid_argument("mifile: gamma must be >= k");
  const uint64_t g = std::min<uint64_t>(g_raw, n_);

  const auto t0 = std::chrono::steady_clock::now();
  auto [entries, init] = accumulate(query, sp.m_s, sp.max_pos_diff, sp.metric);

  const auto entry_less = [](const AccEntry& a, const AccEntry& b) {
    if (a.acc != b.acc) return a.acc < b.acc;
    return a.id < b.id;
  };
  const uint64_t from_touched = std::min<uint64_t>(g, entries.size());
  if (from_touched < entries.size())
    std::nth_element(entries.begin(), entries.begin() + from_touched, entries.end(), entry_less);
  std::sort(entries.begin(), entries.begin() + from_touched, entry_less);
  entries.resize(from_touched);

  // Untouched points keep the pessimistic value and rank last, ties by id.
  if (entries.size() < g) {
    std::vector<char> in(n_, 0);
    for (const auto& e : entries) in[e.id] = 1;
    for (uint32_t id = 0; id < n_ && entries.size() < g; ++id)
      if (!in[id]) entries.push_back({id, init});
  }

  QueryResult res;
  detail::TopK top(k);
  for (const auto& e : entries)
    top.offer(e.id, space_.query_distance({dataset_, e.id}, query));
  res.stats.dist_comps = m_ + entries.size();
  res.stats.candidates = entries.size();
  res.neighbors = top.take_sorted();
  res.stats.elapsed_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

MiFileIndex::Raw MiFileIndex::raw() const {
  return Raw{pivots_.objects(), m_, m_i_, lists_};
}

MiFileIndex MiFileIndex::from_raw(Raw raw, const DataSet& dataset, const Space& space) {
  MiFileIndex idx;
  idx.dataset_ = &dataset;
  idx.space_ = space;
  idx.pivots_ = PivotSet::from_objects(std::move(raw.pivot_objects));
  if (space.kind == SpaceKind::KLDiv) idx.pivots_.objects().ensure_log_cache();
  idx.m_ = raw.m;
  idx.m_i_ = raw.m_i;
  idx.n_ = dataset.size();
  idx.lists_ = std::move(raw.lists);
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

// ------------------------------------------------------------------- NAPP

NappIndex NappIndex::build(const DataSet& dataset, const Space& space, const Params& params,
                           const DataSet* explicit_pivots) {
  if (params.m < 1) throw std::invalid_argument("napp: m must be >= 1");
  if (params.m_i < 1 || params.m_i > params.m)
    throw std::invalid_argument("napp: m_i out of [1, m]");
  if (params.chunk_size < 1) throw std::invalid_argument("napp: chunk_size must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  NappIndex idx;
  idx.dataset_ = &dataset;
  idx.space_ = space;
  idx.pivots_ = explicit_pivots ? PivotSet::from_objects(*explicit_pivots)
                                : PivotSet::select(dataset, params.m, params.rng_seed);
  idx.m_ = idx.pivots_.size();
  idx.m_i_ = std::min(params.m_i, idx.m_);
  idx.chunk_size_ = params.chunk_size;
  idx.n_ = dataset.size();
  idx.lists_.resize(idx.m_);

  const auto pairs = closest_pivots(dataset, idx.pivots_, space, idx.m_i_, params.num_threads);
  for (size_t i = 0; i < idx.n_; ++i)
    for (uint32_t r = 0; r < idx.m_i_; ++r)
      idx.lists_[pairs[i * idx.m_i_ + r].pivot].push_back(static_cast<uint32_t>(i));
  idx.build_chunk_offsets();

  idx.build_stats_.dist_comps = static_cast<uint64_t>(idx.n_) * idx.m_;
  idx.build_stats_.build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

void NappIndex::build_chunk_offsets() {
  const uint32_t num_chunks =
      n_ == 0 ? 0 : static_cast<uint32_t>((n_ + chunk_size_ - 1) / chunk_size_);
  chunk_offsets_.assign(m_, {});
  for (uint32_t p = 0; p < m_; ++p) {
    auto& offs = chunk_offsets_[p];
    offs.resize(num_chunks + 1);
    const auto& list = lists_[p];
    size_t at = 0;
    for (uint32_t c = 0; c < num_chunks; ++c) {
      offs[c] = static_cast<uint32_t>(at);
      const uint64_t limit = static_cast<uint64_t>(c + 1) * chunk_size_;
      while (at < list.size() && list[at] < limit) ++at;
    }
    offs[num_chunks] = static_cast<uint32_t>(list.size());
  }
}

uint64_t NappIndex::memory_bytes() const {
  uint64_t b = pivots_.objects().memory_bytes();
  for (const auto& l : lists_) b += l.size() * sizeof(uint32_t);
  for (const auto& o : chunk_offsets_) b += o.size() * sizeof(uint32_t);
  return b;
}

std::vector<NappIndex::Candidate> NappIndex::scan_candidates(const ObjectRef& query,
                                                             uint32_t t) const {
  if (t < 1 || t > m_i_) throw std::invalid_argument("napp: t out of [1, m_i]");

  const auto qpiv = query_pivots(query, pivots_, space_, m_i_);

  const uint32_t num_chunks =
      n_ == 0 ? 0 : static_cast<uint32_t>((n_ + chunk_size_ - 1) / chunk_size_);
  std::vector<uint16_t> counters(std::min<uint64_t>(chunk_size_, std::max<size_t>(n_, 1)));
  std::vector<Candidate> out;
  std::vector<uint32_t> reached;  // ids hitting the threshold in this chunk

  for (uint32_t c = 0; c < num_chunks; ++c) {
    const uint64_t base = static_cast<uint64_t>(c) * chunk_size_;
    // ScanCount: one bulk zero-fill per chunk per query, then stream lists.
    std::memset(counters.data(), 0, counters.size() * sizeof(uint16_t));
    reached.clear();
    for (const PivotPos& qp : qpiv) {
      const auto& list = lists_[qp.pivot];
      const uint32_t lo = chunk_offsets_[qp.pivot][c];
      const uint32_t hi = chunk_offsets_[qp.pivot][c + 1];
      for (uint32_t at = lo; at < hi; ++at) {
        const uint32_t slot = static_cast<uint32_t>(list[at] - base);
        if (++counters[slot] == t) reached.push_back(list[at]);
      }
    }
    for (uint32_t id : reached)
      out.push_back({id, counters[static_cast<uint32_t>(id - base)]});
  }

  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.shared != b.shared) return a.shared > b.shared;
    return a.id < b.id;
  });
  return out;
}

QueryResult NappIndex::knn_search(const ObjectRef& query, uint32_t k,
                                  const SearchParams& sp) const {
  if (k < 1) throw std::invalid_argument("napp: k must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<Candidate> cands = scan_candidates(query, sp.t);
  if (sp.gamma) {
    const uint64_t g = sp.gamma->resolve(n_);
    if (g < k) throw std::invalid_argument("napp: gamma must be >= k");
    if (cands.size() > g) cands.resize(g);
  }

  QueryResult res;
  detail::TopK top(k);
  for (const auto& c : cands)
    top.offer(c.id, space_.query_distance({dataset_, c.id}, query));
  res.stats.dist_comps = m_ + cands.size();
  res.stats.candidates = cands.size();
  res.neighbors = top.take_sorted();
  res.stats.elapsed_us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

NappIndex::Raw NappIndex::raw() const {
  return Raw{pivots_.objects(), m_, m_i_, chunk_size_, lists_};
}

NappIndex NappIndex::from_raw(Raw raw, const DataSet& dataset, const Space& space) {
  NappIndex idx;
  idx.dataset_ = &dataset;
  idx.space_ = space;
  idx.pivots_ = PivotSet::from_objects(std::move(raw.pivot_objects));
  if (space.kind == SpaceKind::KLDiv) idx.pivots_.objects().ensure_log_cache();
  idx.m_ = raw.m;
  idx.m_i_ = raw.m_i;
  idx.chunk_size_ = raw.chunk_size;
  idx.n_ = dataset.size();
  idx.lists_ = std::move(raw.lists);
  idx.build_chunk_offsets();
  idx.build_stats_.index_bytes = idx.memory_bytes();
  return idx;
}

}  // namespace permkit
