#include "permkit/permutation.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "permkit/parallel.hpp"
#include "permkit/rng.hpp"

namespace permkit {

namespace {

// Representation hash used to skip exact duplicates during pivot selection.
uint64_t record_hash(const DataSet& ds, uint32_t id) {
  uint32_t one[1] = {id};
  return ds.subset(std::span<const uint32_t>(one, 1)).content_hash();
}

}  // namespace

PivotSet PivotSet::select(const DataSet& dataset, uint32_t m, uint64_t rng_seed) {
  if (m < 1) throw std::invalid_argument("select_pivots: m must be >= 1");
  if (m > dataset.size()) throw std::invalid_argument("select_pivots: m exceeds dataset size");
  if (m > kMaxPivots) throw std::invalid_argument("select_pivots: m exceeds 65535");

  RandomEngine eng = make_engine(rng_seed, 0x9142);
  std::vector<uint32_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0u);
  shuffle(eng, order);

  std::vector<uint32_t> chosen;
  chosen.reserve(m);
  std::unordered_set<uint64_t> seen;
  for (uint32_t id : order) {
    if (chosen.size() == m) break;
    if (seen.insert(record_hash(dataset, id)).second) chosen.push_back(id);
  }
  // Not enough distinct representations: fall back to duplicates, shuffle order.
  if (chosen.size() < m) {
    std::unordered_set<uint32_t> used(chosen.begin(), chosen.end());
    for (uint32_t id : order) {
      if (chosen.size() == m) break;
      if (!used.count(id)) {
        chosen.push_back(id);
        used.insert(id);
      }
    }
  }

  PivotSet ps;
  ps.objects_ = dataset.subset(chosen);
  ps.seed_ = rng_seed;
  if (dataset.has_log_cache()) ps.objects_.ensure_log_cache();
  return ps;
}

PivotSet PivotSet::from_objects(DataSet pivots) {
  if (pivots.empty()) throw std::invalid_argument("pivot set must be non-empty");
  if (pivots.size() > kMaxPivots) throw std::invalid_argument("pivot set exceeds 65535 objects");
  PivotSet ps;
  ps.objects_ = std::move(pivots);
  return ps;
}

namespace {

void ranks_from_distances(std::span<const double> dists, std::span<uint32_t> order,
                          std::span<rank_t> ranks) {
  const uint32_t m = static_cast<uint32_t>(dists.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (dists[a] != dists[b]) return dists[a] < dists[b];
    return a < b;  // ties: smaller pivot index gets the smaller rank
  });
  for (uint32_t pos = 0; pos < m; ++pos) ranks[order[pos]] = static_cast<rank_t>(pos + 1);
}

}  // namespace

Permutation compute_permutation(const ObjectRef& x, const PivotSet& pivots, const Space& space) {
  const uint32_t m = pivots.size();
  std::vector<double> dists(m);
  for (uint32_t i = 0; i < m; ++i) dists[i] = space.induce_distance(x, pivots.pivot(i));
  Permutation ranks(m);
  std::vector<uint32_t> order(m);
  ranks_from_distances(dists, order, ranks);
  return ranks;
}

std::vector<rank_t> compute_permutations(const DataSet& ds, const PivotSet& pivots,
                                         const Space& space, unsigned num_threads) {
  const uint32_t m = pivots.size();
  std::vector<rank_t> out(ds.size() * m);
  parallel_for(ds.size(), num_threads, [&](uint64_t i) {
    thread_local std::vector<double> dists;
    thread_local std::vector<uint32_t> order;
    dists.resize(m);
    order.resize(m);
    const ObjectRef x{&ds, static_cast<uint32_t>(i)};
    for (uint32_t p = 0; p < m; ++p) dists[p] = space.induce_distance(x, pivots.pivot(p));
    ranks_from_distances(dists, order, {out.data() + i * m, m});
  });
  return out;
}

int64_t footrule(std::span<const rank_t> p, std::span<const rank_t> q) {
  if (p.size() != q.size()) throw std::invalid_argument("footrule: size mismatch");
  int64_t s = 0;
  for (size_t i = 0; i < p.size(); ++i)
    s += std::abs(static_cast<int64_t>(p[i]) - static_cast<int64_t>(q[i]));
  return s;
}

int64_t spearman_rho(std::span<const rank_t> p, std::span<const rank_t> q) {
  if (p.size() != q.size()) throw std::invalid_argument("spearman_rho: size mismatch");
  int64_t s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const int64_t d = static_cast<int64_t>(p[i]) - static_cast<int64_t>(q[i]);
    s += d * d;
  }
  return s;
}

void binarize_into(std::span<const rank_t> ranks, rank_t b, uint32_t m,
                   std::vector<uint64_t>& out) {
  if (b < 1 || b > m) throw std::invalid_argument("binarize: threshold out of [1, m]");
  const size_t base = out.size();
  out.resize(base + bit_words(m), 0);
  for (uint32_t i = 0; i < m; ++i)
    if (ranks[i] >= b) out[base + (i >> 6)] |= uint64_t{1} << (i & 63);
}

BitPermutation binarize(std::span<const rank_t> ranks, rank_t b) {
  const uint32_t m = static_cast<uint32_t>(ranks.size());
  BitPermutation bp;
  bp.m = m;
  bp.threshold = b;
  binarize_into(ranks, b, m, bp.words);
  return bp;
}

int64_t hamming_words(std::span<const uint64_t> x, std::span<const uint64_t> y) {
  if (x.size() != y.size()) throw std::invalid_argument("hamming: length mismatch");
  int64_t s = 0;
  for (size_t w = 0; w < x.size(); ++w) s += std::popcount(x[w] ^ y[w]);
  return s;
}

int64_t hamming(const BitPermutation& x, const BitPermutation& y) {
  if (x.m != y.m) throw std::invalid_argument("hamming: length mismatch");
  return hamming_words(x.words, y.words);
}

}  // namespace permkit
