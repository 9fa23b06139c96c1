#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permkit/dataset.hpp"
#include "permkit/spaces.hpp"

namespace permkit {

/// Pivot ranks are 1-based ordinal positions; rank_t caps m at 65535.
using rank_t = uint16_t;
inline constexpr uint32_t kMaxPivots = 65535;

/// ranks[i] = ordinal position of pivot i when pivots are sorted by
/// increasing distance from the inducing point (ties to the smaller index).
using Permutation = std::vector<rank_t>;

/// m reference objects sampled from a dataset (or supplied explicitly).
class PivotSet {
 public:
  PivotSet() = default;

  /// Uniform sample without replacement; exact duplicate representations are
  /// skipped while distinct objects remain. Deterministic per seed.
  static PivotSet select(const DataSet& dataset, uint32_t m, uint64_t rng_seed);

  /// Use the given objects verbatim as pivots.
  static PivotSet from_objects(DataSet pivots);

  uint32_t size() const { return static_cast<uint32_t>(objects_.size()); }
  const DataSet& objects() const { return objects_; }
  DataSet& objects() { return objects_; }
  ObjectRef pivot(uint32_t i) const { return {&objects_, i}; }
  uint64_t seed() const { return seed_; }

 private:
  DataSet objects_;
  uint64_t seed_ = 0;
};

/// Permutation induced by x: m distance evaluations d(x, pivot_i), then
/// ranking with smallest-index tie-break. scratch must hold m doubles when
/// supplied (avoids per-call allocation in bulk paths).
Permutation compute_permutation(const ObjectRef& x, const PivotSet& pivots, const Space& space);

/// Bulk form over a whole dataset; runs on a worker pool, output identical
/// for any pool width. Returns ranks flattened row-major (n x m).
std::vector<rank_t> compute_permutations(const DataSet& ds, const PivotSet& pivots,
                                         const Space& space, unsigned num_threads);

/// L1 distance between rank vectors.
int64_t footrule(std::span<const rank_t> p, std::span<const rank_t> q);

/// Squared L2 distance between rank vectors.
int64_t spearman_rho(std::span<const rank_t> p, std::span<const rank_t> q);

/// Bit-packed binarized permutation: bit i = (ranks[i] >= b).
struct BitPermutation {
  uint32_t m = 0;
  rank_t threshold = 0;
  std::vector<uint64_t> words;  // ceil(m/64) words, trailing bits zero

  bool bit(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }
};

BitPermutation binarize(std::span<const rank_t> ranks, rank_t b);

/// Appends the packed bits of a binarized permutation to `out` (the layout
/// used by contiguous per-point storage). Identical to binarize() word-wise.
void binarize_into(std::span<const rank_t> ranks, rank_t b, uint32_t m,
                   std::vector<uint64_t>& out);

/// Population count of the XOR of two equal-length bit permutations.
int64_t hamming(const BitPermutation& x, const BitPermutation& y);

/// Word-level Hamming over raw packed spans (contiguous storage form).
int64_t hamming_words(std::span<const uint64_t> x, std::span<const uint64_t> y);

inline uint32_t bit_words(uint32_t m) { return (m + 63) / 64; }

}  // namespace permkit
