#pragma once

#include <cmath>
#include <optional>

#include "permkit/common.hpp"
#include "permkit/permutation.hpp"

namespace permkit {

enum class PermMode : uint32_t { Full = 0, Binary = 1 };
enum class PermDistance : uint32_t { Spearman = 0, Footrule = 1, Hamming = 2 };

const char* perm_distance_name(PermDistance d);

/// Candidate budget: an absolute count or a fraction of N (rounded up).
struct Gamma {
  static Gamma count(uint64_t c) { return Gamma{c, 0.0, false} ; }
  static Gamma fraction(double f) { return Gamma{0, f, true}; }

  uint64_t resolve(uint64_t n) const {
    if (!is_fraction) return absolute;
    return static_cast<uint64_t>(std::ceil(fraction_value * static_cast<double>(n)));
  }

  uint64_t absolute = 0;
  double fraction_value = 0.0;
  bool is_fraction = false;
};

/// Brute-force filter-and-refine over stored permutations: linear scan of
/// permutation distances, incremental selection of the gamma nearest
/// permutations, refinement with the original distance.
class PermFilterIndex {
 public:
  struct Params {
    uint32_t m = 128;
    PermMode mode = PermMode::Full;
    std::optional<rank_t> b;  // binarization threshold; defaults to m/2
    uint64_t rng_seed = 0;
    unsigned num_threads = 0;
  };

  static PermFilterIndex build(const DataSet& dataset, const Space& space, const Params& params,
                               const DataSet* explicit_pivots = nullptr);

  QueryResult knn_search(const ObjectRef& query, uint32_t k, const Gamma& gamma,
                         PermDistance perm_distance) const;

  const PivotSet& pivots() const { return pivots_; }
  PermMode mode() const { return mode_; }
  uint32_t m() const { return m_; }
  rank_t threshold() const { return b_; }
  size_t dataset_size() const { return n_; }
  const BuildStats& build_stats() const { return build_stats_; }
  uint64_t memory_bytes() const;

  std::span<const rank_t> stored_permutation(uint32_t id) const {
    return {perms_.data() + static_cast<size_t>(id) * m_, m_};
  }
  std::span<const uint64_t> stored_bits(uint32_t id) const {
    const size_t w = bit_words(m_);
    return {bits_.data() + static_cast<size_t>(id) * w, w};
  }

  // snapshot support
  struct Raw;
  Raw raw() const;
  static PermFilterIndex from_raw(Raw raw, const DataSet& dataset, const Space& space);

 private:
  PermFilterIndex() = default;

  const DataSet* dataset_ = nullptr;
  Space space_copy_;
  PivotSet pivots_;
  PermMode mode_ = PermMode::Full;
  uint32_t m_ = 0;
  rank_t b_ = 0;
  size_t n_ = 0;
  std::vector<rank_t> perms_;    // Full mode: n x m ranks
  std::vector<uint64_t> bits_;   // Binary mode: n x bit_words(m)
  BuildStats build_stats_;
};

struct PermFilterIndex::Raw {
  DataSet pivot_objects;
  PermMode mode;
  uint32_t m;
  rank_t b;
  std::vector<rank_t> perms;
  std::vector<uint64_t> bits;
};

}  // namespace permkit
