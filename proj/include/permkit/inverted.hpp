#pragma once

#include <optional>

#include "permkit/common.hpp"
#include "permkit/permfilter.hpp"
#include "permkit/permutation.hpp"

namespace permkit {

enum class AccumMetric : uint32_t { Footrule = 0, Spearman = 1 };

/// MI-file: inverted file over permutations whose postings carry the pivot
/// position, enabling accumulator-based Footrule (or Spearman) estimation.
class MiFileIndex {
 public:
  struct Params {
    uint32_t m = 128;
    uint32_t m_i = 16;  // pivots indexed per point
    uint64_t rng_seed = 0;
    unsigned num_threads = 0;
  };

  struct Posting {
    rank_t pos;
    uint32_t id;
  };

  struct SearchParams {
    uint32_t m_s = 0;                 // pivots read at query time, <= m_i
    std::optional<uint32_t> max_pos_diff;  // D; unset = unlimited
    Gamma gamma;                      // candidate budget (required)
    AccumMetric metric = AccumMetric::Footrule;
  };

  struct AccEntry {
    uint32_t id;
    int64_t acc;
  };

  static MiFileIndex build(const DataSet& dataset, const Space& space, const Params& params,
                           const DataSet* explicit_pivots = nullptr);

  /// The accumulator pass by itself: returns the touched candidates with
  /// their final accumulator values plus the value untouched points retain.
  /// Touched entries are in ascending id order.
  std::pair<std::vector<AccEntry>, int64_t> accumulate(const ObjectRef& query, uint32_t m_s,
                                                       std::optional<uint32_t> max_pos_diff,
                                                       AccumMetric metric) const;

  QueryResult knn_search(const ObjectRef& query, uint32_t k, const SearchParams& sp) const;

  const PivotSet& pivots() const { return pivots_; }
  uint32_t m() const { return m_; }
  uint32_t m_indexed() const { return m_i_; }
  size_t dataset_size() const { return n_; }
  const std::vector<Posting>& posting_list(uint32_t pivot) const { return lists_[pivot]; }
  const BuildStats& build_stats() const { return build_stats_; }
  uint64_t memory_bytes() const;

  struct Raw;
  Raw raw() const;
  static MiFileIndex from_raw(Raw raw, const DataSet& dataset, const Space& space);

 private:
  MiFileIndex() = default;

  const DataSet* dataset_ = nullptr;
  Space space_;
  PivotSet pivots_;
  uint32_t m_ = 0;
  uint32_t m_i_ = 0;
  size_t n_ = 0;
  std::vector<std::vector<Posting>> lists_;  // per pivot, sorted by (pos, id)
  BuildStats build_stats_;
};

struct MiFileIndex::Raw {
  DataSet pivot_objects;
  uint32_t m;
  uint32_t m_i;
  std::vector<std::vector<Posting>> lists;
};

/// NAPP: id-only posting lists; candidates qualify by sharing at least t of
/// the query's closest pivots, counted with a chunked ScanCount merge.
class NappIndex {
 public:
  struct Params {
    uint32_t m = 512;
    uint32_t m_i = 32;
    uint32_t chunk_size = 65536;
    uint64_t rng_seed = 0;
    unsigned num_threads = 0;
  };

  struct SearchParams {
    uint32_t t = 1;                // min shared pivots
    std::optional<Gamma> gamma;    // optional cap for expensive distances
  };

  struct Candidate {
    uint32_t id;
    uint32_t shared;  // number of closest pivots shared with the query
  };

  static NappIndex build(const DataSet& dataset, const Space& space, const Params& params,
                         const DataSet* explicit_pivots = nullptr);

  /// ScanCount pass: all candidates sharing >= t pivots with the query,
  /// sorted by (shared desc, id asc).
  std::vector<Candidate> scan_candidates(const ObjectRef& query, uint32_t t) const;

  QueryResult knn_search(const ObjectRef& query, uint32_t k, const SearchParams& sp) const;

  const PivotSet& pivots() const { return pivots_; }
  uint32_t m() const { return m_; }
  uint32_t m_indexed() const { return m_i_; }
  uint32_t chunk_size() const { return chunk_size_; }
  size_t dataset_size() const { return n_; }
  const std::vector<uint32_t>& posting_list(uint32_t pivot) const { return lists_[pivot]; }
  const BuildStats& build_stats() const { return build_stats_; }
  uint64_t memory_bytes() const;

  struct Raw;
  Raw raw() const;
  static NappIndex from_raw(Raw raw, const DataSet& dataset, const Space& space);

 private:
  NappIndex() = default;
  void build_chunk_offsets();

  const DataSet* dataset_ = nullptr;
  Space space_;
  PivotSet pivots_;
  uint32_t m_ = 0;
  uint32_t m_i_ = 0;
  uint32_t chunk_size_ = 65536;
  size_t n_ = 0;
  std::vector<std::vector<uint32_t>> lists_;          // per pivot, ascending ids
  std::vector<std::vector<uint32_t>> chunk_offsets_;  // per pivot, num_chunks+1
  BuildStats build_stats_;
};

struct NappIndex::Raw {
  DataSet pivot_objects;
  uint32_t m;
  uint32_t m_i;
  uint32_t chunk_size;
  std::vector<std::vector<uint32_t>> lists;
};

}  // namespace permkit
