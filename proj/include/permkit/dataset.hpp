#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "permkit/common.hpp"

namespace permkit {

enum class ObjectKind : uint32_t { Dense = 0, Sparse = 1, String = 2, Signature = 3 };

struct SparseEntry {
  uint32_t index;
  double value;
};

/// Sparse vector with strictly increasing indices and non-zero finite values.
using SparseVec = std::vector<SparseEntry>;

inline constexpr size_t kSignatureCentroidDim = 7;

/// Cluster signature: (7-d centroid, weight) pairs, weights summing to 1.
struct SignatureCluster {
  double centroid[kSignatureCentroidDim];
  double weight;
};
using Signature = std::vector<SignatureCluster>;

/// An ordered collection of objects of one kind with ids 0..size()-1.
/// Immutable once handed to an index; the optional log cache (used by the
/// KL-divergence) is created once and read-only afterwards.
class DataSet {
 public:
  DataSet() : kind_(ObjectKind::Dense), dim_(0) {}
  explicit DataSet(ObjectKind kind, size_t dim = 0) : kind_(kind), dim_(dim) {}

  ObjectKind kind() const { return kind_; }
  size_t dim() const { return dim_; }

  size_t size() const {
    switch (kind_) {
      case ObjectKind::Dense: return dim_ == 0 ? 0 : dense_.size() / dim_;
      case ObjectKind::Sparse: return sparse_.size();
      case ObjectKind::String: return strings_.size();
      case ObjectKind::Signature: return signatures_.size();
    }
    return 0;
  }
  bool empty() const { return size() == 0; }

  const double* row(size_t i) const { return dense_.data() + i * dim_; }
  std::span<const double> dense_row(size_t i) const { return {row(i), dim_}; }
  const SparseVec& sparse(size_t i) const { return sparse_[i]; }
  const std::string& str(size_t i) const { return strings_[i]; }
  const Signature& signature(size_t i) const { return signatures_[i]; }

  /// nullptr until ensure_log_cache() has been called.
  const double* log_row(size_t i) const {
    return dense_log_.empty() ? nullptr : dense_log_.data() + i * dim_;
  }
  bool has_log_cache() const { return !dense_log_.empty(); }

  /// Precompute componentwise natural logs of all dense rows (KL spaces).
  /// Values must be strictly positive.
  void ensure_log_cache();

  void append_dense(std::span<const double> values);
  void append_sparse(SparseVec entries);
  void append_string(std::string s);
  void append_signature(Signature sig);

  /// Copy of the selected records, ids reassigned by position.
  DataSet subset(std::span<const uint32_t> ids) const;

  /// FNV-1a over kind, dim and the exact stored bytes of every record.
  uint64_t content_hash() const;

  /// Rough in-memory footprint of the stored records.
  uint64_t memory_bytes() const;

  const std::vector<double>& dense_storage() const { return dense_; }

 private:
  ObjectKind kind_;
  size_t dim_;
  std::vector<double> dense_;      // row-major, size() * dim_
  std::vector<double> dense_log_;  // parallel log cache, empty or same shape
  std::vector<SparseVec> sparse_;
  std::vector<std::string> strings_;
  std::vector<Signature> signatures_;
};

/// Lightweight handle to one object of a DataSet.
struct ObjectRef {
  const DataSet* ds;
  uint32_t id;
};

}  // namespace permkit
