#include "permkit/dataset.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace permkit {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void fnv_bytes(uint64_t& h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

template <typename T>
void fnv_value(uint64_t& h, const T& v) {
  fnv_bytes(h, &v, sizeof(v));
}

}  // namespace

void DataSet::ensure_log_cache() {
  if (kind_ != ObjectKind::Dense || !dense_log_.empty()) return;
  dense_log_.resize(dense_.size());
  for (size_t i = 0; i < dense_.size(); ++i) {
    if (!(dense_[i] > 0.0))
      throw std::invalid_argument("log cache requires strictly positive components");
    dense_log_[i] = std::log(dense_[i]);
  }
}

void DataSet::append_dense(std::span<const double> values) {
  if (kind_ != ObjectKind::Dense) throw std::invalid_argument("dataset is not dense");
  if (dim_ == 0) throw std::invalid_argument("dense dataset has no dimensionality");
  if (values.size() != dim_) throw std::invalid_argument("dense record dimension mismatch");
  dense_.insert(dense_.end(), values.begin(), values.end());
  dense_log_.clear();
}

void DataSet::append_sparse(SparseVec entries) {
  if (kind_ != ObjectKind::Sparse) throw std::invalid_argument("dataset is not sparse");
  sparse_.push_back(std::move(entries));
}

void DataSet::append_string(std::string s) {
  if (kind_ != ObjectKind::String) throw std::invalid_argument("dataset is not string-valued");
  strings_.push_back(std::move(s));
}

void DataSet::append_signature(Signature sig) {
  if (kind_ != ObjectKind::Signature) throw std::invalid_argument("dataset is not signature-valued");
  signatures_.push_back(std::move(sig));
}

DataSet DataSet::subset(std::span<const uint32_t> ids) const {
  DataSet out(kind_, dim_);
  for (uint32_t id : ids) {
    switch (kind_) {
      case ObjectKind::Dense: out.append_dense(dense_row(id)); break;
      case ObjectKind::Sparse: out.append_sparse(sparse_[id]); break;
      case ObjectKind::String: out.append_string(strings_[id]); break;
      case ObjectKind::Signature: out.append_signature(signatures_[id]); break;
    }
  }
  if (has_log_cache()) out.ensure_log_cache();
  return out;
}

uint64_t DataSet::content_hash() const {
  uint64_t h = kFnvOffset;
  fnv_value(h, static_cast<uint32_t>(kind_));
  fnv_value(h, static_cast<uint64_t>(dim_));
  fnv_value(h, static_cast<uint64_t>(size()));
  switch (kind_) {
    case ObjectKind::Dense:
      fnv_bytes(h, dense_.data(), dense_.size() * sizeof(double));
      break;
    case ObjectKind::Sparse:
      for (const auto& v : sparse_) {
        fnv_value(h, static_cast<uint64_t>(v.size()));
        for (const auto& e : v) {
          fnv_value(h, e.index);
          fnv_value(h, e.value);
        }
      }
      break;
    case ObjectKind::String:
      for (const auto& s : strings_) {
        fnv_value(h, static_cast<uint64_t>(s.size()));
        fnv_bytes(h, s.data(), s.size());
      }
      break;
    case ObjectKind::Signature:
      for (const auto& sig : signatures_) {
        fnv_value(h, static_cast<uint64_t>(sig.size()));
        for (const auto& c : sig) {
          fnv_bytes(h, c.centroid, sizeof(c.centroid));
          fnv_value(h, c.weight);
        }
      }
      break;
  }
  return h;
}

uint64_t DataSet::memory_bytes() const {
  uint64_t b = dense_.size() * sizeof(double) + dense_log_.size() * sizeof(double);
  for (const auto& v : sparse_) b += v.size() * sizeof(SparseEntry);
  for (const auto& s : strings_) b += s.size();
  for (const auto& sig : signatures_) b += sig.size() * sizeof(SignatureCluster);
  return b;
}

}  // namespace permkit
