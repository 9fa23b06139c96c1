#pragma once

#include <span>
#include <string>
#include <string_view>

#include "permkit/dataset.hpp"

namespace permkit {

enum class SpaceKind : uint32_t {
  L2 = 0,
  CosineSparse = 1,
  KLDiv = 2,
  JSDiv = 3,
  NormLevenshtein = 4,
  SQFD = 5,
};

/// For asymmetric distances: which argument slot the data point takes when
/// compared to a query. Left is the paper-style default.
enum class QueryMode : uint32_t { Left = 0, Right = 1 };

enum class SqfdSimKind : uint32_t { Heuristic = 0, Gaussian = 1 };

const char* space_kind_name(SpaceKind k);
SpaceKind space_kind_from_name(std::string_view name);
ObjectKind object_kind_for(SpaceKind k);

// ---- distance functions -------------------------------------------------

double l2(std::span<const double> x, std::span<const double> y);

/// 1 - <x,y>/(|x||y|) over sparse vectors; intersection by ordered merge.
double cosine_distance(const SparseVec& x, const SparseVec& y);

/// sum x_i ln(x_i/y_i). Optional caches hold componentwise ln values; a
/// cached evaluation is bitwise identical to an uncached one.
double kl_divergence(std::span<const double> x, std::span<const double> y,
                     const double* log_x = nullptr, const double* log_y = nullptr);

/// 0.5 * sum [x ln x + y ln y - (x+y) ln((x+y)/2)], natural log.
double js_divergence(std::span<const double> x, std::span<const double> y,
                     const double* log_x = nullptr, const double* log_y = nullptr);

/// Edit distance (unit-cost insert/delete/substitute) / max(|x|,|y|);
/// empty vs empty is 0.
double normalized_levenshtein(std::string_view x, std::string_view y);

struct SqfdSim {
  SqfdSimKind kind = SqfdSimKind::Heuristic;
  double alpha = 1.0;  // Gaussian bandwidth, unused by Heuristic
};

/// Signature quadratic form distance sqrt(w^T A w) with
/// A_ij = sim(r_i, r_j) over the concatenated cluster representatives.
double sqfd(const Signature& x, const Signature& y, const SqfdSim& sim = {});

// ---- space --------------------------------------------------------------

/// Distance function plus evaluation conventions. All evaluations are pure;
/// safe for unlimited concurrent callers.
struct Space {
  SpaceKind kind = SpaceKind::L2;
  QueryMode query_mode = QueryMode::Left;  // meaningful for KLDiv only
  SqfdSim sqfd_sim = {};

  bool symmetric() const { return kind != SpaceKind::KLDiv; }
  ObjectKind object_kind() const { return object_kind_for(kind); }

  /// d(a, b) exactly as written, a in the left slot.
  double distance(const ObjectRef& a, const ObjectRef& b) const;

  /// Distance between a data point and a query honoring query_mode:
  /// Left evaluates d(data, query), Right evaluates d(query, data).
  double query_distance(const ObjectRef& data, const ObjectRef& query) const {
    return query_mode == QueryMode::Left ? distance(data, query) : distance(query, data);
  }

  /// Index-time distance from an inducing point to a pivot: d(x, pivot).
  double induce_distance(const ObjectRef& x, const ObjectRef& pivot) const {
    return distance(x, pivot);
  }
};

// ---- diagnostics --------------------------------------------------------

/// Fraction of uniformly sampled ordered triples (a,b,c) violating
/// d(a,c) <= d(a,b) + d(b,c) + 1e-9. Zero triples yields 0.
double triangle_violation_rate(const DataSet& ds, const Space& space,
                               uint64_t num_triples, uint64_t rng_seed);

enum class MonotoneTransform { Identity, Sqrt };

/// Empirical minimal mu: max over sampled triples (q,a,b) of
/// |f(d(q,a)) - f(d(q,b))| / f(d(a,b)); triples with f(d(a,b)) < 1e-12
/// are skipped. Zero triples yields 0.
double mu_defectiveness_probe(const DataSet& ds, const Space& space,
                              MonotoneTransform transform, uint64_t num_triples,
                              uint64_t rng_seed);

}  // namespace permkit
