#include "permkit/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "permkit/rng.hpp"

namespace permkit {

const char* space_kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::L2: return "l2";
    case SpaceKind::CosineSparse: return "cosine";
    case SpaceKind::KLDiv: return "kldiv";
    case SpaceKind::JSDiv: return "jsdiv";
    case SpaceKind::NormLevenshtein: return "normleven";
    case SpaceKind::SQFD: return "sqfd";
  }
  return "?";
}

SpaceKind space_kind_from_name(std::string_view name) {
  if (name == "l2") return SpaceKind::L2;
  if (name == "cosine") return SpaceKind::CosineSparse;
  if (name == "kldiv") return SpaceKind::KLDiv;
  if (name == "jsdiv") return SpaceKind::JSDiv;
  if (name == "normleven") return SpaceKind::NormLevenshtein;
  if (name == "sqfd") return SpaceKind::SQFD;
  throw std::invalid_argument("unknown space: " + std::string(name));
}

ObjectKind object_kind_for(SpaceKind k) {
  switch (k) {
    case SpaceKind::L2:
    case SpaceKind::KLDiv:
    case SpaceKind::JSDiv: return ObjectKind::Dense;
    case SpaceKind::CosineSparse: return ObjectKind::Sparse;
    case SpaceKind::NormLevenshtein: return ObjectKind::String;
    case SpaceKind::SQFD: return ObjectKind::Signature;
  }
  return ObjectKind::Dense;
}

double l2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("l2: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double cosine_distance(const SparseVec& x, const SparseVec& y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].index == y[j].index) {
      dot += x[i].value * y[j].value;
      ++i;
      ++j;
    } else if (x[i].index < y[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  for (const auto& e : x) nx += e.value * e.value;
  for (const auto& e : y) ny += e.value * e.value;
  if (nx == 0.0 || ny == 0.0) throw std::invalid_argument("cosine_distance: zero-norm vector");
  const double d = 1.0 - dot / (std::sqrt(nx) * std::sqrt(ny));
  return std::clamp(d, 0.0, 2.0);
}

double kl_divergence(std::span<const double> x, std::span<const double> y,
                     const double* log_x, const double* log_y) {
  if (x.size() != y.size()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("kl_divergence: non-positive component");
    const double lx = log_x ? log_x[i] : std::log(x[i]);
    const double ly = log_y ? log_y[i] : std::log(y[i]);
    s += x[i] * (lx - ly);
  }
  return s;
}

double js_divergence(std::span<const double> x, std::span<const double> y,
                     const double* log_x, const double* log_y) {
  if (x.size() != y.size()) throw std::invalid_argument("js_divergence: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("js_divergence: non-positive component");
    const double lx = log_x ? log_x[i] : std::log(x[i]);
    const double ly = log_y ? log_y[i] : std::log(y[i]);
    const double m = x[i] + y[i];
    s += x[i] * lx + y[i] * ly - m * std::log(m * 0.5);
  }
  return 0.5 * s;
}

double normalized_levenshtein(std::string_view x, std::string_view y) {
  const size_t n = x.size(), m = y.size();
  if (n == 0 && m == 0) return 0.0;
  if (n == 0 || m == 0) return 1.0;
  // two-row DP
  std::vector<uint32_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<uint32_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<uint32_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      const uint32_t sub = prev[j - 1] + (x[i - 1] != y[j - 1] ? 1 : 0);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

namespace {

double cluster_sim(const double* a, const double* b, const SqfdSim& sim) {
  double s = 0.0;
  for (size_t i = 0; i < kSignatureCentroidDim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  const double dist = std::sqrt(s);
  switch (sim.kind) {
    case SqfdSimKind::Heuristic: return 1.0 / (1.0 + dist);
    case SqfdSimKind::Gaussian: return std::exp(-sim.alpha * s);
  }
  return 0.0;
}

}  // namespace

double sqfd(const Signature& x, const Signature& y, const SqfdSim& sim) {
  if (x.empty() || y.empty()) throw std::invalid_argument("sqfd: empty signature");
  const size_t n = x.size(), m = y.size(), t = n + m;
  std::vector<const double*> cent(t);
  std::vector<double> w(t);
  for (size_t i = 0; i < n; ++i) {
    cent[i] = x[i].centroid;
    w[i] = x[i].weight;
  }
  for (size_t j = 0; j < m; ++j) {
    cent[n + j] = y[j].centroid;
    w[n + j] = -y[j].weight;
  }
  double q = 0.0;
  for (size_t i = 0; i < t; ++i) {
    q += w[i] * w[i];  // sim(r, r) = 1 for both similarity kinds
    for (size_t j = i + 1; j < t; ++j)
      q += 2.0 * w[i] * w[j] * cluster_sim(cent[i], cent[j], sim);
  }
  if (q < -1e-9) throw std::runtime_error("sqfd: quadratic form is significantly negative");
  return std::sqrt(std::max(q, 0.0));
}

double Space::distance(const ObjectRef& a, const ObjectRef& b) const {
  switch (kind) {
    case SpaceKind::L2:
      return l2(a.ds->dense_row(a.id), b.ds->dense_row(b.id));
    case SpaceKind::CosineSparse:
      return cosine_distance(a.ds->sparse(a.id), b.ds->sparse(b.id));
    case SpaceKind::KLDiv:
      return kl_divergence(a.ds->dense_row(a.id), b.ds->dense_row(b.id),
                           a.ds->log_row(a.id), b.ds->log_row(b.id));
    case SpaceKind::JSDiv:
      return js_divergence(a.ds->dense_row(a.id), b.ds->dense_row(b.id),
                           a.ds->log_row(a.id), b.ds->log_row(b.id));
    case SpaceKind::NormLevenshtein:
      return normalized_levenshtein(a.ds->str(a.id), b.ds->str(b.id));
    case SpaceKind::SQFD:
      return sqfd(a.ds->signature(a.id), b.ds->signature(b.id), sqfd_sim);
  }
  throw std::logic_error("unreachable space kind");
}

double triangle_violation_rate(const DataSet& ds, const Space& space,
                               uint64_t num_triples, uint64_t rng_seed) {
  if (ds.empty()) throw std::invalid_argument("triangle_violation_rate: empty dataset");
  if (num_triples == 0) return 0.0;
  RandomEngine eng = make_engine(rng_seed, 0x7121);
  const uint64_t n = ds.size();
  uint64_t violations = 0;
  for (uint64_t t = 0; t < num_triples; ++t) {
    const ObjectRef a{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    const ObjectRef b{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    const ObjectRef c{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    if (space.distance(a, c) > space.distance(a, b) + space.distance(b, c) + 1e-9) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(num_triples);
}

double mu_defectiveness_probe(const DataSet& ds, const Space& space,
                              MonotoneTransform transform, uint64_t num_triples,
                              uint64_t rng_seed) {
  if (ds.empty()) throw std::invalid_argument("mu_defectiveness_probe: empty dataset");
  if (num_triples == 0) return 0.0;
  RandomEngine eng = make_engine(rng_seed, 0x30d);
  const uint64_t n = ds.size();
  const auto f = [transform](double d) {
    return transform == MonotoneTransform::Sqrt ? std::sqrt(d) : d;
  };
  double mu = 0.0;
  for (uint64_t t = 0; t < num_triples; ++t) {
    const ObjectRef q{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    const ObjectRef a{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    const ObjectRef b{&ds, static_cast<uint32_t>(rand_below(eng, n))};
    const double denom = f(space.distance(a, b));
    if (denom < 1e-12) continue;
    const double num = std::abs(f(space.distance(q, a)) - f(space.distance(q, b)));
    mu = std::max(mu, num / denom);
  }
  return mu;
}

}  // namespace permkit
