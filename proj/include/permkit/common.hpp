#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace permkit {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for malformed or unreadable files (datasets, snapshots, configs).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Neighbor {
  uint32_t id;
  double dist;

  friend bool operator==(const Neighbor& a, const Neighbor& b) {
    return a.id == b.id && a.dist == b.dist;
  }
};

/// Orders by (distance, id); the tie-break rule used everywhere a ranked
/// list of neighbors is produced.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.id < b.id;
}

struct SearchStats {
  uint64_t dist_comps = 0;   // evaluations of the original distance
  uint64_t candidates = 0;   // candidates examined in the refinement stage
  double elapsed_us = 0.0;   // wall clock, excluded from determinism checks
};

struct QueryResult {
  std::vector<Neighbor> neighbors;  // ascending by (dist, id)
  SearchStats stats;
};

struct BuildStats {
  uint64_t dist_comps = 0;
  double build_ms = 0.0;
  uint64_t index_bytes = 0;
};

}  // namespace permkit
