#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "scl/cf.hpp"
#include "scl/circle_map.hpp"
#include "scl/dynamical_partition.hpp"

namespace scl {

/// B(n; f) from the orbit of the critical point 0.
/// Throws DomainError when q_n + q_{n-1} exceeds orbit_budget.
DynamicalPartition dynamical_partition(const CircleMap& f, const ContinuedFraction& cf, int n,
                                       std::int64_t orbit_budget = 1 << 22);

/// Longest critical orbit a ladder may hold; levels needing more are cut like precision failures.
inline constexpr std::int64_t kLadderOrbitBudget = 1 << 19;

/// B(n) for n = 1..n_max sharing one orbit cache.
class PartitionLadder {
 public:
  /// With truncate_on_precision the ladder stops at the last level that passed
  /// the precision gate and fits the orbit budget instead of throwing.
  PartitionLadder(const CircleMap& f, const ContinuedFraction& cf, int n_max, bool truncate_on_precision = false);
  /// Ladder of the rigid rotation built from the 113-bit orbit of 0.
  static PartitionLadder rotation(const RotationNumber& rho, int n_max, bool truncate_on_precision = false);

  int n_max() const noexcept { return static_cast<int>(levels_.size()); }
  std::optional<int> truncated_at() const noexcept { return truncated_at_; }
  const DynamicalPartition& level(int n) const;
  const std::vector<Convergent>& convergents() const noexcept { return table_; }

 private:
  PartitionLadder() = default;

  std::vector<Convergent> table_;
  std::vector<DynamicalPartition> levels_;
  std::optional<int> truncated_at_;
};

struct AtomSplit {
  std::size_t coarse_index = 0;
  AtomLabel label = AtomLabel::Lengthy;
  std::int64_t k = 0;
  int lengthy_children = 0;
  int short_children = 0;
};

struct RefinementReport {
  int level = 0;           ///< n of the coarse partition
  std::int64_t a_next = 0;  ///< a_{n+1} implied by the atom counts
  std::vector<AtomSplit> splits;
  double worst_mismatch = 0.0;
};

/// Checks that short atoms of P_n reappear as lengthy atoms of P_{n+1} and that
/// each lengthy atom splits into a_{n+1} lengthy + 1 short atoms.
/// Throws StructureError naming the offending atom.
RefinementReport refinement_report(const DynamicalPartition& coarse, const DynamicalPartition& fine);

/// j = max{ i : f^{q_i}(J) does not meet J } + 1 for J = (a, b), testing levels 0..depth.
/// Throws DomainError when no level separates J from its returns and
/// ConvergenceError ("increase depth") when the two guard levels above the
/// maximum are not available.
int order_of_size(const CircleMap& f, const ContinuedFraction& cf, double a, double b, int depth);

struct GeometryStats {
  int level = 0;
  double max_length = 0.0;
  double min_length = 0.0;
  double max_adjacent_ratio = 0.0;
  /// Atom length over its extreme children at level + 1; NaN at the last level.
  double min_extreme_child_ratio = 0.0;
  double max_extreme_child_ratio = 0.0;
};

struct GeometryReport {
  std::vector<GeometryStats> levels;
  /// Least-squares slope of log(max length) against n.
  double log_max_length_slope = 0.0;
};

GeometryReport geometry_stats(const PartitionLadder& ladder);
GeometryReport geometry_stats(const CircleMap& f, const ContinuedFraction& cf, int n_max);

/// {"level": n, "atoms": [{"left", "right", "length", "label", "k"}, ...]}
nlohmann::json to_json(const DynamicalPartition& partition);

}  // namespace scl
