#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scl/dynamical_partition.hpp"
#include "scl/measure.hpp"

namespace scl {

/// Partition of a host interval I viewed as a probability space with masses |w|/|I|.
struct RestrictedPartition {
  double host_left = 0.0;
  double host_length = 1.0;
  std::vector<Atom> atoms;     ///< in order inside I; empty for abstract partitions
  std::vector<double> masses;  ///< normalized, sum to 1
  int coarse_level = 0;
  int fine_level = 0;
};

/// Partition with the given masses and no geometric atoms. Masses are normalized.
RestrictedPartition partition_from_masses(std::vector<double> masses);

/// [fine : box]: the atoms of `fine` inside `box`, normalized by |box|.
/// Throws StructureError when no fine atom lies inside the box.
RestrictedPartition restrict_to(const DynamicalPartition& fine, const Atom& box, int coarse_level);

double entropy(std::span<const double> masses);
double entropy(const RestrictedPartition& p);

/// Order-preserving bijection between two partitions with equal atom counts;
/// jacobian[i] = target mass / source mass of the i-th atom.
struct PartitionIsomorphism {
  RestrictedPartition source;
  RestrictedPartition target;
  std::vector<double> jacobian;
};

/// Throws DomainError when the atom counts differ.
PartitionIsomorphism make_isomorphism(RestrictedPartition source, RestrictedPartition target);

/// sum_w mu(w) max(0, log(nu(h(w)) / mu(w)))
double discrepancy(const PartitionIsomorphism& iso);

/// [B((n+1)r; f) : Box^{nr}(f)] -> [B((n+1)r; rho) : Box^{nr}(rho)] through phi,
/// where the box is atom `box_index` of B(nr; f) in circle order.
PartitionIsomorphism conjugate_isomorphism(const ConjugacyLadder& ladder, std::size_t box_index, int n, int r);

struct PartitionComparisonTerms {
  double lhs = 0.0;        ///< sum_w |log|h(w)|| / |log|w|| mu(w)
  double log_ratio = 0.0;  ///< |log|J|| / |log|I||
  double entropy = 0.0;    ///< H(P_I)
  double delta = 0.0;
  double delta_sq = 0.0;
  double gibbs_gap = 0.0;  ///< sum mu |log nu(h(w))| - sum mu |log mu(w)|, never negative
};

/// Throws DomainError unless 0 < |I|, |J| < 1.
PartitionComparisonTerms partition_comparison_terms(const PartitionIsomorphism& iso, double host_length, double image_length);

/// Both sides of the Jensen step over the expanding atoms E (jacobian > 1):
/// lhs = (1/mu(E)) sum_{E} mu log(nu/mu), rhs = log(nu(E)/mu(E)). Both 0 when E is empty.
struct JensenCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double expanding_mass = 0.0;
};

JensenCheck jensen_check(const PartitionIsomorphism& iso);

struct DiscrepancyRow {
  int n = 0;  ///< boxes live at level n r, atoms at (n+1) r
  int r = 1;
  std::size_t box = 0;
  double delta = 0.0;
  double entropy = 0.0;
  double gibbs_gap = 0.0;
  std::size_t atom_count = 0;
};

/// One row per box of B(nr; f) for n = n_min..n_max.
std::vector<DiscrepancyRow> discrepancy_table(const ConjugacyLadder& ladder, int n_min, int n_max, int r,
                                              int threads = 1);

}  // namespace scl
