#include "scl/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scl/error.hpp"
#include "scl/parallel.hpp"

namespace scl {

namespace {

constexpr double kInsideTolerance = 1e-10;

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

}  // namespace

RestrictedPartition partition_from_masses(std::vector<double> masses) {
  if (masses.empty()) throw DomainError("partition needs at least one atom");
  double total = 0.0;
  for (double m : masses) {
    if (!(m > 0.0)) throw DomainError("atom masses must be positive");
    total += m;
  }
  for (double& m : masses) m /= total;
  RestrictedPartition p;
  p.masses = std::move(masses);
  return p;
}

RestrictedPartition restrict_to(const DynamicalPartition& fine, const Atom& box, int coarse_level) {
  RestrictedPartition p;
  p.host_left = box.left;
  p.host_length = box.length;
  p.coarse_level = coarse_level;
  p.fine_level = fine.level;
  for (std::size_t i = fine.locate(box.left + 0.5 * kInsideTolerance); i < fine.atoms.size(); ++i) {
    const Atom& a = fine.atoms[i];
    if (a.left >= box.right - kInsideTolerance) break;
    if (a.left < box.left - kInsideTolerance || a.right > box.right + kInsideTolerance)
      throw StructureError("atom k=" + std::to_string(a.k) + " crosses the box boundary");
    p.atoms.push_back(a);
  }
  if (p.atoms.empty()) throw StructureError("no finer atoms inside box k=" + std::to_string(box.k));
  double total = 0.0;
  for (const auto& a : p.atoms) total += a.length;
  if (std::abs(total - box.length) > kInsideTolerance)
    throw StructureError("finer atoms do not tile box k=" + std::to_string(box.k));
  p.masses.reserve(p.atoms.size());
  for (const auto& a : p.atoms) p.masses.push_back(a.length / total);
  return p;
}

double entropy(std::span<const double> masses) {
  double h = 0.0;
  for (double m : masses)
    if (m > 0.0) h -= m * std::log(m);
  return h;
}

double entropy(const RestrictedPartition& p) { return entropy(p.masses); }

PartitionIsomorphism make_isomorphism(RestrictedPartition source, RestrictedPartition target) {
  if (source.masses.size() != target.masses.size())
    throw DomainError("isomorphic partitions need equal atom counts");
  PartitionIsomorphism iso{std::move(source), std::move(target), {}};
  iso.jacobian.reserve(iso.source.masses.size());
  for (std::size_t i = 0; i < iso.source.masses.size(); ++i)
    iso.jacobian.push_back(iso.target.masses[i] / iso.source.masses[i]);
  return iso;
}

double discrepancy(const PartitionIsomorphism& iso) {
  double delta = 0.0;
  for (std::size_t i = 0; i < iso.jacobian.size(); ++i) delta += iso.source.masses[i] * log_plus(iso.jacobian[i]);
  return delta;
}

PartitionIsomorphism conjugate_isomorphism(const ConjugacyLadder& ladder, std::size_t box_index, int n, int r) {
  if (n < 1 || r < 1) throw DomainError("conjugate isomorphism needs n >= 1 and r >= 1");
  const int coarse = n * r, fine = (n + 1) * r;
  const auto& map_coarse = ladder.map_ladder().level(coarse);
  const auto& rot_coarse = ladder.rotation_ladder().level(coarse);
  if (box_index >= map_coarse.atoms.size()) throw DomainError("box index out of range");
  const Atom& box = map_coarse.atoms[box_index];
  const Atom& image = rot_coarse.atoms[box_index];
  if (box.label != image.label || box.k != image.k)
    throw StructureError("conjugacy does not preserve cyclic order at level " + std::to_string(coarse));
  auto source = restrict_to(ladder.map_ladder().level(fine), box, coarse);
  auto target = restrict_to(ladder.rotation_ladder().level(fine), image, coarse);
  if (source.atoms.size() != target.atoms.size())
    throw StructureError("restricted partitions differ in atom count in box k=" + std::to_string(box.k));
  for (std::size_t i = 0; i < source.atoms.size(); ++i)
    if (source.atoms[i].label != target.atoms[i].label || source.atoms[i].k != target.atoms[i].k)
      throw StructureError("conjugacy does not preserve order inside box k=" + std::to_string(box.k));
  return make_isomorphism(std::move(source), std::move(target));
}

PartitionComparisonTerms partition_comparison_terms(const PartitionIsomorphism& iso, double host_length, double image_length) {
  if (!(host_length > 0.0 && host_length < 1.0 && image_length > 0.0 && image_length < 1.0))
    throw DomainError("partition comparison needs |I|, |J| in (0,1)");
  PartitionComparisonTerms t;
  const double log_i = std::abs(std::log(host_length));
  const double log_j = std::abs(std::log(image_length));
  t.log_ratio = log_j / log_i;
  t.entropy = entropy(iso.source);
  t.delta = discrepancy(iso);
  t.delta_sq = t.delta * t.delta;
  double cross = 0.0;
  for (std::size_t i = 0; i < iso.jacobian.size(); ++i) {
    const double mu = iso.source.masses[i], nu = iso.target.masses[i];
    t.lhs += mu * std::abs(std::log(nu * image_length)) / std::abs(std::log(mu * host_length));
    cross += mu * std::abs(std::log(nu));
  }
  t.gibbs_gap = cross - t.entropy;
  return t;
}

JensenCheck jensen_check(const PartitionIsomorphism& iso) {
  JensenCheck out;
  double nu_e = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < iso.jacobian.size(); ++i) {
    if (iso.jacobian[i] <= 1.0) continue;
    out.expanding_mass += iso.source.masses[i];
    nu_e += iso.target.masses[i];
    weighted += iso.source.masses[i] * std::log(iso.jacobian[i]);
  }
  if (out.expanding_mass > 0.0) {
    out.lhs = weighted / out.expanding_mass;
    out.rhs = std::log(nu_e / out.expanding_mass);
  }
  return out;
}

std::vector<DiscrepancyRow> discrepancy_table(const ConjugacyLadder& ladder, int n_min, int n_max, int r,
                                              int threads) {
  std::vector<DiscrepancyRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    const std::size_t boxes = ladder.map_ladder().level(n * r).atoms.size();
    std::vector<DiscrepancyRow> level_rows(boxes);
    parallel_for(boxes, threads, [&](std::size_t b) {
      const auto iso = conjugate_isomorphism(ladder, b, n, r);
      const double delta = discrepancy(iso);
      const double h = entropy(iso.source);
      double cross = 0.0;
      for (std::size_t i = 0; i < iso.jacobian.size(); ++i)
        cross += iso.source.masses[i] * std::abs(std::log(iso.target.masses[i]));
      level_rows[b] = {n, r, b, delta, h, cross - h, iso.source.masses.size()};
    });
    rows.insert(rows.end(), level_rows.begin(), level_rows.end());
  }
  return rows;
}

}  // namespace scl
