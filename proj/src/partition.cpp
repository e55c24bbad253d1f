#include "scl/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scl/error.hpp"

namespace scl {

namespace {

constexpr double kMatchTolerance = 1e-10;
constexpr double kOverlapTolerance = 1e-12;

PartitionInputs inputs_for(const std::vector<Convergent>& table, int n) {
  PartitionInputs in;
  in.level = n;
  in.q_n = table.at(static_cast<std::size_t>(n)).q;
  in.p_n = table.at(static_cast<std::size_t>(n)).p;
  in.q_prev = table.at(static_cast<std::size_t>(n - 1)).q;
  in.p_prev = table.at(static_cast<std::size_t>(n - 1)).p;
  return in;
}

// Deepest level whose orbit fits the ladder budget; throws unless truncating.
int fit_budget(const std::vector<Convergent>& table, int n_max, bool truncate, std::optional<int>& truncated_at) {
  int n = n_max;
  while (n > 1 && table[static_cast<std::size_t>(n)].q + table[static_cast<std::size_t>(n - 1)].q > kLadderOrbitBudget)
    --n;
  if (n < n_max) {
    if (!truncate)
      throw DomainError("level " + std::to_string(n + 1) + " needs more than " + std::to_string(kLadderOrbitBudget) +
                        " iterates, beyond the orbit budget");
    truncated_at = n + 1;
  }
  return n;
}

}  // namespace

DynamicalPartition dynamical_partition(const CircleMap& f, const ContinuedFraction& cf, int n,
                                       std::int64_t orbit_budget) {
  if (n < 1) throw DomainError("partition level must be >= 1");
  const auto table = convergent_table(cf, n);
  auto in = inputs_for(table, n);
  if (in.q_n + in.q_prev > orbit_budget)
    throw DomainError("level " + std::to_string(n) + " needs " + std::to_string(in.q_n + in.q_prev) +
                      " iterates, beyond the orbit budget");
  OrbitCache orbit(f, LiftPoint{}, in.q_n + in.q_prev);
  in.orbit = [&orbit](std::int64_t k) { return orbit[k]; };
  return assemble_partition(in);
}

PartitionLadder::PartitionLadder(const CircleMap& f, const ContinuedFraction& cf, int n_max,
                                 bool truncate_on_precision) {
  if (n_max < 1) throw DomainError("ladder depth must be >= 1");
  table_ = convergent_table(cf, n_max);
  n_max = fit_budget(table_, n_max, truncate_on_precision, truncated_at_);
  const auto last = inputs_for(table_, n_max);
  OrbitCache orbit(f, LiftPoint{}, last.q_n + last.q_prev);
  for (int n = 1; n <= n_max; ++n) {
    auto in = inputs_for(table_, n);
    in.orbit = [&orbit](std::int64_t k) { return orbit[k]; };
    try {
      levels_.push_back(assemble_partition(in));
    } catch (const PrecisionError&) {
      if (!truncate_on_precision || n == 1) throw;
      truncated_at_ = n;
      break;
    }
  }
}

PartitionLadder PartitionLadder::rotation(const RotationNumber& rho, int n_max, bool truncate_on_precision) {
  if (n_max < 1) throw DomainError("ladder depth must be >= 1");
  PartitionLadder ladder;
  ladder.table_ = convergent_table(rho.cf(), n_max);
  n_max = fit_budget(ladder.table_, n_max, truncate_on_precision, ladder.truncated_at_);
  const auto last = inputs_for(ladder.table_, n_max);
  std::vector<LiftPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(last.q_n + last.q_prev));
  for (std::int64_t k = 0; k < last.q_n + last.q_prev; ++k) orbit.push_back(rotation_orbit_lift(rho, k));
  for (int n = 1; n <= n_max; ++n) {
    auto in = inputs_for(ladder.table_, n);
    in.orbit = [&orbit](std::int64_t k) { return orbit[static_cast<std::size_t>(k)]; };
    try {
      return_lengths(rho, n);
      ladder.levels_.push_back(assemble_partition(in));
    } catch (const PrecisionError&) {
      if (!truncate_on_precision || n == 1) throw;
      ladder.truncated_at_ = n;
      break;
    }
  }
  return ladder;
}

const DynamicalPartition& PartitionLadder::level(int n) const {
  if (n < 1 || n > n_max()) throw DomainError("level " + std::to_string(n) + " not in ladder");
  return levels_[static_cast<std::size_t>(n - 1)];
}

RefinementReport refinement_report(const DynamicalPartition& coarse, const DynamicalPartition& fine) {
  if (fine.level != coarse.level + 1) throw DomainError("refinement needs consecutive levels");
  const auto q_prev = static_cast<std::int64_t>(coarse.count(AtomLabel::Short));
  const auto q_n = static_cast<std::int64_t>(coarse.count(AtomLabel::Lengthy));
  const auto q_next = static_cast<std::int64_t>(fine.count(AtomLabel::Lengthy));
  if (static_cast<std::int64_t>(fine.count(AtomLabel::Short)) != q_n)
    throw StructureError("finer partition has " + std::to_string(fine.count(AtomLabel::Short)) +
                         " short atoms, expected " + std::to_string(q_n));
  if ((q_next - q_prev) % q_n != 0 || q_next <= q_prev)
    throw StructureError("atom counts violate the q-recurrence");

  RefinementReport report;
  report.level = coarse.level;
  report.a_next = (q_next - q_prev) / q_n;

  std::size_t j = 0;  // fine atoms are visited in order
  for (std::size_t i = 0; i < coarse.atoms.size(); ++i) {
    const Atom& box = coarse.atoms[i];
    AtomSplit split{i, box.label, box.k, 0, 0};
    const std::size_t first = j;
    while (j < fine.atoms.size() && fine.atoms[j].left < box.right - kMatchTolerance) {
      (fine.atoms[j].label == AtomLabel::Lengthy ? split.lengthy_children : split.short_children)++;
      ++j;
    }
    if (j == first) throw StructureError("atom k=" + std::to_string(box.k) + " has no children");
    const double mismatch = std::max(std::abs(fine.atoms[first].left - box.left),
                                     std::abs(fine.atoms[j - 1].right - box.right));
    report.worst_mismatch = std::max(report.worst_mismatch, mismatch);
    const std::string who = std::string(to_string(box.label)) + " atom k=" + std::to_string(box.k) +
                            " at level " + std::to_string(coarse.level);
    if (mismatch > kMatchTolerance) throw StructureError(who + " is not a union of finer atoms");
    if (box.label == AtomLabel::Short) {
      const Atom& child = fine.atoms[first];
      if (j - first != 1 || child.label != AtomLabel::Lengthy || child.k != box.k)
        throw StructureError(who + " is not promoted to a lengthy atom");
    } else if (split.lengthy_children != report.a_next || split.short_children != 1) {
      throw StructureError(who + " splits into " + std::to_string(split.lengthy_children) + " lengthy + " +
                           std::to_string(split.short_children) + " short");
    }
    report.splits.push_back(split);
  }
  if (j != fine.atoms.size()) throw StructureError("finer atoms left over after refinement");
  return report;
}

int order_of_size(const CircleMap& f, const ContinuedFraction& cf, double a, double b, int depth) {
  if (!(a < b)) throw DomainError("order of size needs a < b");
  if (b - a >= 1.0) throw DomainError("order of size undefined for an arc of full length");
  const auto table = convergent_table(cf, depth);
  std::optional<int> best;
  LiftPoint pa = LiftPoint::from_double(a), pb = LiftPoint::from_double(b);
  std::int64_t steps = 0;
  for (int i = 0; i <= depth; ++i) {
    const auto& c = table[static_cast<std::size_t>(i)];
    for (; steps < c.q; ++steps) {
      pa = f.step(pa);
      pb = f.step(pb);
    }
    // f^{q_i}(J) shifted back by p_i turns; it is disjoint from J when no
    // translate J + m overlaps it with positive length.
    const double lo = a + pa.minus(LiftPoint::from_double(a), c.p);
    const double hi = b + pb.minus(LiftPoint::from_double(b), c.p);
    bool meets = false;
    for (int m = -1; m <= 1; ++m) {
      const double overlap = std::min(hi, b + m) - std::max(lo, a + m);
      if (overlap > kOverlapTolerance) meets = true;
    }
    if (!meets) best = i;
  }
  if (!best) throw DomainError("order of size undefined: every closest return re-enters J");
  if (*best + 2 > depth) throw ConvergenceError("cannot certify order of size; increase depth");
  return *best + 1;
}

GeometryReport geometry_stats(const PartitionLadder& ladder) {
  GeometryReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n = 1; n <= ladder.n_max(); ++n) {
    const auto& part = ladder.level(n);
    GeometryStats s{n, part.max_length(), part.min_length(), 1.0, nan, nan};
    const std::size_t count = part.atoms.size();
    for (std::size_t i = 0; i < count && count > 1; ++i) {
      const double x = part.atoms[i].length, y = part.atoms[(i + 1) % count].length;
      s.max_adjacent_ratio = std::max(s.max_adjacent_ratio, std::max(x, y) / std::min(x, y));
    }
    if (n < ladder.n_max()) {
      const auto& fine = ladder.level(n + 1);
      s.min_extreme_child_ratio = std::numeric_limits<double>::infinity();
      s.max_extreme_child_ratio = 0.0;
      for (const auto& box : part.atoms) {
        const auto& left_child = fine.atoms[fine.locate(box.left + 0.5 * box.length * 1e-9)];
        const auto& right_child = fine.atoms[fine.locate(box.right - 0.5 * box.length * 1e-9)];
        for (const Atom* child : {&left_child, &right_child}) {
          const double ratio = box.length / child->length;
          s.min_extreme_child_ratio = std::min(s.min_extreme_child_ratio, ratio);
          s.max_extreme_child_ratio = std::max(s.max_extreme_child_ratio, ratio);
        }
      }
    }
    report.levels.push_back(s);
  }
  // ordinary least squares of log(max length) on n
  const double m = static_cast<double>(report.levels.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : report.levels) {
    const double x = s.level, y = std::log(s.max_length);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  report.log_max_length_slope = denom > 0 ? (m * sxy - sx * sy) / denom : nan;
  return report;
}

GeometryReport geometry_stats(const CircleMap& f, const ContinuedFraction& cf, int n_max) {
  return geometry_stats(PartitionLadder(f, cf, n_max));
}

nlohmann::json to_json(const DynamicalPartition& partition) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : partition.atoms)
    atoms.push_back({{"left", a.left}, {"right", a.right}, {"length", a.length}, {"label", to_string(a.label)},
                     {"k", a.k}});
  return {{"level", partition.level}, {"atoms", std::move(atoms)}};
}

}  // namespace scl
