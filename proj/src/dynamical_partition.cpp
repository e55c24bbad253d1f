#include "scl/dynamical_partition.hpp"

#include <algorithm>
#include <cmath>

#include "scl/cf.hpp"
#include "scl/error.hpp"

namespace scl {

namespace {

constexpr double kEndpointTolerance = 1e-12;
constexpr double kTilingTolerance = 1e-10;

}  // namespace

LiftPoint LiftPoint::from_double(double x) {
  const double t = std::floor(x);
  LiftPoint p{static_cast<std::int64_t>(t), x - t};
  if (p.frac >= 1.0) {
    ++p.turns;
    p.frac = 0.0;
  }
  return p;
}

const char* to_string(AtomLabel label) noexcept {
  return label == AtomLabel::Short ? "short" : "lengthy";
}

std::size_t DynamicalPartition::count(AtomLabel label) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(atoms.begin(), atoms.end(), [label](const Atom& a) { return a.label == label; }));
}

std::size_t DynamicalPartition::locate(double x) const {
  if (atoms.empty()) throw DomainError("locate on an empty partition");
  x -= std::floor(x);
  auto it = std::upper_bound(atoms.begin(), atoms.end(), x,
                             [](double v, const Atom& a) { return v < a.left; });
  if (it == atoms.begin()) return 0;
  return static_cast<std::size_t>(std::distance(atoms.begin(), it) - 1);
}

double DynamicalPartition::total_length() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.length;
  return s;
}

double DynamicalPartition::max_length() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms) m = std::max(m, a.length);
  return m;
}

double DynamicalPartition::min_length() const noexcept {
  double m = 1.0;
  for (const auto& a : atoms) m = std::min(m, a.length);
  return m;
}

DynamicalPartition assemble_partition(const PartitionInputs& in) {
  if (in.level < 1) throw DomainError("partition level must be >= 1");
  DynamicalPartition part;
  part.level = in.level;
  part.atoms.reserve(static_cast<std::size_t>(in.q_n + in.q_prev));

  const double floor_len = std::max(kPrecisionFloor, kEndpointTolerance);
  auto push = [&](const LiftPoint& base, double offset, AtomLabel label, std::int64_t k) {
    const double len = std::abs(offset);
    if (!(len >= floor_len)) throw PrecisionError("atom length below precision floor", in.level);
    double left = offset > 0 ? base.frac : base.frac + offset;
    if (left < 0.0) left += 1.0;
    if (left + len > 1.0 + kEndpointTolerance)
      throw StructureError("atom " + std::to_string(k) + " straddles the base point at level " +
                           std::to_string(in.level));
    part.atoms.push_back(Atom{left, left + len, len, label, k});
  };

  for (std::int64_t k = 0; k < in.q_prev; ++k) {
    const LiftPoint base = in.orbit(k);
    push(base, in.orbit(k + in.q_n).minus(base, in.p_n), AtomLabel::Short, k);
  }
  for (std::int64_t k = 0; k < in.q_n; ++k) {
    const LiftPoint base = in.orbit(k);
    push(base, in.orbit(k + in.q_prev).minus(base, in.p_prev), AtomLabel::Lengthy, k);
  }

  std::sort(part.atoms.begin(), part.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.left < b.left; });

  if (part.atoms.front().left != 0.0)
    throw StructureError("no atom starts at the base point at level " + std::to_string(in.level));
  for (std::size_t i = 0; i + 1 < part.atoms.size(); ++i) {
    const double gap = part.atoms[i + 1].left - part.atoms[i].right;
    if (std::abs(gap) > kTilingTolerance)
      throw StructureError("atoms " + std::to_string(part.atoms[i].k) + " and " +
                           std::to_string(part.atoms[i + 1].k) + " do not tile at level " +
                           std::to_string(in.level));
  }
  if (std::abs(part.atoms.back().right - 1.0) > kTilingTolerance ||
      std::abs(part.total_length() - 1.0) > kTilingTolerance)
    throw StructureError("atoms do not cover the circle at level " + std::to_string(in.level));
  return part;
}

}  // namespace scl
