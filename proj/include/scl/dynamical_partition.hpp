#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace scl {

/// A point of the lift R -> R stored as integer turns plus a fraction in [0,1).
/// Keeps long orbits free of the absolute-precision loss of a growing double.
struct LiftPoint {
  std::int64_t turns = 0;
  double frac = 0.0;

  double value() const noexcept { return static_cast<double>(turns) + frac; }
  /// (*this - p) - other, accurate to the precision of the fractions.
  double minus(const LiftPoint& other, std::int64_t p = 0) const noexcept {
    return static_cast<double>(turns - other.turns - p) + (frac - other.frac);
  }
  static LiftPoint from_double(double x);
};

enum class AtomLabel { Short, Lengthy };

const char* to_string(AtomLabel label) noexcept;

/// One element of a dynamical partition: f^k of a base interval at the critical point.
struct Atom {
  double left = 0.0;   ///< in [0,1)
  double right = 0.0;  ///< left < right <= 1
  double length = 0.0;
  AtomLabel label = AtomLabel::Lengthy;
  std::int64_t k = 0;

  bool contains(double x) const noexcept { return left <= x && x < right; }
};

/// Atoms ordered by left endpoint; the first atom starts at the base point 0.
struct DynamicalPartition {
  int level = 0;
  std::vector<Atom> atoms;

  std::size_t count(AtomLabel label) const noexcept;
  /// Index of the atom containing x (reduced mod 1) under the left-closed convention.
  std::size_t locate(double x) const;
  double total_length() const noexcept;
  double max_length() const noexcept;
  double min_length() const noexcept;
};

/// Orbit data needed to assemble B(n): the lift of the k-th iterate of the base
/// point for 0 <= k < q_n + q_{n-1}, and the level-n and level-(n-1) convergents.
struct PartitionInputs {
  int level = 0;
  std::int64_t q_n = 1, p_n = 0;
  std::int64_t q_prev = 1, p_prev = 0;
  std::function<LiftPoint(std::int64_t)> orbit;
};

/// Builds the q_{n-1} short atoms f^k(0, f^{q_n}(0)) and q_n lengthy atoms
/// f^k(0, f^{q_{n-1}}(0)), sorts them and checks that they tile the circle.
/// Throws PrecisionError when an atom or endpoint gap falls under the floor and
/// StructureError when the tiling fails.
DynamicalPartition assemble_partition(const PartitionInputs& in);

}  // namespace scl
