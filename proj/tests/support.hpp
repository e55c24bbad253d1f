#pragma once

#include <cmath>
#include <numbers>

#include "scl/circle_map.hpp"
#include "scl/measure.hpp"

namespace scl::test {

inline const TuneResult& tuned_golden() {
  static const TuneResult t = tune_parameter(Family::CriticalSine, RotationNumber::golden(), 12);
  return t;
}

inline const ConjugacyLadder& golden_ladder() {
  static const ConjugacyLadder ladder(tuned_golden().map, RotationNumber::golden(), 14);
  return ladder;
}

inline const ConjugacyLadder& rotation_ladder() {
  static const ConjugacyLadder ladder(CircleMap::rigid_rotation(RotationNumber::golden().to_double()),
                                      RotationNumber::golden(), 12);
  return ladder;
}

inline std::vector<std::int64_t> coeffs(const ContinuedFraction& cf) {
  return {cf.coefficients().begin(), cf.coefficients().end()};
}

inline double golden_ratio_conjugate() { return std::numbers::phi - 1.0; }

}  // namespace scl::test
