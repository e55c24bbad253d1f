#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "scl/circle_map.hpp"

namespace scl {

/// a < b < c < d inside one lift window (d - a < 1).
struct Quadruple {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  /// Throws DomainError unless the points are strictly ordered with width < 1.
  static Quadruple make(double a, double b, double c, double d);
};

/// |b-a||d-c| / (|c-a||d-b|)
double cr(const Quadruple& q);
/// |b-c||d-a| / (|c-a||d-b|)
double poin(const Quadruple& q);

/// f(x + h) - f(x), evaluated without cancellation for small h.
double lift_difference(const CircleMap& f, double x, double h);

struct StepFlags {
  bool inside_u = false;          ///< f^i(a,d) lies in the neighborhood U of the critical point
  bool meets_v = false;           ///< f^i(a,d) intersects the remote arc V = circle \ U
  bool contains_critical = false;  ///< critical point strictly inside f^i(a,d)
};

struct DistortionRecord {
  Quadruple before;
  Quadruple after;
  std::int64_t m = 0;
  double poin_before = 0.0;
  double poin_after = 0.0;
  double dpoin = 1.0;
  std::vector<StepFlags> steps;  ///< one entry per i = 0..m-1
};

/// Poin(f^m q) / Poin(q) with per-step U/V flags.
/// Throws StructureError when the image loses its ordering.
DistortionRecord dpoin(const Quadruple& q, const CircleMap& f, std::int64_t m);

/// Adaptive quadrature of the double integral of (x-y)^-2 over [a,b] x [c,d]
/// to an absolute tolerance. Throws ConvergenceError when the error estimate
/// stays above it.
double poin_integral(const Quadruple& q, double abs_tolerance = 1e-8);

/// (1 - f'(x) f'(y) / ((f(x) - f(y)) / (x - y))^2) / (x - y)^2, the density whose
/// integral over [a,b] x [c,d] is log DPoin for a single application of f.
double distortion_density(const CircleMap& f, double x, double y);

/// Closed form of the same density for f(x) = x^3.
double cubic_distortion_density(double x, double y);

struct ExpansionTerms {
  /// Sum over steps with f^i(a,d) in U of |f^i a - f^i b||f^i c - f^i d| / max(|f^i a|, |f^i d|)^2.
  double sum = 0.0;
  double log_dpoin = 0.0;
  std::int64_t steps_in_u = 0;
};

/// Throws DomainError when some f^i(a,d), i < m, contains the critical point.
ExpansionTerms expansion_terms(const Quadruple& q, const CircleMap& f, std::int64_t m);

nlohmann::json to_json(const DistortionRecord& record);

}  // namespace scl
