#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scl/cf.hpp"
#include "scl/dynamical_partition.hpp"
#include "scl/error.hpp"

namespace scl {

enum class Family {
  CriticalSine,   ///< x + omega - sin(2 pi x) / (2 pi), cubic critical point at 0
  RigidRotation,  ///< x + omega
  CubicProxy,     ///< x^3, the local model at the critical point; not a circle map
};

const char* to_string(Family family) noexcept;
Family family_from_string(const std::string& name);

/// Degree-one lift of a circle homeomorphism from one of the fixed families.
class CircleMap {
 public:
  static CircleMap critical_sine(double omega, double u_radius = 0.1);
  static CircleMap rigid_rotation(double omega);
  static CircleMap cubic_proxy();
  static CircleMap of_family(Family family, double omega, double u_radius = 0.1);

  Family family() const noexcept { return family_; }
  double omega() const noexcept { return omega_; }
  double critical_point() const noexcept { return 0.0; }
  /// Radius of the symmetric neighborhood U of the critical point; 0 when the
  /// map has no critical point.
  double u_radius() const noexcept { return u_radius_; }
  bool is_circle_map() const noexcept { return family_ != Family::CubicProxy; }
  bool has_critical_point() const noexcept { return family_ != Family::RigidRotation; }

  /// One step of the lift in integer-turns form; circle maps only.
  LiftPoint step(const LiftPoint& x) const;
  /// f^m(x) on the lift.
  double iterate(double x, std::int64_t m) const;

 private:
  CircleMap(Family family, double omega, double u_radius) : family_(family), omega_(omega), u_radius_(u_radius) {}

  Family family_;
  double omega_;
  double u_radius_;
};

double eval(const CircleMap& f, double x);
double derivative(const CircleMap& f, double x);
double second_derivative(const CircleMap& f, double x);
double third_derivative(const CircleMap& f, double x);

/// f'''/f' - (3/2)(f''/f')^2. Throws DomainError("critical point") where f' = 0.
double schwarzian(const CircleMap& f, double x);

/// Integral of f''/f' over (a,b), i.e. log f'(b) - log f'(a).
/// Throws DomainError when [a,b] contains a critical point.
double nonlinearity_integral(const CircleMap& f, double a, double b);

/// Signed circle distance of x to the critical point, in (-1/2, 1/2].
double signed_circle_offset(double x) noexcept;

/// Iterates f^k(base), k = 0..length-1, of a circle map.
class OrbitCache {
 public:
  OrbitCache(const CircleMap& f, LiftPoint base, std::int64_t length);

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(points_.size()); }
  const LiftPoint& operator[](std::int64_t k) const { return points_.at(static_cast<std::size_t>(k)); }
  /// Extends the cache to at least `length` iterates.
  void extend(std::int64_t length);
  /// True when step k-1 -> k moved by an amount the family allows.
  bool step_monotone(std::int64_t k) const { return monotone_.at(static_cast<std::size_t>(k)) != 0; }
  const CircleMap& map() const noexcept { return map_; }

 private:
  CircleMap map_;
  std::vector<LiftPoint> points_;
  std::vector<std::uint8_t> monotone_;
};

/// Chain (a_i, b_i) = f^i(a_0, b_0), i = 0..length-1, stored on the lift.
struct ChainDescriptor {
  double a0 = 0.0, b0 = 0.0;
  std::int64_t length = 0;
  int order_of_size = 0;
  std::vector<double> a, b;
};

/// Builds the chain and checks that its intervals are pairwise disjoint on the circle.
/// Throws StructureError otherwise, DomainError when an interval contains the
/// critical point and allow_critical is false.
ChainDescriptor make_chain(const CircleMap& f, double a0, double b0, std::int64_t length, int order_of_size = 0,
                           bool allow_critical = false);

/// |sum of the nonlinearity integral over chain intervals not inside (-u_radius, u_radius)|.
double pure_singularity_sum(const CircleMap& f, const ChainDescriptor& chain, double u_radius);

/// Raised by estimate_rotation_cf when the iteration budget runs out.
class IncompleteRotationError : public ConvergenceError {
 public:
  IncompleteRotationError(const std::string& what, std::vector<std::int64_t> partial)
      : ConvergenceError(what), partial_(std::move(partial)) {}
  const std::vector<std::int64_t>& partial() const noexcept { return partial_; }

 private:
  std::vector<std::int64_t> partial_;
};

/// Closest-return times of the critical orbit and the coefficients they imply.
struct RotationEstimate {
  ContinuedFraction cf;
  std::vector<std::int64_t> return_times;  ///< q_1 .. q_N
};

/// Recovers [a_1..a_N] from closest returns of the orbit of 0 within k_max iterates.
RotationEstimate estimate_rotation_cf(const CircleMap& f, int depth, std::int64_t k_max = 1 << 22);

struct TuneResult {
  CircleMap map;
  double omega_lo = 0.0, omega_hi = 0.0;
  int matched_depth = 0;
  RotationEstimate estimate;
};

/// Bisects omega until the family member has rotation number with the given
/// prefix to `depth` levels.
TuneResult tune_parameter(Family family, const RotationNumber& target, int depth, double u_radius = 0.1,
                          std::int64_t k_max = 1 << 22);

}  // namespace scl
