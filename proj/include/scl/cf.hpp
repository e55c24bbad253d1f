#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "scl/dynamical_partition.hpp"

namespace scl {

/// Fixed 113-bit binary float used wherever |q rho - p| must be resolved
/// below double precision.
using HighReal = boost::multiprecision::cpp_bin_float_quad;

/// Finite prefix [a_1, a_2, ...] of the continued fraction of a number in (0,1).
class ContinuedFraction {
 public:
  ContinuedFraction() = default;
  explicit ContinuedFraction(std::vector<std::int64_t> coefficients,
                             std::optional<std::int64_t> constant_type_bound = std::nullopt);

  static ContinuedFraction golden(std::size_t length = 48);
  static ContinuedFraction silver(std::size_t length = 48);

  std::span<const std::int64_t> coefficients() const noexcept { return coefficients_; }
  std::optional<std::int64_t> constant_type_bound() const noexcept { return bound_; }
  std::size_t size() const noexcept { return coefficients_.size(); }
  /// a_n, 1-based.
  std::int64_t a(std::size_t n) const;

  bool has_prefix(const ContinuedFraction& other, std::size_t depth) const;

  friend bool operator==(const ContinuedFraction&, const ContinuedFraction&) = default;

 private:
  std::vector<std::int64_t> coefficients_;
  std::optional<std::int64_t> bound_;
};

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
  int level = 0;
};

/// Convergents at levels 1..levels with q_0 = 1, q_1 = a_1.
/// Throws OverflowError naming the last level that fit in 64 bits.
std::vector<Convergent> convergents(const ContinuedFraction& cf, int levels);

/// Same recurrence, but the returned table starts at level 0 (p_0/q_0 = 0/1),
/// so table[n] is the level-n convergent.
std::vector<Convergent> convergent_table(const ContinuedFraction& cf, int levels);

/// A rotation number known to ~34 significant digits together with the
/// continued-fraction prefix it is consistent with.
class RotationNumber {
 public:
  /// Parses a decimal string; throws DomainError unless its expansion starts with cf.
  static RotationNumber from_string(std::string_view decimal, ContinuedFraction cf);
  /// Evaluates the finite prefix by the backward recurrence.
  static RotationNumber from_cf(ContinuedFraction cf);
  static RotationNumber golden();
  static RotationNumber silver();

  const HighReal& value() const noexcept { return value_; }
  const ContinuedFraction& cf() const noexcept { return cf_; }
  double to_double() const { return static_cast<double>(value_); }

 private:
  RotationNumber(HighReal value, ContinuedFraction cf) : value_(std::move(value)), cf_(std::move(cf)) {}

  HighReal value_;
  ContinuedFraction cf_;
};

/// Expands x in (0,1) into at most max_terms continued-fraction coefficients,
/// stopping early when the remainder is below the working precision.
std::vector<std::int64_t> expand_continued_fraction(const HighReal& x, std::size_t max_terms);

/// theta_n = |q_n rho - p_n| for n = 0..N (theta_0 = rho).
struct ReturnLengths {
  std::vector<double> theta;

  double operator[](std::size_t n) const { return theta.at(n); }
  int depth() const noexcept { return static_cast<int>(theta.size()) - 1; }
  /// q_n rho - p_n, whose sign alternates as (-1)^n.
  double signed_offset(int n) const { return (n % 2 == 0 ? 1.0 : -1.0) * theta.at(n); }
};

/// Smallest interval length any module is allowed to produce.
inline constexpr double kPrecisionFloor = 1e3 * 2.220446049250313e-16;

/// Throws PrecisionError("depth exceeds precision") once theta_n < kPrecisionFloor.
ReturnLengths return_lengths(const RotationNumber& rho, int levels);

/// |theta_{n+1} - (theta_{n-1} - a_{n+1} theta_n)| in units of ulp(theta_{n-1}),
/// evaluated in extended precision from the stored doubles.
double theta_recurrence_residual_ulps(const ContinuedFraction& cf, const ReturnLengths& theta, int n);

/// {k rho} in [0,1). Throws PrecisionError when |k| is too large for 12 digits to survive.
double rotation_orbit_point(const RotationNumber& rho, std::int64_t k);

/// Same, keeping the integer part: k rho = turns + frac.
LiftPoint rotation_orbit_lift(const RotationNumber& rho, std::int64_t k);

/// B(n; rho) of the rigid rotation, endpoints taken from the exact orbit of 0.
DynamicalPartition rotation_partition(const RotationNumber& rho, int n);

}  // namespace scl
