#include "scl/cf.hpp"

#include <cmath>
#include <limits>

#include "scl/error.hpp"

namespace scl {

namespace {

constexpr std::string_view kGoldenDigits = "0.61803398874989484820458683436563811772030917980576";
constexpr std::string_view kSilverDigits = "0.41421356237309504880168872420969807856967187537694";

// Levels whose convergent denominators stay below this are reliably recovered
// from a 113-bit value.
constexpr double kReliableDenominator = 1e13;

}  // namespace

ContinuedFraction::ContinuedFraction(std::vector<std::int64_t> coefficients,
                                     std::optional<std::int64_t> constant_type_bound)
    : coefficients_(std::move(coefficients)), bound_(constant_type_bound) {
  if (bound_ && *bound_ < 1) throw DomainError("constant_type_bound must be positive");
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    const auto a = coefficients_[i];
    if (a < 1) throw DomainError("coefficient a_" + std::to_string(i + 1) + " must be >= 1");
    if (bound_ && a > *bound_)
      throw DomainError("coefficient a_" + std::to_string(i + 1) + " exceeds the constant-type bound");
  }
}

ContinuedFraction ContinuedFraction::golden(std::size_t length) {
  return ContinuedFraction(std::vector<std::int64_t>(length, 1), 1);
}

ContinuedFraction ContinuedFraction::silver(std::size_t length) {
  return ContinuedFraction(std::vector<std::int64_t>(length, 2), 2);
}

std::int64_t ContinuedFraction::a(std::size_t n) const {
  if (n < 1 || n > coefficients_.size())
    throw DomainError("coefficient index " + std::to_string(n) + " out of range");
  return coefficients_[n - 1];
}

bool ContinuedFraction::has_prefix(const ContinuedFraction& other, std::size_t depth) const {
  if (size() < depth || other.size() < depth) return false;
  return std::equal(coefficients_.begin(), coefficients_.begin() + static_cast<std::ptrdiff_t>(depth),
                    other.coefficients_.begin());
}

std::vector<Convergent> convergent_table(const ContinuedFraction& cf, int levels) {
  if (levels < 0 || static_cast<std::size_t>(levels) > cf.size())
    throw DomainError("requested " + std::to_string(levels) + " convergents from a prefix of length " +
                      std::to_string(cf.size()));
  std::vector<Convergent> out;
  out.reserve(static_cast<std::size_t>(levels) + 1);
  // (p_{-1}, q_{-1}) = (1, 0), (p_0, q_0) = (0, 1)
  std::int64_t p_prev = 1, q_prev = 0, p = 0, q = 1;
  out.push_back({p, q, 0});
  for (int n = 1; n <= levels; ++n) {
    const std::int64_t a = cf.a(static_cast<std::size_t>(n));
    std::int64_t p_next = 0, q_next = 0;
    if (__builtin_mul_overflow(a, p, &p_next) || __builtin_add_overflow(p_next, p_prev, &p_next) ||
        __builtin_mul_overflow(a, q, &q_next) || __builtin_add_overflow(q_next, q_prev, &q_next))
      throw OverflowError("convergent exceeds 64-bit integers after the last complete level " +
                              std::to_string(n - 1),
                          n - 1);
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    out.push_back({p, q, n});
  }
  return out;
}

std::vector<Convergent> convergents(const ContinuedFraction& cf, int levels) {
  auto table = convergent_table(cf, levels);
  table.erase(table.begin());
  return table;
}

std::vector<std::int64_t> expand_continued_fraction(const HighReal& x, std::size_t max_terms) {
  if (!(x > 0 && x < 1)) throw DomainError("continued-fraction expansion needs a value in (0,1)");
  const HighReal eps = std::numeric_limits<HighReal>::epsilon() * 16;
  std::vector<std::int64_t> out;
  HighReal r = x;
  while (out.size() < max_terms && r > eps) {
    r = 1 / r;
    const HighReal a = floor(r);
    if (a > HighReal(std::numeric_limits<std::int64_t>::max() / 2)) break;
    out.push_back(static_cast<std::int64_t>(a));
    r -= a;
  }
  return out;
}

RotationNumber RotationNumber::from_string(std::string_view decimal, ContinuedFraction cf) {
  HighReal value;
  try {
    value = HighReal(std::string(decimal));
  } catch (const std::exception&) {
    throw DomainError("cannot parse rotation number '" + std::string(decimal) + "'");
  }
  if (!(value > 0 && value < 1)) throw DomainError("rotation number must lie in (0,1)");
  const auto expansion = expand_continued_fraction(value, cf.size());
  // Compare only the levels a 113-bit value determines.
  std::int64_t q_prev = 0, q = 1;
  for (std::size_t n = 1; n <= cf.size(); ++n) {
    const std::int64_t a = cf.a(n);
    const double q_next = static_cast<double>(a) * static_cast<double>(q) + static_cast<double>(q_prev);
    if (q_next > kReliableDenominator) break;
    if (n > expansion.size() || expansion[n - 1] != a)
      throw DomainError("rotation number '" + std::string(decimal) +
                        "' disagrees with its continued fraction at level " + std::to_string(n));
    q_prev = q;
    q = static_cast<std::int64_t>(q_next);
  }
  return RotationNumber(value, std::move(cf));
}

RotationNumber RotationNumber::from_cf(ContinuedFraction cf) {
  if (cf.size() == 0) throw DomainError("empty continued fraction");
  HighReal x = 0;
  const auto coeffs = cf.coefficients();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) x = 1 / (HighReal(*it) + x);
  return RotationNumber(x, std::move(cf));
}

RotationNumber RotationNumber::golden() { return from_string(kGoldenDigits, ContinuedFraction::golden()); }

RotationNumber RotationNumber::silver() { return from_string(kSilverDigits, ContinuedFraction::silver()); }

ReturnLengths return_lengths(const RotationNumber& rho, int levels) {
  const auto table = convergent_table(rho.cf(), levels);
  ReturnLengths out;
  out.theta.reserve(table.size());
  for (const auto& c : table) {
    const HighReal t = abs(HighReal(c.q) * rho.value() - HighReal(c.p));
    const double theta = static_cast<double>(t);
    if (theta < kPrecisionFloor) throw PrecisionError("depth exceeds precision", c.level);
    out.theta.push_back(theta);
  }
  return out;
}

double theta_recurrence_residual_ulps(const ContinuedFraction& cf, const ReturnLengths& theta, int n) {
  if (n < 1 || n + 1 > theta.depth()) throw DomainError("residual level out of range");
  const HighReal lhs = theta[static_cast<std::size_t>(n + 1)];
  const HighReal rhs = HighReal(theta[static_cast<std::size_t>(n - 1)]) -
                       HighReal(cf.a(static_cast<std::size_t>(n + 1))) * HighReal(theta[static_cast<std::size_t>(n)]);
  const double big = theta[static_cast<std::size_t>(n - 1)];
  const double ulp = std::nextafter(big, 2.0) - big;
  return static_cast<double>(abs(lhs - rhs)) / ulp;
}

LiftPoint rotation_orbit_lift(const RotationNumber& rho, std::int64_t k) {
  // A 34-digit value keeps >= 12 digits of k rho mod 1 while |k| <= 1e18.
  constexpr std::int64_t kMaxIterate = 1'000'000'000'000'000'000;
  if (k > kMaxIterate || k < -kMaxIterate)
    throw PrecisionError("rotation orbit index exceeds the precision budget", 0);
  const HighReal y = HighReal(k) * rho.value();
  const HighReal t = floor(y);
  LiftPoint p{static_cast<std::int64_t>(t), static_cast<double>(y - t)};
  if (p.frac >= 1.0) {
    ++p.turns;
    p.frac = 0.0;
  }
  return p;
}

double rotation_orbit_point(const RotationNumber& rho, std::int64_t k) { return rotation_orbit_lift(rho, k).frac; }

DynamicalPartition rotation_partition(const RotationNumber& rho, int n) {
  if (n < 1) throw DomainError("partition level must be >= 1");
  return_lengths(rho, n);  // precision gate
  const auto table = convergent_table(rho.cf(), n);
  const auto& cur = table[static_cast<std::size_t>(n)];
  const auto& prev = table[static_cast<std::size_t>(n - 1)];
  std::vector<LiftPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(cur.q + prev.q));
  for (std::int64_t k = 0; k < cur.q + prev.q; ++k) orbit.push_back(rotation_orbit_lift(rho, k));
  PartitionInputs in;
  in.level = n;
  in.q_n = cur.q;
  in.p_n = cur.p;
  in.q_prev = prev.q;
  in.p_prev = prev.p;
  in.orbit = [&orbit](std::int64_t k) { return orbit.at(static_cast<std::size_t>(k)); };
  return assemble_partition(in);
}

}  // namespace scl
