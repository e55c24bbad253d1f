#include "scl/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRationalTolerance = 1e-14;
constexpr double kDecisionTolerance = 1e-13;
constexpr double kDisjointTolerance = 1e-12;

double circle_offset(const LiftPoint& p) noexcept { return p.frac > 0.5 ? p.frac - 1.0 : p.frac; }

bool contains_integer(double a, double b) noexcept {
  // closed interval [a,b], a <= b
  return std::floor(b) >= std::ceil(a);
}

}  // namespace

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::CriticalSine:
      return "critical-sine";
    case Family::RigidRotation:
      return "rigid-rotation";
    case Family::CubicProxy:
      return "cubic-proxy";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "critical-sine") return Family::CriticalSine;
  if (name == "rigid-rotation") return Family::RigidRotation;
  if (name == "cubic-proxy") return Family::CubicProxy;
  throw DomainError("unknown map family '" + name + "'");
}

CircleMap CircleMap::critical_sine(double omega, double u_radius) {
  if (!(u_radius > 0.0 && u_radius < 0.5)) throw DomainError("u_radius must lie in (0, 1/2)");
  return CircleMap(Family::CriticalSine, omega, u_radius);
}

CircleMap CircleMap::rigid_rotation(double omega) { return CircleMap(Family::RigidRotation, omega, 0.0); }

CircleMap CircleMap::cubic_proxy() { return CircleMap(Family::CubicProxy, 0.0, 0.0); }

CircleMap CircleMap::of_family(Family family, double omega, double u_radius) {
  switch (family) {
    case Family::CriticalSine:
      return critical_sine(omega, u_radius);
    case Family::RigidRotation:
      return rigid_rotation(omega);
    case Family::CubicProxy:
      return cubic_proxy();
  }
  throw DomainError("unknown family");
}

LiftPoint CircleMap::step(const LiftPoint& x) const {
  double y = 0.0;
  switch (family_) {
    case Family::CriticalSine:
      y = x.frac + (omega_ - std::sin(kTwoPi * x.frac) / kTwoPi);
      break;
    case Family::RigidRotation:
      y = x.frac + omega_;
      break;
    case Family::CubicProxy:
      throw DomainError("the cubic proxy is not a circle map");
  }
  const double t = std::floor(y);
  LiftPoint out{x.turns + static_cast<std::int64_t>(t), y - t};
  if (out.frac >= 1.0) {
    ++out.turns;
    out.frac = 0.0;
  }
  return out;
}

double CircleMap::iterate(double x, std::int64_t m) const {
  if (m < 0) throw DomainError("negative iterate count");
  if (!is_circle_map()) {
    for (std::int64_t i = 0; i < m; ++i) x = eval(*this, x);
    return x;
  }
  LiftPoint p = LiftPoint::from_double(x);
  for (std::int64_t i = 0; i < m; ++i) p = step(p);
  return p.value();
}

double eval(const CircleMap& f, double x) {
  switch (f.family()) {
    case Family::CriticalSine:
      return x + f.omega() - std::sin(kTwoPi * x) / kTwoPi;
    case Family::RigidRotation:
      return x + f.omega();
    case Family::CubicProxy:
      return x * x * x;
  }
  return x;
}

double derivative(const CircleMap& f, double x) {
  switch (f.family()) {
    case Family::CriticalSine: {
      const double s = std::sin(std::numbers::pi * x);
      return 2.0 * s * s;  // 1 - cos(2 pi x) without cancellation
    }
    case Family::RigidRotation:
      return 1.0;
    case Family::CubicProxy:
      return 3.0 * x * x;
  }
  return 0.0;
}

double second_derivative(const CircleMap& f, double x) {
  switch (f.family()) {
    case Family::CriticalSine:
      return kTwoPi * std::sin(kTwoPi * x);
    case Family::RigidRotation:
      return 0.0;
    case Family::CubicProxy:
      return 6.0 * x;
  }
  return 0.0;
}

double third_derivative(const CircleMap& f, double x) {
  switch (f.family()) {
    case Family::CriticalSine:
      return kTwoPi * kTwoPi * std::cos(kTwoPi * x);
    case Family::RigidRotation:
      return 0.0;
    case Family::CubicProxy:
      return 6.0;
  }
  return 0.0;
}

double schwarzian(const CircleMap& f, double x) {
  const double d1 = derivative(f, x);
  if (d1 == 0.0) throw DomainError("critical point");
  const double r = second_derivative(f, x) / d1;
  return third_derivative(f, x) / d1 - 1.5 * r * r;
}

double nonlinearity_integral(const CircleMap& f, double a, double b) {
  if (a > b) std::swap(a, b);
  switch (f.family()) {
    case Family::RigidRotation:
      return 0.0;
    case Family::CriticalSine:
      if (contains_integer(a, b)) throw DomainError("interval contains the critical point");
      break;
    case Family::CubicProxy:
      if (a <= 0.0 && 0.0 <= b) throw DomainError("interval contains the critical point");
      break;
  }
  return std::log(derivative(f, b)) - std::log(derivative(f, a));
}

double signed_circle_offset(double x) noexcept {
  double r = x - std::round(x);
  if (r <= -0.5) r += 1.0;
  return r;
}

OrbitCache::OrbitCache(const CircleMap& f, LiftPoint base, std::int64_t length) : map_(f) {
  if (!f.is_circle_map()) throw DomainError("orbit cache needs a circle map");
  points_.push_back(base);
  monotone_.push_back(1);
  extend(length);
}

void OrbitCache::extend(std::int64_t length) {
  const double lo = map_.omega() - 1.0 / kTwoPi - 1e-15;
  const double hi = map_.omega() + 1.0 / kTwoPi + 1e-15;
  points_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(length, 1)));
  while (size() < length) {
    const LiftPoint& prev = points_.back();
    const LiftPoint next = map_.step(prev);
    const double move = next.minus(prev);
    points_.push_back(next);
    monotone_.push_back(move >= lo && move <= hi ? 1 : 0);
  }
}

ChainDescriptor make_chain(const CircleMap& f, double a0, double b0, std::int64_t length, int order_of_size,
                           bool allow_critical) {
  if (!(a0 < b0) || b0 - a0 >= 1.0) throw DomainError("chain needs a proper arc a0 < b0 < a0 + 1");
  if (length < 1) throw DomainError("chain length must be >= 1");
  ChainDescriptor chain{a0, b0, length, order_of_size, {}, {}};
  chain.a.reserve(static_cast<std::size_t>(length));
  chain.b.reserve(static_cast<std::size_t>(length));
  LiftPoint pa = LiftPoint::from_double(a0);
  LiftPoint pb = LiftPoint::from_double(b0);
  for (std::int64_t i = 0; i < length; ++i) {
    if (i > 0) {
      pa = f.step(pa);
      pb = f.step(pb);
    }
    chain.a.push_back(pa.value());
    chain.b.push_back(pb.value());
  }

  struct Arc {
    double left, right;
    std::int64_t i;
  };
  std::vector<Arc> arcs;
  arcs.reserve(chain.a.size());
  for (std::size_t i = 0; i < chain.a.size(); ++i) {
    const double left = chain.a[i] - std::floor(chain.a[i]);
    const double len = chain.b[i] - chain.a[i];
    if (!(len > 0.0)) throw StructureError("chain interval " + std::to_string(i) + " collapsed");
    if (!allow_critical && f.has_critical_point() && contains_integer(left, left + len) && left != 0.0 &&
        left + len != 1.0)
      throw DomainError("chain interval " + std::to_string(i) + " contains the critical point");
    arcs.push_back({left, left + len, static_cast<std::int64_t>(i)});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.left < y.left; });
  for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
    if (arcs[i].right > arcs[i + 1].left + kDisjointTolerance)
      throw StructureError("chain intervals " + std::to_string(arcs[i].i) + " and " +
                           std::to_string(arcs[i + 1].i) + " overlap");
  if (arcs.size() > 1 && arcs.back().right - 1.0 > arcs.front().left + kDisjointTolerance)
    throw StructureError("chain intervals " + std::to_string(arcs.back().i) + " and " +
                         std::to_string(arcs.front().i) + " overlap");
  return chain;
}

double pure_singularity_sum(const CircleMap& f, const ChainDescriptor& chain, double u_radius) {
  double sum = 0.0;
  for (std::size_t i = 0; i < chain.a.size(); ++i) {
    const double lo = signed_circle_offset(chain.a[i]);
    const double hi = lo + (chain.b[i] - chain.a[i]);
    if (lo >= -u_radius && hi <= u_radius) continue;
    if (f.has_critical_point() && lo < 0.0 && hi > 0.0)
      throw DomainError("chain interval " + std::to_string(i) + " straddles the critical point");
    sum += nonlinearity_integral(f, lo, hi);
  }
  return std::abs(sum);
}

RotationEstimate estimate_rotation_cf(const CircleMap& f, int depth, std::int64_t k_max) {
  if (depth < 1) throw DomainError("depth must be >= 1");
  if (!f.is_circle_map()) throw DomainError("rotation number needs a circle map");
  OrbitCache orbit(f, LiftPoint{}, std::min<std::int64_t>(k_max, 1 << 12) + 1);
  auto at = [&orbit](std::int64_t k) -> const LiftPoint& {
    if (k >= orbit.size()) orbit.extend(std::max(k + 1, 2 * orbit.size()));
    return orbit[k];
  };

  // q_{-1}, q_0, q_1, ... as detected; index 0 of `qs` is q_{-1} = 0.
  std::vector<std::int64_t> qs{0};
  std::vector<std::int64_t> coeffs;
  std::int64_t last_time = 0;
  double last_offset = 0.0;
  double best[2] = {1.0, 1.0};  // nearest distance seen on the negative / positive side

  auto accept = [&](std::int64_t k, double off) {
    if (qs.size() == 1) {
      // First return: positive side means it is q_0 = 1, negative side means
      // rho > 1/2 and it is already q_1 = 1 (a_1 = 1).
      if (off > 0.0) {
        qs.push_back(1);
      } else {
        qs.push_back(1);
        qs.push_back(1);
        coeffs.push_back(1);
      }
    } else {
      const std::int64_t q_n = qs.back();
      const std::int64_t q_nm1 = qs[qs.size() - 2];
      if ((k - q_nm1) % q_n != 0)
        throw StructureError("closest return " + std::to_string(k) + " violates the q-recurrence");
      coeffs.push_back((k - q_nm1) / q_n);
      qs.push_back(k);
    }
    last_time = k;
    last_offset = off;
  };

  for (std::int64_t k = 1; k <= k_max; ++k) {
    const double off = circle_offset(at(k));
    if (std::abs(off) < kRationalTolerance) throw DomainError("rational rotation number");
    const int side = off > 0.0 ? 1 : 0;
    if (std::abs(off) >= best[side]) continue;
    best[side] = std::abs(off);
    if (last_time == 0) {
      accept(k, off);
    } else if ((off > 0.0) != (last_offset > 0.0)) {
      // f^k(0) lies past f^{-q_n}(0) exactly when f^{q_n} carries it across 0.
      const double ahead = circle_offset(at(k + last_time));
      if ((ahead > 0.0) == (last_offset > 0.0)) accept(k, off);
    }
    if (static_cast<int>(coeffs.size()) >= depth) break;
  }
  if (static_cast<int>(coeffs.size()) < depth)
    throw IncompleteRotationError("iteration budget " + std::to_string(k_max) + " exhausted after " +
                                      std::to_string(coeffs.size()) + " coefficients",
                                  coeffs);
  RotationEstimate out{ContinuedFraction(coeffs), {}};
  out.return_times.assign(qs.end() - depth, qs.end());
  return out;
}

namespace {

// -1: rho(f) below target, +1: above, 0: consistent with every checked level.
int compare_rotation(const CircleMap& f, const std::vector<Convergent>& table) {
  LiftPoint p{};
  std::int64_t k = 0;
  for (std::size_t n = 1; n < table.size(); ++n) {
    for (; k < table[n].q; ++k) p = f.step(p);
    const double v = p.minus(LiftPoint{}, table[n].p);
    const bool convergent_below = (n % 2 == 0);
    // f^{q_n}(0) = p_n within noise: 0 is periodic and rho(f) = p_n / q_n.
    if (std::abs(v) < kDecisionTolerance) return convergent_below ? -1 : 1;
    if (convergent_below && v < 0.0) return -1;
    if (!convergent_below && v > 0.0) return 1;
  }
  return 0;
}

int matched_prefix(const ContinuedFraction& a, const ContinuedFraction& b) {
  int m = 0;
  while (static_cast<std::size_t>(m) < std::min(a.size(), b.size()) &&
         a.a(static_cast<std::size_t>(m) + 1) == b.a(static_cast<std::size_t>(m) + 1))
    ++m;
  return m;
}

}  // namespace

TuneResult tune_parameter(Family family, const RotationNumber& target, int depth, double u_radius,
                          std::int64_t k_max) {
  if (depth < 1 || static_cast<std::size_t>(depth) > target.cf().size())
    throw DomainError("target continued fraction shorter than the tuning depth");
  if (family == Family::CubicProxy) throw DomainError("the cubic proxy has no rotation number");

  if (family == Family::RigidRotation) {
    const double omega = target.to_double();
    auto map = CircleMap::rigid_rotation(omega);
    auto est = estimate_rotation_cf(map, depth, k_max);
    const int matched = matched_prefix(est.cf, target.cf());
    if (matched < depth)
      throw ConvergenceError("rigid rotation disagrees with target at level " + std::to_string(matched + 1));
    return TuneResult{map, omega, omega, matched, std::move(est)};
  }

  // Use every target level whose return time fits the budget.
  std::vector<Convergent> table{Convergent{0, 1, 0}};
  try {
    const auto full = convergent_table(target.cf(), static_cast<int>(target.cf().size()));
    for (std::size_t n = 1; n < full.size() && full[n].q <= k_max; ++n) table.push_back(full[n]);
  } catch (const OverflowError& e) {
    const auto full = convergent_table(target.cf(), e.level());
    for (std::size_t n = 1; n < full.size() && full[n].q <= k_max; ++n) table.push_back(full[n]);
  }

  double lo = 0.0, hi = 1.0, omega = 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    omega = 0.5 * (lo + hi);
    if (omega <= lo || omega >= hi) break;
    const int c = compare_rotation(CircleMap::of_family(family, omega, u_radius), table);
    if (c == 0) break;
    (c < 0 ? lo : hi) = omega;
  }
  auto map = CircleMap::of_family(family, omega, u_radius);
  RotationEstimate est;
  try {
    est = estimate_rotation_cf(map, depth, k_max);
  } catch (const IncompleteRotationError& e) {
    const int matched = matched_prefix(ContinuedFraction(e.partial()), target.cf());
    throw ConvergenceError("bracket collapsed without agreement; deepest matched level " +
                           std::to_string(matched));
  }
  const int matched = matched_prefix(est.cf, target.cf());
  if (matched < depth)
    throw ConvergenceError("bracket collapsed without agreement; deepest matched level " + std::to_string(matched));
  return TuneResult{map, lo, hi, matched, std::move(est)};
}

}  // namespace scl
