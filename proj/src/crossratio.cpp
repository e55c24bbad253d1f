#include "scl/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scl/error.hpp"

namespace scl {

namespace {

struct Gaps {
  double u, v, w;  // b - a, c - b, d - c
};

double poin_of(const Gaps& g) { return g.v * (g.u + g.v + g.w) / ((g.u + g.v) * (g.v + g.w)); }

// Base point of the quadruple: integer turns kept apart for circle maps.
struct Base {
  LiftPoint lift;
  double raw = 0.0;  // used by maps that are not circle maps
};

StepFlags flags_for(const CircleMap& f, double offset, double width) {
  StepFlags s;
  const double lo = offset, hi = offset + width;
  const double r = f.u_radius();
  s.inside_u = r > 0.0 && lo >= -r && hi <= r;
  s.meets_v = !s.inside_u;
  if (f.has_critical_point())
    s.contains_critical = (lo < 0.0 && hi > 0.0) || (f.is_circle_map() && lo < 1.0 && hi > 1.0);
  return s;
}

}  // namespace

Quadruple Quadruple::make(double a, double b, double c, double d) {
  if (!(a < b && b < c && c < d)) throw DomainError("quadruple must satisfy a < b < c < d");
  if (!(d - a < 1.0)) throw DomainError("quadruple must fit in one lift window");
  return Quadruple{a, b, c, d};
}

double cr(const Quadruple& q) { return (q.b - q.a) * (q.d - q.c) / ((q.c - q.a) * (q.d - q.b)); }

double poin(const Quadruple& q) { return (q.c - q.b) * (q.d - q.a) / ((q.c - q.a) * (q.d - q.b)); }

double lift_difference(const CircleMap& f, double x, double h) {
  switch (f.family()) {
    case Family::CriticalSine:
      // sin(2 pi (x+h)) - sin(2 pi x) = 2 cos(2 pi x + pi h) sin(pi h)
      return h - std::cos(2.0 * std::numbers::pi * x + std::numbers::pi * h) * std::sin(std::numbers::pi * h) /
                     std::numbers::pi;
    case Family::RigidRotation:
      return h;
    case Family::CubicProxy:
      return h * (3.0 * x * x + 3.0 * x * h + h * h);
  }
  return h;
}

DistortionRecord dpoin(const Quadruple& q, const CircleMap& f, std::int64_t m) {
  if (m < 0) throw DomainError("negative iterate count");
  DistortionRecord rec;
  rec.before = q;
  rec.m = m;
  Gaps g{q.b - q.a, q.c - q.b, q.d - q.c};
  rec.poin_before = poin_of(g);
  rec.steps.reserve(static_cast<std::size_t>(m));

  Base base;
  if (f.is_circle_map())
    base.lift = LiftPoint::from_double(q.a);
  else
    base.raw = q.a;

  for (std::int64_t i = 0; i < m; ++i) {
    const double x = f.is_circle_map() ? base.lift.frac : base.raw;
    const double offset = f.is_circle_map() ? signed_circle_offset(x) : x;
    rec.steps.push_back(flags_for(f, offset, g.u + g.v + g.w));
    const Gaps next{lift_difference(f, x, g.u), lift_difference(f, x + g.u, g.v),
                    lift_difference(f, x + g.u + g.v, g.w)};
    if (!(next.u > 0.0 && next.v > 0.0 && next.w > 0.0))
      throw StructureError("image quadruple lost its ordering at step " + std::to_string(i + 1));
    g = next;
    if (f.is_circle_map())
      base.lift = f.step(base.lift);
    else
      base.raw = eval(f, base.raw);
  }
  if (!(g.u + g.v + g.w < 1.0)) throw StructureError("image quadruple wider than one turn");

  const double a = f.is_circle_map() ? base.lift.value() : base.raw;
  rec.after = Quadruple{a, a + g.u, a + g.u + g.v, a + g.u + g.v + g.w};
  rec.poin_after = poin_of(g);
  rec.dpoin = rec.poin_after / rec.poin_before;
  return rec;
}

double poin_integral(const Quadruple& q, double abs_tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kMaxDepth = 15;
  constexpr double kRelTol = 1e-12;
  if (!(q.b < q.c)) throw DomainError("poin_integral needs b < c");

  // x = c - e^t and y = x + e^s turn the (x - y)^-2 peak at b, c into smooth integrands.
  double inner_error = 0.0;
  auto inner = [&](double t) {
    const double gap = std::exp(t), x = q.c - gap;
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate([](double s) { return std::exp(-s); }, t,
                                                          std::log(q.d - x), kMaxDepth, kRelTol, &err);
    inner_error = std::max(inner_error, err * gap);
    return v * gap;
  };
  double outer_error = 0.0;
  const double lo = std::log(q.c - q.b), hi = std::log(q.c - q.a);
  const double value = gauss_kronrod<double, 31>::integrate(inner, lo, hi, kMaxDepth, kRelTol, &outer_error);
  const double total_error = outer_error + inner_error * (hi - lo);
  if (!std::isfinite(value) || total_error > abs_tolerance)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "quadrature error estimate %.3g above tolerance %.3g", total_error, abs_tolerance);
    throw ConvergenceError(buf);
  }
  return value;
}

double distortion_density(const CircleMap& f, double x, double y) {
  const double slope = (eval(f, x) - eval(f, y)) / (x - y);
  return (1.0 - derivative(f, x) * derivative(f, y) / (slope * slope)) / ((x - y) * (x - y));
}

double cubic_distortion_density(double x, double y) {
  const double s = x * x + x * y + y * y;
  return (x * x + 4.0 * x * y + y * y) / (s * s);
}

ExpansionTerms expansion_terms(const Quadruple& q, const CircleMap& f, std::int64_t m) {
  const auto rec = dpoin(q, f, m);
  ExpansionTerms out;
  out.log_dpoin = std::log(rec.dpoin);
  for (const auto& s : rec.steps)
    if (s.contains_critical) throw DomainError("chain of (a,d) hits the critical point");

  // Replay the orbit to collect the local terms of steps spent inside U.
  Gaps g{q.b - q.a, q.c - q.b, q.d - q.c};
  LiftPoint lift = LiftPoint::from_double(q.a);
  double raw = q.a;
  for (std::int64_t i = 0; i < m; ++i) {
    const double x = f.is_circle_map() ? lift.frac : raw;
    if (rec.steps[static_cast<std::size_t>(i)].inside_u) {
      const double off_a = f.is_circle_map() ? signed_circle_offset(x) : x;
      const double off_d = off_a + g.u + g.v + g.w;
      const double dist = std::max(std::abs(off_a), std::abs(off_d));
      out.sum += g.u * g.w / (dist * dist);
      ++out.steps_in_u;
    }
    g = Gaps{lift_difference(f, x, g.u), lift_difference(f, x + g.u, g.v), lift_difference(f, x + g.u + g.v, g.w)};
    if (f.is_circle_map())
      lift = f.step(lift);
    else
      raw = eval(f, raw);
  }
  return out;
}

nlohmann::json to_json(const DistortionRecord& r) {
  std::int64_t in_u = 0, in_v = 0;
  for (const auto& s : r.steps) {
    in_u += s.inside_u;
    in_v += s.meets_v;
  }
  return {{"before", {r.before.a, r.before.b, r.before.c, r.before.d}},
          {"after", {r.after.a, r.after.b, r.after.c, r.after.d}},
          {"m", r.m},
          {"poin_before", r.poin_before},
          {"poin_after", r.poin_after},
          {"dpoin", r.dpoin},
          {"steps_inside_u", in_u},
          {"steps_meeting_v", in_v}};
}

}  // namespace scl
