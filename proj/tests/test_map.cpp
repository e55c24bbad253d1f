#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scl/circle_map.hpp"
#include "scl/parallel.hpp"
#include "support.hpp"

using namespace scl;

namespace {

constexpr double kPi = std::numbers::pi;

double ulp(double x) { return std::nextafter(std::abs(x), INFINITY) - std::abs(x); }

bool relative_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("closed-form calculus at special points") {
  const auto f = CircleMap::critical_sine(0.3);
  CHECK(derivative(f, 0.0) == 0.0);
  CHECK(second_derivative(f, 0.0) == 0.0);
  CHECK(third_derivative(f, 0.0) == doctest::Approx(4 * kPi * kPi));
  CHECK(derivative(f, 0.5) == doctest::Approx(2.0));
  CHECK(eval(f, 0.25) == doctest::Approx(0.25 + 0.3 - 1 / (2 * kPi)));
  const auto r = CircleMap::rigid_rotation(0.3);
  CHECK(derivative(r, 0.123) == 1.0);
  CHECK(eval(r, 0.9) == doctest::Approx(1.2));
}

TEST_CASE("Schwarzian values") {
  const auto f = CircleMap::critical_sine(0.3);
  CHECK(schwarzian(f, 0.5) == doctest::Approx(-2 * kPi * kPi).epsilon(1e-14));
  CHECK(schwarzian(CircleMap::rigid_rotation(0.4), 0.7) == 0.0);
  CHECK(schwarzian(CircleMap::cubic_proxy(), 0.1) == doctest::Approx(-400.0).epsilon(1e-13));
  CHECK_THROWS_WITH_AS(schwarzian(f, 0.0), "critical point", DomainError);
  CHECK_THROWS_AS(schwarzian(CircleMap::cubic_proxy(), 0.0), DomainError);
}

TEST_CASE("closed forms agree with central differences") {
  const double h = 1e-5;
  const auto sine = CircleMap::critical_sine(0.6);
  const auto cubic = CircleMap::cubic_proxy();
  for (const auto* f : {&sine, &cubic}) {
    for (int i = 1; i < 200; ++i) {
      const double x = 0.05 + 0.9 * i / 200.0;
      const double d1 = (eval(*f, x + h) - eval(*f, x - h)) / (2 * h);
      const double d2 = (derivative(*f, x + h) - derivative(*f, x - h)) / (2 * h);
      const double d3 = (second_derivative(*f, x + h) - second_derivative(*f, x - h)) / (2 * h);
      CHECK(relative_close(derivative(*f, x), d1, 1e-4));
      CHECK((relative_close(second_derivative(*f, x), d2, 1e-4) || std::abs(d2) < 1e-6));
      CHECK((relative_close(third_derivative(*f, x), d3, 1e-4) || std::abs(d3) < 1e-6));
      const double fd_s = d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
      CHECK(relative_close(schwarzian(*f, x), fd_s, 1e-4));
    }
  }
}

TEST_CASE("critical-sine Schwarzian is negative away from the critical point") {
  const auto f = CircleMap::critical_sine(0.2);
  for (int i = 1; i < 1000; ++i) CHECK(schwarzian(f, i / 1000.0) < 0.0);
}

TEST_CASE("degree one and monotone lift") {
  const auto f = CircleMap::critical_sine(0.6066);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    auto rng = SplitMix64::for_index(7, i);
    const double x = 4.0 * rng.uniform() - 2.0;
    const double y = eval(f, x + 1.0);
    CHECK(std::abs(y - eval(f, x) - 1.0) <= 2 * ulp(std::max(std::abs(y), std::abs(x) + 1.0)));
    CHECK(derivative(f, x) >= -1e-15);
  }
}

TEST_CASE("nonlinearity integral") {
  CHECK(nonlinearity_integral(CircleMap::cubic_proxy(), 0.1, 0.2) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(nonlinearity_integral(CircleMap::rigid_rotation(0.1), 0.2, 0.9) == 0.0);
  CHECK(nonlinearity_integral(CircleMap::critical_sine(0.1), 0.25, 0.5) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(nonlinearity_integral(CircleMap::critical_sine(0.1), -0.1, 0.1), DomainError);
  CHECK_THROWS_AS(nonlinearity_integral(CircleMap::critical_sine(0.1), 0.9, 1.1), DomainError);
}

TEST_CASE("factories and family names") {
  CHECK(family_from_string("critical-sine") == Family::CriticalSine);
  CHECK(family_from_string("rigid-rotation") == Family::RigidRotation);
  CHECK(std::string(to_string(Family::CubicProxy)) == "cubic-proxy");
  CHECK_THROWS_AS(family_from_string("standard"), DomainError);
  CHECK_THROWS_AS(CircleMap::critical_sine(0.1, 0.6), DomainError);
  CHECK(CircleMap::rigid_rotation(0.2).u_radius() == 0.0);
  CHECK_FALSE(CircleMap::cubic_proxy().is_circle_map());
}

TEST_CASE("orbit cache reproduces single steps") {
  const auto f = test::tuned_golden().map;
  OrbitCache orbit(f, LiftPoint{}, 5000);
  for (std::int64_t k = 1; k < orbit.size(); ++k) {
    const LiftPoint again = f.step(orbit[k - 1]);
    CHECK(std::abs(again.minus(orbit[k])) <= 2 * ulp(1.0));
    CHECK(orbit.step_monotone(k));
  }
  CHECK(orbit[1].value() == doctest::Approx(f.omega()));
  CHECK_THROWS_AS(OrbitCache(CircleMap::cubic_proxy(), LiftPoint{}, 3), DomainError);
}

TEST_CASE("rotation number of rigid rotations") {
  const auto g = estimate_rotation_cf(CircleMap::rigid_rotation(test::golden_ratio_conjugate()), 20);
  CHECK(test::coeffs(g.cf) == std::vector<std::int64_t>(20, 1));
  const auto s = estimate_rotation_cf(CircleMap::rigid_rotation(std::sqrt(2.0) - 1.0), 15);
  CHECK(test::coeffs(s.cf) == std::vector<std::int64_t>(15, 2));
  const auto t = convergent_table(s.cf, 15);
  for (int n = 1; n <= 15; ++n) CHECK(s.return_times[static_cast<std::size_t>(n - 1)] == t[n].q);
}

TEST_CASE("rotation number failures") {
  CHECK_THROWS_WITH_AS(estimate_rotation_cf(CircleMap::critical_sine(0.5), 5), "rational rotation number",
                       DomainError);
  try {
    estimate_rotation_cf(test::tuned_golden().map, 30, 100);
    FAIL("expected budget exhaustion");
  } catch (const IncompleteRotationError& e) {
    CHECK(e.partial().size() >= 9);
    CHECK(e.partial() == std::vector<std::int64_t>(e.partial().size(), 1));
  }
  CHECK_THROWS_AS(estimate_rotation_cf(CircleMap::cubic_proxy(), 3), DomainError);
}

TEST_CASE("tuning") {
  const auto& t = test::tuned_golden();
  CHECK(std::abs(t.map.omega() - 0.606661063470) < 1e-12);
  CHECK(t.omega_lo <= t.map.omega());
  CHECK(t.map.omega() <= t.omega_hi);
  CHECK(t.matched_depth >= 12);
  CHECK(test::coeffs(estimate_rotation_cf(t.map, 25).cf) == std::vector<std::int64_t>(25, 1));

  const auto s = tune_parameter(Family::CriticalSine, RotationNumber::silver(), 10);
  CHECK(std::abs(s.map.omega() - 0.418864986419) < 1e-12);
  CHECK(test::coeffs(estimate_rotation_cf(s.map, 10).cf) == std::vector<std::int64_t>(10, 2));

  const auto r = tune_parameter(Family::RigidRotation, RotationNumber::golden(), 12);
  CHECK(r.map.omega() == doctest::Approx(0.6180339887498949).epsilon(1e-15));
  CHECK_THROWS_AS(tune_parameter(Family::CubicProxy, RotationNumber::golden(), 5), DomainError);
  CHECK_THROWS_AS(tune_parameter(Family::CriticalSine, RotationNumber::from_cf(ContinuedFraction({1, 1})), 5),
                  DomainError);
}

TEST_CASE("chains") {
  const auto r = CircleMap::rigid_rotation(test::golden_ratio_conjugate());
  const auto chain = make_chain(r, 0.1, 0.15, 5);
  CHECK(chain.a.size() == 5);
  CHECK(chain.b[3] - chain.a[3] == doctest::Approx(0.05));
  CHECK(pure_singularity_sum(r, chain, 0.1) == 0.0);
  CHECK_THROWS_AS(make_chain(r, 0.1, 0.5, 3), StructureError);
  CHECK_THROWS_AS(make_chain(r, 0.5, 0.1, 3), DomainError);
  CHECK_THROWS_AS(make_chain(CircleMap::critical_sine(0.1), -0.01, 0.01, 1), DomainError);
}

TEST_CASE("pure singularity sums on the tuned golden map") {
  // chain: images f^1..f^{q_k - 1} of the lengthy base atom of level k
  // U_j: symmetric neighborhood of radius |F^{q_j}(0) - p_j|
  const auto f = test::tuned_golden().map;
  const auto table = convergent_table(ContinuedFraction::golden(), 14);
  OrbitCache orbit(f, LiftPoint{}, 500);
  auto radius = [&](int j) { return std::abs(orbit[table[j].q].minus(LiftPoint{}, table[j].p)); };
  auto chain_of = [&](int k) {
    const double v = orbit[table[k - 1].q].minus(LiftPoint{}, table[k - 1].p);
    return make_chain(f, f.iterate(std::min(0.0, v), 1), f.iterate(std::max(0.0, v), 1), table[k].q - 1, k);
  };

  const auto c12 = chain_of(12);
  const double frozen[] = {0.0458348, 0.017432, 0.0490913, 0.0278778, 0.0766248,
                           0.0864594, 0.27611,   0.155453, 0.688585,  0.324029};
  for (int j = 2; j < 12; ++j) {
    const double s = pure_singularity_sum(f, c12, radius(j));
    CHECK(s > 0.0);
    CHECK(s == doctest::Approx(frozen[j - 2]).epsilon(1e-4));
  }
  CHECK(pure_singularity_sum(f, make_chain(f, 0.001, 0.002, 1), 0.1) == 0.0);

  // far from U (small j) the sum is well below the near-U values
  for (int k : {8, 10, 12}) {
    const auto c = chain_of(k);
    double far = 0, near = 0;
    for (int j = 2; j <= 4; ++j) far += pure_singularity_sum(f, c, radius(j)) / 3;
    for (int j = k - 2; j < k; ++j) near += pure_singularity_sum(f, c, radius(j)) / 2;
    CHECK(far < near);
  }
}
