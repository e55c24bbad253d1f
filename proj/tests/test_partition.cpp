#include <doctest.h>

#include <cmath>

#include "scl/partition.hpp"
#include "support.hpp"

using namespace scl;

TEST_CASE("rigid rotation map reproduces the rotation partition") {
  const auto rho = RotationNumber::golden();
  const auto f = CircleMap::rigid_rotation(rho.to_double());
  for (int n = 1; n <= 14; ++n) {
    const auto a = dynamical_partition(f, rho.cf(), n);
    const auto b = rotation_partition(rho, n);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      CHECK(std::abs(a.atoms[i].left - b.atoms[i].left) < 1e-12);
      CHECK(a.atoms[i].label == b.atoms[i].label);
      CHECK(a.atoms[i].k == b.atoms[i].k);
    }
  }
  const auto p2 = dynamical_partition(f, rho.cf(), 2);
  CHECK(p2.count(AtomLabel::Short) == 1);
  CHECK(p2.count(AtomLabel::Lengthy) == 2);
}

TEST_CASE("first level of the tuned golden map") {
  const auto& f = test::tuned_golden().map;
  const auto p = dynamical_partition(f, ContinuedFraction::golden(), 1);
  REQUIRE(p.atoms.size() == 2);
  CHECK(p.atoms[0].left == 0.0);
  CHECK(p.atoms[0].label == AtomLabel::Lengthy);
  CHECK(p.atoms[1].left == doctest::Approx(f.omega()).epsilon(1e-15));
  CHECK(p.atoms[1].label == AtomLabel::Short);
  CHECK(p.atoms[1].right == doctest::Approx(1.0));
}

TEST_CASE("atom counts, tiling and labels") {
  const auto& f = test::tuned_golden().map;
  const PartitionLadder ladder(f, ContinuedFraction::golden(), 14);
  const auto& t = ladder.convergents();
  double previous_max = 2.0;
  for (int n = 1; n <= 14; ++n) {
    const auto& p = ladder.level(n);
    CHECK(p.count(AtomLabel::Short) == static_cast<std::size_t>(t[n - 1].q));
    CHECK(p.count(AtomLabel::Lengthy) == static_cast<std::size_t>(t[n].q));
    CHECK(std::abs(p.total_length() - 1.0) < 1e-10);
    for (std::size_t i = 0; i + 1 < p.atoms.size(); ++i) CHECK(std::abs(p.atoms[i].right - p.atoms[i + 1].left) < 1e-10);
    CHECK(p.max_length() < previous_max);
    previous_max = p.max_length();
  }
}

TEST_CASE("locate is left-closed and reduces mod 1") {
  const auto p = rotation_partition(RotationNumber::golden(), 3);
  CHECK(p.locate(0.0) == 0);
  CHECK(p.locate(1.0) == 0);
  CHECK(p.locate(p.atoms[2].left) == 2);
  CHECK(p.locate(p.atoms[2].left - 1e-13) == 1);
  CHECK(p.locate(-0.5) == p.locate(0.5));
}

TEST_CASE("refinement rule") {
  SUBCASE("golden rotation 2 -> 3") {
    const auto g = RotationNumber::golden();
    const auto r = refinement_report(rotation_partition(g, 2), rotation_partition(g, 3));
    CHECK(r.a_next == 1);
    for (const auto& s : r.splits)
      if (s.label == AtomLabel::Lengthy) {
        CHECK(s.lengthy_children == 1);
        CHECK(s.short_children == 1);
      }
  }
  SUBCASE("silver rotation 1 -> 2") {
    const auto s = RotationNumber::silver();
    const auto r = refinement_report(rotation_partition(s, 1), rotation_partition(s, 2));
    CHECK(r.a_next == 2);
    for (const auto& split : r.splits)
      if (split.label == AtomLabel::Lengthy) {
        CHECK(split.lengthy_children == 2);
        CHECK(split.short_children == 1);
      }
  }
  SUBCASE("every level of three ladders") {
    const auto g = RotationNumber::golden();
    const auto s = RotationNumber::silver();
    const PartitionLadder ladders[] = {PartitionLadder::rotation(g, 14), PartitionLadder::rotation(s, 14),
                                       PartitionLadder(test::tuned_golden().map, g.cf(), 14)};
    const ContinuedFraction* cfs[] = {&g.cf(), &s.cf(), &g.cf()};
    for (int l = 0; l < 3; ++l)
      for (int n = 1; n < 14; ++n) {
        const auto r = refinement_report(ladders[l].level(n), ladders[l].level(n + 1));
        CHECK(r.a_next == cfs[l]->a(n + 1));
        CHECK(r.worst_mismatch < 1e-10);
      }
  }
  SUBCASE("tuned map 5 -> 6 matches the rotation") {
    const auto g = RotationNumber::golden();
    const auto a = refinement_report(dynamical_partition(test::tuned_golden().map, g.cf(), 5),
                                     dynamical_partition(test::tuned_golden().map, g.cf(), 6));
    const auto b = refinement_report(rotation_partition(g, 5), rotation_partition(g, 6));
    REQUIRE(a.splits.size() == b.splits.size());
    for (std::size_t i = 0; i < a.splits.size(); ++i) {
      CHECK(a.splits[i].k == b.splits[i].k);
      CHECK(a.splits[i].lengthy_children == b.splits[i].lengthy_children);
      CHECK(a.splits[i].short_children == b.splits[i].short_children);
    }
  }
}

TEST_CASE("refinement failures") {
  const auto g = RotationNumber::golden();
  CHECK_THROWS_AS(refinement_report(rotation_partition(g, 2), rotation_partition(g, 4)), DomainError);
  CHECK_THROWS_AS(refinement_report(rotation_partition(g, 2), rotation_partition(RotationNumber::silver(), 3)),
                  StructureError);
}

TEST_CASE("orbit budget and precision cutoff") {
  const auto& f = test::tuned_golden().map;
  CHECK_THROWS_AS(dynamical_partition(f, ContinuedFraction::golden(), 20, 1000), DomainError);
  CHECK_THROWS_AS(PartitionLadder::rotation(RotationNumber::golden(), 40), DomainError);
  const auto ladder = PartitionLadder::rotation(RotationNumber::golden(), 40, true);
  REQUIRE(ladder.truncated_at().has_value());
  CHECK(ladder.n_max() == *ladder.truncated_at() - 1);
  CHECK(ladder.n_max() == 27);

  PartitionInputs in{1, 1, 1, 1, 0, {}};
  in.orbit = [](std::int64_t k) { return k == 0 ? LiftPoint{} : LiftPoint{0, 1e-14}; };
  try {
    assemble_partition(in);
    FAIL("expected a precision failure");
  } catch (const PrecisionError& e) {
    CHECK(e.level() == 1);
  }
}

TEST_CASE("order of size") {
  const auto rho = RotationNumber::golden();
  const auto r = CircleMap::rigid_rotation(rho.to_double());
  CHECK(order_of_size(r, rho.cf(), 0.0, 0.1, 10) == 4);
  CHECK_THROWS_AS(order_of_size(r, rho.cf(), 0.0, 0.1, 4), ConvergenceError);
  CHECK_THROWS_AS(order_of_size(r, rho.cf(), 0.0, 0.999, 10), DomainError);
  CHECK_THROWS_AS(order_of_size(r, rho.cf(), 0.0, 1.0, 10), DomainError);
  CHECK_THROWS_AS(order_of_size(r, rho.cf(), 0.2, 0.1, 10), DomainError);
}

TEST_CASE("order of size is constant along each chain of atoms") {
  // direct rotation arithmetic as the oracle: f^{q_i} shifts by the signed return length
  const auto rho = RotationNumber::golden();
  const auto r = CircleMap::rigid_rotation(rho.to_double());
  const auto theta = return_lengths(rho, 14);
  auto oracle = [&](double len) {
    int best = -1;
    for (int i = 0; i <= 12; ++i)
      if (theta[static_cast<std::size_t>(i)] >= len - 1e-12 && 1.0 - theta[static_cast<std::size_t>(i)] >= len - 1e-12)
        best = i;
    return best + 1;
  };
  // the level-1 lengthy atom is longer than half a turn
  CHECK_THROWS_AS(order_of_size(r, rho.cf(), 0.0, rho.to_double(), 6), DomainError);
  for (int n = 2; n <= 8; ++n) {
    const auto p = rotation_partition(rho, n);
    for (const auto& a : p.atoms) {
      const int j = order_of_size(r, rho.cf(), a.left, a.right, n + 4);
      CHECK(j == (a.label == AtomLabel::Lengthy ? n : n + 1));
      CHECK(j == oracle(a.length));
    }
  }
}

TEST_CASE("geometry statistics") {
  const auto rho = RotationNumber::golden();
  const auto rot = geometry_stats(PartitionLadder::rotation(rho, 14));
  for (const auto& s : rot.levels) CHECK(s.max_adjacent_ratio <= 1.0 / rho.to_double() + 1e-9);
  CHECK(rot.log_max_length_slope == doctest::Approx(std::log(rho.to_double())).epsilon(1e-4));

  const auto crit = geometry_stats(test::tuned_golden().map, rho.cf(), 14);
  CHECK(crit.log_max_length_slope < 0.0);
  CHECK(crit.log_max_length_slope == doctest::Approx(-0.263905).epsilon(1e-4));
  for (const auto& s : crit.levels) {
    CHECK(std::isfinite(s.max_adjacent_ratio));
    CHECK(s.max_adjacent_ratio >= 1.0);
    CHECK(s.min_length > 0.0);
    if (s.level < 14) CHECK(s.min_extreme_child_ratio >= 1.0);
  }
  CHECK(crit.levels.back().max_length == doctest::Approx(0.0177223).epsilon(1e-4));
  CHECK(std::isnan(crit.levels.back().min_extreme_child_ratio));
}

TEST_CASE("partition json") {
  const auto j = to_json(rotation_partition(RotationNumber::golden(), 3));
  CHECK(j["level"] == 3);
  CHECK(j["atoms"].size() == 5);
  CHECK(j["atoms"][0]["left"] == 0.0);
  CHECK(j["atoms"][0].contains("label"));
}
