#include <doctest.h>

#include <cmath>

#include "tfdw/spreading.hpp"

using namespace tfdw;

TEST_CASE("closed-form sequences") {
  CHECK(seq_a(1) == Rational(24));
  CHECK(seq_b(1) == Rational(10));
  CHECK(seq_b(2) == Rational(51));
  CHECK(seq_a_direct(1) == 24);
  CHECK(seq_b_direct(2) == 51);
  for (int n = 1; n <= 200; ++n) {
    CHECK(seq_a(n) == Rational(seq_a_direct(n)));
    CHECK(seq_b(n) == Rational(seq_b_direct(n)));
  }
  CHECK(seq_d(3) == 16);
  CHECK_THROWS_AS(seq_a(0), DomainError);
  CHECK_THROWS_AS(seq_b(-1), DomainError);
  CHECK_THROWS_AS(seq_c(0), DomainError);
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(6, -4).str() == "-3/2");
}

TEST_CASE("c and e sums stay below their bounds") {
  for (int n = 1; n <= 200; ++n) {
    double c = 0.0, e = 0.0;
    for (int l = 1; l <= n; ++l) {
      const double w = static_cast<double>(n - l + 1) * (n - l + 1);
      c += w * std::pow(4.0 * l * l + 2, 0.6);
      e += w * std::pow(4.0 * l * l + 2, 5.0 / 6);
    }
    CHECK(seq_c(n) == doctest::Approx(c).epsilon(1e-13));
    CHECK(seq_e(n) == doctest::Approx(e).epsilon(1e-13));
    CHECK(seq_c(n) <= seq_c_bound(n));
    CHECK(seq_e(n) <= seq_e_bound(n));
  }
}

TEST_CASE("build_psi examples") {
  const auto p1 = build_psi({1, 10.0});
  CHECK(p1(Point::Zero()) == doctest::Approx(2.0));
  for (const auto& q : sphere(Point::Zero(), 1)) CHECK(p1(q) == doctest::Approx(1.0));
  for (const auto& q : sphere(Point::Zero(), 2)) CHECK(p1(q) == 0.0);
  CHECK(p1.mass() == doctest::Approx(10.0));

  const auto p2 = build_psi({2, 51.0});
  CHECK(p2(Point::Zero()) == doctest::Approx(3.0));
  CHECK(p2(Point(0, 1, 0)) == doctest::Approx(2.0));
  CHECK(p2(Point(1, 0, -1)) == doctest::Approx(1.0));

  for (int n = 1; n <= 8; ++n) {
    const auto p = build_psi({n, 1.0});
    const auto support = (p.values() > 0).count();
    CHECK(support == ball_volume_formula(n));
  }
  CHECK_THROWS_AS(build_psi({3, 1.0}, Box::centered(3)), SizingError);
  CHECK_NOTHROW(build_psi({3, 1.0}, Box::centered(4)));
  CHECK_THROWS_AS(build_psi({0, 1.0}), DomainError);
  CHECK_THROWS_AS(build_psi({1, 0.0}), DomainError);
}

TEST_CASE("normalization") {
  for (double m : {0.1, 1.0, 10.0, 100.0})
    for (int n = 1; n <= 50; n += 7) {
      const SpreadFamilyParams params{n, m};
      const auto p = build_psi(params);
      CHECK(std::abs(p.mass() - m) <= 1e-12 * m);
      CHECK(params.d() * params.d() * seq_b(n).to_double() == doctest::Approx(m).epsilon(1e-14));
    }
}

TEST_CASE("shell sums reproduce the grid energy") {
  for (auto kind : {DistanceKind::Euclidean, DistanceKind::Graph})
    for (int n = 1; n <= 6; ++n) {
      const SpreadFamilyParams params{n, 10.0};
      const auto grid = energy(build_psi(params), kind);
      const auto row = psi_energy(params, kind);
      CHECK(row.energy.kinetic == doctest::Approx(grid.kinetic).epsilon(1e-12));
      CHECK(row.energy.tf_term == doctest::Approx(grid.tf_term).epsilon(1e-12));
      CHECK(row.energy.dirac_term == doctest::Approx(grid.dirac_term).epsilon(1e-12));
      CHECK(row.energy.coulomb == doctest::Approx(grid.coulomb).epsilon(1e-11));
    }
  CHECK(psi_energy({1, 10.0}, DistanceKind::Euclidean).energy.kinetic == doctest::Approx(36.0));
}

TEST_CASE("Holder splitting bound on the Thomas-Fermi term") {
  for (int n = 1; n <= 50; ++n) {
    const SpreadFamilyParams params{n, 10.0};
    const double d2 = params.d() * params.d();
    const double tf = psi_energy(params, DistanceKind::Euclidean).energy.tf_term;
    const double bound = std::pow(d2 * seq_c(n), 5.0 / 3) + std::pow((n + 1.0) * (n + 1.0) * d2, 5.0 / 3);
    CHECK(tf <= bound * (1 + 1e-12));
  }
}

TEST_CASE("short report trends") {
  const auto rows = psi_energy_report(20, 10.0, DistanceKind::Euclidean);
  REQUIRE(rows.size() == 20);
  CHECK(check_psi_monotone(rows).empty());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == static_cast<int>(i) + 1);
    CHECK(rows[i].energy.kinetic <= kPsiKineticConstant * rows[i].a_over_b * 10.0);
    if (i >= 2) CHECK(rows[i].a_over_b < rows[i - 1].a_over_b);
  }
  CHECK_THROWS_AS(psi_energy_report(1, 10.0, DistanceKind::Euclidean), DomainError);
  // Too short for the n = 100 comparison.
  CHECK_FALSE(check_psi_smallness(rows).empty());
}

TEST_CASE("regression at n = 100") {
  // First-run value; the terms decay like 1/n, so the total is far from 0.
  const auto row = psi_energy({100, 10.0}, DistanceKind::Euclidean);
  CHECK(row.energy.total == doctest::Approx(2.3152883972403417).epsilon(1e-10));
  CHECK(row.energy.kinetic <= kPsiKineticConstant * row.a_over_b * 10.0);
}

TEST_CASE("monotone check reports violations") {
  auto rows = psi_energy_report(5, 1.0, DistanceKind::Graph);
  rows[3].energy.coulomb = rows[2].energy.coulomb * 2;
  CHECK(check_psi_monotone(rows).size() == 1);
}
