#include <doctest.h>

#include <cmath>
#include <random>

#include "tfdw/coulomb.hpp"

using namespace tfdw;

namespace {

// Naive potential straight from the definition.
Eigen::ArrayXd naive_potential(const DensityGrid& rho, DistanceKind kind) {
  const Box& box = rho.box();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(box.size());
  for (std::int64_t i = 0; i < box.size(); ++i)
    for (std::int64_t j = 0; j < box.size(); ++j)
      if (i != j) out[i] += rho.values()[j] / distance(box.point(i), box.point(j), kind);
  return out;
}

DensityGrid random_density(std::mt19937_64& rng, const Box& box) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DensityGrid g(box);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.values()[i] = u(rng);
  return g;
}

double max_rel(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  return ((a - b).abs() / b.abs().max(1e-300)).maxCoeff();
}

DensityGrid point_masses(const Box& box, const std::vector<Point>& pts) {
  DensityGrid g(box);
  for (const auto& p : pts) g.at(p) = 1.0;
  return g;
}

}  // namespace

TEST_CASE("kernel table") {
  const KernelTable k = KernelTable::cube(DistanceKind::Euclidean, 3);
  CHECK(k(0, 0, 0) == 0.0);
  CHECK(k(1, 0, 0) == 1.0);
  CHECK(k(1, 1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(k(-2, 1, 3) == k(2, -1, -3));
  const KernelTable g = KernelTable::cube(DistanceKind::Graph, 3);
  CHECK(g(1, 1, 0) == 0.5);
}

TEST_CASE("potential examples") {
  const Box box = Box::centered(3);
  for (auto kind : {DistanceKind::Euclidean, DistanceKind::Graph}) {
    const auto one = point_masses(box, {Point::Zero()});
    CHECK(potential_direct(one, kind)[box.index(Point(1, 0, 0))] == doctest::Approx(1.0));
    const auto two = point_masses(box, {Point::Zero(), Point(2, 0, 0)});
    CHECK(potential_direct(two, kind)[box.index(Point(1, 0, 0))] == doctest::Approx(2.0));
  }
  const auto diag = point_masses(box, {Point::Zero(), Point(1, 1, 0)});
  CHECK(potential_direct(diag, DistanceKind::Euclidean)[box.index(Point::Zero())] ==
        doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(potential_direct(diag, DistanceKind::Graph)[box.index(Point::Zero())] == doctest::Approx(0.5));
}

TEST_CASE("direct potential matches the naive sum") {
  std::mt19937_64 rng(5);
  const Box box(Point(0, 0, 0), Point(3, 2, 4));
  for (auto kind : {DistanceKind::Euclidean, DistanceKind::Graph}) {
    const auto rho = random_density(rng, box);
    CHECK(max_rel(potential_direct(rho, kind), naive_potential(rho, kind)) < 1e-13);
  }
}

TEST_CASE("fast potential agrees with direct") {
  std::mt19937_64 rng(17);
  const std::vector<Box> boxes{Box(Point::Zero(), Point(3, 3, 3)), Box(Point::Zero(), Point(7, 7, 7)),
                               Box(Point(-2, 5, 1), Point(9, 12, 20))};
  for (const Box& box : boxes)
    for (auto kind : {DistanceKind::Euclidean, DistanceKind::Graph})
      for (int t = 0; t < 3; ++t) {
        const auto rho = random_density(rng, box);
        CHECK(max_rel(potential_fast(rho, kind), potential_direct(rho, kind)) <= 1e-10);
      }
}

TEST_CASE("fast potential: zero and translation") {
  const Box box = Box::centered(4);
  DensityGrid zero(box);
  CHECK(potential_fast(zero, DistanceKind::Euclidean).abs().maxCoeff() == 0.0);

  std::mt19937_64 rng(2);
  DensityGrid rho(box);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& p : ball(Point::Zero(), 2)) rho.at(p) = u(rng);
  DensityGrid shifted(box);
  const Point s(1, -2, 1);
  for (const auto& p : ball(Point::Zero(), 2)) shifted.at(p + s) = rho(p);
  const auto a = potential_fast(rho, DistanceKind::Euclidean);
  const auto b = potential_fast(shifted, DistanceKind::Euclidean);
  for (const auto& p : ball(Point::Zero(), 2))
    CHECK(b[box.index(p + s)] == doctest::Approx(a[box.index(p)]).epsilon(1e-12));
}

TEST_CASE("pairing examples and properties") {
  const Box box = Box::centered(3);
  const auto two = point_masses(box, {Point::Zero(), Point(1, 0, 0)});
  CHECK(pairing(two, two, DistanceKind::Euclidean) == doctest::Approx(2.0));
  const auto three = point_masses(box, {Point::Zero(), Point(1, 0, 0), Point(2, 0, 0)});
  CHECK(pairing(three, three, DistanceKind::Euclidean) == doctest::Approx(5.0));
  const auto one = point_masses(box, {Point::Zero()});
  CHECK(pairing(one, one, DistanceKind::Euclidean) == 0.0);
  CHECK_THROWS_AS(pairing(one, DensityGrid(Box::centered(2)), DistanceKind::Euclidean), DomainError);

  std::mt19937_64 rng(23);
  const Box small(Point::Zero(), Point(4, 3, 5));
  for (int t = 0; t < 5; ++t) {
    auto f = random_density(rng, small), g = random_density(rng, small);
    CHECK(pairing(f, g, DistanceKind::Euclidean) ==
          doctest::Approx(pairing(g, f, DistanceKind::Euclidean)).epsilon(1e-12));
    const double eu = pairing(f, f, DistanceKind::Euclidean);
    const double gr = pairing(f, f, DistanceKind::Graph);
    CHECK(gr <= eu);
    CHECK(eu > 0.0);
    auto bigger = f;
    bigger.values()[7] += 0.5;
    CHECK(pairing(bigger, bigger, DistanceKind::Euclidean) >= eu);
  }
}

TEST_CASE("even-symmetric operator matches the general path") {
  const int n = 4;
  const Box box = Box::centered(n);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXd octant((n + 1) * (n + 1) * (n + 1));
  for (Eigen::Index i = 0; i < octant.size(); ++i) octant[i] = u(rng);
  DensityGrid full(box);
  for (std::int64_t i = 0; i < box.size(); ++i) {
    const Point p = box.point(i).cwiseAbs();
    full.values()[i] = octant[(p.x() * (n + 1) + p.y()) * (n + 1) + p.z()];
  }
  for (auto kind : {DistanceKind::Euclidean, DistanceKind::Graph}) {
    const EvenCoulombOperator op(n, kind);
    const double expect = pairing(full, full, kind);
    CHECK(op.self_pairing(octant) == doctest::Approx(expect).epsilon(1e-11));
    const auto phi = op.potential(octant);
    const auto ref = potential_direct(full, kind);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k)
          CHECK(phi[(i * (n + 1) + j) * (n + 1) + k] ==
                doctest::Approx(ref[box.index(Point(i, j, k))]).epsilon(1e-11));
  }
}

TEST_CASE("smooth sizes") {
  CHECK(next_smooth_size(1) == 1);
  CHECK(next_smooth_size(11) == 12);
  CHECK(next_smooth_size(13) == 14);
  CHECK(next_smooth_size(121) == 125);
}
