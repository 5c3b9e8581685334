#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "tfdw/lattice.hpp"

using namespace tfdw;

namespace {

// Brute-force count over the enclosing cube.
std::int64_t count_within(int R, bool exact) {
  std::int64_t n = 0;
  for (int x = -R; x <= R; ++x)
    for (int y = -R; y <= R; ++y)
      for (int z = -R; z <= R; ++z) {
        const int d = std::abs(x) + std::abs(y) + std::abs(z);
        if (exact ? d == R : d <= R) ++n;
      }
  return n;
}

std::set<std::array<int, 3>> as_set(const std::vector<Point>& pts) {
  std::set<std::array<int, 3>> s;
  for (const auto& p : pts) s.insert({p.x(), p.y(), p.z()});
  return s;
}

RealGrid random_grid(std::mt19937_64& rng, const Box& box) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealGrid g(box);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.values()[i] = u(rng);
  return g;
}

}  // namespace

TEST_CASE("neighbors") {
  const auto n = neighbors(Point::Zero());
  CHECK(as_set({n.begin(), n.end()}) ==
        std::set<std::array<int, 3>>{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
  const auto m = neighbors(Point(1, 0, 0));
  int at0 = 0, at2 = 0;
  for (const auto& p : m) {
    const int d = graph_distance(p, Point::Zero());
    at0 += d == 0;
    at2 += d == 2;
  }
  CHECK(at0 == 1);
  CHECK(at2 == 5);
  CHECK(neighbors(Point(7, -3, 2)).size() == 6);
}

TEST_CASE("ball and sphere sizes against enumeration") {
  CHECK(ball(Point::Zero(), 0).size() == 1);
  CHECK(ball(Point::Zero(), 1).size() == 7);
  CHECK(ball(Point::Zero(), 2).size() == 25);
  CHECK(sphere(Point::Zero(), 1).size() == 6);
  CHECK(sphere(Point::Zero(), 2).size() == 18);
  CHECK(sphere(Point::Zero(), 3).size() == 38);
  CHECK(ball_volume_formula(0) == 1);
  CHECK(ball_volume_formula(1) == 7);
  for (int R = 1; R <= 30; ++R) {
    const auto b = static_cast<std::int64_t>(ball(Point::Zero(), R).size());
    const auto s = static_cast<std::int64_t>(sphere(Point::Zero(), R).size());
    CHECK(b == count_within(R, false));
    CHECK(s == count_within(R, true));
    CHECK(b == ball_volume_formula(R));
    CHECK(s == 4 * R * R + 2);
    CHECK(b - static_cast<std::int64_t>(ball(Point::Zero(), R - 1).size()) == s);
  }
  // Off-center balls are translates.
  const Point c(3, -2, 5);
  for (const auto& p : ball(c, 3)) CHECK(graph_distance(p, c) <= 3);
}

TEST_CASE("inner vertex boundary") {
  const std::vector<Point> one{Point::Zero()};
  CHECK(set_boundary(one).size() == 1);
  const auto b2 = ball(Point::Zero(), 2);
  CHECK(as_set(set_boundary(b2)) == as_set(sphere(Point::Zero(), 2)));
  const std::vector<Point> pair{Point::Zero(), Point(1, 0, 0)};
  CHECK(set_boundary(pair).size() == 2);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(ball(Point::Zero(), 3)));
  const std::vector<Point> gap{Point::Zero(), Point(2, 0, 0)};
  CHECK_FALSE(is_connected(gap));
  const std::vector<Point> chain{Point::Zero(), Point(1, 0, 0), Point(1, 1, 0)};
  CHECK(is_connected(chain));
  CHECK_THROWS_AS(is_connected(std::vector<Point>{}), DomainError);
}

TEST_CASE("diameter") {
  CHECK(diameter(std::vector<Point>{Point(4, 4, 4)}) == 0);
  for (int R = 0; R <= 5; ++R) {
    const auto b = ball(Point::Zero(), R);
    int brute = 0;
    for (const auto& p : b)
      for (const auto& q : b) brute = std::max(brute, graph_distance(p, q));
    CHECK(diameter(b) == brute);
    CHECK(brute == 2 * R);
  }
  CHECK(diameter(std::vector<Point>{Point::Zero(), Point(1, 1, 1)}) == 3);
}

TEST_CASE("gradient and laplacian of a delta") {
  RealGrid delta(Box::centered(2));
  delta.at(Point::Zero()) = 1.0;
  CHECK(graph_gradient_sq(delta, Point::Zero()) == doctest::Approx(3.0));
  CHECK(graph_gradient_sq(delta, Point(1, 0, 0)) == doctest::Approx(0.5));
  CHECK(graph_laplacian(delta, Point::Zero()) == doctest::Approx(6.0));
  CHECK(graph_laplacian(delta, Point(1, 0, 0)) == doctest::Approx(-1.0));

  // Constant field: zero in the interior (exterior is zero by convention).
  RealGrid c(Box::centered(3));
  c.values().setConstant(2.5);
  CHECK(graph_gradient_sq(c, Point::Zero()) == 0.0);
  CHECK(graph_laplacian(c, Point(1, -1, 0)) == 0.0);
}

TEST_CASE("gradient sum equals edge sum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> side(1, 5);
    const Box box(Point(-1, 0, 2), Point(-1 + side(rng), side(rng), 2 + side(rng)));
    const RealGrid u = random_grid(rng, box);
    // Sum over all points that touch the support (one layer outside).
    double grad_sum = 0.0;
    const Box halo(box.lo - Point::Ones(), box.hi + Point::Ones());
    for (std::int64_t i = 0; i < halo.size(); ++i) grad_sum += graph_gradient_sq(u, halo.point(i));
    // Each unordered edge once: +e_k direction from every halo point.
    double edges = 0.0;
    for (std::int64_t i = 0; i < halo.size(); ++i) {
      const Point p = halo.point(i);
      for (int k = 0; k < 3; ++k) {
        const Point q = p + Point::Unit(k);
        const double d = u(q) - u(p);
        edges += d * d;
      }
    }
    // Edges leaving the halo on the + side are zero-zero pairs; the - side of
    // the halo is likewise outside the support.
    CHECK(grad_sum == doctest::Approx(edges).epsilon(1e-12));
  }
}

TEST_CASE("laplacian is self-adjoint") {
  std::mt19937_64 rng(11);
  const Box box = Box::centered(3);
  const Box halo(box.lo - Point::Ones(), box.hi + Point::Ones());
  for (int trial = 0; trial < 10; ++trial) {
    const RealGrid a = random_grid(rng, box), b = random_grid(rng, box);
    double ab = 0.0, ba = 0.0;
    for (std::int64_t i = 0; i < halo.size(); ++i) {
      const Point p = halo.point(i);
      ab += graph_laplacian(a, p) * b(p);
      ba += graph_laplacian(b, p) * a(p);
    }
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
  }
}

TEST_CASE("metric comparison") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-20, 20);
  for (int i = 0; i < 1000; ++i) {
    const Point a(c(rng), c(rng), c(rng)), b(c(rng), c(rng), c(rng));
    const double e = euclidean_distance(a, b);
    const double g = graph_distance(a, b);
    CHECK(e <= g + 1e-12);
    CHECK(g <= std::sqrt(3.0) * e + 1e-9);
  }
}

TEST_CASE("box indexing is lexicographic") {
  const Box box(Point(-1, 2, 0), Point(1, 3, 2));
  CHECK(box.size() == 18);
  for (std::int64_t i = 0; i < box.size(); ++i) CHECK(box.index(box.point(i)) == i);
  CHECK(box.point(1) == Point(-1, 2, 1));
  CHECK(box.point(3) == Point(-1, 3, 0));
  CHECK(box.point(6) == Point(0, 2, 0));
}
