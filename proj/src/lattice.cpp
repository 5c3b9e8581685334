#include "tfdw/lattice.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_set>

namespace tfdw {

std::string to_string(DistanceKind kind) {
  return kind == DistanceKind::Graph ? "graph" : "euclidean";
}

DistanceKind parse_distance_kind(const std::string& text) {
  if (text == "graph") return DistanceKind::Graph;
  if (text == "euclidean") return DistanceKind::Euclidean;
  throw DomainError("unknown distance kind '" + text + "' (expected graph|euclidean)");
}

std::array<Point, 6> neighbors(const Point& p) {
  return {Point(p.x() + 1, p.y(), p.z()), Point(p.x() - 1, p.y(), p.z()),
          Point(p.x(), p.y() + 1, p.z()), Point(p.x(), p.y() - 1, p.z()),
          Point(p.x(), p.y(), p.z() + 1), Point(p.x(), p.y(), p.z() - 1)};
}

Box::Box(const Point& lo_, const Point& hi_) : lo(lo_), hi(hi_) {
  if ((hi.array() < lo.array()).any()) throw SizingError("box corner hi < lo");
}

Box Box::centered(int half_width) {
  if (half_width < 0) throw SizingError("negative box half-width");
  return Box(Point::Constant(-half_width), Point::Constant(half_width));
}

Box bounding_union(const Box& a, const Box& b) {
  return Box(a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi));
}

std::vector<Point> ball(const Point& center, int radius) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(ball_volume_formula(radius)));
  for (int a = -radius; a <= radius; ++a) {
    const int ra = radius - std::abs(a);
    for (int b = -ra; b <= ra; ++b) {
      const int rb = ra - std::abs(b);
      for (int c = -rb; c <= rb; ++c) out.emplace_back(center + Point(a, b, c));
    }
  }
  return out;
}

std::vector<Point> sphere(const Point& center, int radius) {
  if (radius < 1) throw DomainError("sphere radius must be positive");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(sphere_size_formula(radius)));
  for (int a = -radius; a <= radius; ++a) {
    const int ra = radius - std::abs(a);
    for (int b = -ra; b <= ra; ++b) {
      const int rb = ra - std::abs(b);
      if (rb == 0) {
        out.emplace_back(center + Point(a, b, 0));
      } else {
        out.emplace_back(center + Point(a, b, -rb));
        out.emplace_back(center + Point(a, b, rb));
      }
    }
  }
  return out;
}

std::int64_t ball_volume_formula(std::int64_t radius) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  const std::int64_t r = radius;
  const std::int64_t numerator = 4 * r * r * r + 6 * r * r + 8 * r + 3;
  return numerator / 3;
}

std::int64_t sphere_size_formula(std::int64_t radius) {
  if (radius < 0) throw DomainError("sphere radius must be nonnegative");
  return radius == 0 ? 1 : 4 * radius * radius + 2;
}

std::vector<Point> set_boundary(std::span<const Point> cells) {
  const std::unordered_set<Point, PointHash, PointEqual> members(cells.begin(), cells.end());
  std::vector<Point> out;
  for (const Point& p : cells) {
    for (const Point& q : neighbors(p)) {
      if (!members.contains(q)) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

bool is_connected(std::span<const Point> cells) {
  if (cells.empty()) throw DomainError("empty set has no connectivity status");
  std::unordered_set<Point, PointHash, PointEqual> unvisited(cells.begin(), cells.end());
  std::deque<Point> queue{cells.front()};
  unvisited.erase(cells.front());
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (const Point& q : neighbors(p)) {
      if (unvisited.erase(q) > 0) queue.push_back(q);
    }
  }
  return unvisited.empty();
}

int diameter(std::span<const Point> cells) {
  if (cells.empty()) throw DomainError("diameter of an empty set");
  // |v|_1 = max over sign patterns s of s.v, so the l1 diameter is the
  // largest spread of the four projections (+-x +-y + z).
  static constexpr std::array<std::array<int, 3>, 4> signs{
      {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {-1, 1, 1}}};
  int best = 0;
  for (const auto& s : signs) {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (const Point& p : cells) {
      const int proj = s[0] * p.x() + s[1] * p.y() + s[2] * p.z();
      lo = std::min(lo, proj);
      hi = std::max(hi, proj);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

}  // namespace tfdw
