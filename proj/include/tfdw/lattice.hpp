#pragma once

// Geometry and calculus on the lattice graph Z^3: points, boxes, balls,
// inner vertex boundaries, and the graph gradient/Laplacian of functions
// that live on a finite box and vanish outside it.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfdw/errors.hpp"

namespace tfdw {

using Point = Eigen::Vector3i;

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(p.x());
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(p.y());
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(p.z());
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct PointEqual {
  bool operator()(const Point& a, const Point& b) const noexcept { return a == b; }
};

/// Lexicographic order, x1 slowest.
inline bool lex_less(const Point& a, const Point& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

enum class DistanceKind { Graph, Euclidean };

std::string to_string(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& text);

inline int graph_distance(const Point& a, const Point& b) {
  return (a - b).cwiseAbs().sum();
}

inline double euclidean_distance(const Point& a, const Point& b) {
  return (a - b).cast<double>().norm();
}

inline double distance(const Point& a, const Point& b, DistanceKind kind) {
  return kind == DistanceKind::Graph ? static_cast<double>(graph_distance(a, b))
                                     : euclidean_distance(a, b);
}

/// Length of a lattice offset under the chosen metric.
inline double offset_length(int v1, int v2, int v3, DistanceKind kind) {
  if (kind == DistanceKind::Graph) return std::abs(v1) + std::abs(v2) + std::abs(v3);
  return std::sqrt(static_cast<double>(v1) * v1 + static_cast<double>(v2) * v2 +
                   static_cast<double>(v3) * v3);
}

/// p + e1, p - e1, p + e2, p - e2, p + e3, p - e3.
std::array<Point, 6> neighbors(const Point& p);

/// Inclusive axis-aligned window with lexicographic cell enumeration.
struct Box {
  Point lo = Point::Zero();
  Point hi = Point::Zero();

  Box() = default;
  Box(const Point& lo_, const Point& hi_);

  /// Cube [-half_width, half_width]^3.
  static Box centered(int half_width);

  Eigen::Vector3i dims() const { return hi - lo + Point::Ones(); }
  std::int64_t size() const {
    const Eigen::Vector3i d = dims();
    return static_cast<std::int64_t>(d.x()) * d.y() * d.z();
  }
  bool contains(const Point& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  std::int64_t index(const Point& p) const {
    const Eigen::Vector3i d = dims();
    return (static_cast<std::int64_t>(p.x() - lo.x()) * d.y() + (p.y() - lo.y())) * d.z() +
           (p.z() - lo.z());
  }
  Point point(std::int64_t idx) const {
    const Eigen::Vector3i d = dims();
    const int k = static_cast<int>(idx % d.z());
    idx /= d.z();
    const int j = static_cast<int>(idx % d.y());
    const int i = static_cast<int>(idx / d.y());
    return lo + Point(i, j, k);
  }
  Box translated(const Point& shift) const { return Box(lo + shift, hi + shift); }
  bool operator==(const Box& other) const { return lo == other.lo && hi == other.hi; }
};

/// Smallest box containing both arguments.
Box bounding_union(const Box& a, const Box& b);

/// All points at graph distance <= radius from center, lexicographic order.
std::vector<Point> ball(const Point& center, int radius);

/// All points at graph distance exactly radius (>= 1) from center.
std::vector<Point> sphere(const Point& center, int radius);

/// (4R^3 + 6R^2 + 8R + 3) / 3 in exact integer arithmetic.
std::int64_t ball_volume_formula(std::int64_t radius);

/// 4R^2 + 2 for R >= 1, 1 for R = 0.
std::int64_t sphere_size_formula(std::int64_t radius);

/// Inner vertex boundary: members of cells with a neighbour outside the set.
std::vector<Point> set_boundary(std::span<const Point> cells);

/// Breadth-first connectivity; throws DomainError on an empty set.
bool is_connected(std::span<const Point> cells);

/// Largest graph distance between two members (0 for a singleton).
int diameter(std::span<const Point> cells);

// ---------------------------------------------------------------------------
// Functions on a box, extended by zero outside it.

template <typename Scalar>
class Grid {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Grid() = default;
  explicit Grid(const Box& box) : box_(box), values_(Array::Zero(box.size())) {}
  Grid(const Box& box, Array values) : box_(box), values_(std::move(values)) {
    if (values_.size() != box_.size())
      throw SizingError("grid value count " + std::to_string(values_.size()) +
                        " does not match box size " + std::to_string(box_.size()));
  }

  const Box& box() const { return box_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  /// Value at p, zero outside the box.
  Scalar operator()(const Point& p) const {
    return box_.contains(p) ? values_[box_.index(p)] : Scalar(0);
  }
  Scalar& at(const Point& p) {
    if (!box_.contains(p)) throw DomainError("point outside grid box");
    return values_[box_.index(p)];
  }

 private:
  Box box_;
  Array values_;
};

using RealGrid = Grid<double>;

/// Gamma(u)(p) = 1/2 sum_{q ~ p} (u(q) - u(p))^2.
template <typename Scalar>
Scalar graph_gradient_sq(const Grid<Scalar>& u, const Point& p) {
  const Scalar up = u(p);
  Scalar acc(0);
  for (const Point& q : neighbors(p)) {
    const Scalar diff = u(q) - up;
    acc += diff * diff;
  }
  return acc / Scalar(2);
}

/// Delta u(p) = sum_{q ~ p} (u(p) - u(q)).
template <typename Scalar>
Scalar graph_laplacian(const Grid<Scalar>& u, const Point& p) {
  const Scalar up = u(p);
  Scalar acc(0);
  for (const Point& q : neighbors(p)) acc += up - u(q);
  return acc;
}

/// Laplacian at every cell of the box.
template <typename Scalar>
typename Grid<Scalar>::Array laplacian_field(const Grid<Scalar>& u) {
  const Eigen::Vector3i d = u.box().dims();
  const auto& v = u.values();
  typename Grid<Scalar>::Array out(v.size());
  const std::int64_t s1 = static_cast<std::int64_t>(d.y()) * d.z();
  const std::int64_t s2 = d.z();
  std::int64_t idx = 0;
  for (int i = 0; i < d.x(); ++i)
    for (int j = 0; j < d.y(); ++j)
      for (int k = 0; k < d.z(); ++k, ++idx) {
        Scalar nb(0);
        if (i > 0) nb += v[idx - s1];
        if (i + 1 < d.x()) nb += v[idx + s1];
        if (j > 0) nb += v[idx - s2];
        if (j + 1 < d.y()) nb += v[idx + s2];
        if (k > 0) nb += v[idx - 1];
        if (k + 1 < d.z()) nb += v[idx + 1];
        out[idx] = Scalar(6) * v[idx] - nb;
      }
  return out;
}

/// Sum over unordered edges of (u(y) - u(x))^2; equals sum_p Gamma(u)(p).
/// Edges leaving the box contribute u(inside)^2.
template <typename Scalar>
Scalar edge_energy(const Grid<Scalar>& u) {
  const Eigen::Vector3i d = u.box().dims();
  const auto& v = u.values();
  const std::int64_t s1 = static_cast<std::int64_t>(d.y()) * d.z();
  const std::int64_t s2 = d.z();
  Scalar acc(0);
  std::int64_t idx = 0;
  for (int i = 0; i < d.x(); ++i)
    for (int j = 0; j < d.y(); ++j)
      for (int k = 0; k < d.z(); ++k, ++idx) {
        const Scalar x = v[idx];
        Scalar local(0);
        // forward edges inside the box, plus edges crossing each face
        local += (i + 1 < d.x()) ? (v[idx + s1] - x) * (v[idx + s1] - x) : x * x;
        local += (j + 1 < d.y()) ? (v[idx + s2] - x) * (v[idx + s2] - x) : x * x;
        local += (k + 1 < d.z()) ? (v[idx + 1] - x) * (v[idx + 1] - x) : x * x;
        if (i == 0) local += x * x;
        if (j == 0) local += x * x;
        if (k == 0) local += x * x;
        acc += local;
      }
  return acc;
}

}  // namespace tfdw
