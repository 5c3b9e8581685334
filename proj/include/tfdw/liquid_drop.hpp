#pragma once

// Discrete liquid-drop functional
//
//   E(Omega) = |dOmega| + sum_{x != y in Omega} 1 / |x - y|
//
// with |dOmega| the inner vertex boundary.  Volume-preserving local search,
// an exact small-volume oracle, and the pair-count profile A(t).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tfdw/lattice.hpp"

namespace tfdw {

struct DropEnergy {
  std::int64_t perimeter = 0;
  double coulomb = 0.0;
  double total = 0.0;
};

/// From-scratch evaluation.  DomainError on an empty set or duplicates.
DropEnergy drop_energy(std::span<const Point> cells, DistanceKind kind);

struct SwapMove {
  Point remove;
  Point add;
};

/// Vector plus index map; O(1) insert, erase and uniform sampling.
class PointSet {
 public:
  bool contains(const Point& p) const { return index_.count(p) != 0; }
  bool insert(const Point& p);
  bool erase(const Point& p);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Point>& items() const { return items_; }
  const Point& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<Point> items_;
  std::unordered_map<Point, std::size_t, PointHash, PointEqual> index_;
};

/// A finite set of cells with cached perimeter and Coulomb energy, its inner
/// boundary, and the frontier of outside cells adjacent to it.
class DropSet {
 public:
  DropSet(std::span<const Point> cells, DistanceKind kind);

  DistanceKind kind() const { return kind_; }
  std::size_t volume() const { return cells_.size(); }
  const std::vector<Point>& cells() const { return cells_.items(); }
  const PointSet& boundary() const { return boundary_; }
  const PointSet& frontier() const { return frontier_; }
  bool contains(const Point& p) const { return cells_.contains(p); }

  /// Cached values.
  DropEnergy energy() const { return {perimeter_, coulomb_, perimeter_ + coulomb_}; }

  /// MoveError unless remove is in the set and add is an outside cell
  /// adjacent to it.
  void validate(const SwapMove& mv) const;
  /// Energy change of mv without applying it.
  double move_delta(const SwapMove& mv) const;
  /// Perimeter part of move_delta only (no validation).
  std::int64_t perimeter_delta(const SwapMove& mv) const;
  /// Apply mv, updating caches; returns the energy change.
  double apply(const SwapMove& mv);

  /// Replace the caches with a from-scratch evaluation.
  void refresh();
  bool connected() const { return is_connected(cells_.items()); }

 private:
  double potential_excluding(const Point& at, const Point& skip) const;
  std::int64_t local_perimeter(std::span<const Point> probe) const;
  void remove_cell(const Point& p);
  void add_cell(const Point& p);
  void update_status(const Point& p);

  DistanceKind kind_;
  PointSet cells_;
  PointSet boundary_;
  PointSet frontier_;
  std::unordered_map<Point, int, PointHash, PointEqual> inside_neighbors_;
  std::int64_t perimeter_ = 0;
  double coulomb_ = 0.0;
};

/// B_R for the largest R with |B_R| <= V, then the next shell in
/// lexicographic order up to volume V.
std::vector<Point> quasi_ball(int volume);

struct AnnealSchedule {
  double t0 = 1.0;
  double cooling = 0.999;  // per sweep
  int sweeps = 200;        // each of V proposals
  std::uint64_t seed = 1;
};

struct GreedySchedule {
  int restarts = 4;
  std::uint64_t seed = 1;
};

using DropSchedule = std::variant<AnnealSchedule, GreedySchedule>;

struct DropSearchOptions {
  /// Reject moves that disconnect the set.  When false, disconnected
  /// iterates are visited and the result falls back to the best connected one.
  bool keep_connected = true;
};

struct DropResult {
  std::vector<Point> cells;  // sorted lexicographically
  DropEnergy energy;         // recomputed from scratch
  bool connected = false;
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  double best_any_total = 0.0;  // best iterate seen, connected or not
};

DropResult minimize_drop(int volume, DistanceKind kind, const DropSchedule& schedule,
                         const DropSearchOptions& opts = {});

struct OracleResult {
  std::vector<Point> cells;  // connected optimum, canonical position
  double connected_optimum = 0.0;
  std::int64_t shapes = 0;  // fixed polycubes enumerated
  /// Infimum over all sets: components pushed apart contribute their own
  /// energies only, so this is the best split of V into connected parts.
  double separation_infimum = 0.0;
  bool infimum_attained = true;  // false when separation beats connected
};

/// Exhaustive over fixed polycubes of volume V <= 6; BudgetError beyond.
OracleResult exact_enumeration_oracle(int volume, DistanceKind kind);

/// All fixed polycubes of the given volume, each translated so that its
/// lexicographically smallest cell is the origin and sorted.
std::vector<std::vector<Point>> enumerate_polycubes(int volume);

/// A(t) = #{(x, y) in Omega^2 : |x - y| < t} for t = 1..diam+1.
std::vector<std::int64_t> pair_count_profile(std::span<const Point> cells, DistanceKind kind);

/// sum_{t=1}^{floor(diam/2)} A(t) / (t (t + 1)).
double coulomb_chain_bound(std::span<const Point> cells, DistanceKind kind);

struct ScalingRow {
  int volume = 0;
  DropEnergy energy;
  double total_per_volume = 0.0;
  double coulomb_per_vlogv = 0.0;
  bool connected = false;
  double chain_bound = 0.0;
  bool chain_holds = false;
  std::vector<Point> cells;
};
inline constexpr const char* kScalingCsvHeader =
    "V,perimeter,coulomb,total,total_over_V,coulomb_over_VlogV,connected,chain_bound,chain_holds";

std::vector<ScalingRow> scaling_study(const std::vector<int>& volumes, DistanceKind kind,
                                      const DropSchedule& schedule,
                                      const DropSearchOptions& opts = {}, int threads = 1);

/// Union competitor Omega0 + (sep e1 + Omega1): its energy bounds the
/// infimum at V0 + V1 from above.
double union_energy(std::span<const Point> a, std::span<const Point> b, int sep, DistanceKind kind);

struct SubadditivityCheck {
  int v0 = 0, v1 = 0;
  double e0 = 0.0, e1 = 0.0;
  double e_search = 0.0;  // connected search at V0 + V1
  double e_union = 0.0;   // separated union of the two optima
  double best = 0.0;      // min of the two
  bool holds = false;     // best <= e0 + e1 + slack
};

SubadditivityCheck drop_subadditivity(const DropResult& r0, const DropResult& r1,
                                      const DropResult& joint, int sep, double slack,
                                      DistanceKind kind);

void write_drop(std::ostream& out, std::span<const Point> cells, DistanceKind kind);
std::pair<std::vector<Point>, DistanceKind> read_drop(std::istream& in);
void save_drop(const std::string& path, std::span<const Point> cells, DistanceKind kind);
std::pair<std::vector<Point>, DistanceKind> load_drop(const std::string& path);

}  // namespace tfdw
