#include "tfdw/liquid_drop.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tfdw/summation.hpp"

namespace tfdw {

namespace {

using PointSetHash = std::unordered_set<Point, PointHash, PointEqual>;

double kernel(const Point& a, const Point& b, DistanceKind kind) {
  return 1.0 / distance(a, b, kind);
}

}  // namespace

DropEnergy drop_energy(std::span<const Point> cells, DistanceKind kind) {
  if (cells.empty()) throw DomainError("drop energy needs a nonempty set");
  const PointSetHash set(cells.begin(), cells.end());
  if (set.size() != cells.size()) throw DomainError("drop set contains duplicate cells");
  DropEnergy e;
  for (const Point& p : cells)
    for (const Point& q : neighbors(p))
      if (!set.count(q)) {
        ++e.perimeter;
        break;
      }
  // Lexicographic order makes the sum independent of input order.
  std::vector<Point> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  CompensatedSum acc;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j) acc.add(kernel(sorted[i], sorted[j], kind));
  e.coulomb = 2.0 * acc.value();
  e.total = static_cast<double>(e.perimeter) + e.coulomb;
  return e;
}

// ---------------------------------------------------------------------------

bool PointSet::insert(const Point& p) {
  if (index_.count(p)) return false;
  index_.emplace(p, items_.size());
  items_.push_back(p);
  return true;
}

bool PointSet::erase(const Point& p) {
  const auto it = index_.find(p);
  if (it == index_.end()) return false;
  const std::size_t i = it->second;
  index_.erase(it);
  if (i + 1 != items_.size()) {
    items_[i] = items_.back();
    index_[items_[i]] = i;
  }
  items_.pop_back();
  return true;
}

DropSet::DropSet(std::span<const Point> cells, DistanceKind kind) : kind_(kind) {
  if (cells.empty()) throw DomainError("drop set needs at least one cell");
  for (const Point& p : cells) {
    if (cells_.contains(p)) throw DomainError("drop set contains duplicate cells");
    add_cell(p);
  }
  refresh();
}

void DropSet::update_status(const Point& p) {
  const auto it = inside_neighbors_.find(p);
  const int c = it == inside_neighbors_.end() ? 0 : it->second;
  if (cells_.contains(p)) {
    frontier_.erase(p);
    if (c < 6)
      boundary_.insert(p);
    else
      boundary_.erase(p);
  } else {
    boundary_.erase(p);
    if (c > 0)
      frontier_.insert(p);
    else
      frontier_.erase(p);
  }
}

void DropSet::remove_cell(const Point& p) {
  cells_.erase(p);
  for (const Point& q : neighbors(p)) {
    const auto it = inside_neighbors_.find(q);
    if (--it->second == 0) inside_neighbors_.erase(it);
    update_status(q);
  }
  update_status(p);
}

void DropSet::add_cell(const Point& p) {
  cells_.insert(p);
  for (const Point& q : neighbors(p)) {
    ++inside_neighbors_[q];
    update_status(q);
  }
  update_status(p);
}

void DropSet::refresh() {
  const DropEnergy e = drop_energy(cells_.items(), kind_);
  perimeter_ = e.perimeter;
  coulomb_ = e.coulomb;
}

void DropSet::validate(const SwapMove& mv) const {
  auto str = [](const Point& p) {
    return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " + std::to_string(p.z()) + ")";
  };
  if (!cells_.contains(mv.remove)) throw MoveError("cell " + str(mv.remove) + " is not in the set");
  if (cells_.contains(mv.add)) throw MoveError("cell " + str(mv.add) + " is already in the set");
  if (!frontier_.contains(mv.add))
    throw MoveError("cell " + str(mv.add) + " is not adjacent to the set");
}

double DropSet::potential_excluding(const Point& at, const Point& skip) const {
  CompensatedSum acc;
  for (const Point& y : cells_.items())
    if (y != skip && y != at) acc.add(kernel(at, y, kind_));
  return acc.value();
}

std::int64_t DropSet::local_perimeter(std::span<const Point> probe) const {
  std::int64_t n = 0;
  for (const Point& p : probe)
    if (boundary_.contains(p)) ++n;
  return n;
}

std::int64_t DropSet::perimeter_delta(const SwapMove& mv) const {
  const Point& r = mv.remove;
  const Point& a = mv.add;
  // Cells whose boundary status can change: r, a and their neighbours.
  std::array<Point, 14> probe;
  std::size_t n = 0;
  auto push = [&](const Point& p) {
    for (std::size_t i = 0; i < n; ++i)
      if (probe[i] == p) return;
    probe[n++] = p;
  };
  push(r);
  push(a);
  for (const Point& q : neighbors(r)) push(q);
  for (const Point& q : neighbors(a)) push(q);

  auto in_after = [&](const Point& p) { return p == a || (p != r && cells_.contains(p)); };
  std::int64_t after = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_after(probe[i])) continue;
    for (const Point& q : neighbors(probe[i]))
      if (!in_after(q)) {
        ++after;
        break;
      }
  }
  return after - local_perimeter(std::span<const Point>(probe.data(), n));
}

double DropSet::move_delta(const SwapMove& mv) const {
  validate(mv);
  const double dc = 2.0 * (potential_excluding(mv.add, mv.remove) -
                           potential_excluding(mv.remove, mv.remove));
  return static_cast<double>(perimeter_delta(mv)) + dc;
}

double DropSet::apply(const SwapMove& mv) {
  validate(mv);
  const double dc = 2.0 * (potential_excluding(mv.add, mv.remove) -
                           potential_excluding(mv.remove, mv.remove));
  const std::int64_t before = perimeter_;
  remove_cell(mv.remove);
  add_cell(mv.add);
  coulomb_ += dc;
  perimeter_ = static_cast<std::int64_t>(boundary_.size());
  return static_cast<double>(perimeter_ - before) + dc;
}

// ---------------------------------------------------------------------------

std::vector<Point> quasi_ball(int volume) {
  if (volume < 1) throw DomainError("volume must be >= 1");
  int R = 0;
  while (ball_volume_formula(R + 1) <= volume) ++R;
  std::vector<Point> out = ball(Point::Zero(), R);
  if (static_cast<int>(out.size()) < volume) {
    const std::vector<Point> shell = sphere(Point::Zero(), R + 1);
    std::vector<Point> sorted = shell;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    for (const Point& p : sorted) {
      if (static_cast<int>(out.size()) == volume) break;
      out.push_back(p);
    }
  }
  return out;
}

namespace {

class Search {
 public:
  Search(DistanceKind kind, const DropSearchOptions& opts, std::uint64_t seed)
      : kind_(kind), opts_(opts), rng_(seed) {}

  // Proposal with both ends sampled uniformly; nullopt for degenerate sets.
  std::optional<SwapMove> propose(const DropSet& s) {
    if (s.frontier().empty() || s.boundary().empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pb(0, s.boundary().size() - 1);
    std::uniform_int_distribution<std::size_t> pf(0, s.frontier().size() - 1);
    return SwapMove{s.boundary()[pb(rng_)], s.frontier()[pf(rng_)]};
  }

  // Apply mv unless it breaks connectivity under keep_connected.
  bool commit(DropSet& s, const SwapMove& mv) {
    s.apply(mv);
    if (opts_.keep_connected && s.volume() > 1 && !s.connected()) {
      s.apply({mv.add, mv.remove});
      return false;
    }
    return true;
  }

  void note(const DropSet& s) {
    const double e = s.energy().total;
    if (e < best_any_) best_any_ = e;
    if (e < best_total_ - 1e-12) {
      if (!opts_.keep_connected && !s.connected()) return;
      best_total_ = e;
      best_ = s.cells();
    }
  }

  void anneal(DropSet& s, const AnnealSchedule& a) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double T = a.t0;
    for (int sweep = 0; sweep < a.sweeps; ++sweep, T *= a.cooling) {
      for (std::size_t k = 0; k < s.volume(); ++k) {
        const auto mv = propose(s);
        if (!mv) return;
        ++proposals_;
        const double d = s.move_delta(*mv);
        if (d <= 0.0 || (T > 0.0 && u(rng_) < std::exp(-d / T))) {
          if (commit(s, *mv)) {
            ++accepted_;
            note(s);
          }
        }
      }
      s.refresh();
    }
  }

  // Downhill moves only; exhaustive on small neighbourhoods, sampled otherwise.
  void descend(DropSet& s) {
    constexpr double eps = 1e-12;
    if (s.boundary().size() * s.frontier().size() <= 20000) {
      for (bool improved = true; improved;) {
        improved = false;
        const std::vector<Point> bnd = s.boundary().items();
        const std::vector<Point> fr = s.frontier().items();
        for (const Point& r : bnd) {
          for (const Point& a : fr) {
            if (a == r || !s.contains(r) || s.contains(a) || !s.frontier().contains(a)) continue;
            ++proposals_;
            if (s.move_delta({r, a}) < -eps && commit(s, {r, a})) {
              ++accepted_;
              note(s);
              improved = true;
              break;
            }
          }
          if (improved) break;
        }
      }
    } else {
      const std::int64_t patience = 20 * static_cast<std::int64_t>(s.volume());
      for (std::int64_t fails = 0; fails < patience;) {
        const auto mv = propose(s);
        if (!mv) break;
        ++proposals_;
        if (s.move_delta(*mv) < -eps && commit(s, *mv)) {
          ++accepted_;
          note(s);
          fails = 0;
        } else {
          ++fails;
        }
      }
    }
    s.refresh();
  }

  // Swaps between the boundary cells of highest potential and the frontier
  // cells of lowest potential, with the potential field kept up to date.
  void steepest(DropSet& s, std::int64_t max_steps, std::size_t width = 8) {
    constexpr double eps = 1e-12;
    std::unordered_map<Point, double, PointHash, PointEqual> pot;
    auto full = [&](const Point& p) {
      CompensatedSum acc;
      for (const Point& y : s.cells())
        if (y != p) acc.add(kernel(p, y, kind_));
      return acc.value();
    };
    auto rebuild = [&] {
      pot.clear();
      for (const Point& p : s.cells()) pot[p] = full(p);
      for (const Point& p : s.frontier().items()) pot[p] = full(p);
    };
    rebuild();
    std::vector<std::pair<double, Point>> rs, as;
    for (std::int64_t step = 0; step < max_steps; ++step) {
      if (step % static_cast<std::int64_t>(4 * s.volume()) == 0) rebuild();
      rs.clear();
      as.clear();
      auto by_first = [](const auto& x, const auto& y) {
        return x.first < y.first || (x.first == y.first && lex_less(x.second, y.second));
      };
      // Leaves first (removable without breaking connectivity), then the rest.
      std::vector<std::pair<double, Point>> others;
      for (const Point& p : s.boundary().items()) {
        int inside = 0;
        for (const Point& q : neighbors(p)) inside += s.contains(q);
        (inside <= 1 ? rs : others).emplace_back(-pot.at(p), p);
      }
      const std::size_t kl = std::min(width, rs.size());
      std::partial_sort(rs.begin(), rs.begin() + kl, rs.end(), by_first);
      rs.resize(kl);
      const std::size_t ko = std::min(width, others.size());
      std::partial_sort(others.begin(), others.begin() + ko, others.end(), by_first);
      rs.insert(rs.end(), others.begin(), others.begin() + ko);
      for (const Point& p : s.frontier().items()) as.emplace_back(pot.at(p), p);
      const std::size_t kr = rs.size(), ka = std::min(width, as.size());
      std::partial_sort(as.begin(), as.begin() + ka, as.end(), by_first);
      std::vector<std::pair<double, SwapMove>> cands;
      for (std::size_t i = 0; i < kr; ++i)
        for (std::size_t j = 0; j < ka; ++j) {
          const Point& r = rs[i].second;
          const Point& a = as[j].second;
          const double dc = 2.0 * (pot.at(a) - kernel(a, r, kind_) - pot.at(r));
          const double d = dc + static_cast<double>(s.perimeter_delta({r, a}));
          if (d < -eps) cands.emplace_back(d, SwapMove{r, a});
        }
      std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
        return x.first < y.first ||
               (x.first == y.first && (lex_less(x.second.remove, y.second.remove) ||
                                       (x.second.remove == y.second.remove &&
                                        lex_less(x.second.add, y.second.add))));
      });
      bool moved = false;
      for (const auto& [d, mv] : cands) {
        ++proposals_;
        if (!commit(s, mv)) continue;
        ++accepted_;
        note(s);
        moved = true;
        for (auto& [p, v] : pot) v += kernel(p, mv.add, kind_) * (p != mv.add) -
                                      kernel(p, mv.remove, kind_) * (p != mv.remove);
        // Correct the two moved cells and add new frontier cells.
        pot[mv.add] = full(mv.add);
        pot[mv.remove] = full(mv.remove);
        for (const Point& q : neighbors(mv.add))
          if (!s.contains(q) && !pot.count(q)) pot[q] = full(q);
        break;
      }
      if (!moved) break;
    }
    s.refresh();
  }

  void shake(DropSet& s, std::int64_t moves) {
    for (std::int64_t k = 0; k < moves; ++k) {
      const auto mv = propose(s);
      if (!mv) return;
      commit(s, *mv);
    }
    s.refresh();
  }

  // Polishing always stays connected: with separation allowed, downhill
  // moves could push components apart indefinitely.
  void set_keep_connected(bool on) { opts_.keep_connected = on; }

  std::vector<Point> best_;
  double best_total_ = std::numeric_limits<double>::infinity();
  double best_any_ = std::numeric_limits<double>::infinity();
  std::int64_t proposals_ = 0, accepted_ = 0;

 private:
  DistanceKind kind_;
  DropSearchOptions opts_;
  std::mt19937_64 rng_;
};

}  // namespace

DropResult minimize_drop(int volume, DistanceKind kind, const DropSchedule& schedule,
                         const DropSearchOptions& opts) {
  if (volume < 1) throw DomainError("volume must be >= 1");
  const std::vector<Point> seed_shape = quasi_ball(volume);

  std::uint64_t seed = 1;
  if (const auto* a = std::get_if<AnnealSchedule>(&schedule)) {
    if (!(a->t0 >= 0.0) || !(a->cooling > 0.0 && a->cooling <= 1.0) || a->sweeps < 0)
      throw DomainError("invalid anneal schedule");
    seed = a->seed;
  } else {
    const auto& g = std::get<GreedySchedule>(schedule);
    if (g.restarts < 1) throw DomainError("greedy search needs at least one restart");
    seed = g.seed;
  }
  Search search(kind, opts, seed);
  {
    DropSet s(seed_shape, kind);
    search.note(s);
  }

  if (const auto* a = std::get_if<AnnealSchedule>(&schedule)) {
    DropSet s(seed_shape, kind);
    search.anneal(s, *a);
    search.set_keep_connected(true);
    DropSet polish(search.best_, kind);
    search.steepest(polish, 50 * static_cast<std::int64_t>(volume));
    search.descend(polish);
  } else {
    const auto& g = std::get<GreedySchedule>(schedule);
    for (int k = 0; k < g.restarts; ++k) {
      search.set_keep_connected(opts.keep_connected);
      DropSet s(seed_shape, kind);
      if (k > 0) search.shake(s, static_cast<std::int64_t>(k) * volume);
      search.note(s);
      search.set_keep_connected(true);
      search.steepest(s, 50 * static_cast<std::int64_t>(volume));
      search.descend(s);
    }
  }

  DropResult out;
  out.cells = search.best_;
  std::sort(out.cells.begin(), out.cells.end(), lex_less);
  out.energy = drop_energy(out.cells, kind);
  out.connected = is_connected(out.cells);
  out.proposals = search.proposals_;
  out.accepted = search.accepted_;
  out.best_any_total = std::min(search.best_any_, out.energy.total);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct LexVecLess {
  bool operator()(const std::vector<Point>& a, const std::vector<Point>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), lex_less);
  }
};

std::vector<Point> canonical(std::vector<Point> cells) {
  std::sort(cells.begin(), cells.end(), lex_less);
  const Point o = cells.front();
  for (Point& p : cells) p -= o;
  return cells;
}

constexpr int kOracleMaxVolume = 6;

}  // namespace

std::vector<std::vector<Point>> enumerate_polycubes(int volume) {
  if (volume < 1) throw DomainError("volume must be >= 1");
  if (volume > kOracleMaxVolume)
    throw BudgetError("polycube enumeration supports volume <= " + std::to_string(kOracleMaxVolume));
  std::set<std::vector<Point>, LexVecLess> level{{Point::Zero()}};
  for (int v = 2; v <= volume; ++v) {
    std::set<std::vector<Point>, LexVecLess> next;
    for (const auto& shape : level) {
      const PointSetHash members(shape.begin(), shape.end());
      for (const Point& p : shape)
        for (const Point& q : neighbors(p)) {
          if (members.count(q)) continue;
          std::vector<Point> grown = shape;
          grown.push_back(q);
          next.insert(canonical(std::move(grown)));
        }
    }
    level = std::move(next);
  }
  return {level.begin(), level.end()};
}

OracleResult exact_enumeration_oracle(int volume, DistanceKind kind) {
  if (volume > kOracleMaxVolume)
    throw BudgetError("exact oracle supports volume <= " + std::to_string(kOracleMaxVolume));
  if (volume < 1) throw DomainError("volume must be >= 1");
  std::vector<double> best(volume + 1, 0.0);
  OracleResult out;
  for (int v = 1; v <= volume; ++v) {
    const auto shapes = enumerate_polycubes(v);
    double b = std::numeric_limits<double>::infinity();
    const std::vector<Point>* arg = nullptr;
    for (const auto& s : shapes) {
      const double e = drop_energy(s, kind).total;
      if (e < b) {
        b = e;
        arg = &s;
      }
    }
    best[v] = b;
    if (v == volume) {
      out.cells = *arg;
      out.connected_optimum = b;
      out.shapes = static_cast<std::int64_t>(shapes.size());
    }
  }
  // Best split of the volume into independently placed connected parts.
  std::vector<double> split(volume + 1, std::numeric_limits<double>::infinity());
  split[0] = 0.0;
  for (int v = 1; v <= volume; ++v)
    for (int k = 1; k <= v; ++k) split[v] = std::min(split[v], split[v - k] + best[k]);
  out.separation_infimum = split[volume];
  out.infimum_attained = !(out.separation_infimum < out.connected_optimum);
  return out;
}

std::vector<std::int64_t> pair_count_profile(std::span<const Point> cells, DistanceKind kind) {
  if (cells.empty()) return {};
  const int diam = diameter(cells);
  // Exact integer keys: graph distance, or squared Euclidean distance.
  std::map<std::int64_t, std::int64_t> hist;
  for (const Point& x : cells)
    for (const Point& y : cells) {
      const Point d = x - y;
      const std::int64_t key = kind == DistanceKind::Graph ? d.cwiseAbs().sum()
                                                           : static_cast<std::int64_t>(d.squaredNorm());
      ++hist[key];
    }
  std::vector<std::int64_t> A(diam + 1, 0);
  for (int t = 1; t <= diam + 1; ++t) {
    const std::int64_t bound = kind == DistanceKind::Graph ? t : static_cast<std::int64_t>(t) * t;
    std::int64_t n = 0;
    for (const auto& [k, c] : hist) {
      if (k >= bound) break;
      n += c;
    }
    A[t - 1] = n;
  }
  return A;
}

double coulomb_chain_bound(std::span<const Point> cells, DistanceKind kind) {
  const auto A = pair_count_profile(cells, kind);
  const int T = diameter(cells) / 2;
  CompensatedSum acc;
  for (int t = 1; t <= T; ++t)
    acc.add(static_cast<double>(A[t - 1]) / (static_cast<double>(t) * (t + 1)));
  return acc.value();
}

std::vector<ScalingRow> scaling_study(const std::vector<int>& volumes, DistanceKind kind,
                                      const DropSchedule& schedule, const DropSearchOptions& opts,
                                      int threads) {
  if (!std::is_sorted(volumes.begin(), volumes.end()))
    throw DomainError("scaling study volumes must be sorted ascending");
  for (int v : volumes)
    if (v < 2) throw DomainError("scaling study volumes must be >= 2");
  std::vector<ScalingRow> rows(volumes.size());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; (i = next++) < volumes.size();) {
      try {
        const DropResult r = minimize_drop(volumes[i], kind, schedule, opts);
        ScalingRow& row = rows[i];
        row.volume = volumes[i];
        row.energy = r.energy;
        row.total_per_volume = r.energy.total / volumes[i];
        row.coulomb_per_vlogv = r.energy.coulomb / (volumes[i] * std::log(static_cast<double>(volumes[i])));
        row.connected = r.connected;
        row.chain_bound = coulomb_chain_bound(r.cells, kind);
        row.chain_holds = r.energy.coulomb >= row.chain_bound;
        row.cells = r.cells;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(volumes.size())));
  if (n == 1) {
    work();
  } else {
    for (int k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return rows;
}

double union_energy(std::span<const Point> a, std::span<const Point> b, int sep, DistanceKind kind) {
  std::vector<Point> cells(a.begin(), a.end());
  for (const Point& p : b) cells.push_back(p + Point(sep, 0, 0));
  return drop_energy(cells, kind).total;
}

SubadditivityCheck drop_subadditivity(const DropResult& r0, const DropResult& r1,
                                      const DropResult& joint, int sep, double slack,
                                      DistanceKind kind) {
  if (joint.cells.size() != r0.cells.size() + r1.cells.size())
    throw DomainError("joint volume must equal V0 + V1");
  SubadditivityCheck c;
  c.v0 = static_cast<int>(r0.cells.size());
  c.v1 = static_cast<int>(r1.cells.size());
  c.e0 = r0.energy.total;
  c.e1 = r1.energy.total;
  c.e_search = joint.energy.total;
  c.e_union = union_energy(r0.cells, r1.cells, sep, kind);
  c.best = std::min(c.e_search, c.e_union);
  c.holds = c.best <= c.e0 + c.e1 + slack;
  return c;
}

// ---------------------------------------------------------------------------

void write_drop(std::ostream& out, std::span<const Point> cells, DistanceKind kind) {
  out << "TFDW-DROP 1\n"
      << "kind: " << to_string(kind) << "\n"
      << "count: " << cells.size() << "\n";
  for (const Point& p : cells) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

std::pair<std::vector<Point>, DistanceKind> read_drop(std::istream& in) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw FormatError(std::string("missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next("header");
  if (line != "TFDW-DROP 1") throw FormatError("bad header '" + line + "'");
  next("kind line");
  if (line.rfind("kind: ", 0) != 0) throw FormatError("expected 'kind: ...'");
  DistanceKind kind;
  try {
    kind = parse_distance_kind(line.substr(6));
  } catch (const std::exception&) {
    throw FormatError("unknown kind '" + line.substr(6) + "'");
  }
  next("count line");
  if (line.rfind("count: ", 0) != 0) throw FormatError("expected 'count: V'");
  long long count = -1;
  {
    std::istringstream ss(line.substr(7));
    if (!(ss >> count) || count < 1 || !(ss >> std::ws).eof()) throw FormatError("bad count");
  }
  std::vector<Point> cells;
  cells.reserve(static_cast<std::size_t>(count));
  PointSetHash seen;
  for (long long i = 0; i < count; ++i) {
    next("cell line");
    std::istringstream ss(line);
    int x, y, z;
    if (!(ss >> x >> y >> z) || !(ss >> std::ws).eof())
      throw FormatError("bad cell line " + std::to_string(i + 1) + ": '" + line + "'");
    const Point p(x, y, z);
    if (!seen.insert(p).second) throw FormatError("duplicate cell on line " + std::to_string(i + 1));
    cells.push_back(p);
  }
  return {std::move(cells), kind};
}

void save_drop(const std::string& path, std::span<const Point> cells, DistanceKind kind) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_drop(out, cells, kind);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

std::pair<std::vector<Point>, DistanceKind> load_drop(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_drop(in);
}

}  // namespace tfdw
