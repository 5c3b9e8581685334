#include "tfdw/minimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "tfdw/field_io.hpp"
#include "tfdw/spreading.hpp"
#include "tfdw/summation.hpp"

namespace tfdw {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::BallCone: return "ball_cone";
    case InitKind::GaussianLike: return "gaussian_like";
    case InitKind::Random: return "random";
    case InitKind::File: return "file";
  }
  return "?";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "ball_cone") return InitKind::BallCone;
  if (text == "gaussian_like") return InitKind::GaussianLike;
  if (text == "random") return InitKind::Random;
  if (text == "file") return InitKind::File;
  throw DomainError("unknown init kind '" + text + "'");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIters: return "max_iters";
    case Termination::Stalled: return "stalled";
  }
  return "?";
}

void MinimizeConfig::validate() const {
  if (half_width < 2) throw DomainError("box half-width must be >= 2");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("mass must be positive and finite");
  if (max_iters < 0) throw DomainError("max_iters must be >= 0");
  if (!(step0 > 0.0)) throw DomainError("step0 must be positive");
  if (!(tol_residual > 0.0)) throw DomainError("tol_residual must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("backtrack factor must lie in (0, 1)");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw DomainError("armijo constant must lie in (0, 1)");
  if (init == InitKind::File && init_path.empty()) throw DomainError("file init needs a path");
}

FieldGrid projection_mass(const FieldGrid& phi, double m) {
  if (!(m > 0.0)) throw DomainError("target mass must be positive");
  if (!(phi.mass() > 0.0)) throw DomainError("cannot project the zero field onto a mass sphere");
  FieldGrid out = phi;
  out.scale(std::sqrt(m / phi.mass()));
  return out;
}

FieldGrid initial_field(const MinimizeConfig& cfg) {
  cfg.validate();
  const Box box = cfg.box();
  const int L = cfg.half_width;
  FieldGrid f;
  switch (cfg.init) {
    case InitKind::BallCone:
      f = build_psi({(L + 1) / 2, cfg.mass}, box);
      break;
    case InitKind::GaussianLike: {
      const double sigma = std::max(1.0, L / 4.0);
      Eigen::ArrayXd v(box.size());
      for (std::int64_t i = 0; i < box.size(); ++i)
        v[i] = std::exp(-box.point(i).cast<double>().squaredNorm() / (2 * sigma * sigma));
      f = FieldGrid(box, std::move(v));
      break;
    }
    case InitKind::Random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Eigen::ArrayXd v(box.size());
      for (auto& x : v) x = u(rng);
      f = FieldGrid(box, std::move(v));
      break;
    }
    case InitKind::File: {
      StoredField s = load_field(cfg.init_path);
      if (s.field.box() == box)
        f = std::move(s.field);
      else
        f = s.field.embedded(box);
      break;
    }
  }
  return projection_mass(f, cfg.mass);
}

double boundary_mass_fraction(const FieldGrid& phi) {
  const Box& b = phi.box();
  CompensatedSum acc;
  for (std::int64_t i = 0; i < b.size(); ++i) {
    const Point p = b.point(i);
    if ((p.array() == b.lo.array()).any() || (p.array() == b.hi.array()).any()) {
      const double v = phi.values()[i];
      acc.add(v * v);
    }
  }
  return phi.mass() > 0.0 ? acc.value() / phi.mass() : 0.0;
}

Point mass_argmax(const FieldGrid& phi) {
  Eigen::Index idx = 0;
  phi.values().maxCoeff(&idx);
  return phi.box().point(idx);
}

namespace {

int farthest_distance(const Box& b, const Point& c) {
  int r = 0;
  for (int a = 0; a < 3; ++a) r += std::max(c[a] - b.lo[a], b.hi[a] - c[a]);
  return r;
}

}  // namespace

std::vector<double> mass_profile(const FieldGrid& phi, const Point& center, int r_max) {
  std::vector<CompensatedSum> shells(r_max + 1);
  const Box& b = phi.box();
  for (std::int64_t i = 0; i < b.size(); ++i) {
    const int d = graph_distance(b.point(i), center);
    if (d <= r_max) {
      const double v = phi.values()[i];
      shells[d].add(v * v);
    }
  }
  std::vector<double> s(r_max + 1);
  CompensatedSum run;
  for (int r = 0; r <= r_max; ++r) {
    run.add(shells[r].value());
    s[r] = run.value();
  }
  return s;
}

MinimizeReport minimize(const MinimizeConfig& cfg) {
  cfg.validate();
  const TfdwFunctional F(cfg.box(), cfg.kind);
  const double m = cfg.mass;

  MinimizeReport rep;
  FieldGrid phi = initial_field(cfg);
  auto ev = F.evaluate(phi.values());
  if (!std::isfinite(ev.energy.total)) throw NumericalFailure("initial energy is not finite", phi);
  Eigen::ArrayXd g = F.gradient(phi.values(), ev.potential);

  Eigen::ArrayXd prev_phi, prev_gt;
  double last_step = 0.0;
  int it = 0;
  for (;; ++it) {
    const double lambda = (g * phi.values()).sum() / m;
    const Eigen::ArrayXd gt = g - lambda * phi.values();
    const double res = gt.matrix().norm();
    if (!std::isfinite(res)) throw NumericalFailure("gradient is not finite", phi);
    rep.trajectory.push_back({it, ev.energy, last_step, res});
    rep.residual = res;
    if (res <= cfg.tol_residual) {
      rep.termination = Termination::Converged;
      break;
    }
    if (it >= cfg.max_iters) {
      rep.termination = Termination::MaxIters;
      break;
    }

    double t = cfg.step0;
    if (prev_phi.size()) {
      const Eigen::ArrayXd s = phi.values() - prev_phi;
      const Eigen::ArrayXd y = gt - prev_gt;
      const double sy = (s * y).sum();
      if (sy > 0.0) t = (s * s).sum() / sy;
    }

    bool accepted = false;
    FieldGrid cand;
    TfdwFunctional::Evaluation cev;
    while (t > 1e-300) {
      Eigen::ArrayXd v = (phi.values() - t * gt).max(0.0);
      if ((v > 0.0).any()) {
        cand = projection_mass(FieldGrid(phi.box(), std::move(v)), m);
        const double decrease = (gt * (phi.values() - cand.values())).sum();
        if (!(decrease > 0.0)) break;  // step too small to move
        cev = F.evaluate(cand.values());
        if (!std::isfinite(cev.energy.total))
          throw NumericalFailure("energy became non-finite at iteration " + std::to_string(it), phi);
        if (cev.energy.total <= ev.energy.total - cfg.armijo_c1 * decrease) {
          accepted = true;
          break;
        }
      }
      t *= cfg.beta;
    }
    if (!accepted) {
      rep.termination = Termination::Stalled;
      break;
    }
    prev_phi = phi.values();
    prev_gt = gt;
    phi = std::move(cand);
    ev = std::move(cev);
    g = F.gradient(phi.values(), ev.potential);
    last_step = t;
  }

  rep.iterations = it;
  rep.energy = ev.energy;
  rep.boundary_mass_fraction = boundary_mass_fraction(phi);
  rep.center = mass_argmax(phi);
  const std::vector<double> s = mass_profile(phi, rep.center, farthest_distance(phi.box(), rep.center));
  for (std::size_t r = 0; r < s.size(); ++r) rep.s_profile.emplace_back(static_cast<int>(r), s[r]);
  rep.r0 = concentration_radius(phi, m / 2).radius;
  rep.field = std::move(phi);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::map<double, MinimizeReport> solve_masses(const std::vector<double>& masses,
                                              const MinimizeConfig& tmpl, int threads) {
  std::vector<double> unique(masses);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<MinimizeReport> reps = minimize_many(unique, tmpl, threads);
  std::map<double, MinimizeReport> out;
  for (std::size_t i = 0; i < unique.size(); ++i) out.emplace(unique[i], std::move(reps[i]));
  return out;
}

}  // namespace

std::vector<MinimizeReport> minimize_many(const std::vector<double>& masses,
                                          const MinimizeConfig& tmpl, int threads) {
  std::vector<MinimizeReport> out(masses.size());
  parallel_for(masses.size(), threads, [&](std::size_t i) {
    MinimizeConfig c = tmpl;
    c.mass = masses[i];
    out[i] = minimize(c);
  });
  return out;
}

std::vector<SubadditivityRow> subadditivity_scan(double m, const std::vector<double>& splits,
                                                 const MinimizeConfig& tmpl, int threads) {
  if (!(m > 0.0)) throw DomainError("scan mass must be positive");
  std::vector<double> masses{m};
  for (double m1 : splits) {
    if (!(m1 > 0.0 && m1 < m)) throw DomainError("split masses must lie in (0, m)");
    masses.push_back(m1);
    masses.push_back(m - m1);
  }
  const auto solved = solve_masses(masses, tmpl, threads);
  const double i_m = solved.at(m).energy.total;
  std::vector<SubadditivityRow> rows;
  for (double m1 : splits) {
    SubadditivityRow r;
    r.m1 = m1;
    r.i_m1 = solved.at(m1).energy.total;
    r.i_rest = solved.at(m - m1).energy.total;
    r.i_m = i_m;
    r.gap = r.i_m1 + r.i_rest - i_m;
    rows.push_back(r);
  }
  return rows;
}

FieldGrid place_clusters(const FieldGrid& phi1, const FieldGrid& phi2, int sep, double m) {
  const FieldGrid moved = phi2.translated(Point(sep, 0, 0));
  const Box box = bounding_union(phi1.box(), moved.box());
  Eigen::ArrayXd v = phi1.embedded(box).values() + moved.embedded(box).values();
  return projection_mass(FieldGrid(box, std::move(v)), m);
}

SplittingRecord splitting_advantage(double m, int sep, const MinimizeConfig& tmpl,
                                    const std::vector<double>& fractions, int threads) {
  if (!(m > 0.0)) throw DomainError("mass must be positive");
  if (sep < 0) throw DomainError("separation must be nonnegative");
  if (fractions.empty()) throw DomainError("need at least one split fraction");
  std::vector<double> masses{m};
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw DomainError("split fractions must lie in (0, 1)");
    masses.push_back(f * m);
    masses.push_back((1.0 - f) * m);
  }
  const auto solved = solve_masses(masses, tmpl, threads);

  SplittingRecord rec;
  rec.m = m;
  rec.separation = sep;
  rec.e_single = solved.at(m).energy.total;
  rec.single_status = solved.at(m).termination;
  std::optional<TfdwFunctional> joint;
  bool first = true;
  for (double f : fractions) {
    const MinimizeReport& a = solved.at(f * m);
    const MinimizeReport& b = solved.at((1.0 - f) * m);
    const FieldGrid both = place_clusters(a.field, b.field, sep, m);
    if (!joint || !(joint->box() == both.box())) joint.emplace(both.box(), tmpl.kind);
    const double e = joint->energy(both.values()).total;
    if (first || e < rec.e_split_best) {
      rec.e_split_best = e;
      rec.best_fraction = f;
      rec.sum_of_parts = a.energy.total + b.energy.total;
      first = false;
    }
  }
  rec.advantage = rec.e_single - rec.e_split_best;
  return rec;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

int sign_changes(const std::vector<double>& values) {
  int changes = 0, last = 0;
  for (double v : values) {
    const int s = (v > 0) - (v < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// ---------------------------------------------------------------------------

MassGrowthRecord mass_growth_check(const FieldGrid& phi, int r, int R) {
  return mass_growth_check(phi, r, R, mass_argmax(phi));
}

MassGrowthRecord mass_growth_check(const FieldGrid& phi, int r, int R, const Point& c) {
  if (r < 1 || R <= r + 1) throw DomainError("mass growth check needs R > r + 1 >= 2");
  const std::vector<double> s = mass_profile(phi, c, R);
  MassGrowthRecord rec;
  rec.r = r;
  rec.R = R;
  rec.lhs = s[r + 1] - s[r - 1];
  rec.lhs_union = s[r + 1];
  rec.rhs = s[r] * (s[R] - s[r + 1]) / (3.0 * (R + r));
  rec.holds = rec.lhs >= rec.rhs;
  rec.holds_union = rec.lhs_union >= rec.rhs;
  return rec;
}

std::vector<MassGrowthRecord> mass_growth_sweep(const FieldGrid& phi, std::int64_t* checked) {
  const Point c = mass_argmax(phi);
  const int rmax = farthest_distance(phi.box(), c);
  const std::vector<double> s = mass_profile(phi, c, rmax);
  std::vector<MassGrowthRecord> fails;
  std::int64_t count = 0;
  for (int r = 1; r + 2 <= rmax; ++r)
    for (int R = r + 2; R <= rmax; ++R) {
      MassGrowthRecord rec;
      rec.r = r;
      rec.R = R;
      rec.lhs = s[r + 1] - s[r - 1];
      rec.lhs_union = s[r + 1];
      rec.rhs = s[r] * (s[R] - s[r + 1]) / (3.0 * (R + r));
      rec.holds = rec.lhs >= rec.rhs;
      rec.holds_union = rec.lhs_union >= rec.rhs;
      ++count;
      if (!rec.holds) fails.push_back(rec);
    }
  if (checked) *checked = count;
  return fails;
}

namespace {

// Ball sums of phi^2 from per-slice prefix sums in rotated coordinates
// (p, q) = (j + k, j - k): a graph ball meets each x-slice in a diamond,
// which is a square in (p, q).
class BallMass {
 public:
  explicit BallMass(const FieldGrid& phi) : box_(phi.box()), d_(phi.box().dims()) {
    side_ = d_.y() + d_.z() - 1;
    const std::int64_t stride = static_cast<std::int64_t>(side_ + 1) * (side_ + 1);
    pre_.assign(stride * d_.x(), 0.0L);
    for (int i = 0; i < d_.x(); ++i) {
      long double* P = pre_.data() + stride * i;
      for (int j = 0; j < d_.y(); ++j)
        for (int k = 0; k < d_.z(); ++k) {
          const double v = phi.values()[(static_cast<std::int64_t>(i) * d_.y() + j) * d_.z() + k];
          P[(j + k + 1) * (side_ + 1) + (j - k + d_.z() - 1 + 1)] = static_cast<long double>(v) * v;
        }
      for (int p = 1; p <= side_; ++p)
        for (int q = 1; q <= side_; ++q)
          P[p * (side_ + 1) + q] += P[(p - 1) * (side_ + 1) + q] + P[p * (side_ + 1) + q - 1] -
                                    P[(p - 1) * (side_ + 1) + q - 1];
    }
  }

  /// Mass of B_r about grid cell (ci, cj, ck).
  long double ball(int ci, int cj, int ck, int r) const {
    const std::int64_t stride = static_cast<std::int64_t>(side_ + 1) * (side_ + 1);
    const int pc = cj + ck, qc = cj - ck + d_.z() - 1;
    long double acc = 0.0L;
    for (int i = std::max(0, ci - r); i <= std::min(d_.x() - 1, ci + r); ++i) {
      const int rr = r - std::abs(i - ci);
      const int p0 = std::max(0, pc - rr), p1 = std::min(side_ - 1, pc + rr);
      const int q0 = std::max(0, qc - rr), q1 = std::min(side_ - 1, qc + rr);
      if (p0 > p1 || q0 > q1) continue;
      const long double* P = pre_.data() + stride * i;
      acc += P[(p1 + 1) * (side_ + 1) + q1 + 1] - P[p0 * (side_ + 1) + q1 + 1] -
             P[(p1 + 1) * (side_ + 1) + q0] + P[p0 * (side_ + 1) + q0];
    }
    return acc;
  }

  /// First cell (lexicographic) whose r-ball holds >= c0, if any.
  std::optional<std::pair<Point, long double>> find(int r, double c0) const {
    for (int i = 0; i < d_.x(); ++i)
      for (int j = 0; j < d_.y(); ++j)
        for (int k = 0; k < d_.z(); ++k) {
          const long double s = ball(i, j, k, r);
          if (s >= c0) return std::make_pair(box_.lo + Point(i, j, k), s);
        }
    return std::nullopt;
  }

  Point local(const Point& p) const { return p - box_.lo; }

 private:
  Box box_;
  Eigen::Vector3i d_;
  int side_ = 0;
  std::vector<long double> pre_;
};

}  // namespace

ConcentrationResult concentration_radius(const FieldGrid& phi, double c0) {
  if (!(c0 > 0.0)) throw DomainError("C0 must be positive");
  ConcentrationResult res;
  if (phi.size() == 0) return res;
  const BallMass bm(phi);
  const Eigen::Vector3i d = phi.box().dims();
  int hi = d.x() + d.y() + d.z() - 3;
  if (!bm.find(hi, c0)) return res;
  int lo = 0;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (bm.find(mid, c0))
      hi = mid;
    else
      lo = mid + 1;
  }
  const auto hit = bm.find(lo, c0);
  res.radius = lo;
  res.center = hit->first;
  res.captured = static_cast<double>(hit->second);
  const Point c = bm.local(res.center);
  res.doubling_mass = static_cast<double>(bm.ball(c.x(), c.y(), c.z(), 2 * lo));
  res.doubling_holds = phi.mass() <= 2.0 * res.doubling_mass * (1.0 + 1e-12);
  return res;
}

}  // namespace tfdw
