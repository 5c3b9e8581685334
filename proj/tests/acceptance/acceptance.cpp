// One PASS/FAIL line per acceptance criterion.  Pass criterion numbers as
// arguments to run a subset.  Exit status is 0 only when every selected
// criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tfdw/coulomb.hpp"
#include "tfdw/energy.hpp"
#include "tfdw/field_io.hpp"
#include "tfdw/liquid_drop.hpp"
#include "tfdw/minimizer.hpp"
#include "tfdw/spreading.hpp"
#include "tfdw/verify.hpp"

using namespace tfdw;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int prec = 6) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << x;
  return ss.str();
}

// Minimizers produced by criteria 6-8, collected for criterion 9.
std::vector<std::pair<std::string, FieldGrid>> g_minimizers;

void keep(const std::string& label, const MinimizeReport& rep) {
  if (rep.termination == Termination::Converged) g_minimizers.emplace_back(label, rep.field);
}

// Plain enumeration over the enclosing cube.
Outcome c1_ball_combinatorics() {
  Timer t;
  int bad = 0;
  for (int R = 1; R <= 30; ++R) {
    std::int64_t shell = 0, vol = 0;
    for (int x = -R; x <= R; ++x)
      for (int y = -R; y <= R; ++y)
        for (int z = -R; z <= R; ++z) {
          const int d = std::abs(x) + std::abs(y) + std::abs(z);
          vol += d <= R;
          shell += d == R;
        }
    const std::int64_t want_shell = 4LL * R * R + 2;
    const std::int64_t num = 4LL * R * R * R + 6LL * R * R + 8LL * R + 3;
    bad += shell != want_shell || num % 3 != 0 || vol != num / 3;
    bad += static_cast<std::int64_t>(sphere(Point::Zero(), R).size()) != want_shell;
    bad += static_cast<std::int64_t>(ball(Point::Zero(), R).size()) != num / 3;
    bad += ball_volume_formula(R) != num / 3 || sphere_size_formula(R) != want_shell;
  }
  const double s = t.seconds();
  return {bad == 0 && s < 5.0, std::to_string(bad) + " mismatches for R=1..30 in " + fmt(s, 3) + " s"};
}

Outcome c2_psi_normalization() {
  double worst = 0.0;
  for (double m : {0.1, 1.0, 10.0, 100.0})
    for (int n = 1; n <= 50; ++n) {
      const auto psi = build_psi({n, m});
      // Independent mass sum straight from the cone profile.
      const double d2 = m / seq_b(n).to_double();
      long double direct = 0.0L;
      for (int l = 0; l <= n; ++l)
        direct += static_cast<long double>(n - l + 1) * (n - l + 1) * d2 * (l == 0 ? 1 : 4 * l * l + 2);
      worst = std::max({worst, std::abs(psi.mass() - m) / m, std::abs(static_cast<double>(direct) - m) / m});
    }
  int seq_bad = 0;
  for (int n = 1; n <= 200; ++n) {
    // a_n, b_n from the definitions with 128-bit integers.
    __int128 a = 0, b = static_cast<__int128>(n + 1) * (n + 1);
    for (int l = 1; l <= n + 1; ++l) a += 4LL * l * l + 2;
    for (int l = 1; l <= n; ++l) b += static_cast<__int128>(n - l + 1) * (n - l + 1) * (4LL * l * l + 2);
    const Rational ra = seq_a(n), rb = seq_b(n);
    seq_bad += ra.den != 1 || ra.num != static_cast<std::int64_t>(a);
    seq_bad += rb.den != 1 || rb.num != static_cast<std::int64_t>(b);
  }
  return {worst <= 1e-12 && seq_bad == 0,
          "max relative mass error " + fmt(worst, 3) + "; closed-form mismatches " + std::to_string(seq_bad)};
}

Outcome c3_psi_decay() {
  Timer t;
  const auto rows = psi_energy_report(100, 10.0, DistanceKind::Euclidean);
  const double s = t.seconds();
  const auto mono = check_psi_monotone(rows);
  const auto small = check_psi_smallness(rows);
  std::string detail = "monotone violations " + std::to_string(mono.size()) + "; n=100 total " +
                       fmt(rows.back().energy.total) + "; " + fmt(s, 3) + " s";
  for (const auto& m : small) detail += "; " + m;
  return {mono.empty() && small.empty() && s < 120.0, detail};
}

Outcome c4_coulomb_engine() {
  Timer t;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<Box> boxes{Box(Point::Zero(), Point(3, 3, 3)), Box(Point::Zero(), Point(7, 7, 7)),
                               Box(Point::Zero(), Point(15, 15, 15)), Box(Point::Zero(), Point(11, 7, 19))};
  double worst = 0.0;
  for (const Box& box : boxes)
    for (int i = 0; i < 50; ++i) {
      DensityGrid rho(box);
      for (Eigen::Index k = 0; k < rho.size(); ++k) rho.values()[k] = u(rng);
      const auto fast = potential_fast(rho, DistanceKind::Euclidean);
      const auto direct = potential_direct(rho, DistanceKind::Euclidean);
      worst = std::max(worst, ((fast - direct).abs() / direct.abs()).maxCoeff());
    }
  const double s = t.seconds();
  return {worst <= 1e-10 && s < 60.0, "max relative error " + fmt(worst, 3) + " over 200 densities in " +
                                          fmt(s, 3) + " s"};
}

Outcome c5_gradient() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.05, 1.0), dir(-1.0, 1.0);
  const Box box(Point::Zero(), Point(5, 5, 5));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::ArrayXd phi(box.size()), delta(box.size());
    for (Eigen::Index k = 0; k < phi.size(); ++k) {
      phi[k] = pos(rng);
      delta[k] = dir(rng);
    }
    const FieldGrid f(box, phi);
    const double t = 1e-5;
    const double fd = (energy(FieldGrid(box, phi + t * delta), DistanceKind::Euclidean).total -
                       energy(FieldGrid(box, phi - t * delta), DistanceKind::Euclidean).total) /
                      (2 * t);
    const double an = (el_gradient(f, DistanceKind::Euclidean).values() * delta).sum();
    worst = std::max(worst, std::abs(an - fd) / std::abs(fd));
  }
  return {worst <= 1e-6, "max relative error " + fmt(worst, 3) + " over 100 pairs"};
}

Outcome c6_minimization() {
  Timer t;
  MinimizeConfig cfg;
  cfg.half_width = 12;
  cfg.mass = 0.5;
  const auto rep = minimize(cfg);
  const double s = t.seconds();
  keep("m=0.5 (criterion 6)", rep);
  bool monotone = true;
  for (std::size_t i = 1; i < rep.trajectory.size(); ++i)
    monotone = monotone && rep.trajectory[i].energy.total <= rep.trajectory[i - 1].energy.total;
  const double drift = std::abs(rep.field.mass() - cfg.mass);
  const double max_phi = rep.field.values().maxCoeff();
  const bool ok = rep.termination == Termination::Converged && rep.residual <= 1e-6 && monotone &&
                  drift <= 1e-10 * cfg.mass && max_phi <= kPointwiseCap + 1e-3 && s < 300.0;
  return {ok, "E=" + fmt(rep.energy.total, 10) + " " + to_string(rep.termination) + " after " +
                  std::to_string(rep.iterations) + " iterations, residual " + fmt(rep.residual, 3) +
                  ", monotone " + (monotone ? "yes" : "no") + ", drift " + fmt(drift, 3) + ", max phi " +
                  fmt(max_phi, 4) + ", " + fmt(s, 3) + " s"};
}

MinimizeConfig window_config() {
  MinimizeConfig cfg;
  cfg.half_width = 12;
  return cfg;
}

Outcome c7_subadditivity() {
  const std::vector<double> splits{0.1, 0.2, 0.25};
  const auto rows = subadditivity_scan(0.5, splits, window_config());
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.gap > 1e-4;
    detail += (detail.empty() ? "" : "; ") + std::string("gap(m1=") + fmt(r.m1) + ")=" + fmt(r.gap, 4);
  }
  // Keep the fields for criterion 9.
  for (const auto& rep : minimize_many({0.1, 0.2, 0.25, 0.3, 0.4, 0.5}, window_config()))
    keep("subadditivity m=" + fmt(rep.field.mass()), rep);
  return {ok, detail};
}

Outcome c8_splitting() {
  Timer t;
  const auto tmpl = window_config();
  const auto masses = log_grid(0.2, 50.0, 10);
  std::vector<double> adv;
  std::string detail;
  for (double m : masses) {
    const auto r = splitting_advantage(m, tmpl.half_width, tmpl);
    adv.push_back(r.advantage);
    detail += (detail.empty() ? "advantage " : ", ") + fmt(m, 3) + ":" + fmt(r.advantage, 3);
  }
  const double s = t.seconds();
  const int changes = sign_changes(adv);
  detail += "; sign changes " + std::to_string(changes) + "; " + fmt(s, 4) + " s";
  // Converged single and split-part minimizers for criterion 9.
  std::vector<double> all;
  for (double m : masses) {
    all.push_back(m);
    for (double f : kDefaultSplitFractions) {
      all.push_back(f * m);
      all.push_back((1 - f) * m);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (const auto& rep : minimize_many(all, tmpl)) keep("splitting m=" + fmt(rep.field.mass()), rep);
  return {adv.front() <= 0.0 && adv.back() > 0.0 && changes == 1 && s < 1800.0, detail};
}

Outcome c9_mass_growth() {
  std::int64_t checked = 0, failures = 0;
  std::string first;
  for (const auto& [label, phi] : g_minimizers) {
    std::int64_t c = 0;
    const auto fails = mass_growth_sweep(phi, &c);
    checked += c;
    failures += static_cast<std::int64_t>(fails.size());
    if (!fails.empty() && first.empty())
      first = "; first failure " + label + " r=" + std::to_string(fails[0].r) + " R=" + std::to_string(fails[0].R);
  }
  return {!g_minimizers.empty() && failures == 0, std::to_string(g_minimizers.size()) + " minimizers, " +
                                                       std::to_string(checked) + " (r,R) pairs, " +
                                                       std::to_string(failures) + " failures" + first};
}

Outcome c10_drop_oracle() {
  bool ok = true;
  std::string detail;
  for (int v = 1; v <= 6; ++v) {
    const auto orc = exact_enumeration_oracle(v, DistanceKind::Euclidean);
    const auto r = minimize_drop(v, DistanceKind::Euclidean, AnnealSchedule{});
    const double diff = std::abs(r.energy.total - orc.connected_optimum);
    ok = ok && diff <= 1e-9;
    detail += (detail.empty() ? "" : ", ") + std::string("V=") + std::to_string(v) + ":" + fmt(r.energy.total, 8);
  }
  const auto two = exact_enumeration_oracle(2, DistanceKind::Euclidean);
  ok = ok && std::abs(two.connected_optimum - 4.0) <= 1e-12 && std::abs(two.separation_infimum - 2.0) <= 1e-12 &&
       !two.infimum_attained;
  detail += "; V=2 connected " + fmt(two.connected_optimum) + ", separation infimum " + fmt(two.separation_infimum) +
            (two.infimum_attained ? " (attained)" : " (not attained)");
  return {ok, detail};
}

Outcome c11_drop_scaling() {
  Timer t;
  const auto rows = scaling_study({16, 32, 64, 128, 256, 512}, DistanceKind::Euclidean, AnnealSchedule{});
  const double s = t.seconds();
  double tv_lo = 1e300, tv_hi = 0, cv_lo = 1e300, cv_hi = 0;
  bool connected = true, chain = true;
  for (const auto& r : rows) {
    tv_lo = std::min(tv_lo, r.total_per_volume);
    tv_hi = std::max(tv_hi, r.total_per_volume);
    cv_lo = std::min(cv_lo, r.coulomb_per_vlogv);
    cv_hi = std::max(cv_hi, r.coulomb_per_vlogv);
    connected = connected && is_connected(r.cells);
    // Chain bound recomputed from the pair-count profile.
    const auto A = pair_count_profile(r.cells, DistanceKind::Euclidean);
    double bound = 0.0;
    for (int k = 1; k <= diameter(r.cells) / 2; ++k) bound += static_cast<double>(A[k - 1]) / (k * (k + 1.0));
    chain = chain && drop_energy(r.cells, DistanceKind::Euclidean).coulomb >= bound;
  }
  const bool ok = tv_hi / tv_lo <= 3.0 && cv_lo > 0.0 && cv_hi / cv_lo <= 3.0 && connected && chain && s < 3600.0;
  return {ok, "total/V max/min " + fmt(tv_hi / tv_lo, 4) + ", coulomb/(V ln V) min " + fmt(cv_lo, 4) +
                  " max/min " + fmt(cv_hi / cv_lo, 4) + ", connected " + (connected ? "yes" : "no") +
                  ", chain bound " + (chain ? "holds" : "fails") + ", " + fmt(s, 4) + " s"};
}

Outcome c12_suites() {
  SuiteConfig cfg;
  cfg.lp_instances = 100000;
  cfg.hls_instances = 100000;
  cfg.truncation_instances = 10000;
  const auto lp = lp_suite(cfg);
  const auto hls = hls_suite(cfg, DistanceKind::Euclidean);
  const auto hls_again = hls_suite(cfg, DistanceKind::Euclidean);
  const auto tr = truncation_suite(cfg);
  const bool ok = lp.violations == 0 && hls.violations == 0 && tr.violations == 0 &&
                  hls.max_ratio == hls_again.max_ratio && std::isfinite(hls.max_ratio) && lp.instances == 100000 &&
                  hls.instances == 100000 && tr.instances == 10000;
  return {ok, "violations lp " + std::to_string(lp.violations) + ", hls " + std::to_string(hls.violations) +
                  ", truncation " + std::to_string(tr.violations) + "; hls max ratio " + format_double(hls.max_ratio) +
                  (hls.max_ratio == hls_again.max_ratio ? " (seed-stable)" : " (unstable)")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      c1_ball_combinatorics, c2_psi_normalization, c3_psi_decay, c4_coulomb_engine,
      c5_gradient,           c6_minimization,      c7_subadditivity, c8_splitting,
      c9_mass_growth,        c10_drop_oracle,      c11_drop_scaling, c12_suites};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  // Criterion 9 consumes the minimizers of 6-8.
  if (selected.count(9)) selected.insert({6, 7, 8});
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
