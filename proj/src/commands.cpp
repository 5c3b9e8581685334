#include "tfdw/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <map>
#include <thread>

#include "tfdw/csv.hpp"
#include "tfdw/field_io.hpp"
#include "tfdw/liquid_drop.hpp"
#include "tfdw/minimizer.hpp"
#include "tfdw/spreading.hpp"
#include "tfdw/svg_plot.hpp"
#include "tfdw/verify.hpp"

namespace tfdw::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Values from a JSON config file for options that were not given as flags.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto text = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  };
  for (const auto& [key, val] : j.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    if (val.is_array()) {
      std::vector<std::string> items;
      for (const auto& e : val) items.push_back(text(e));
      opt->add_result(items);
    } else {
      opt->add_result(text(val));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

struct Common {
  std::string out_dir;
  std::string config;
  std::string kind = "euclidean";
  std::uint64_t seed = 1;
  int threads = default_threads();
};

void add_common(CLI::App* sub, Common& c, bool with_seed, bool with_threads) {
  sub->add_option("--out", c.out_dir, "Output directory (default runs/<command>)");
  sub->add_option("--config", c.config, "JSON config file; flags override its values");
  sub->add_option("--kind", c.kind, "Coulomb metric")->check(CLI::IsMember({"euclidean", "graph"}));
  if (with_seed) sub->add_option("--seed", c.seed, "Random seed");
  if (with_threads) sub->add_option("--threads", c.threads, "Concurrent independent runs")->check(CLI::PositiveNumber);
}

// Collects outputs and assertion results for one run.
class Run {
 public:
  Run(std::string command, const Common& c, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), out_(out), err_(err) {
    dir_ = c.out_dir.empty() ? fs::path("runs") / command_ : fs::path(c.out_dir);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    manifest_["tool"] = "tfdw";
    manifest_["version"] = TFDW_VERSION;
    manifest_["command"] = command_;
    manifest_["seed"] = c.seed;
    manifest_["config"] = json::object();
    manifest_["outputs"] = json::array();
    manifest_["assertions"] = json::array();
    manifest_["results"] = json::object();
  }

  std::string path(const std::string& name) {
    manifest_["outputs"].push_back(name);
    return (dir_ / name).string();
  }
  json& config() { return manifest_["config"]; }
  json& results() { return manifest_["results"]; }
  std::ostream& out() { return out_; }

  /// Records an assertion; failing ones are printed and make the exit code 1.
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    json a;
    a["name"] = name;
    a["passed"] = ok;
    if (!detail.empty()) a["detail"] = detail;
    manifest_["assertions"].push_back(a);
    if (!ok) {
      ++failures_;
      err_ << "violation: " << name << (detail.empty() ? "" : ": " + detail) << "\n";
    }
  }

  int finish(int code = kOk) {
    if (code == kOk && failures_ > 0) code = kViolation;
    manifest_["exit_code"] = code;
    manifest_["status"] = code == kOk ? "passed" : code == kViolation ? "violations" : "failed";
    std::ofstream m(dir_ / "manifest.json", std::ios::binary);
    m << manifest_.dump(2) << "\n";
    out_ << command_ << ": " << manifest_["status"].get<std::string>() << " (outputs in " << dir_.string()
         << ")\n";
    return code;
  }

 private:
  std::string command_;
  fs::path dir_;
  json manifest_;
  int failures_ = 0;
  std::ostream& out_;
  std::ostream& err_;
};

// ---------------------------------------------------------------------------
// verify-lemmas

struct VerifyOpts {
  Common c;
  int r_max = 30;
  std::int64_t lp = 100000, hls = 100000, trunc = 10000;
  std::string fault = "none";
};

void setup_verify(CLI::App* sub, VerifyOpts& o) {
  add_common(sub, o.c, true, true);
  sub->add_option("--r-max", o.r_max, "Largest ball radius enumerated")->check(CLI::Range(1, 200));
  sub->add_option("--lp-instances", o.lp, "Random l^p monotonicity instances")->check(CLI::NonNegativeNumber);
  sub->add_option("--hls-instances", o.hls, "Random HLS instances per metric")->check(CLI::NonNegativeNumber);
  sub->add_option("--truncation-instances", o.trunc, "Random truncation comparisons")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--inject-fault", o.fault, "Test hook: perturb a closed form")
      ->check(CLI::IsMember({"none", "ball-volume", "sphere-size"}))
      ->group("");
}

int cmd_verify(const VerifyOpts& o, std::ostream& out, std::ostream& err) {
  Run run("verify-lemmas", o.c, out, err);
  const DistanceKind kind = parse_distance_kind(o.c.kind);
  run.config() = {{"kind", o.c.kind},          {"seed", o.c.seed},
                  {"threads", o.c.threads},    {"r-max", o.r_max},
                  {"lp-instances", o.lp},      {"hls-instances", o.hls},
                  {"truncation-instances", o.trunc}, {"inject-fault", o.fault}};

  CsvWriter csv(run.path("lemmas.csv"), kSuiteCsvHeader);
  std::int64_t ball_viol = 0;
  double worst = 1.0;
  for (int R = 1; R <= o.r_max; ++R) {
    const auto s = static_cast<std::int64_t>(sphere(Point::Zero(), R).size());
    const auto b = static_cast<std::int64_t>(ball(Point::Zero(), R).size());
    const std::int64_t fs_ = sphere_size_formula(R) + (o.fault == "sphere-size" ? 1 : 0);
    const std::int64_t fb = ball_volume_formula(R) + (o.fault == "ball-volume" ? 1 : 0);
    worst = std::max({worst, static_cast<double>(s) / fs_, static_cast<double>(b) / fb});
    if (s != fs_) {
      ++ball_viol;
      run.check("sphere size formula 4R^2+2", false,
                "R=" + std::to_string(R) + " enumerated " + std::to_string(s) + " formula " + std::to_string(fs_));
    }
    if (b != fb) {
      ++ball_viol;
      run.check("ball volume formula (4R^3+6R^2+8R+3)/3", false,
                "R=" + std::to_string(R) + " enumerated " + std::to_string(b) + " formula " + std::to_string(fb));
    }
  }
  if (ball_viol == 0) run.check("ball and sphere size formulas", true);
  csv << std::string("ball_formulas") << static_cast<std::int64_t>(o.r_max) << ball_viol << worst
      << static_cast<std::int64_t>(o.c.seed);
  csv.end_row();

  SuiteConfig sc;
  sc.seed = o.c.seed;
  sc.lp_instances = o.lp;
  sc.hls_instances = o.hls;
  sc.truncation_instances = o.trunc;
  sc.threads = o.c.threads;
  for (const SuiteRow& r : run_suites(sc, kind)) {
    csv << r.check << r.instances << r.violations << r.max_ratio << static_cast<std::int64_t>(r.seed);
    csv.end_row();
    std::string detail;
    for (std::int64_t i : r.failed) detail += (detail.empty() ? "instances " : ",") + std::to_string(i);
    if (!detail.empty()) detail += " (seed " + std::to_string(r.seed) + ")";
    run.check(r.check + " zero violations", r.violations == 0, detail);
    run.results()[r.check] = {{"instances", r.instances}, {"violations", r.violations}, {"max_ratio", r.max_ratio}};
    out << "  " << r.check << ": " << r.instances << " instances, " << r.violations << " violations, max ratio "
        << format_double(r.max_ratio) << "\n";
  }
  csv.close();
  return run.finish();
}

// ---------------------------------------------------------------------------
// psi-decay

struct PsiOpts {
  Common c;
  int n_max = 100;
  double mass = 10.0;
};

void setup_psi(CLI::App* sub, PsiOpts& o) {
  add_common(sub, o.c, false, false);
  sub->add_option("--n-max", o.n_max, "Largest spreading index");
  sub->add_option("--mass", o.mass, "Excess mass carried by the spreading field");
}

int cmd_psi(const PsiOpts& o, std::ostream& out, std::ostream& err) {
  if (o.n_max < 2) throw UsageError("--n-max must be >= 2");
  if (!(o.mass > 0.0) || !std::isfinite(o.mass)) throw UsageError("--mass must be positive");
  Run run("psi-decay", o.c, out, err);
  const DistanceKind kind = parse_distance_kind(o.c.kind);
  run.config() = {{"kind", o.c.kind}, {"n-max", o.n_max}, {"mass", o.mass}};

  const auto rows = psi_energy_report(o.n_max, o.mass, kind);
  CsvWriter csv(run.path("psi_decay.csv"), kPsiCsvHeader);
  PlotSpec plot{"Energy terms of the spreading family", "n", "term", true, true, false, {}};
  PlotSeries k{"kinetic", {}, {}}, tf{"tf", {}, {}}, di{"dirac", {}, {}}, co{"coulomb", {}, {}};
  std::int64_t bound_fail = 0;
  for (const PsiRow& r : rows) {
    csv << r.n << r.energy.kinetic << r.energy.tf_term << r.energy.dirac_term << r.energy.coulomb
        << r.energy.total << r.a_over_b << r.e_over_b;
    csv.end_row();
    for (auto* s : {&k, &tf, &di, &co}) s->x.push_back(r.n);
    k.y.push_back(r.energy.kinetic);
    tf.y.push_back(r.energy.tf_term);
    di.y.push_back(r.energy.dirac_term);
    co.y.push_back(r.energy.coulomb);
    if (r.energy.kinetic > kPsiKineticConstant * r.a_over_b * o.mass * (1 + 1e-12)) ++bound_fail;
  }
  csv.close();
  plot.series = {k, tf, di, co};
  save_svg(run.path("psi_decay.svg"), plot);

  if (o.n_max >= 3) {
    const auto mono = check_psi_monotone(rows);
    std::string detail;
    for (const auto& m : mono) detail += (detail.empty() ? "" : "; ") + m;
    run.check("all four terms strictly decreasing for n >= 3", mono.empty(), detail);
  }
  run.check("kinetic <= 3 (a_n/b_n) mass", bound_fail == 0, std::to_string(bound_fail) + " rows exceed");
  const auto small = check_psi_smallness(rows);
  run.results()["final_total"] = rows.back().energy.total;
  run.results()["final_n"] = rows.back().n;
  if (o.n_max >= 100) {
    json notes = json::array();
    for (const auto& s : small) notes.push_back(s);
    run.results()["below_one_percent_at_100"] = small.empty();
    run.results()["smallness_notes"] = notes;
  }
  out << "  n=" << rows.back().n << " total " << format_double(rows.back().energy.total) << "\n";
  return run.finish();
}

// ---------------------------------------------------------------------------
// tfdw and tfdw-scan

struct SolverOpts {
  int box = 12;
  std::string init = "ball_cone";
  std::string init_file;
  int max_iters = 20000;
  double step0 = 0.1, tol = 1e-6, beta = 0.5, c1 = 1e-4;
};

void add_solver(CLI::App* sub, SolverOpts& s) {
  sub->add_option("--box", s.box, "Box half-width L (window [-L, L]^3)");
  sub->add_option("--init", s.init, "Initial field")
      ->check(CLI::IsMember({"ball_cone", "gaussian_like", "random", "file"}));
  sub->add_option("--init-file", s.init_file, "TFDW-FIELD file for --init file");
  sub->add_option("--max-iters", s.max_iters, "Iteration budget");
  sub->add_option("--step0", s.step0, "First trial step");
  sub->add_option("--tol", s.tol, "Constrained residual tolerance");
  sub->add_option("--beta", s.beta, "Backtracking factor");
  sub->add_option("--c1", s.c1, "Armijo constant");
}

MinimizeConfig make_config(const SolverOpts& s, const Common& c, double mass) {
  MinimizeConfig cfg;
  cfg.half_width = s.box;
  cfg.mass = mass;
  cfg.kind = parse_distance_kind(c.kind);
  cfg.init = parse_init_kind(s.init);
  cfg.init_path = s.init_file;
  cfg.seed = c.seed;
  cfg.max_iters = s.max_iters;
  cfg.step0 = s.step0;
  cfg.tol_residual = s.tol;
  cfg.beta = s.beta;
  cfg.armijo_c1 = s.c1;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

json solver_json(const SolverOpts& s) {
  return {{"box", s.box},     {"init", s.init},   {"init-file", s.init_file}, {"max-iters", s.max_iters},
          {"step0", s.step0}, {"tol", s.tol},     {"beta", s.beta},           {"c1", s.c1}};
}

struct TfdwOpts {
  Common c;
  SolverOpts s;
  double mass = 0.0;
  double c0 = 0.0;
};

void setup_tfdw(CLI::App* sub, TfdwOpts& o) {
  add_common(sub, o.c, true, false);
  add_solver(sub, o.s);
  sub->add_option("--mass", o.mass, "Mass constraint sum phi^2 = m (required)");
  sub->add_option("--c0", o.c0, "Mass threshold for the concentration radius (default m/2)");
}

int cmd_tfdw(const TfdwOpts& o, std::ostream& out, std::ostream& err) {
  if (!(o.mass > 0.0)) throw UsageError("--mass is required and must be positive");
  const MinimizeConfig cfg = make_config(o.s, o.c, o.mass);
  const double c0 = o.c0 > 0.0 ? o.c0 : o.mass / 2;
  Run run("tfdw", o.c, out, err);
  json conf = solver_json(o.s);
  conf["mass"] = o.mass;
  conf["c0"] = c0;
  conf["kind"] = o.c.kind;
  conf["seed"] = o.c.seed;
  run.config() = conf;

  MinimizeReport rep;
  try {
    rep = minimize(cfg);
  } catch (const NumericalFailure& e) {
    save_field(run.path("field_last_valid.txt"), e.last_iterate(), cfg.kind);
    err << "numerical failure: " << e.what() << "\n";
    run.results()["error"] = e.what();
    return run.finish(kNumerical);
  }

  CsvWriter traj(run.path("trajectory.csv"), kTrajectoryCsvHeader);
  bool monotone = true;
  for (std::size_t i = 0; i < rep.trajectory.size(); ++i) {
    const auto& t = rep.trajectory[i];
    traj << t.iter << t.energy.total << t.energy.kinetic << t.energy.tf_term << t.energy.dirac_term
         << t.energy.coulomb << t.step << t.residual;
    traj.end_row();
    if (i > 0 && t.energy.total > rep.trajectory[i - 1].energy.total) monotone = false;
  }
  traj.close();
  save_field(run.path("field.txt"), rep.field, cfg.kind);
  CsvWriter prof(run.path("profile.csv"), "r,S");
  for (const auto& [r, s] : rep.s_profile) {
    prof << r << s;
    prof.end_row();
  }
  prof.close();

  const ConcentrationResult conc = concentration_radius(rep.field, c0);
  std::int64_t checked = 0;
  const auto growth_fails = mass_growth_sweep(rep.field, &checked);
  const double drift = std::abs(rep.field.mass() - o.mass);
  const double max_phi = rep.field.values().maxCoeff();

  run.check("converged", rep.termination == Termination::Converged,
            to_string(rep.termination) + " with residual " + format_double(rep.residual));
  run.check("energy trajectory non-increasing", monotone);
  run.check("mass drift <= 1e-10 m", drift <= 1e-10 * o.mass, format_double(drift));

  json& r = run.results();
  r["termination"] = to_string(rep.termination);
  r["iterations"] = rep.iterations;
  r["energy"] = {{"kinetic", rep.energy.kinetic}, {"tf", rep.energy.tf_term}, {"dirac", rep.energy.dirac_term},
                 {"coulomb", rep.energy.coulomb}, {"total", rep.energy.total}};
  r["residual"] = rep.residual;
  r["mass_drift"] = drift;
  r["boundary_mass_fraction"] = rep.boundary_mass_fraction;
  r["max_phi"] = max_phi;
  r["max_phi_within_cap"] = max_phi <= kPointwiseCap + 1e-3;
  r["center"] = {rep.center.x(), rep.center.y(), rep.center.z()};
  r["concentration"] = {{"c0", c0},
                        {"radius", conc.radius ? json(*conc.radius) : json(nullptr)},
                        {"center", {conc.center.x(), conc.center.y(), conc.center.z()}},
                        {"captured", conc.captured},
                        {"doubling_holds", conc.doubling_holds}};
  r["mass_growth"] = {{"pairs_checked", checked}, {"failures", growth_fails.size()}};
  out << "  E = " << format_double(rep.energy.total) << ", " << to_string(rep.termination) << " after "
      << rep.iterations << " iterations, residual " << format_double(rep.residual) << "\n";
  return run.finish();
}

struct ScanOpts {
  Common c;
  SolverOpts s;
  double scan_mass = 0.5;
  std::vector<double> splits{0.1, 0.2, 0.25};
  std::vector<double> masses;
  double mass_min = 0.2, mass_max = 50.0;
  int mass_count = 10;
  int separation = -1;
  std::vector<double> fractions = kDefaultSplitFractions;
};

void setup_scan(CLI::App* sub, ScanOpts& o) {
  add_common(sub, o.c, true, true);
  add_solver(sub, o.s);
  sub->add_option("--scan-mass", o.scan_mass, "Total mass m of the subadditivity scan");
  sub->add_option("--splits", o.splits, "Split masses m1 in (0, m)")->delimiter(',');
  sub->add_option("--masses", o.masses, "Masses for the splitting scan (default: log grid)")->delimiter(',');
  sub->add_option("--mass-min", o.mass_min, "Log grid lower end");
  sub->add_option("--mass-max", o.mass_max, "Log grid upper end");
  sub->add_option("--mass-count", o.mass_count, "Log grid size");
  sub->add_option("--separation", o.separation, "Cluster separation along e1 (default: box half-width)");
  sub->add_option("--fractions", o.fractions, "Split fractions tried for each mass")->delimiter(',');
}

int cmd_scan(const ScanOpts& o, std::ostream& out, std::ostream& err) {
  const MinimizeConfig tmpl = make_config(o.s, o.c, 1.0);
  std::vector<double> masses = o.masses;
  if (masses.empty()) {
    try {
      masses = log_grid(o.mass_min, o.mass_max, o.mass_count);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  for (double m : masses)
    if (!(m > 0.0)) throw UsageError("--masses must be positive");
  for (double m1 : o.splits)
    if (!(m1 > 0.0 && m1 < o.scan_mass)) throw UsageError("--splits must lie in (0, scan-mass)");
  for (double f : o.fractions)
    if (!(f > 0.0 && f < 1.0)) throw UsageError("--fractions must lie in (0, 1)");
  if (o.fractions.empty()) throw UsageError("--fractions must not be empty");
  const int sep = o.separation >= 0 ? o.separation : o.s.box;

  Run run("tfdw-scan", o.c, out, err);
  json conf = solver_json(o.s);
  conf["kind"] = o.c.kind;
  conf["seed"] = o.c.seed;
  conf["threads"] = o.c.threads;
  conf["scan-mass"] = o.scan_mass;
  conf["splits"] = o.splits;
  conf["masses"] = masses;
  conf["separation"] = sep;
  conf["fractions"] = o.fractions;
  run.config() = conf;

  try {
    if (!o.splits.empty()) {
      const auto rows = subadditivity_scan(o.scan_mass, o.splits, tmpl, o.c.threads);
      CsvWriter csv(run.path("subadditivity.csv"), kSubadditivityCsvHeader);
      json gaps = json::array();
      for (const auto& r : rows) {
        csv << r.m1 << r.i_m1 << r.i_rest << r.i_m << r.gap;
        csv.end_row();
        gaps.push_back({{"m1", r.m1}, {"gap", r.gap}, {"positive_beyond_noise", r.gap > 1e-4}});
        out << "  gap(m1=" << format_double(r.m1) << ") = " << format_double(r.gap) << "\n";
      }
      csv.close();
      run.results()["subadditivity"] = gaps;
    }

    CsvWriter csv(run.path("splitting.csv"), kSplittingCsvHeader);
    std::vector<double> adv;
    for (double m : masses) {
      const SplittingRecord r = splitting_advantage(m, sep, tmpl, o.fractions, o.c.threads);
      csv << r.m << r.separation << r.e_single << r.e_split_best << r.best_fraction << r.sum_of_parts
          << r.advantage;
      csv.end_row();
      adv.push_back(r.advantage);
      out << "  m=" << format_double(m) << " advantage " << format_double(r.advantage) << "\n";
    }
    csv.close();
    PlotSpec plot{"Splitting advantage E_single - E_split", "mass m", "advantage", true, false, true, {}};
    plot.series.push_back({"advantage", masses, adv});
    save_svg(run.path("phase.svg"), plot);

    json cross = json::array();
    int last = 0;
    for (std::size_t i = 0; i < adv.size(); ++i) {
      const int s = (adv[i] > 0) - (adv[i] < 0);
      if (s == 0) continue;
      if (last != 0 && s != last) cross.push_back({masses[i - 1], masses[i]});
      last = s;
    }
    run.results()["advantage_sign_changes"] = sign_changes(adv);
    run.results()["crossover_intervals"] = cross;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    run.results()["error"] = e.what();
    return run.finish(kNumerical);
  }
  return run.finish();
}

// ---------------------------------------------------------------------------
// drop and drop-scaling

struct DropOpts {
  std::string schedule = "anneal";
  double t0 = 1.0, cooling = 0.999;
  int sweeps = 200, restarts = 4;
  bool allow_disconnected = false;
};

void add_drop(CLI::App* sub, DropOpts& d) {
  sub->add_option("--schedule", d.schedule, "Search schedule")->check(CLI::IsMember({"anneal", "greedy"}));
  sub->add_option("--t0", d.t0, "Initial anneal temperature");
  sub->add_option("--cooling", d.cooling, "Geometric cooling factor per sweep");
  sub->add_option("--sweeps", d.sweeps, "Anneal sweeps of V proposals");
  sub->add_option("--restarts", d.restarts, "Greedy restarts");
  sub->add_flag("--allow-disconnected", d.allow_disconnected,
                "Let iterates disconnect (the result is still the best connected one)");
}

DropSchedule make_schedule(const DropOpts& d, std::uint64_t seed) {
  if (d.schedule == "greedy") {
    if (d.restarts < 1) throw UsageError("--restarts must be >= 1");
    return GreedySchedule{d.restarts, seed};
  }
  if (!(d.t0 >= 0.0) || !(d.cooling > 0.0 && d.cooling <= 1.0) || d.sweeps < 0)
    throw UsageError("invalid anneal schedule");
  return AnnealSchedule{d.t0, d.cooling, d.sweeps, seed};
}

json drop_json(const DropOpts& d) {
  return {{"schedule", d.schedule}, {"t0", d.t0},           {"cooling", d.cooling},
          {"sweeps", d.sweeps},     {"restarts", d.restarts}, {"allow-disconnected", d.allow_disconnected}};
}

struct DropCmdOpts {
  Common c;
  DropOpts d;
  int volume = 0;
};

void setup_drop(CLI::App* sub, DropCmdOpts& o) {
  add_common(sub, o.c, true, false);
  add_drop(sub, o.d);
  sub->add_option("--volume", o.volume, "Number of cells V (required)");
}

int cmd_drop(const DropCmdOpts& o, std::ostream& out, std::ostream& err) {
  if (o.volume < 1) throw UsageError("--volume is required and must be >= 1");
  const DropSchedule sched = make_schedule(o.d, o.c.seed);
  const DistanceKind kind = parse_distance_kind(o.c.kind);
  Run run("drop", o.c, out, err);
  json conf = drop_json(o.d);
  conf["volume"] = o.volume;
  conf["kind"] = o.c.kind;
  conf["seed"] = o.c.seed;
  run.config() = conf;

  const DropResult r = minimize_drop(o.volume, kind, sched, {!o.d.allow_disconnected});
  save_drop(run.path("drop.txt"), r.cells, kind);
  const double chain = coulomb_chain_bound(r.cells, kind);
  CsvWriter csv(run.path("drop.csv"), "V,perimeter,coulomb,total,connected,chain_bound,chain_holds");
  csv << o.volume << r.energy.perimeter << r.energy.coulomb << r.energy.total << r.connected << chain
      << (r.energy.coulomb >= chain);
  csv.end_row();
  csv.close();
  CsvWriter pc(run.path("pair_counts.csv"), "t,A");
  const auto A = pair_count_profile(r.cells, kind);
  for (std::size_t t = 0; t < A.size(); ++t) {
    pc << static_cast<std::int64_t>(t + 1) << A[t];
    pc.end_row();
  }
  pc.close();

  run.check("result connected", r.connected);
  run.check("coulomb >= pair-count chain bound", r.energy.coulomb >= chain,
            format_double(r.energy.coulomb) + " vs " + format_double(chain));
  json& res = run.results();
  res["perimeter"] = r.energy.perimeter;
  res["coulomb"] = r.energy.coulomb;
  res["total"] = r.energy.total;
  res["proposals"] = r.proposals;
  res["accepted"] = r.accepted;
  res["diameter"] = diameter(r.cells);
  if (o.volume <= 6) {
    const OracleResult orc = exact_enumeration_oracle(o.volume, kind);
    run.check("matches exact enumeration", std::abs(orc.connected_optimum - r.energy.total) <= 1e-9,
              "search " + format_double(r.energy.total) + " oracle " + format_double(orc.connected_optimum));
    res["oracle"] = {{"connected_optimum", orc.connected_optimum},
                     {"shapes", orc.shapes},
                     {"separation_infimum", orc.separation_infimum},
                     {"infimum_attained", orc.infimum_attained}};
  }
  out << "  V=" << o.volume << " total " << format_double(r.energy.total) << " (perimeter " << r.energy.perimeter
      << ", coulomb " << format_double(r.energy.coulomb) << ")\n";
  return run.finish();
}

struct ScalingOpts {
  Common c;
  DropOpts d;
  std::vector<int> volumes{16, 32, 64, 128, 256, 512};
  std::vector<std::string> pairs{"32:32"};
  double slack = 0.5;
  double ratio_bound = 3.0;
  int separation = 1000000;
};

void setup_scaling(CLI::App* sub, ScalingOpts& o) {
  add_common(sub, o.c, true, true);
  add_drop(sub, o.d);
  sub->add_option("--volumes", o.volumes, "Volumes, ascending")->delimiter(',');
  sub->add_option("--pairs", o.pairs, "Subadditivity samples V0:V1")->delimiter(',');
  sub->add_option("--slack", o.slack, "Search slack in E(V0+V1) <= E(V0)+E(V1)+slack");
  sub->add_option("--ratio-bound", o.ratio_bound, "Largest allowed max/min ratio of the scaling columns");
  sub->add_option("--separation", o.separation, "Offset of the union competitor");
}

int cmd_scaling(const ScalingOpts& o, std::ostream& out, std::ostream& err) {
  if (o.volumes.empty()) throw UsageError("--volumes must not be empty");
  if (!std::is_sorted(o.volumes.begin(), o.volumes.end())) throw UsageError("--volumes must be ascending");
  for (int v : o.volumes)
    if (v < 2) throw UsageError("--volumes must be >= 2");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& p : o.pairs) {
    int a = 0, b = 0;
    char colon = 0;
    std::istringstream ss(p);
    if (!(ss >> a >> colon >> b) || colon != ':' || a < 1 || b < 1 || !(ss >> std::ws).eof())
      throw UsageError("bad --pairs entry '" + p + "' (expected V0:V1)");
    pairs.emplace_back(a, b);
  }
  const DropSchedule sched = make_schedule(o.d, o.c.seed);
  const DistanceKind kind = parse_distance_kind(o.c.kind);
  Run run("drop-scaling", o.c, out, err);
  json conf = drop_json(o.d);
  conf["kind"] = o.c.kind;
  conf["seed"] = o.c.seed;
  conf["threads"] = o.c.threads;
  conf["volumes"] = o.volumes;
  conf["pairs"] = o.pairs;
  conf["slack"] = o.slack;
  conf["ratio-bound"] = o.ratio_bound;
  conf["separation"] = o.separation;
  run.config() = conf;

  const DropSearchOptions opts{!o.d.allow_disconnected};
  const auto rows = scaling_study(o.volumes, kind, sched, opts, o.c.threads);
  fs::create_directories(fs::path(run.path("shapes")));
  CsvWriter csv(run.path("scaling.csv"), kScalingCsvHeader);
  std::vector<double> vs, tv, cv;
  bool connected = true, chain = true;
  for (const auto& r : rows) {
    csv << r.volume << r.energy.perimeter << r.energy.coulomb << r.energy.total << r.total_per_volume
        << r.coulomb_per_vlogv << r.connected << r.chain_bound << r.chain_holds;
    csv.end_row();
    save_drop(run.path("shapes/V" + std::to_string(r.volume) + ".txt"), r.cells, kind);
    vs.push_back(r.volume);
    tv.push_back(r.total_per_volume);
    cv.push_back(r.coulomb_per_vlogv);
    connected = connected && r.connected;
    chain = chain && r.chain_holds;
    out << "  V=" << r.volume << " total/V " << format_double(r.total_per_volume) << " coulomb/(V log V) "
        << format_double(r.coulomb_per_vlogv) << "\n";
  }
  csv.close();
  PlotSpec plot{"Liquid-drop scaling", "volume V", "ratio", true, false, false, {}};
  plot.series.push_back({"total / V", vs, tv});
  plot.series.push_back({"coulomb / (V log V)", vs, cv});
  save_svg(run.path("scaling.svg"), plot);

  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return std::pair<double, double>{*lo, *hi / *lo};
  };
  const auto [tv_min, tv_ratio] = spread(tv);
  const auto [cv_min, cv_ratio] = spread(cv);
  run.check("total/V bounded (max/min <= bound)", tv_ratio <= o.ratio_bound, format_double(tv_ratio));
  run.check("coulomb/(V log V) bounded below (min > 0)", cv_min > 0.0, format_double(cv_min));
  run.check("coulomb/(V log V) max/min <= bound", cv_ratio <= o.ratio_bound, format_double(cv_ratio));
  run.check("all shapes connected", connected);
  run.check("pair-count chain bound holds on every shape", chain);
  run.results()["total_over_V_ratio"] = tv_ratio;
  run.results()["coulomb_over_VlogV_ratio"] = cv_ratio;
  (void)tv_min;

  if (!pairs.empty()) {
    // Reuse study rows; solve any volume not in the list.
    std::map<int, DropResult> solved;
    auto get = [&](int v) -> const DropResult& {
      auto it = solved.find(v);
      if (it != solved.end()) return it->second;
      DropResult r;
      const auto row = std::find_if(rows.begin(), rows.end(), [&](const ScalingRow& x) { return x.volume == v; });
      if (row != rows.end()) {
        r.cells = row->cells;
        r.energy = row->energy;
        r.connected = row->connected;
      } else {
        r = minimize_drop(v, kind, sched, opts);
      }
      return solved.emplace(v, std::move(r)).first->second;
    };
    CsvWriter sub(run.path("drop_subadditivity.csv"), "V0,V1,E_V0,E_V1,E_search,E_union,best,holds");
    json items = json::array();
    for (const auto& [a, b] : pairs) {
      const DropResult& r0 = get(a);
      const DropResult& r1 = get(b);
      const DropResult& joint = get(a + b);
      const SubadditivityCheck chk = drop_subadditivity(r0, r1, joint, o.separation, o.slack, kind);
      sub << a << b << chk.e0 << chk.e1 << chk.e_search << chk.e_union << chk.best << chk.holds;
      sub.end_row();
      run.check("E(" + std::to_string(a + b) + ") <= E(" + std::to_string(a) + ")+E(" + std::to_string(b) +
                    ")+slack",
                chk.holds,
                "search " + format_double(chk.e_search) + ", union " + format_double(chk.e_union) + ", parts " +
                    format_double(chk.e0 + chk.e1));
      items.push_back({{"V0", a}, {"V1", b}, {"search", chk.e_search}, {"union", chk.e_union},
                       {"parts", chk.e0 + chk.e1}, {"search_alone_holds", chk.e_search <= chk.e0 + chk.e1 + o.slack}});
    }
    sub.close();
    run.results()["subadditivity"] = items;
  }
  return run.finish();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lattice TFDW and liquid-drop experiments", "tfdw"};
  app.set_version_flag("--version", std::string(TFDW_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  VerifyOpts vo;
  PsiOpts po;
  TfdwOpts to;
  ScanOpts so;
  DropCmdOpts dopt;
  ScalingOpts sco;
  CLI::App* s_verify = app.add_subcommand("verify-lemmas", "Ball formulas and randomized inequality suites");
  CLI::App* s_psi = app.add_subcommand("psi-decay", "Energy decay of the spreading family");
  CLI::App* s_tfdw = app.add_subcommand("tfdw", "Minimize the TFDW energy at one mass");
  CLI::App* s_scan = app.add_subcommand("tfdw-scan", "Subadditivity and splitting scans");
  CLI::App* s_drop = app.add_subcommand("drop", "Minimize the liquid-drop energy at one volume");
  CLI::App* s_scaling = app.add_subcommand("drop-scaling", "Liquid-drop scaling study");
  setup_verify(s_verify, vo);
  setup_psi(s_psi, po);
  setup_tfdw(s_tfdw, to);
  setup_scan(s_scan, so);
  setup_drop(s_drop, dopt);
  setup_scaling(s_scaling, sco);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  CLI::App* active = nullptr;
  try {
    app.parse(rev);
    for (CLI::App* sub : app.get_subcommands()) active = sub;
    const std::string cfg = active == s_verify ? vo.c.config
                            : active == s_psi  ? po.c.config
                            : active == s_tfdw ? to.c.config
                            : active == s_scan ? so.c.config
                            : active == s_drop ? dopt.c.config
                                               : sco.c.config;
    if (!cfg.empty()) apply_config(active, cfg);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << TFDW_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << (active ? active->help() : app.help());
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (active == s_verify) return cmd_verify(vo, out, err);
    if (active == s_psi) return cmd_psi(po, out, err);
    if (active == s_tfdw) return cmd_tfdw(to, out, err);
    if (active == s_scan) return cmd_scan(so, out, err);
    if (active == s_drop) return cmd_drop(dopt, out, err);
    return cmd_scaling(sco, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace tfdw::cli
