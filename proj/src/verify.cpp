#include "tfdw/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "tfdw/coulomb.hpp"
#include "tfdw/summation.hpp"

namespace tfdw {

namespace {

// Independent stream per (suite seed, instance index).
std::mt19937_64 instance_rng(std::uint64_t seed, std::int64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

struct Tally {
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  std::vector<std::int64_t> failed;
};

constexpr std::size_t kKeptFailures = 20;

template <typename Fn>
Tally reduce_instances(std::int64_t n, int threads, Fn&& one) {
  const int workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
  std::vector<Tally> parts(workers);
  auto run = [&](int w) {
    for (std::int64_t i = w; i < n; i += workers) {
      const auto [ok, ratio] = one(i);
      if (!ok) {
        ++parts[w].violations;
        if (parts[w].failed.size() < kKeptFailures) parts[w].failed.push_back(i);
      }
      parts[w].max_ratio = std::max(parts[w].max_ratio, ratio);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  Tally total;
  for (const Tally& t : parts) {
    total.violations += t.violations;
    total.max_ratio = std::max(total.max_ratio, t.max_ratio);
    total.failed.insert(total.failed.end(), t.failed.begin(), t.failed.end());
  }
  std::sort(total.failed.begin(), total.failed.end());
  if (total.failed.size() > kKeptFailures) total.failed.resize(kKeptFailures);
  return total;
}

double norm_of(const std::vector<std::pair<LatticePointN, double>>& h, double p) {
  CompensatedSum acc;
  for (const auto& [x, v] : h) acc.add(std::pow(std::abs(v), p));
  return std::pow(acc.value(), 1.0 / p);
}

}  // namespace

double lp_norm(const std::vector<double>& u, double p) {
  if (!(p >= 1.0)) throw DomainError("l^p norm needs p >= 1");
  CompensatedSum acc;
  for (double v : u) acc.add(std::pow(std::abs(v), p));
  return std::pow(acc.value(), 1.0 / p);
}

LpRecord lp_monotonicity_check(const std::vector<double>& u, double p, double q) {
  if (!(p >= 1.0) || !(q >= p)) throw DomainError("need q >= p >= 1");
  LpRecord r;
  r.lhs = lp_norm(u, q);
  r.rhs = lp_norm(u, p);
  r.holds = r.lhs <= r.rhs + 1e-12;
  return r;
}

bool HlsInstance::admissible() const {
  return dim >= 2 && dim <= 4 && alpha > 0.0 && alpha < dim && r > 1.0 && s > 1.0 &&
         std::isfinite(r) && std::isfinite(s) &&
         1.0 / r + 1.0 / s + (dim - alpha) / dim >= 2.0 - 1e-15;
}

double hls_ratio(const HlsInstance& inst, DistanceKind kind) {
  if (!inst.admissible()) throw DomainError("HLS instance is not admissible");
  const double nf = norm_of(inst.f, inst.r), ng = norm_of(inst.g, inst.s);
  if (!(nf > 0.0) || !(ng > 0.0)) throw DomainError("HLS ratio needs nonzero f and g");
  const double expo = inst.dim - inst.alpha;
  CompensatedSum acc;
  for (const auto& [x, fx] : inst.f)
    for (const auto& [y, gy] : inst.g) {
      double d2 = 0.0, d1 = 0.0;
      for (int k = 0; k < inst.dim; ++k) {
        const double t = x[k] - y[k];
        d2 += t * t;
        d1 += std::abs(t);
      }
      if (d1 == 0.0) continue;
      const double d = kind == DistanceKind::Graph ? d1 : std::sqrt(d2);
      acc.add(fx * gy / (expo == 1.0 ? d : std::pow(d, expo)));
    }
  return acc.value() / (nf * ng);
}

FieldGrid cap_field(const FieldGrid& phi) {
  return FieldGrid(phi.box(), phi.values().min(kPointwiseCap));
}

TruncationRecord truncation_comparison(const FieldGrid& phi, DistanceKind kind) {
  const FieldGrid capped = cap_field(phi);
  const EnergyBreakdown full = energy(phi, kind), cut = energy(capped, kind);
  TruncationRecord t;
  t.e_full = full.total;
  t.e_truncated = cut.total;
  t.f_sum_full = full.tf_term - full.dirac_term;
  t.f_sum_truncated = cut.tf_term - cut.dirac_term;
  t.kinetic_full = full.kinetic;
  t.kinetic_truncated = cut.kinetic;
  t.coulomb_full = full.coulomb;
  t.coulomb_truncated = cut.coulomb;
  t.cap_binds = (phi.values() > kPointwiseCap).any();

  t.lipschitz = true;
  const Box& b = phi.box();
  for (std::int64_t i = 0; i < b.size() && t.lipschitz; ++i) {
    const Point p = b.point(i);
    for (const Point& q : neighbors(p))
      if (std::abs(capped(p) - capped(q)) > std::abs(phi(p) - phi(q))) {
        t.lipschitz = false;
        break;
      }
  }
  // Terms are recomputed sums, so "equal" is up to round-off.
  const double tol = 1e-12 * (1.0 + std::abs(t.f_sum_full) + full.kinetic + full.coulomb);
  const bool f_ok = t.cap_binds ? t.f_sum_truncated < t.f_sum_full
                                : t.f_sum_truncated <= t.f_sum_full + tol;
  t.holds = f_ok && t.kinetic_truncated <= t.kinetic_full + tol &&
            t.coulomb_truncated <= t.coulomb_full + tol && t.lipschitz;
  return t;
}

std::vector<double> random_lp_vector(std::uint64_t seed, std::int64_t index, double* p, double* q) {
  auto rng = instance_rng(seed, index, 1);
  std::uniform_int_distribution<int> len(1, 50);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> u(len(rng));
  for (double& v : u) v = u01(rng);
  const double pp = 1.0 + 9.0 * u01(rng);
  const double qq = pp + (10.0 - pp) * u01(rng);
  if (p) *p = pp;
  if (q) *q = qq;
  return u;
}

HlsInstance random_hls_instance(std::uint64_t seed, std::int64_t index) {
  auto rng = instance_rng(seed, index, 2);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> coord(0, 5);
  HlsInstance inst;
  inst.dim = 3;
  inst.alpha = 2.0;
  inst.seed = seed;
  // 1/r + 1/s >= 5/3 with both in (0, 1): rejection from the unit square.
  double a, b;
  do {
    a = u01(rng);
    b = u01(rng);
  } while (a + b < 5.0 / 3.0 || a >= 1.0 || b >= 1.0 || a <= 0.0 || b <= 0.0);
  inst.r = 1.0 / a;
  inst.s = 1.0 / b;
  auto fill = [&](std::vector<std::pair<LatticePointN, double>>& h) {
    LatticePointN lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
      int x = coord(rng), y = coord(rng);
      lo[k] = std::min(x, y);
      hi[k] = std::max(x, y);
    }
    for (int i = lo[0]; i <= hi[0]; ++i)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int k = lo[2]; k <= hi[2]; ++k) h.push_back({{i, j, k, 0}, u01(rng)});
  };
  fill(inst.f);
  fill(inst.g);
  // Keep both functions nonzero.
  if (std::all_of(inst.f.begin(), inst.f.end(), [](const auto& e) { return e.second == 0.0; }))
    inst.f.front().second = 1.0;
  if (std::all_of(inst.g.begin(), inst.g.end(), [](const auto& e) { return e.second == 0.0; }))
    inst.g.front().second = 1.0;
  return inst;
}

FieldGrid random_truncation_field(std::uint64_t seed, std::int64_t index) {
  auto rng = instance_rng(seed, index, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Box box(Point::Zero(), Point::Constant(5));
  Eigen::ArrayXd v(box.size());
  for (auto& x : v) {
    const bool above = u01(rng) < 0.1;
    x = above ? kPointwiseCap * (1.0 + u01(rng)) : kPointwiseCap * u01(rng);
  }
  return FieldGrid(box, std::move(v));
}

SuiteRow lp_suite(const SuiteConfig& cfg) {
  const Tally t = reduce_instances(cfg.lp_instances, cfg.threads, [&](std::int64_t i) {
    double p, q;
    const auto u = random_lp_vector(cfg.seed, i, &p, &q);
    const LpRecord r = lp_monotonicity_check(u, p, q);
    return std::pair<bool, double>{r.holds, r.lhs / r.rhs};
  });
  return {"lp_monotonicity", cfg.lp_instances, t.violations, t.max_ratio, cfg.seed, t.failed};
}

SuiteRow hls_suite(const SuiteConfig& cfg, DistanceKind kind) {
  const Tally t = reduce_instances(cfg.hls_instances, cfg.threads, [&](std::int64_t i) {
    const double r = hls_ratio(random_hls_instance(cfg.seed, i), kind);
    return std::pair<bool, double>{std::isfinite(r) && r >= 0.0, r};
  });
  return {"hls_" + to_string(kind), cfg.hls_instances, t.violations, t.max_ratio, cfg.seed, t.failed};
}

SuiteRow truncation_suite(const SuiteConfig& cfg, DistanceKind kind) {
  const Tally t = reduce_instances(cfg.truncation_instances, cfg.threads, [&](std::int64_t i) {
    const TruncationRecord r = truncation_comparison(random_truncation_field(cfg.seed, i), kind);
    const double ratio = r.coulomb_full > 0.0 ? r.coulomb_truncated / r.coulomb_full : 0.0;
    return std::pair<bool, double>{r.holds, ratio};
  });
  return {"truncation", cfg.truncation_instances, t.violations, t.max_ratio, cfg.seed, t.failed};
}

std::vector<SuiteRow> run_suites(const SuiteConfig& cfg, DistanceKind kind) {
  return {lp_suite(cfg), hls_suite(cfg, DistanceKind::Euclidean), hls_suite(cfg, DistanceKind::Graph),
          truncation_suite(cfg, kind)};
}

}  // namespace tfdw
