#pragma once

// Randomized checks of the functional inequalities used by the analysis:
// l^p norm monotonicity, a discrete Hardy-Littlewood-Sobolev ratio, and the
// effect of capping a field at (4/5)^{3/2}.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tfdw/energy.hpp"
#include "tfdw/lattice.hpp"

namespace tfdw {

/// (sum |u|^p)^{1/p}.
double lp_norm(const std::vector<double>& u, double p);

struct LpRecord {
  double lhs = 0.0;  // ||u||_q
  double rhs = 0.0;  // ||u||_p
  bool holds = false;
};

/// ||u||_q <= ||u||_p + 1e-12.  DomainError unless q >= p >= 1.
LpRecord lp_monotonicity_check(const std::vector<double>& u, double p, double q);

using LatticePointN = std::array<int, 4>;  // unused trailing coordinates are 0

struct HlsInstance {
  int dim = 3;
  double alpha = 2.0;
  double r = 1.2;
  double s = 1.2;
  std::vector<std::pair<LatticePointN, double>> f;
  std::vector<std::pair<LatticePointN, double>> g;
  std::uint64_t seed = 0;

  bool admissible() const;
};

/// sum_{x != y} f(x) g(y) / |x - y|^{N - alpha} divided by ||f||_r ||g||_s.
/// DomainError for an inadmissible instance or zero f or g.
double hls_ratio(const HlsInstance& inst, DistanceKind kind = DistanceKind::Euclidean);

struct TruncationRecord {
  double e_full = 0.0;
  double e_truncated = 0.0;
  double f_sum_full = 0.0;
  double f_sum_truncated = 0.0;
  double kinetic_full = 0.0;
  double kinetic_truncated = 0.0;
  double coulomb_full = 0.0;
  double coulomb_truncated = 0.0;
  bool cap_binds = false;
  bool lipschitz = false;  // |phi1(x) - phi1(y)| <= |phi(x) - phi(y)| on every edge
  bool holds = false;      // all monotonicities, F strict when the cap binds
};

/// min(phi, (4/5)^{3/2}) pointwise.
FieldGrid cap_field(const FieldGrid& phi);

TruncationRecord truncation_comparison(const FieldGrid& phi, DistanceKind kind = DistanceKind::Euclidean);

struct SuiteRow {
  std::string check;
  std::int64_t instances = 0;
  std::int64_t violations = 0;
  double max_ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> failed;  // first violating instance indices
};
inline constexpr const char* kSuiteCsvHeader = "check,instances,violations,max_ratio,seed";

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::int64_t lp_instances = 100000;
  std::int64_t hls_instances = 100000;
  std::int64_t truncation_instances = 10000;
  int threads = 1;
};

/// Random u with 1..50 entries in [0, 1], p in [1, 10], q in [p, 10].
std::vector<double> random_lp_vector(std::uint64_t seed, std::int64_t index, double* p, double* q);
/// N = 3, alpha = 2; f and g on random sub-boxes of a 6^3 window, values in
/// [0, 1]; (1/r, 1/s) uniform on the admissible part of (0, 1)^2.
HlsInstance random_hls_instance(std::uint64_t seed, std::int64_t index);
/// 6^3 box; each cell above the cap with probability 1/10.
FieldGrid random_truncation_field(std::uint64_t seed, std::int64_t index);

SuiteRow lp_suite(const SuiteConfig& cfg);
SuiteRow hls_suite(const SuiteConfig& cfg, DistanceKind kind);
SuiteRow truncation_suite(const SuiteConfig& cfg, DistanceKind kind = DistanceKind::Euclidean);

/// lp, HLS under both metrics, truncation with the given Coulomb metric.
std::vector<SuiteRow> run_suites(const SuiteConfig& cfg, DistanceKind kind = DistanceKind::Euclidean);

}  // namespace tfdw
