#pragma once

// The cone-shaped spreading family
//
//   psi_n(x) = (n - |x|_1 + 1) d   for |x|_1 <= n,   0 otherwise,
//
// normalized so that sum psi_n^2 equals a prescribed excess mass, and the
// counting sequences a_n, b_n, c_n, d_n, e_n that control its energy.

#include <cstdint>
#include <string>
#include <vector>

#include "tfdw/energy.hpp"
#include "tfdw/lattice.hpp"

namespace tfdw {

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
  std::string str() const;
};

/// a_n = (2/3)(2n^3 + 9n^2 + 16n + 9), closed form.
Rational seq_a(int n);
/// b_n = (2n^5 + 10n^4 + 30n^3 + 50n^2 + 43n + 15) / 15, closed form.
Rational seq_b(int n);
/// sum_{l=1}^{n+1} (4 l^2 + 2).
std::int64_t seq_a_direct(int n);
/// sum_{l=1}^{n} (n - l + 1)^2 (4 l^2 + 2) + (n + 1)^2.
std::int64_t seq_b_direct(int n);
/// sum_{l=1}^{n} (n - l + 1)^2 (4 l^2 + 2)^{3/5}.
double seq_c(int n);
/// sum_{l=1}^{n} (n - l + 1)^2 (4 l^2 + 2)^{5/6}.
double seq_e(int n);
/// (n + 1)^2.
std::int64_t seq_d(int n);
/// (1/3)(n + 1)^3 (4 n^2 + 2)^{3/5}.
double seq_c_bound(int n);
/// (1/3)(n + 1)^3 (4 n^2 + 2)^{5/6}.
double seq_e_bound(int n);

struct SpreadFamilyParams {
  int n = 1;
  double excess_mass = 1.0;

  /// Throws DomainError unless n >= 1 and excess_mass > 0.
  void validate() const;
  /// Cone slope with d^2 b_n = excess_mass.
  double d() const;
};

/// psi_n on the cube [-(n+1), n+1]^3.
FieldGrid build_psi(const SpreadFamilyParams& params);
/// psi_n on a caller-supplied box; SizingError unless it contains B_{n+1}.
FieldGrid build_psi(const SpreadFamilyParams& params, const Box& box);

struct PsiRow {
  int n = 0;
  EnergyBreakdown energy;
  double a_over_b = 0.0;
  double e_over_b = 0.0;
};

/// Energy of psi_n for a single n.  Local terms are summed shell by shell
/// (psi is constant on graph spheres); the Coulomb term uses the
/// even-symmetric transform on the octant.
PsiRow psi_energy(const SpreadFamilyParams& params, DistanceKind kind);

/// Rows for n = 1..n_max in increasing n.  DomainError if n_max < 2.
std::vector<PsiRow> psi_energy_report(int n_max, double excess_mass, DistanceKind kind);

inline constexpr const char* kPsiCsvHeader = "n,kinetic,tf,dirac,coulomb,total,a_over_b,e_over_b";

/// Strict decrease of each term from n = 3 on; one message per violation.
std::vector<std::string> check_psi_monotone(const std::vector<PsiRow>& rows);
/// Each term at n = 100 below 1% of its n = 1 value (needs both rows).
std::vector<std::string> check_psi_smallness(const std::vector<PsiRow>& rows);
/// Both of the above.
std::vector<std::string> check_psi_decay(const std::vector<PsiRow>& rows);

/// Kinetic energy bound K(psi_n) <= 3 (a_n / b_n) excess_mass; every edge
/// joins consecutive shells and there are at most 3 (4 l^2 + 2) edges
/// entering shell l.
inline constexpr double kPsiKineticConstant = 3.0;

}  // namespace tfdw
