#pragma once

// Mass-constrained minimization of the TFDW energy on a centered box, with
// the scans and concentration diagnostics built on top of it.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfdw/energy.hpp"
#include "tfdw/lattice.hpp"

namespace tfdw {

enum class InitKind { BallCone, GaussianLike, Random, File };

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& text);

struct MinimizeConfig {
  int half_width = 12;  // box [-L, L]^3
  double mass = 0.5;
  DistanceKind kind = DistanceKind::Euclidean;
  InitKind init = InitKind::BallCone;
  std::uint64_t seed = 1;
  std::string init_path;
  int max_iters = 20000;
  double step0 = 0.1;
  double tol_residual = 1e-6;
  double beta = 0.5;
  double armijo_c1 = 1e-4;

  /// Throws DomainError on an invalid combination.
  void validate() const;
  Box box() const { return Box::centered(half_width); }
};

enum class Termination { Converged, MaxIters, Stalled };
std::string to_string(Termination t);

struct TrajectoryPoint {
  int iter = 0;
  EnergyBreakdown energy;
  double step = 0.0;
  double residual = 0.0;
};

struct MinimizeReport {
  FieldGrid field;
  std::vector<TrajectoryPoint> trajectory;
  EnergyBreakdown energy;
  double residual = 0.0;
  double boundary_mass_fraction = 0.0;
  Point center = Point::Zero();                            // mass argmax
  std::vector<std::pair<int, double>> s_profile;           // (r, S(r)) about center
  std::optional<int> r0;                                   // for C0 = m / 2
  Termination termination = Termination::MaxIters;
  int iterations = 0;
};

inline constexpr const char* kTrajectoryCsvHeader = "iter,total,kinetic,tf,dirac,coulomb,step,residual";

/// Thrown when the energy stops being finite; carries the last good iterate.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, FieldGrid last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const FieldGrid& last_iterate() const { return last_; }

 private:
  FieldGrid last_;
};

/// phi * sqrt(m / sum phi^2).  DomainError for a zero field or m <= 0.
FieldGrid projection_mass(const FieldGrid& phi, double m);

/// Starting field for cfg (already projected to mass cfg.mass).
FieldGrid initial_field(const MinimizeConfig& cfg);

/// Projected descent: phi <- P_m(max(0, phi - t g_T)) where g_T is the
/// gradient minus its component along phi.  The first trial step of each
/// iteration is the Barzilai-Borwein length (step0 on the first iteration),
/// then Armijo backtracking by beta.
MinimizeReport minimize(const MinimizeConfig& cfg);

/// Cells of the box whose graph distance to the box exterior is 1.
double boundary_mass_fraction(const FieldGrid& phi);

/// First cell of maximal phi in lexicographic order.
Point mass_argmax(const FieldGrid& phi);

/// S(r) = sum of phi^2 over B_r(center) for r = 0..r_max.
std::vector<double> mass_profile(const FieldGrid& phi, const Point& center, int r_max);

// ---------------------------------------------------------------------------
// Scans

struct SubadditivityRow {
  double m1 = 0.0;
  double i_m1 = 0.0;
  double i_rest = 0.0;
  double i_m = 0.0;
  double gap = 0.0;
};
inline constexpr const char* kSubadditivityCsvHeader = "m1,I_m1,I_m_minus_m1,I_m,gap_indicator";

/// Gap I(m1) + I(m - m1) - I(m) for each split.  Each distinct mass is
/// minimized once; up to `threads` minimizations run concurrently.
std::vector<SubadditivityRow> subadditivity_scan(double m, const std::vector<double>& splits,
                                                 const MinimizeConfig& tmpl, int threads = 1);

/// Two fields on the union window: phi1 as is and phi2 shifted by sep e1,
/// summed and renormalized to mass m.
FieldGrid place_clusters(const FieldGrid& phi1, const FieldGrid& phi2, int sep, double m);

struct SplittingRecord {
  double m = 0.0;
  int separation = 0;
  double e_single = 0.0;
  double e_split_best = 0.0;
  double best_fraction = 0.0;
  double sum_of_parts = 0.0;
  double advantage = 0.0;
  Termination single_status = Termination::MaxIters;
};
inline constexpr const char* kSplittingCsvHeader =
    "m,separation,E_single,E_split_best,best_fraction,sum_of_parts,advantage_indicator";

inline const std::vector<double> kDefaultSplitFractions = {0.1, 0.2, 0.3, 0.4, 0.5};

SplittingRecord splitting_advantage(double m, int sep, const MinimizeConfig& tmpl,
                                    const std::vector<double>& fractions = kDefaultSplitFractions,
                                    int threads = 1);

/// Minimized fields and energies for each mass in `masses` (in that order);
/// every entry is solved independently from tmpl with its mass replaced.
std::vector<MinimizeReport> minimize_many(const std::vector<double>& masses,
                                          const MinimizeConfig& tmpl, int threads = 1);

/// n masses evenly spaced in log between lo and hi.
std::vector<double> log_grid(double lo, double hi, int n);

/// Number of strict sign changes in a sequence, zeros skipped.
int sign_changes(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Concentration diagnostics

struct MassGrowthRecord {
  int r = 0;
  int R = 0;
  double lhs = 0.0;        // mass of B_{r+1} \ B_{r-1}
  double lhs_union = 0.0;  // mass of B_{r+1} (the set union as literally written)
  double rhs = 0.0;        // S(r) (S(R) - S(r+1)) / (3 (R + r))
  bool holds = false;
  bool holds_union = false;
};

/// Growth inequality about the mass argmax.  DomainError unless R > r + 1 >= 2.
MassGrowthRecord mass_growth_check(const FieldGrid& phi, int r, int R);
/// Same about an explicit center.
MassGrowthRecord mass_growth_check(const FieldGrid& phi, int r, int R, const Point& center);

/// Checks every admissible (r, R) with R up to the largest distance from the
/// argmax to a box cell.  Returns the failing records (empty when all hold).
std::vector<MassGrowthRecord> mass_growth_sweep(const FieldGrid& phi, std::int64_t* checked = nullptr);

struct ConcentrationResult {
  std::optional<int> radius;
  Point center = Point::Zero();
  double captured = 0.0;
  /// m <= 2 * mass of B_{2 R0}(center); only meaningful when radius is set.
  bool doubling_holds = false;
  double doubling_mass = 0.0;
};

/// Smallest R for which some ball B_R(x), x in the box, holds mass >= C0.
ConcentrationResult concentration_radius(const FieldGrid& phi, double c0);

}  // namespace tfdw
