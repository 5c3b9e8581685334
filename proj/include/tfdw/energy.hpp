#pragma once

// The lattice TFDW functional
//
//   E(phi) = sum_y |grad phi|^2(y) + phi^{10/3}(y) - phi^{8/3}(y)
//            + sum_{x != y} phi^2(x) phi^2(y) / |x - y|
//
// for nonnegative fields on a finite box (zero outside).  The kinetic term
// counts each unordered lattice edge once with weight 1.

#include <Eigen/Core>

#include <optional>

#include "tfdw/coulomb.hpp"
#include "tfdw/lattice.hpp"

namespace tfdw {

/// Nonnegative field on a box with a cached mass sum phi^2.
class FieldGrid {
 public:
  FieldGrid() = default;
  explicit FieldGrid(const Box& box);
  /// Throws DomainError on negative or non-finite entries; -0 becomes +0.
  FieldGrid(const Box& box, Eigen::ArrayXd values);

  const Box& box() const { return grid_.box(); }
  const Eigen::ArrayXd& values() const { return grid_.values(); }
  const RealGrid& grid() const { return grid_; }
  double mass() const { return mass_; }
  double operator()(const Point& p) const { return grid_(p); }
  Eigen::Index size() const { return grid_.size(); }

  void set(const Point& p, double value);
  void assign(Eigen::ArrayXd values);
  void scale(double factor);

  /// phi^2 on the same box.
  DensityGrid density() const;

  /// Copy onto a larger box containing this one.
  FieldGrid embedded(const Box& target) const;
  /// Copy with every cell moved by shift.
  FieldGrid translated(const Point& shift) const;

 private:
  void refresh_mass();

  RealGrid grid_;
  double mass_ = 0.0;
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double tf_term = 0.0;
  double dirac_term = 0.0;
  double coulomb = 0.0;
  double total = 0.0;

  static EnergyBreakdown from_terms(double kinetic, double tf, double dirac, double coulomb) {
    return {kinetic, tf, dirac, coulomb, kinetic + tf - dirac + coulomb};
  }
};

/// F(s) = s^{5/3} - s^{4/3}; minimum -(4/5)^4 / 5 at s = (4/5)^3.
double F_local(double s);

inline constexpr double kFMinimizer = 0.512;                // (4/5)^3
inline constexpr double kFMinimum = -0.08192;               // -(4/5)^4 / 5
inline const double kPointwiseCap = std::pow(0.8, 1.5);     // (4/5)^{3/2}

/// Energy and its first variation on one fixed box; reuses the FFT setup.
class TfdwFunctional {
 public:
  TfdwFunctional(const Box& box, DistanceKind kind);

  const Box& box() const { return box_; }
  DistanceKind kind() const { return kind_; }

  struct Evaluation {
    EnergyBreakdown energy;
    Eigen::ArrayXd potential;  // Phi[phi^2]
  };

  EnergyBreakdown energy(const Eigen::ArrayXd& phi) const;
  /// Energy plus the potential it used, for reuse by gradient().
  Evaluation evaluate(const Eigen::ArrayXd& phi) const;
  /// g = 2 Delta phi + (10/3) phi^{7/3} - (8/3) phi^{5/3} + 4 phi Phi[phi^2].
  Eigen::ArrayXd gradient(const Eigen::ArrayXd& phi) const;
  Eigen::ArrayXd gradient(const Eigen::ArrayXd& phi, const Eigen::ArrayXd& potential) const;
  /// Potential of a density on this box.
  Eigen::ArrayXd potential(const Eigen::ArrayXd& rho) const;

 private:
  Box box_;
  DistanceKind kind_;
  std::optional<CoulombOperator> fast_;
};

EnergyBreakdown energy(const FieldGrid& phi, DistanceKind kind);

/// Unconstrained first variation of the energy, on phi's box.
RealGrid el_gradient(const FieldGrid& phi, DistanceKind kind);

/// || g - (<g, phi> / m) phi ||_2; throws DomainError when m = 0.
double constrained_residual(const FieldGrid& phi, const Eigen::ArrayXd& g);

/// Kinetic, Thomas-Fermi and Dirac terms only (no Coulomb).
EnergyBreakdown local_terms(const RealGrid& phi);

}  // namespace tfdw
