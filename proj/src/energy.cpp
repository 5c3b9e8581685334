#include "tfdw/energy.hpp"

#include <cmath>
#include <string>

#include "tfdw/summation.hpp"

namespace tfdw {

namespace {

constexpr Eigen::Index kDirectCoulombLimit = 512;

// Fractional powers of values that are nonnegative up to round-off.
inline double cpow(double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; }

}  // namespace

FieldGrid::FieldGrid(const Box& box) : grid_(box) {}

FieldGrid::FieldGrid(const Box& box, Eigen::ArrayXd values) : grid_(box) { assign(std::move(values)); }

void FieldGrid::assign(Eigen::ArrayXd values) {
  if (values.size() != grid_.size())
    throw SizingError("field value count " + std::to_string(values.size()) +
                      " does not match box size " + std::to_string(grid_.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw DomainError("field values must be finite and nonnegative (cell " +
                        std::to_string(i) + ")");
    if (values[i] == 0.0) values[i] = 0.0;
  }
  grid_.values() = std::move(values);
  refresh_mass();
}

void FieldGrid::set(const Point& p, double value) {
  if (!std::isfinite(value) || value < 0.0)
    throw DomainError("field values must be finite and nonnegative");
  grid_.at(p) = value == 0.0 ? 0.0 : value;
  refresh_mass();
}

void FieldGrid::scale(double factor) {
  if (!std::isfinite(factor) || factor < 0.0) throw DomainError("field scale must be nonnegative");
  grid_.values() *= factor;
  refresh_mass();
}

void FieldGrid::refresh_mass() {
  CompensatedSum acc;
  for (const double v : grid_.values()) acc.add(v * v);
  mass_ = acc.value();
}

DensityGrid FieldGrid::density() const { return DensityGrid(box(), values().square()); }

FieldGrid FieldGrid::embedded(const Box& target) const {
  if (!target.contains(box().lo) || !target.contains(box().hi))
    throw SizingError("target box does not contain the field's box");
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(target.size());
  for (Eigen::Index i = 0; i < size(); ++i) out[target.index(box().point(i))] = values()[i];
  return FieldGrid(target, std::move(out));
}

FieldGrid FieldGrid::translated(const Point& shift) const {
  return FieldGrid(box().translated(shift), values());
}

double F_local(double s) {
  if (!(s >= 0.0)) throw DomainError("F_local requires s >= 0");
  return std::pow(s, 5.0 / 3.0) - std::pow(s, 4.0 / 3.0);
}

EnergyBreakdown local_terms(const RealGrid& phi) {
  CompensatedSum tf, dirac;
  for (const double v : phi.values()) {
    const double s = v * v;
    tf.add(cpow(s, 5.0 / 3.0));
    dirac.add(cpow(s, 4.0 / 3.0));
  }
  return EnergyBreakdown::from_terms(edge_energy(phi), tf.value(), dirac.value(), 0.0);
}

TfdwFunctional::TfdwFunctional(const Box& box, DistanceKind kind) : box_(box), kind_(kind) {
  if (box.size() > kDirectCoulombLimit) fast_.emplace(box.dims(), kind);
}

Eigen::ArrayXd TfdwFunctional::potential(const Eigen::ArrayXd& rho) const {
  if (fast_) return fast_->potential(rho);
  return potential_direct(DensityGrid(box_, rho), kind_);
}

TfdwFunctional::Evaluation TfdwFunctional::evaluate(const Eigen::ArrayXd& phi) const {
  const RealGrid grid(box_, phi);
  Evaluation out{local_terms(grid), {}};
  const Eigen::ArrayXd rho = phi.square();
  out.potential = potential(rho);
  EnergyBreakdown& e = out.energy;
  e.coulomb = pairing_with_potential(rho, out.potential);
  e.total = e.kinetic + e.tf_term - e.dirac_term + e.coulomb;
  return out;
}

EnergyBreakdown TfdwFunctional::energy(const Eigen::ArrayXd& phi) const {
  return evaluate(phi).energy;
}

Eigen::ArrayXd TfdwFunctional::gradient(const Eigen::ArrayXd& phi) const {
  return gradient(phi, potential(phi.square()));
}

Eigen::ArrayXd TfdwFunctional::gradient(const Eigen::ArrayXd& phi,
                                        const Eigen::ArrayXd& phi_pot) const {
  if (phi.size() != box_.size() || phi_pot.size() != box_.size())
    throw SizingError("field size does not match functional box");
  const RealGrid grid(box_, phi);
  Eigen::ArrayXd g = 2.0 * laplacian_field(grid);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double v = phi[i];
    g[i] += (10.0 / 3.0) * cpow(v, 7.0 / 3.0) - (8.0 / 3.0) * cpow(v, 5.0 / 3.0) +
            4.0 * v * phi_pot[i];
  }
  return g;
}

EnergyBreakdown energy(const FieldGrid& phi, DistanceKind kind) {
  return TfdwFunctional(phi.box(), kind).energy(phi.values());
}

RealGrid el_gradient(const FieldGrid& phi, DistanceKind kind) {
  return RealGrid(phi.box(), TfdwFunctional(phi.box(), kind).gradient(phi.values()));
}

double constrained_residual(const FieldGrid& phi, const Eigen::ArrayXd& g) {
  const double m = phi.mass();
  if (!(m > 0.0)) throw DomainError("constrained residual undefined for zero mass");
  if (g.size() != phi.size()) throw SizingError("gradient size does not match field");
  const double lambda = (g * phi.values()).sum() / m;
  return (g - lambda * phi.values()).matrix().norm();
}

}  // namespace tfdw
