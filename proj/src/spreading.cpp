#include "tfdw/spreading.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "tfdw/coulomb.hpp"
#include "tfdw/summation.hpp"

namespace tfdw {

namespace {

void require_index(int n) {
  if (n < 1) throw DomainError("sequence index must be >= 1, got " + std::to_string(n));
}

// Edges between the spheres of radius R - 1 and R: each point of S_R has one
// inward neighbour per nonzero coordinate.
std::int64_t shell_edges(std::int64_t r) {
  return 6 + 24 * (r - 1) + 12 * (r - 1) * (r - 2);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw DomainError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational seq_a(int n) {
  require_index(n);
  const std::int64_t k = n;
  return Rational(2 * (2 * k * k * k + 9 * k * k + 16 * k + 9), 3);
}

Rational seq_b(int n) {
  require_index(n);
  const std::int64_t k = n;
  const std::int64_t k2 = k * k;
  return Rational(2 * k2 * k2 * k + 10 * k2 * k2 + 30 * k2 * k + 50 * k2 + 43 * k + 15, 15);
}

std::int64_t seq_a_direct(int n) {
  require_index(n);
  std::int64_t acc = 0;
  for (std::int64_t l = 1; l <= n + 1; ++l) acc += 4 * l * l + 2;
  return acc;
}

std::int64_t seq_b_direct(int n) {
  require_index(n);
  std::int64_t acc = 0;
  for (std::int64_t l = 1; l <= n; ++l) {
    const std::int64_t v = n - l + 1;
    acc += v * v * (4 * l * l + 2);
  }
  return acc + seq_d(n);
}

std::int64_t seq_d(int n) {
  require_index(n);
  return static_cast<std::int64_t>(n + 1) * (n + 1);
}

double seq_c(int n) {
  require_index(n);
  CompensatedSum acc;
  for (int l = 1; l <= n; ++l) {
    const double v = n - l + 1;
    acc.add(v * v * std::pow(4.0 * l * l + 2.0, 0.6));
  }
  return acc.value();
}

double seq_e(int n) {
  require_index(n);
  CompensatedSum acc;
  for (int l = 1; l <= n; ++l) {
    const double v = n - l + 1;
    acc.add(v * v * std::pow(4.0 * l * l + 2.0, 5.0 / 6.0));
  }
  return acc.value();
}

double seq_c_bound(int n) {
  require_index(n);
  return std::pow(n + 1.0, 3) * std::pow(4.0 * n * n + 2.0, 0.6) / 3.0;
}

double seq_e_bound(int n) {
  require_index(n);
  return std::pow(n + 1.0, 3) * std::pow(4.0 * n * n + 2.0, 5.0 / 6.0) / 3.0;
}

void SpreadFamilyParams::validate() const {
  require_index(n);
  if (!(excess_mass > 0.0) || !std::isfinite(excess_mass))
    throw DomainError("excess mass must be positive and finite");
}

double SpreadFamilyParams::d() const {
  validate();
  return std::sqrt(excess_mass / seq_b(n).to_double());
}

FieldGrid build_psi(const SpreadFamilyParams& params) {
  return build_psi(params, Box::centered(params.n + 1));
}

FieldGrid build_psi(const SpreadFamilyParams& params, const Box& box) {
  params.validate();
  const int n = params.n;
  if ((box.lo.array() > -(n + 1)).any() || (box.hi.array() < n + 1).any())
    throw SizingError("box must contain the ball of radius " + std::to_string(n + 1));
  const double d = params.d();
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(box.size());
  for (std::int64_t i = 0; i < box.size(); ++i) {
    const int l = box.point(i).cwiseAbs().sum();
    if (l <= n) values[i] = (n - l + 1) * d;
  }
  return FieldGrid(box, std::move(values));
}

PsiRow psi_energy(const SpreadFamilyParams& params, DistanceKind kind) {
  params.validate();
  const int n = params.n;
  const double d = params.d();
  const double d2 = d * d;

  CompensatedSum kinetic, tf, dirac;
  for (int l = 0; l <= n; ++l) {
    const double v = (n - l + 1) * d;
    const double count = static_cast<double>(sphere_size_formula(l));
    tf.add(count * std::pow(v, 10.0 / 3.0));
    dirac.add(count * std::pow(v, 8.0 / 3.0));
    kinetic.add(static_cast<double>(shell_edges(l + 1)) * d2);
  }

  const EvenCoulombOperator op(n, kind);
  const int w = n + 1;
  Eigen::ArrayXd octant = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(w) * w * w);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j)
      for (int k = 0; i + j + k <= n; ++k) {
        const double v = (n - i - j - k + 1) * d;
        octant[(static_cast<Eigen::Index>(i) * w + j) * w + k] = v * v;
      }

  PsiRow row;
  row.n = n;
  row.energy = EnergyBreakdown::from_terms(kinetic.value(), tf.value(), dirac.value(),
                                           op.self_pairing(octant));
  const double b = seq_b(n).to_double();
  row.a_over_b = seq_a(n).to_double() / b;
  row.e_over_b = seq_e(n) / b;
  return row;
}

std::vector<PsiRow> psi_energy_report(int n_max, double excess_mass, DistanceKind kind) {
  if (n_max < 2) throw DomainError("psi report needs n_max >= 2");
  std::vector<PsiRow> rows;
  rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) rows.push_back(psi_energy({n, excess_mass}, kind));
  return rows;
}

namespace {

constexpr const char* kTermNames[] = {"kinetic", "tf", "dirac", "coulomb"};

std::array<double, 4> terms(const EnergyBreakdown& e) {
  return {e.kinetic, e.tf_term, e.dirac_term, e.coulomb};
}

}  // namespace

std::vector<std::string> check_psi_monotone(const std::vector<PsiRow>& rows) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n < 3) continue;
    const auto now = terms(rows[i].energy);
    const auto prev = terms(rows[i - 1].energy);
    for (int t = 0; t < 4; ++t)
      if (!(now[t] < prev[t]))
        out.push_back(std::string(kTermNames[t]) + " not decreasing at n=" + std::to_string(rows[i].n));
  }
  return out;
}

std::vector<std::string> check_psi_smallness(const std::vector<PsiRow>& rows) {
  const PsiRow* first = nullptr;
  const PsiRow* last = nullptr;
  for (const PsiRow& r : rows) {
    if (r.n == 1) first = &r;
    if (r.n == 100) last = &r;
  }
  if (!first || !last) return {"smallness check needs rows n=1 and n=100"};
  std::vector<std::string> out;
  const auto a = terms(first->energy), b = terms(last->energy);
  for (int t = 0; t < 4; ++t)
    if (!(b[t] < 1e-2 * a[t]))
      out.push_back(std::string(kTermNames[t]) + " at n=100 is " + std::to_string(b[t] / a[t] * 100.0) +
                    "% of its n=1 value (limit 1%)");
  return out;
}

std::vector<std::string> check_psi_decay(const std::vector<PsiRow>& rows) {
  std::vector<std::string> out = check_psi_monotone(rows);
  for (auto& s : check_psi_smallness(rows)) out.push_back(std::move(s));
  return out;
}

}  // namespace tfdw
