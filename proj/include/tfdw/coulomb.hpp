#pragma once

// Free-space Coulomb sums on the lattice.  All pairings range over ordered
// pairs x != y:  D(f, g) = sum_{x != y} f^2(x) g^2(y) / |x - y|, so each
// unordered pair is counted twice.  The kernel is stored with K(0) = 0,
// which encodes the x != y exclusion inside convolutions.

#include <Eigen/Core>

#include <memory>

#include "tfdw/lattice.hpp"

namespace tfdw {

using DensityGrid = RealGrid;

/// 1 / |v| for v != 0, 0 at the origin.
inline double kernel_value(int v1, int v2, int v3, DistanceKind kind) {
  if (v1 == 0 && v2 == 0 && v3 == 0) return 0.0;
  return 1.0 / offset_length(v1, v2, v3, kind);
}

/// Kernel sampled on the offsets [-W1, W1] x [-W2, W2] x [-W3, W3].
class KernelTable {
 public:
  KernelTable(DistanceKind kind, const Eigen::Vector3i& half_widths);
  static KernelTable cube(DistanceKind kind, int half_width) {
    return KernelTable(kind, Eigen::Vector3i::Constant(half_width));
  }

  double operator()(int v1, int v2, int v3) const {
    return values_[((static_cast<Eigen::Index>(v1 + half_.x()) * (2 * half_.y() + 1)) +
                    (v2 + half_.y())) *
                       (2 * half_.z() + 1) +
                   (v3 + half_.z())];
  }
  DistanceKind kind() const { return kind_; }
  const Eigen::Vector3i& half_widths() const { return half_; }

 private:
  DistanceKind kind_;
  Eigen::Vector3i half_;
  Eigen::ArrayXd values_;
};

/// Phi(x) = sum_{y != x} rho(y) / |x - y| by direct double sum with
/// compensated accumulation in lexicographic order.  O(N^2).
Eigen::ArrayXd potential_direct(const DensityGrid& rho, DistanceKind kind);

/// Same potential by zero-padded real-to-complex FFT convolution on a
/// (2 L1) x (2 L2) x (2 L3) grid.  O(N log N).
Eigen::ArrayXd potential_fast(const DensityGrid& rho, DistanceKind kind);

/// Reusable FFT convolution for one box shape and kernel.  Immutable after
/// construction; potential() may be called concurrently.
class CoulombOperator {
 public:
  CoulombOperator(const Eigen::Vector3i& dims, DistanceKind kind);
  ~CoulombOperator();
  CoulombOperator(CoulombOperator&&) noexcept;
  CoulombOperator& operator=(CoulombOperator&&) noexcept;
  CoulombOperator(const CoulombOperator&) = delete;
  CoulombOperator& operator=(const CoulombOperator&) = delete;

  /// rho holds dims.prod() values in lexicographic order.
  Eigen::ArrayXd potential(const Eigen::ArrayXd& rho) const;

  const Eigen::Vector3i& dims() const;
  const Eigen::Vector3i& padded_dims() const;
  DistanceKind kind() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// D(f, g) = sum_x f_sq(x) Phi_g(x).  Boxes must match.
double pairing(const DensityGrid& f_sq, const DensityGrid& g_sq, DistanceKind kind);

/// Pairing of a density with a precomputed potential on the same box.
double pairing_with_potential(const Eigen::ArrayXd& f_sq, const Eigen::ArrayXd& phi_g);

/// Convolution for densities on the centered box [-n, n]^3 that are even in
/// each coordinate.  Works on the nonnegative octant only, using type-I
/// discrete cosine transforms of size (M + 1)^3 with M >= 2n.
class EvenCoulombOperator {
 public:
  EvenCoulombOperator(int half_width, DistanceKind kind);
  ~EvenCoulombOperator();
  EvenCoulombOperator(EvenCoulombOperator&&) noexcept;
  EvenCoulombOperator& operator=(EvenCoulombOperator&&) noexcept;
  EvenCoulombOperator(const EvenCoulombOperator&) = delete;
  EvenCoulombOperator& operator=(const EvenCoulombOperator&) = delete;

  /// octant holds (n+1)^3 values rho(i, j, k), i, j, k in [0, n], lexicographic.
  Eigen::ArrayXd potential(const Eigen::ArrayXd& octant) const;

  /// sum over the full box of rho * Phi, from octant data.
  double self_pairing(const Eigen::ArrayXd& octant) const;

  int half_width() const;
  int transform_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Smallest m >= n whose prime factors are all <= 7.
int next_smooth_size(int n);

}  // namespace tfdw
