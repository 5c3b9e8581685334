#include "tfdw/coulomb.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <new>
#include <string>

#include "tfdw/summation.hpp"

namespace tfdw {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count, const Eigen::Vector3i& dims) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (p == nullptr)
    throw SizingError("cannot allocate transform grid " + std::to_string(dims.x()) + "x" +
                      std::to_string(dims.y()) + "x" + std::to_string(dims.z()));
  return FftwBuffer<T>(p);
}

constexpr std::int64_t kMaxTransformCells = std::int64_t{1} << 31;

void check_transform_size(const Eigen::Vector3i& dims) {
  const std::int64_t cells = static_cast<std::int64_t>(dims.x()) * dims.y() * dims.z();
  if (cells <= 0 || cells > kMaxTransformCells)
    throw SizingError("transform grid " + std::to_string(dims.x()) + "x" +
                      std::to_string(dims.y()) + "x" + std::to_string(dims.z()) +
                      " exceeds supported size");
}

}  // namespace

KernelTable::KernelTable(DistanceKind kind, const Eigen::Vector3i& half_widths)
    : kind_(kind), half_(half_widths) {
  if ((half_.array() < 0).any()) throw DomainError("kernel half-width must be nonnegative");
  const Eigen::Vector3i n = 2 * half_ + Eigen::Vector3i::Ones();
  values_.resize(static_cast<Eigen::Index>(n.x()) * n.y() * n.z());
  Eigen::Index idx = 0;
  for (int a = -half_.x(); a <= half_.x(); ++a)
    for (int b = -half_.y(); b <= half_.y(); ++b)
      for (int c = -half_.z(); c <= half_.z(); ++c) values_[idx++] = kernel_value(a, b, c, kind);
}

Eigen::ArrayXd potential_direct(const DensityGrid& rho, DistanceKind kind) {
  const Box& box = rho.box();
  const Eigen::Vector3i d = box.dims();
  const KernelTable kernel(kind, d - Eigen::Vector3i::Ones());
  const auto& r = rho.values();
  Eigen::ArrayXd phi(r.size());
  Eigen::Index out = 0;
  for (int i = 0; i < d.x(); ++i)
    for (int j = 0; j < d.y(); ++j)
      for (int k = 0; k < d.z(); ++k, ++out) {
        CompensatedSum acc;
        Eigen::Index src = 0;
        for (int a = 0; a < d.x(); ++a)
          for (int b = 0; b < d.y(); ++b)
            for (int c = 0; c < d.z(); ++c, ++src) {
              if (r[src] != 0.0) acc.add(r[src] * kernel(i - a, j - b, k - c));
            }
        phi[out] = acc.value();
      }
  return phi;
}

// ---------------------------------------------------------------------------

struct CoulombOperator::Impl {
  Eigen::Vector3i dims;
  Eigen::Vector3i padded;
  DistanceKind kind;
  std::size_t real_count = 0;
  std::size_t complex_count = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  FftwBuffer<fftw_complex> kernel_hat;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

CoulombOperator::CoulombOperator(const Eigen::Vector3i& dims, DistanceKind kind)
    : impl_(std::make_unique<Impl>()) {
  if ((dims.array() < 1).any()) throw SizingError("box dimensions must be positive");
  Impl& s = *impl_;
  s.dims = dims;
  s.kind = kind;
  s.padded = 2 * dims;
  check_transform_size(s.padded);
  const Eigen::Vector3i& p = s.padded;
  s.real_count = static_cast<std::size_t>(p.x()) * p.y() * p.z();
  s.complex_count = static_cast<std::size_t>(p.x()) * p.y() * (p.z() / 2 + 1);

  auto real = fftw_buffer<double>(s.real_count, p);
  auto spec = fftw_buffer<fftw_complex>(s.complex_count, p);
  s.kernel_hat = fftw_buffer<fftw_complex>(s.complex_count, p);
  {
    std::lock_guard lock(planner_mutex());
    s.forward = fftw_plan_dft_r2c_3d(p.x(), p.y(), p.z(), real.get(), spec.get(), FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_3d(p.x(), p.y(), p.z(), spec.get(), real.get(), FFTW_ESTIMATE);
  }
  if (!s.forward || !s.backward) throw SizingError("FFT planning failed");

  // Wrapped kernel: offsets in [-(L-1), L-1] map to indices without overlap;
  // the index L (offset +-L) is never reached by in-box pairs and stays 0.
  auto wrap = [](int j, int n) { return j < n ? j : (j > n ? j - 2 * n : 0); };
  std::size_t idx = 0;
  for (int a = 0; a < p.x(); ++a)
    for (int b = 0; b < p.y(); ++b)
      for (int c = 0; c < p.z(); ++c, ++idx) {
        const bool unused = a == dims.x() || b == dims.y() || c == dims.z();
        real[idx] = unused ? 0.0
                           : kernel_value(wrap(a, dims.x()), wrap(b, dims.y()),
                                          wrap(c, dims.z()), kind);
      }
  fftw_execute_dft_r2c(s.forward, real.get(), s.kernel_hat.get());
}

CoulombOperator::~CoulombOperator() = default;
CoulombOperator::CoulombOperator(CoulombOperator&&) noexcept = default;
CoulombOperator& CoulombOperator::operator=(CoulombOperator&&) noexcept = default;

const Eigen::Vector3i& CoulombOperator::dims() const { return impl_->dims; }
const Eigen::Vector3i& CoulombOperator::padded_dims() const { return impl_->padded; }
DistanceKind CoulombOperator::kind() const { return impl_->kind; }

Eigen::ArrayXd CoulombOperator::potential(const Eigen::ArrayXd& rho) const {
  const Impl& s = *impl_;
  const Eigen::Vector3i& d = s.dims;
  const Eigen::Vector3i& p = s.padded;
  if (rho.size() != static_cast<Eigen::Index>(d.x()) * d.y() * d.z())
    throw SizingError("density size does not match operator box");

  auto real = fftw_buffer<double>(s.real_count, p);
  auto spec = fftw_buffer<fftw_complex>(s.complex_count, p);
  std::fill(real.get(), real.get() + s.real_count, 0.0);
  Eigen::Index src = 0;
  for (int i = 0; i < d.x(); ++i)
    for (int j = 0; j < d.y(); ++j) {
      double* row = real.get() + (static_cast<std::size_t>(i) * p.y() + j) * p.z();
      for (int k = 0; k < d.z(); ++k) row[k] = rho[src++];
    }
  fftw_execute_dft_r2c(s.forward, real.get(), spec.get());
  for (std::size_t n = 0; n < s.complex_count; ++n) {
    const double ar = spec[n][0], ai = spec[n][1];
    const double br = s.kernel_hat[n][0], bi = s.kernel_hat[n][1];
    spec[n][0] = ar * br - ai * bi;
    spec[n][1] = ar * bi + ai * br;
  }
  fftw_execute_dft_c2r(s.backward, spec.get(), real.get());

  const double scale = 1.0 / static_cast<double>(s.real_count);
  Eigen::ArrayXd phi(rho.size());
  Eigen::Index out = 0;
  for (int i = 0; i < d.x(); ++i)
    for (int j = 0; j < d.y(); ++j) {
      const double* row = real.get() + (static_cast<std::size_t>(i) * p.y() + j) * p.z();
      for (int k = 0; k < d.z(); ++k) phi[out++] = row[k] * scale;
    }
  return phi;
}

Eigen::ArrayXd potential_fast(const DensityGrid& rho, DistanceKind kind) {
  const CoulombOperator op(rho.box().dims(), kind);
  return op.potential(rho.values());
}

double pairing_with_potential(const Eigen::ArrayXd& f_sq, const Eigen::ArrayXd& phi_g) {
  if (f_sq.size() != phi_g.size()) throw DomainError("pairing of mismatched grids");
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < f_sq.size(); ++i) acc.add(f_sq[i] * phi_g[i]);
  return acc.value();
}

double pairing(const DensityGrid& f_sq, const DensityGrid& g_sq, DistanceKind kind) {
  if (!(f_sq.box() == g_sq.box())) throw DomainError("pairing requires densities on a common box");
  constexpr Eigen::Index kDirectLimit = 512;
  const Eigen::ArrayXd phi = g_sq.size() <= kDirectLimit ? potential_direct(g_sq, kind)
                                                         : potential_fast(g_sq, kind);
  return pairing_with_potential(f_sq.values(), phi);
}

// ---------------------------------------------------------------------------

int next_smooth_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (const int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

struct EvenCoulombOperator::Impl {
  int half = 0;
  int period_half = 0;  // M; the even extension has period 2M per axis
  std::size_t count = 0;
  fftw_plan plan = nullptr;
  Eigen::ArrayXd kernel_hat;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
  }
};

EvenCoulombOperator::EvenCoulombOperator(int half_width, DistanceKind kind)
    : impl_(std::make_unique<Impl>()) {
  if (half_width < 0) throw SizingError("negative half-width");
  Impl& s = *impl_;
  s.half = half_width;
  s.period_half = next_smooth_size(std::max(2 * half_width, 1));
  const int n = s.period_half + 1;
  check_transform_size(Eigen::Vector3i::Constant(2 * s.period_half));
  s.count = static_cast<std::size_t>(n) * n * n;
  auto buf = fftw_buffer<double>(s.count, Eigen::Vector3i::Constant(n));
  {
    std::lock_guard lock(planner_mutex());
    s.plan = fftw_plan_r2r_3d(n, n, n, buf.get(), buf.get(), FFTW_REDFT00, FFTW_REDFT00,
                              FFTW_REDFT00, FFTW_ESTIMATE);
  }
  if (!s.plan) throw SizingError("DCT planning failed");
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) buf[idx++] = kernel_value(a, b, c, kind);
  fftw_execute_r2r(s.plan, buf.get(), buf.get());
  s.kernel_hat = Eigen::Map<Eigen::ArrayXd>(buf.get(), static_cast<Eigen::Index>(s.count));
}

EvenCoulombOperator::~EvenCoulombOperator() = default;
EvenCoulombOperator::EvenCoulombOperator(EvenCoulombOperator&&) noexcept = default;
EvenCoulombOperator& EvenCoulombOperator::operator=(EvenCoulombOperator&&) noexcept = default;

int EvenCoulombOperator::half_width() const { return impl_->half; }
int EvenCoulombOperator::transform_size() const { return impl_->period_half + 1; }

Eigen::ArrayXd EvenCoulombOperator::potential(const Eigen::ArrayXd& octant) const {
  const Impl& s = *impl_;
  const int h = s.half + 1;
  const int n = s.period_half + 1;
  if (octant.size() != static_cast<Eigen::Index>(h) * h * h)
    throw SizingError("octant size does not match operator half-width");
  auto buf = fftw_buffer<double>(s.count, Eigen::Vector3i::Constant(n));
  std::fill(buf.get(), buf.get() + s.count, 0.0);
  Eigen::Index src = 0;
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b)
      for (int c = 0; c < h; ++c) buf[(static_cast<std::size_t>(a) * n + b) * n + c] = octant[src++];
  fftw_execute_r2r(s.plan, buf.get(), buf.get());
  for (std::size_t i = 0; i < s.count; ++i) buf[i] *= s.kernel_hat[static_cast<Eigen::Index>(i)];
  fftw_execute_r2r(s.plan, buf.get(), buf.get());
  const double period = 2.0 * s.period_half;
  const double scale = 1.0 / (period * period * period);
  Eigen::ArrayXd phi(octant.size());
  Eigen::Index out = 0;
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b)
      for (int c = 0; c < h; ++c)
        phi[out++] = buf[(static_cast<std::size_t>(a) * n + b) * n + c] * scale;
  return phi;
}

double EvenCoulombOperator::self_pairing(const Eigen::ArrayXd& octant) const {
  const Eigen::ArrayXd phi = potential(octant);
  const int h = impl_->half + 1;
  CompensatedSum acc;
  Eigen::Index idx = 0;
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b)
      for (int c = 0; c < h; ++c, ++idx) {
        const int mult = (a ? 2 : 1) * (b ? 2 : 1) * (c ? 2 : 1);
        acc.add(mult * octant[idx] * phi[idx]);
      }
  return acc.value();
}

}  // namespace tfdw
