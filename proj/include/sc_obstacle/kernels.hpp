#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64 builds, an AVX2/FMA version. The active table is chosen once at
// startup from CPUID and can be overridden with SC_OBSTACLE_SIMD=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace sc_obstacle::kernels {

enum class Backend { Scalar, Avx2 };

// One colour of a red-black projected SOR sweep on a three-point stencil.
//
//   x[k] <- clamp(x[k] + omega * ((wl[k]*nb[k] + wr[k]*nb[k+1] + b[k]) * inv_d[k] - x[k]), lo, hi)
//
// nb holds the other colour, offset so that nb[k] and nb[k+1] are the left and
// right neighbours of x[k]; nb.size() == x.size() + 1. Returns max |change|.
struct RbSweepArgs {
  std::span<double> x;
  std::span<const double> nb;
  std::span<const double> wl;
  std::span<const double> wr;
  std::span<const double> inv_d;
  std::span<const double> b;
  double omega;
  double lo;
  double hi;
};

// Padded ELLPACK operator y[i] = (sum_s val[s*n+i] * x[col[s*n+i]] - diag[i]*x[i]) * scale[i].
// With cotangent weights, diag = row sums and scale = 1/mass this is the lumped Laplacian.
struct EllView {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::span<const int> col;
  std::span<const double> val;
  std::span<const double> diag;
  std::span<const double> scale;
};

struct KernelTable {
  Backend backend;
  double (*rb_sweep)(const RbSweepArgs&);
  void (*ell_apply)(const EllView&, std::span<const double> x, std::span<double> y);
  // sum_j q[j] * log(|p - y_j|^2) over SoA point coordinates; pairs closer than
  // sqrt(floor) are clamped to log(floor).
  double (*log_dist2_sum)(const double p[3], std::span<const double> ys_x,
                          std::span<const double> ys_y, std::span<const double> ys_z,
                          std::span<const double> q, double floor);
};

const KernelTable& scalar_table() noexcept;
// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;

// Table used by the solvers.
const KernelTable& active() noexcept;
void set_backend(Backend backend);
Backend detected_backend() noexcept;
std::string_view backend_name(Backend backend) noexcept;

}  // namespace sc_obstacle::kernels
