#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace sc_obstacle::kernels::detail {

double rb_sweep_scalar(const RbSweepArgs& a) {
  const std::size_t n = a.x.size();
  double max_change = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double gs = (a.wl[k] * a.nb[k] + a.wr[k] * a.nb[k + 1] + a.b[k]) * a.inv_d[k];
    const double old = a.x[k];
    const double next = std::clamp(old + a.omega * (gs - old), a.lo, a.hi);
    a.x[k] = next;
    max_change = std::max(max_change, std::abs(next - old));
  }
  return max_change;
}

void ell_apply_scalar(const EllView& op, std::span<const double> x, std::span<double> y) {
  const std::size_t n = op.rows;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < op.width; ++s) {
      const std::size_t at = s * n + i;
      acc += op.val[at] * x[static_cast<std::size_t>(op.col[at])];
    }
    y[i] = (acc - op.diag[i] * x[i]) * op.scale[i];
  }
}

double log_dist2_sum_scalar(const double p[3], std::span<const double> ys_x,
                            std::span<const double> ys_y, std::span<const double> ys_z,
                            std::span<const double> q, double floor) {
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double dx = p[0] - ys_x[j];
    const double dy = p[1] - ys_y[j];
    const double dz = p[2] - ys_z[j];
    const double d2 = std::max(dx * dx + dy * dy + dz * dz, floor);
    sum += q[j] * std::log(d2);
  }
  return sum;
}

}  // namespace sc_obstacle::kernels::detail
