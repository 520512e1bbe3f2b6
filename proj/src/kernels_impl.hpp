#pragma once

#include "sc_obstacle/kernels.hpp"

namespace sc_obstacle::kernels::detail {

double rb_sweep_scalar(const RbSweepArgs& a);
void ell_apply_scalar(const EllView& op, std::span<const double> x, std::span<double> y);
double log_dist2_sum_scalar(const double p[3], std::span<const double> ys_x,
                            std::span<const double> ys_y, std::span<const double> ys_z,
                            std::span<const double> q, double floor);

#if defined(SC_OBSTACLE_BUILD_AVX2)
double rb_sweep_avx2(const RbSweepArgs& a);
void ell_apply_avx2(const EllView& op, std::span<const double> x, std::span<double> y);
double log_dist2_sum_avx2(const double p[3], std::span<const double> ys_x,
                          std::span<const double> ys_y, std::span<const double> ys_z,
                          std::span<const double> q, double floor);
#endif

}  // namespace sc_obstacle::kernels::detail
