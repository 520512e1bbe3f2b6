// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace sc_obstacle::kernels::detail {

namespace {

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Natural log of positive normal doubles. The mantissa is reduced to
// [sqrt(1/2), sqrt(2)) and log(m) = 2 atanh((m-1)/(m+1)) is summed to the
// t^23 term, which is below half an ulp for |t| <= 0.1716.
inline __m256d log_pd(__m256d d) {
  const __m256i bits = _mm256_castpd_si256(d);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  // Biased exponent as a double via the 2^52 magic-number trick.
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)),
                            _mm256_set1_pd(4503599627370496.0 + 1023.0));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d u = _mm256_mul_pd(t, t);
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 21.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 19.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 17.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, u, _mm256_set1_pd(1.0 / 3.0));
  poly = _mm256_fmadd_pd(poly, u, one);
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(t, t), poly);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.6931471805599453), log_m);
}

}  // namespace

double rb_sweep_avx2(const RbSweepArgs& a) {
  const std::size_t n = a.x.size();
  const __m256d omega = _mm256_set1_pd(a.omega);
  const __m256d lo = _mm256_set1_pd(a.lo);
  const __m256d hi = _mm256_set1_pd(a.hi);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d left = _mm256_loadu_pd(&a.nb[k]);
    const __m256d right = _mm256_loadu_pd(&a.nb[k + 1]);
    __m256d gs = _mm256_mul_pd(_mm256_loadu_pd(&a.wl[k]), left);
    gs = _mm256_fmadd_pd(_mm256_loadu_pd(&a.wr[k]), right, gs);
    gs = _mm256_add_pd(gs, _mm256_loadu_pd(&a.b[k]));
    gs = _mm256_mul_pd(gs, _mm256_loadu_pd(&a.inv_d[k]));
    const __m256d old = _mm256_loadu_pd(&a.x[k]);
    __m256d next = _mm256_fmadd_pd(omega, _mm256_sub_pd(gs, old), old);
    next = _mm256_min_pd(_mm256_max_pd(next, lo), hi);
    _mm256_storeu_pd(&a.x[k], next);
    vmax = _mm256_max_pd(vmax, _mm256_andnot_pd(sign, _mm256_sub_pd(next, old)));
  }
  double max_change = hmax(vmax);
  for (; k < n; ++k) {
    const double gs = (a.wl[k] * a.nb[k] + a.wr[k] * a.nb[k + 1] + a.b[k]) * a.inv_d[k];
    const double old = a.x[k];
    const double next = std::clamp(old + a.omega * (gs - old), a.lo, a.hi);
    a.x[k] = next;
    max_change = std::max(max_change, std::abs(next - old));
  }
  return max_change;
}

void ell_apply_avx2(const EllView& op, std::span<const double> x, std::span<double> y) {
  const std::size_t n = op.rows;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t s = 0; s < op.width; ++s) {
      const std::size_t at = s * n + i;
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&op.col[at]));
      const __m256d xv = _mm256_i32gather_pd(x.data(), idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(&op.val[at]), xv, acc);
    }
    const __m256d self = _mm256_mul_pd(_mm256_loadu_pd(&op.diag[i]), _mm256_loadu_pd(&x[i]));
    _mm256_storeu_pd(&y[i], _mm256_mul_pd(_mm256_sub_pd(acc, self), _mm256_loadu_pd(&op.scale[i])));
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < op.width; ++s) {
      const std::size_t at = s * n + i;
      acc += op.val[at] * x[static_cast<std::size_t>(op.col[at])];
    }
    y[i] = (acc - op.diag[i] * x[i]) * op.scale[i];
  }
}

double log_dist2_sum_avx2(const double p[3], std::span<const double> ys_x,
                          std::span<const double> ys_y, std::span<const double> ys_z,
                          std::span<const double> q, double floor) {
  const std::size_t n = q.size();
  const __m256d px = _mm256_set1_pd(p[0]);
  const __m256d py = _mm256_set1_pd(p[1]);
  const __m256d pz = _mm256_set1_pd(p[2]);
  const __m256d vfloor = _mm256_set1_pd(floor);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(px, _mm256_loadu_pd(&ys_x[j]));
    const __m256d dy = _mm256_sub_pd(py, _mm256_loadu_pd(&ys_y[j]));
    const __m256d dz = _mm256_sub_pd(pz, _mm256_loadu_pd(&ys_z[j]));
    __m256d d2 = _mm256_mul_pd(dx, dx);
    d2 = _mm256_fmadd_pd(dy, dy, d2);
    d2 = _mm256_fmadd_pd(dz, dz, d2);
    d2 = _mm256_max_pd(d2, vfloor);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(&q[j]), log_pd(d2), acc);
  }
  if (j < n) {
    // Pad the tail with unit distances and zero weights.
    alignas(32) double tx[4] = {p[0] + 1.0, p[0] + 1.0, p[0] + 1.0, p[0] + 1.0};
    alignas(32) double ty[4] = {p[1], p[1], p[1], p[1]};
    alignas(32) double tz[4] = {p[2], p[2], p[2], p[2]};
    alignas(32) double tq[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t r = 0; j + r < n; ++r) {
      tx[r] = ys_x[j + r];
      ty[r] = ys_y[j + r];
      tz[r] = ys_z[j + r];
      tq[r] = q[j + r];
    }
    const __m256d dx = _mm256_sub_pd(px, _mm256_load_pd(tx));
    const __m256d dy = _mm256_sub_pd(py, _mm256_load_pd(ty));
    const __m256d dz = _mm256_sub_pd(pz, _mm256_load_pd(tz));
    __m256d d2 = _mm256_mul_pd(dx, dx);
    d2 = _mm256_fmadd_pd(dy, dy, d2);
    d2 = _mm256_fmadd_pd(dz, dz, d2);
    d2 = _mm256_max_pd(d2, vfloor);
    acc = _mm256_fmadd_pd(_mm256_load_pd(tq), log_pd(d2), acc);
  }
  return hsum(acc);
}

}  // namespace sc_obstacle::kernels::detail
