#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sc_obstacle/kernels.hpp"
#include "sc_obstacle/surface.hpp"

using namespace sc_obstacle;
namespace k = sc_obstacle::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("red-black sweep: AVX2 matches scalar") {
  const k::KernelTable* avx = k::avx2_table();
  if (avx == nullptr) {
    MESSAGE("AVX2 unavailable, equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    auto x1 = random_vec(n, rng, -0.6, 0.6);
    auto x2 = x1;
    const auto nb = random_vec(n + 1, rng, -0.5, 0.5);
    const auto wl = random_vec(n, rng, 0.1, 2.0);
    const auto wr = random_vec(n, rng, 0.1, 2.0);
    std::vector<double> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / (wl[i] + wr[i]);
    const auto b = random_vec(n, rng, -0.1, 0.1);
    const k::RbSweepArgs a1{x1, nb, wl, wr, inv, b, 1.7, -0.5, 0.5};
    const k::RbSweepArgs a2{x2, nb, wl, wr, inv, b, 1.7, -0.5, 0.5};
    const double c1 = k::scalar_table().rb_sweep(a1);
    const double c2 = avx->rb_sweep(a2);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-14));
    for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-14));
  }
}

TEST_CASE("ELL Laplacian: AVX2 matches scalar on an icosphere") {
  const k::KernelTable* avx = k::avx2_table();
  if (avx == nullptr) return;
  const TriMesh mesh = build_icosphere(3);
  std::mt19937_64 rng(11);
  const auto x = random_vec(mesh.vertex_count(), rng, -1.0, 1.0);
  std::vector<double> y1(x.size()), y2(x.size());
  k::scalar_table().ell_apply(mesh.laplacian_view(), x, y1);
  avx->ell_apply(mesh.laplacian_view(), x, y2);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("log-distance sums: AVX2 matches scalar and libm") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 7u, 129u}) {
    const auto xs = random_vec(n, rng, -1.0, 1.0);
    const auto ys = random_vec(n, rng, -1.0, 1.0);
    const auto zs = random_vec(n, rng, -1.0, 1.0);
    const auto q = random_vec(n, rng, -2.0, 2.0);
    const double p[3] = {0.1, -0.2, 0.3};
    double ref = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d2 = (p[0] - xs[j]) * (p[0] - xs[j]) + (p[1] - ys[j]) * (p[1] - ys[j]) +
                        (p[2] - zs[j]) * (p[2] - zs[j]);
      ref += q[j] * std::log(std::max(d2, 1e-30));
    }
    const double s = k::scalar_table().log_dist2_sum(p, xs, ys, zs, q, 1e-30);
    CHECK(s == doctest::Approx(ref).epsilon(1e-13).scale(1.0));
    if (const auto* avx = k::avx2_table()) {
      CHECK(avx->log_dist2_sum(p, xs, ys, zs, q, 1e-30) == doctest::Approx(ref).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("vector log is accurate over many decades") {
  const auto* avx = k::avx2_table();
  if (avx == nullptr) return;
  for (double d2 : {1e-300, 1e-30, 1e-8, 0.5, 0.70710678, 1.0, 1.41421356, 1.5, 2.0, 3.999, 1e10}) {
    const std::vector<double> xs{std::sqrt(d2)};
    const std::vector<double> zero{0.0};
    const std::vector<double> one{1.0};
    const double p[3] = {0.0, 0.0, 0.0};
    const double got = avx->log_dist2_sum(p, xs, zero, zero, one, 1e-300);
    CHECK(got == doctest::Approx(std::log(xs[0] * xs[0])).epsilon(2e-15).scale(1.0));
  }
}

TEST_CASE("backend selection") {
  const k::Backend before = k::active().backend;
  k::set_backend(k::Backend::Scalar);
  CHECK(k::active().backend == k::Backend::Scalar);
  if (k::avx2_table() != nullptr) {
    k::set_backend(k::Backend::Avx2);
    CHECK(k::active().backend == k::Backend::Avx2);
  } else {
    CHECK_THROWS(k::set_backend(k::Backend::Avx2));
  }
  k::set_backend(before);
  CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
}
