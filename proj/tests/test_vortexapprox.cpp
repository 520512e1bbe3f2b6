#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "sc_obstacle/error.hpp"
#include "sc_obstacle/kernels.hpp"
#include "sc_obstacle/obstacle2d.hpp"
#include "sc_obstacle/vortexapprox.hpp"

using namespace sc_obstacle;

namespace {

constexpr double kQuarterPi = 1.0 / (4.0 * oracle::pi);

const TriMesh& ico5() {
  static const TriMesh m = build_icosphere(5);
  return m;
}

// Vorticity of the β = 0.5 solution for H = z.
const std::vector<double>& sphere_mu() {
  static const std::vector<double> mu = [] {
    const auto& mesh = ico5();
    const auto f = named_mesh_field(mesh, "z");
    const auto sol = solve_pgs_2d(mesh, f, 0.5);
    return vorticity(sol, f.H, mesh, default_eps_active_2d(mesh, sol.beta_c, 0.5)).mu;
  }();
  return mu;
}

// cos φ split into its positive and negative parts.
std::pair<std::vector<double>, std::vector<double>> hemispheres(const TriMesh& mesh) {
  std::vector<double> p(mesh.vertex_count()), m(mesh.vertex_count());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double z = mesh.vertices()[i][2];
    p[i] = std::max(z, 0.0);
    m[i] = std::max(-z, 0.0);
  }
  return {p, m};
}

double geodesic(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz)));
}

struct EnvGuard {
  explicit EnvGuard(const char* v) { setenv("SC_OBSTACLE_THREADS", v, 1); }
  ~EnvGuard() { unsetenv("SC_OBSTACLE_THREADS"); }
};

}  // namespace

TEST_CASE("sphere Green function") {
  const Vec3 n{0.0, 0.0, 1.0};
  const Vec3 s{0.0, 0.0, -1.0};
  CHECK(green_sphere(n, s) == doctest::Approx(-kQuarterPi).epsilon(1e-15));
  CHECK_THROWS_AS(green_sphere(n, n), Error);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Vec3 a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    for (int d = 0; d < 3; ++d) {
      a[d] /= na;
      b[d] /= nb;
    }
    CHECK(green_sphere(a, b) == green_sphere(b, a));
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    CHECK(green_sphere(a, b) == doctest::Approx(-std::log((1.0 - dot) / 2.0) * kQuarterPi - kQuarterPi).epsilon(1e-9));
  }

  SUBCASE("zero spherical mean") {
    // G(pole, y) depends on t = cos θ only; the log singularity sits at t = 1.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mean = 2.0 * oracle::pi * ts.integrate([](double t) {
      const Vec3 y{std::sqrt(std::max(0.0, 1.0 - t * t)), 0.0, t};
      return green_sphere({0.0, 0.0, 1.0}, y);
    }, -1.0, 1.0 - 1e-300);
    CHECK(std::abs(mean) < 1e-6);
  }
  SUBCASE("-ΔG = -1/4π away from the pole") {
    const auto& mesh = ico5();
    std::vector<double> G(mesh.vertex_count());
    const auto verts = mesh.vertices();
    std::size_t pole = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (verts[i][2] > verts[pole][2]) pole = i;
    }
    for (std::size_t i = 0; i < G.size(); ++i) G[i] = i == pole ? 0.0 : green_sphere(verts[pole], verts[i]);
    const auto lap = apply_laplacian(mesh, G);
    // Pointwise error at the valence-5 vertices does not vanish under
    // refinement; the median and the area-weighted mean do.
    const auto m = mesh.vertex_areas();
    std::vector<double> err;
    double sw = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (verts[i][2] > std::cos(0.3)) continue;
      err.push_back(std::abs(-lap[i] + kQuarterPi));
      sw += -lap[i] * m[i];
      sm += m[i];
    }
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    CHECK(err[err.size() / 2] < 1e-3 * kQuarterPi);
    CHECK(sw / sm == doctest::Approx(-kQuarterPi).epsilon(1e-3));
  }
}

TEST_CASE("circle energies") {
  const double r = 1e-2;
  SUBCASE("closed form of the self energy") {
    // Mean of G(x(0), x(ψ)) over ψ on a circle of chord radius sin r.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double R = std::sin(r);
    const double mean = ts.integrate([R](double psi) {
      const double half_chord = R * std::sin(0.5 * psi);
      return -2.0 * std::log(half_chord) * kQuarterPi - kQuarterPi;
    }, 0.0, oracle::pi) / oracle::pi;
    CHECK(circle_self_energy(r) == doctest::Approx(mean).epsilon(1e-10));
  }
  SUBCASE("sampled self circle with the diagonal correction") {
    for (int m : {8, 32, 64}) {
      PointVortexSet p;
      p.kappa = 1.0 / r;
      p.h = 10.0;
      p.weight = 2.0 * oracle::pi / p.h;
      p.circle_radius = r;
      p.circle_samples = m;
      p.points_plus = {{0.6, 0.0, 0.8}};
      CHECK(green_energy(p) == doctest::Approx(p.weight * p.weight * circle_self_energy(r)).epsilon(1e-12));
    }
  }
  SUBCASE("two antipodal opposite masses") {
    PointVortexSet p;
    p.kappa = 1e6;
    p.h = 2.0 * oracle::pi;
    p.weight = 1.0;
    p.circle_radius = 1e-6;
    p.points_plus = {{0.0, 0.0, 1.0}};
    p.points_minus = {{0.0, 0.0, -1.0}};
    // 2 self terms, cross term -2 G(n, s) = +2/(4π).
    const double cross = green_energy(p) - 2.0 * circle_self_energy(p.circle_radius);
    CHECK(cross == doctest::Approx(2.0 * kQuarterPi).epsilon(1e-9));
  }
  SUBCASE("overlapping circles") {
    PointVortexSet p;
    p.kappa = 100.0;
    p.h = 10.0;
    p.weight = 0.1;
    p.circle_radius = 0.01;
    p.points_plus = {{0.0, 0.0, 1.0}};
    p.points_minus = {{std::sin(0.015), 0.0, std::cos(0.015)}};
    CHECK_THROWS_AS(green_energy(p), Error);
  }
}

TEST_CASE("density energies") {
  const auto& mesh = ico5();
  SUBCASE("zero measure") {
    const std::vector<double> zero(mesh.vertex_count(), 0.0);
    CHECK(energy_J(mesh, zero, 0.5) == 0.0);
  }
  SUBCASE("Green sum against the Poisson solve") {
    const auto& mu = sphere_mu();
    const double a = green_energy(mesh, mu);
    const double b = green_energy_poisson(mesh, mu);
    CHECK(a > 0.0);
    CHECK(a == doctest::Approx(b).epsilon(0.02));
    // Axisymmetric reference: ∫|∇W|² with -ΔW = cos φ on the caps φ < φ₋, φ > π - φ₋.
    const double pm = oracle::sphere_phi_minus(oracle::sphere_alpha(0.5));
    const auto flux = [pm](double p) {
      const double q = p <= 0.5 * oracle::pi ? std::min(p, pm) : std::min(oracle::pi - p, pm);
      return 0.5 * std::sin(q) * std::sin(q) / std::sin(p);
    };
    const double ref = 2.0 * oracle::pi * oracle::integral([&](double p) { return flux(p) * flux(p) * std::sin(p); }, 1e-12, oracle::pi - 1e-12);
    CHECK(b == doctest::Approx(ref).epsilon(0.02));
    const auto m = mesh.vertex_areas();
    double tv = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) tv += std::abs(mu[i]) * m[i];
    CHECK(energy_J(mesh, mu, 0.5) == doctest::Approx(0.5 * tv + a).epsilon(1e-14));
  }
  SUBCASE("backends agree") {
    const auto& mu = sphere_mu();
    const auto before = kernels::active().backend;
    kernels::set_backend(kernels::Backend::Scalar);
    const double s = green_energy(mesh, mu);
    if (kernels::avx2_table() != nullptr) {
      kernels::set_backend(kernels::Backend::Avx2);
      CHECK(green_energy(mesh, mu) == doctest::Approx(s).epsilon(1e-11));
    }
    kernels::set_backend(before);
  }
  SUBCASE("thread count does not change the result") {
    const auto& mu = sphere_mu();
    double one = 0.0, many = 0.0;
    {
      EnvGuard g("1");
      CHECK(worker_count() == 1);
      one = green_energy(mesh, mu);
    }
    {
      EnvGuard g("8");
      many = green_energy(mesh, mu);
    }
    CHECK(one == many);
  }
}

TEST_CASE("sampling point vortices") {
  const auto& mesh = ico5();
  const auto [mp, mm] = hemispheres(mesh);

  SUBCASE("hemispheres, h = 200, kappa = 500") {
    const auto pvs = sample_measure(mesh, mp, mm, 500.0, 200.0);
    // μ±(M) = ∫ cos φ over a hemisphere = π, so n± ≈ h/2.
    const double target = 200.0 * oracle::pi / (2.0 * oracle::pi);
    CHECK(std::abs(static_cast<double>(pvs.target_plus) - target) <= 1.0);
    CHECK(pvs.points_plus.size() == pvs.points_minus.size());
    CHECK(std::abs(static_cast<double>(pvs.points_plus.size()) - target) <= 1.0);
    CHECK(pvs.weight == doctest::Approx(2.0 * oracle::pi / 200.0));
    for (const auto* pts : {&pvs.points_plus, &pvs.points_minus}) {
      for (std::size_t i = 0; i < pts->size(); ++i) {
        const auto& x = (*pts)[i];
        CHECK(std::abs(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0) < 1e-12);
        for (std::size_t j = i + 1; j < pts->size(); ++j) CHECK(geodesic(x, (*pts)[j]) > 4.0 / 500.0);
      }
    }
    for (const auto& x : pvs.points_plus) CHECK(x[2] > -1e-9);
    for (const auto& x : pvs.points_minus) CHECK(x[2] < 1e-9);
  }
  SUBCASE("seeded and reproducible") {
    const auto a = sample_measure(mesh, mp, mm, 500.0, 50.0);
    const auto b = sample_measure(mesh, mp, mm, 500.0, 50.0);
    SampleOptions o;
    o.seed = 2;
    const auto c = sample_measure(mesh, mp, mm, 500.0, 50.0, o);
    CHECK(a.points_plus == b.points_plus);
    CHECK(a.points_plus != c.points_plus);
  }
  SUBCASE("unequal rounded targets are balanced") {
    // Masses equal to 1e-7 relative, placed so that the targets round apart.
    auto m2 = mm;
    for (double& x : m2) x *= 1.0 + 1e-7;
    const auto ar = mesh.vertex_areas();
    double Mp = 0.0;
    for (std::size_t i = 0; i < mp.size(); ++i) Mp += mp[i] * ar[i];
    const double h = 2.0 * oracle::pi * (20.5 - 1e-9) / Mp;
    const auto pvs = sample_measure(mesh, mp, m2, 500.0, h);
    CHECK(pvs.target_plus == 20);
    CHECK(pvs.target_minus == 21);
    CHECK(pvs.removed == 1);
    CHECK(pvs.points_plus.size() == 20);
    CHECK(pvs.points_minus.size() == 20);
  }
  SUBCASE("energy does not depend on point order") {
    auto pvs = sample_measure(mesh, mp, mm, 500.0, 60.0);
    const double e1 = green_energy(pvs);
    std::reverse(pvs.points_plus.begin(), pvs.points_plus.end());
    std::rotate(pvs.points_minus.begin(), pvs.points_minus.begin() + 3, pvs.points_minus.end());
    CHECK(green_energy(pvs) == doctest::Approx(e1).epsilon(1e-12));
  }
  SUBCASE("precondition failures") {
    CHECK_THROWS_AS(sample_measure(mesh, mp, mm, 500.0, 0.5), Error);
    try {
      sample_measure(mesh, mp, mm, 500.0, 0.5);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidInput);
    }
    auto bad = mp;
    bad[0] = -1.0;
    CHECK_THROWS_AS(sample_measure(mesh, bad, mm, 500.0, 50.0), Error);
    auto lopsided = mm;
    for (double& x : lopsided) x *= 1.5;
    CHECK_THROWS_AS(sample_measure(mesh, mp, lopsided, 500.0, 50.0), Error);
    std::vector<double> overlap(mp.size(), 1.0);
    CHECK_THROWS_AS(sample_measure(mesh, overlap, overlap, 500.0, 50.0), Error);
  }
  SUBCASE("packing failure") {
    try {
      sample_measure(mesh, mp, mm, 10.0, 2000.0);
      FAIL("expected PackingFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PackingFailure);
    }
  }
  SUBCASE("weak convergence on smooth test functions") {
    const std::vector<std::function<double(const Vec3&)>> fs = {
        [](const Vec3& x) { return x[2]; },
        [](const Vec3& x) { return x[2] * x[2] * x[2]; },
        [](const Vec3& x) { return x[0] + 0.5 * x[2]; },
        [](const Vec3& x) { return std::exp(x[2]); },
        [](const Vec3& x) { return x[0] * x[2] + x[1]; },
    };
    const auto ar = mesh.vertex_areas();
    const auto verts = mesh.vertices();
    std::vector<double> exact(fs.size(), 0.0);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      for (std::size_t i = 0; i < ar.size(); ++i) exact[k] += fs[k](verts[i]) * (mp[i] - mm[i]) * ar[i];
    }
    std::vector<double> prev(fs.size(), INFINITY);
    constexpr int kSeeds = 12;
    for (const auto [kappa, h] : {std::pair{100.0, 20.0}, {1000.0, 200.0}, {10000.0, 2000.0}}) {
      std::vector<double> err(fs.size(), 0.0);
      for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        SampleOptions o;
        o.seed = seed;
        const auto pvs = sample_measure(mesh, mp, mm, kappa, h, o);
        for (std::size_t k = 0; k < fs.size(); ++k) err[k] += std::abs(pairing(pvs, fs[k]) - exact[k]) / kSeeds;
      }
      for (std::size_t k = 0; k < fs.size(); ++k) {
        CHECK(err[k] < prev[k]);
        prev[k] = err[k];
      }
    }
  }
}

TEST_CASE("energy convergence towards J") {
  const auto& mesh = ico5();
  const std::vector<double> kappas{100.0, 300.0, 1000.0, 3000.0};
  SUBCASE("sphere beta = 0.5") {
    const auto s = convergence_check(mesh, sphere_mu(), 0.5, kappas);
    REQUIRE(s.excess.size() == 4);
    CHECK(s.J > 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(s.h[i] == doctest::Approx(std::log(kappas[i]) / 0.5));
      CHECK(s.n_plus[i] == s.n_minus[i]);
      CHECK(s.energy_sd[i] >= 0.0);
    }
    CHECK(s.tail_decreasing);
    CHECK(s.excess[1] > s.excess[2]);
    CHECK(s.excess[2] > s.excess[3]);
    CHECK(s.excess.back() < 0.15);
  }
  SUBCASE("repeated seeds give a spread") {
    ConvergenceOptions o;
    o.repeats = 6;
    const auto s = convergence_check(mesh, sphere_mu(), 0.5, std::vector<double>{1000.0}, o);
    CHECK(s.energy_sd[0] > 0.0);
  }
  SUBCASE("no vorticity") {
    const std::vector<double> zero(mesh.vertex_count(), 0.0);
    const auto s = convergence_check(mesh, zero, 1.2, kappas);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(s.energy[i] == 0.0);
      CHECK(s.n_plus[i] == 0);
    }
    CHECK(s.J == 0.0);
  }
}

TEST_CASE("point vortex CSV") {
  const auto [mp, mm] = hemispheres(ico5());
  const auto pvs = sample_measure(ico5(), mp, mm, 500.0, 20.0);
  const std::string path = "test_vortices.csv";
  write_point_vortex_csv(pvs, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "sign,x,y,z");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == pvs.points_plus.size() + pvs.points_minus.size());
}
