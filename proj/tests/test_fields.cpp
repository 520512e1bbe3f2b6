#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sc_obstacle/error.hpp"
#include "sc_obstacle/fields.hpp"

using namespace sc_obstacle;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidInput;
}

const RevolutionSurface& sphere() {
  static const RevolutionSurface s = build_revolution(RevolutionProfile::sphere(), 1024);
  return s;
}

// Independent crossings of {a = α}: scan a fine grid for sign changes, refine with TOMS 748.
std::vector<double> oracle_crossings(auto a, double alpha) {
  std::vector<double> out;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x0 = oracle::pi * i / n;
    const double x1 = oracle::pi * (i + 1) / n;
    const double f0 = a(x0) - alpha;
    const double f1 = a(x1) - alpha;
    if ((f0 < 0) != (f1 < 0)) out.push_back(oracle::root([&](double x) { return a(x) - alpha; }, x0, x1));
  }
  return out;
}

double oracle_area(auto a, double alpha, double lo, double hi) {
  return oracle::integral([&](double p) { return (a(p) - alpha) / std::sin(p); }, lo, hi);
}

}  // namespace

TEST_CASE("uniform field on the sphere") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  CHECK(a.shape() == PotentialShape::SingleBump);
  const FieldPair f = derive_fields(a, s);
  for (std::size_t i = 1; i + 1 < s.nodes(); ++i) {
    const double p = s.phi()[i];
    CHECK(f.H[i] == doctest::Approx(std::cos(p)).epsilon(1e-10).scale(1.0));
    CHECK(f.starF[i] == doctest::Approx(-0.5 * std::cos(p)).epsilon(1e-10).scale(1.0));
  }
  const double bc = oracle::integral([](double p) { return 0.5 * std::sin(p); }, 0.0, oracle::pi);
  CHECK(f.beta_c == doctest::Approx(bc).epsilon(1e-10));
  CHECK(beta_critical(a, s) == doctest::Approx(1.0).epsilon(1e-12));

  const FieldPair f2 = derive_fields(a.scaled(2.0), s);
  CHECK(f2.beta_c == doctest::Approx(2.0 * f.beta_c).epsilon(1e-12));
  for (std::size_t i = 0; i < s.nodes(); i += 31) CHECK(f2.H[i] == doctest::Approx(2.0 * f.H[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("potential shape validation") {
  CHECK(code_of([] {
          AxiPotential("offset", [](double p) { return 0.1 + std::sin(p) * std::sin(p); },
                       [](double p) { return std::sin(2 * p); });
        }) == ErrorCode::ShapeViolation);
  CHECK(code_of([] {
          AxiPotential("wavy", [](double p) { return std::sin(p) * std::sin(p) * (1.5 + std::cos(6 * p)); },
                       [](double p) {
                         return std::sin(2 * p) * (1.5 + std::cos(6 * p)) - 6 * std::sin(p) * std::sin(p) * std::sin(6 * p);
                       });
        }) == ErrorCode::ShapeViolation);
  // The canonical profile reflected has its larger maximum first.
  CHECK(code_of([] {
          AxiPotential("reflected", [](double p) { return oracle::triple_a(oracle::pi - p); },
                       [](double p) {
                         const double q = oracle::pi - p;
                         const double s = std::sin(q);
                         return -(2.0 * std::sin(4.0 * q) + std::sin(2.0 * q) * (0.3 - 0.1 * std::cos(q)) + 0.1 * s * s * s);
                       });
        }) == ErrorCode::ShapeViolation);
  CHECK(code_of([] { AxiPotential::named("nope"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("canonical profile satisfies the shape assumptions") {
  const auto a = AxiPotential::named("triple");
  REQUIRE(a.shape() == PotentialShape::TripleZero);
  const auto c = a.crit();
  const auto v = a.crit_vals();
  CHECK(c[0] == doctest::Approx(0.819277).epsilon(1e-5));
  CHECK(c[1] == doctest::Approx(1.557284).epsilon(1e-5));
  CHECK(c[2] == doctest::Approx(2.315170).epsilon(1e-5));
  CHECK(v[0] < v[2]);
  CHECK(v[1] < v[0]);
  for (double x : c) {
    const double h = 1e-6;
    CHECK(std::abs(a.a_prime(x)) < 1e-9);
    CHECK(a.a(x) == doctest::Approx(oracle::triple_a(x)).epsilon(1e-14));
    (void)h;
  }
}

TEST_CASE("field invariants on an ellipsoid") {
  const auto s = build_revolution(named_profile("ellipsoid:1.6"), 1024);
  for (const char* name : {"uniform", "triple", "symmetric"}) {
    const auto a = AxiPotential::named(name);
    const FieldPair f = derive_fields(a, s);
    std::vector<double> absH(f.H.size());
    for (std::size_t i = 0; i < f.H.size(); ++i) absH[i] = std::abs(f.H[i]);
    CHECK(std::abs(integrate(s, f.H)) <= 1e-8 * integrate(s, absH));
    CHECK(std::abs(f.h_mean_removed) < 1e-8);
    CHECK(std::abs(integrate(s, f.starF)) < 1e-10);
    CHECK(f.beta_c > 0.0);
    CHECK(f.beta_c == doctest::Approx(beta_critical(a, s)).epsilon(1e-9));
    const auto d = fd_derivative(f.starF, s.h());
    for (std::size_t i = 3; i + 3 < s.nodes(); i += 17) {
      const double p = s.phi()[i];
      CHECK(d[i] == doctest::Approx(a.a(p) * s.gamma_at(p) / s.rho_at(p)).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("level points") {
  const auto u = AxiPotential::named("uniform");
  const LevelSet ls = level_points(u, 0.25);
  CHECK(*ls.phi_minus == doctest::Approx(oracle::pi / 4).epsilon(1e-12));
  CHECK(*ls.phi_plus == doctest::Approx(3 * oracle::pi / 4).epsilon(1e-12));
  CHECK(!ls.psi_plus);

  const auto a = AxiPotential::named("triple");
  const double alpha = 0.5 * (a.crit_vals()[0] + a.crit_vals()[1]);
  const auto got = level_points(a, alpha).ordered();
  const auto want = oracle_crossings(oracle::triple_a, alpha);
  REQUIRE(got.size() == 4);
  REQUIRE(want.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-11));
  CHECK(std::is_sorted(got.begin(), got.end()));

  const double low = 0.5 * a.crit_vals()[1];
  CHECK(level_points(a, low).ordered().size() == 2);
  const double high = 0.5 * (a.crit_vals()[0] + a.crit_vals()[2]);
  const LevelSet hs = level_points(a, high);
  CHECK(hs.ordered().size() == 2);
  CHECK(hs.psi_minus.has_value());

  CHECK(code_of([&] { level_points(a, a.crit_vals()[1]); }) == ErrorCode::AlphaAtCriticalValue);
  CHECK(code_of([&] { level_points(a, a.crit_vals()[0]); }) == ErrorCode::AlphaAtCriticalValue);
}

TEST_CASE("integral I on the sphere") {
  const auto& s = sphere();
  const auto u = AxiPotential::named("uniform");
  for (double alpha : {1e-4, 0.05, 0.13931, 0.3, 0.45}) {
    CHECK(integral_I(u, s, alpha) == doctest::Approx(oracle::sphere_I(alpha)).epsilon(1e-11));
  }
  CHECK(integral_I(u, s, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(integral_I(u, s, 0.1) > integral_I(u, s, 0.2));
  CHECK(oracle::sphere_alpha(0.5) == doctest::Approx(0.13931).epsilon(1e-4));
}

TEST_CASE("level-set integrals of the canonical profile") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const double a1 = a.crit_vals()[0];
  const double a2 = a.crit_vals()[1];
  const double mid = 0.5 * (a1 + a2);
  const auto r = integrals_IJ(a, s, mid);
  const auto x = oracle_crossings(oracle::triple_a, mid);
  CHECK(r.I_minus == doctest::Approx(oracle_area(oracle::triple_a, mid, x[0], x[1])).epsilon(1e-10));
  CHECK(r.J == doctest::Approx(-oracle_area(oracle::triple_a, mid, x[1], x[2])).epsilon(1e-10));
  CHECK(r.I_plus == doctest::Approx(oracle_area(oracle::triple_a, mid, x[2], x[3])).epsilon(1e-10));
  CHECK(r.I_minus > 0);
  CHECK(r.I_plus > 0);
  CHECK(r.J > 0);
  const auto probe = integrals_IJ(a, s, mid + 1e-3);
  CHECK(probe.J > r.J);
  CHECK(probe.I_minus < r.I_minus);
  CHECK(probe.I_plus < r.I_plus);

  CHECK(integrals_IJ(a, s, a2 + 1e-7 * (a1 - a2)).J < 1e-8);
  CHECK(integrals_IJ(a, s, a1 - 1e-7 * (a1 - a2)).I_minus < 1e-8);
  CHECK(integral_I_plus(a, s, mid) == doctest::Approx(r.I_plus).epsilon(1e-14));
  CHECK(integral_I_minus(a, s, mid) == doctest::Approx(r.I_minus).epsilon(1e-14));
  CHECK(integral_J(a, s, mid) == doctest::Approx(r.J).epsilon(1e-14));
}

TEST_CASE("monotonicity and decomposition over (a2, a1)") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const double a1 = a.crit_vals()[0];
  const double a2 = a.crit_vals()[1];
  for (int k = 1; k <= 10; ++k) {
    const double alpha = a2 + (a1 - a2) * k / 11.0;
    const double d = 1e-4 * (a1 - a2);
    const auto r0 = integrals_IJ(a, s, alpha - d);
    const auto r1 = integrals_IJ(a, s, alpha + d);
    CHECK(r1.J > r0.J);
    CHECK(r1.I_minus < r0.I_minus);
    CHECK(r1.I_plus < r0.I_plus);
    const auto r = integrals_IJ(a, s, alpha);
    CHECK(integral_I(a, s, alpha) == doctest::Approx(r.I_minus + r.I_plus - r.J).epsilon(1e-10));
  }
}

TEST_CASE("critical alpha and betas") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const double as = critical_alpha(a, s);
  CHECK(as > a.crit_vals()[1]);
  CHECK(as < a.crit_vals()[0]);
  const auto x = oracle_crossings(oracle::triple_a, as);
  REQUIRE(x.size() == 4);
  const double im = oracle_area(oracle::triple_a, as, x[0], x[1]);
  const double j = -oracle_area(oracle::triple_a, as, x[1], x[2]);
  const double ip = oracle_area(oracle::triple_a, as, x[2], x[3]);
  const double bc = beta_critical(a, s);
  CHECK(std::abs(j - std::min(im, ip)) < 1e-10 * bc);
  CHECK(as == doctest::Approx(0.747776).epsilon(1e-5));

  const auto cb = critical_betas(a, s);
  CHECK(cb.beta1 == doctest::Approx(std::max(im, ip)).epsilon(1e-10));
  CHECK(cb.beta2 == doctest::Approx(std::min(im, ip)).epsilon(1e-10));
  CHECK(!cb.mirrored);
  CHECK(bc > cb.beta1);
  CHECK(cb.beta1 >= cb.beta2);
  CHECK(cb.beta2 > 0.0);

  const auto sym = AxiPotential::named("symmetric");
  const auto cs = critical_betas(sym, s);
  CHECK(cs.beta1 == doctest::Approx(cs.beta2).epsilon(1e-9));
  const auto rs = integrals_IJ(sym, s, cs.alpha_star);
  CHECK(rs.I_minus == doctest::Approx(rs.I_plus).epsilon(1e-9));

  const auto u = AxiPotential::named("uniform");
  CHECK(code_of([&] { critical_alpha(u, s); }) == ErrorCode::BracketFailure);
  CHECK(code_of([&] { critical_betas(u, s); }) == ErrorCode::BracketFailure);
}

TEST_CASE("mesh fields") {
  const auto mesh = build_icosphere(4);
  const MeshField z = named_mesh_field(mesh, "z");
  CHECK(std::abs(integrate(mesh, z.H)) < 1e-8);
  CHECK(z.nondegenerate);
  std::vector<double> cube;
  for (const auto& p : mesh.vertices()) cube.push_back(p[2] * p[2] * p[2]);
  const MeshField c = make_mesh_field(mesh, cube);
  CHECK(!c.nondegenerate);
  const MeshField pot = named_mesh_field(mesh, "potential:uniform");
  for (std::size_t i = 0; i < mesh.vertex_count(); i += 23) {
    CHECK(pot.H[i] == doctest::Approx(z.H[i]).epsilon(1e-9).scale(1.0));
  }
  CHECK(code_of([&] { make_mesh_field(mesh, std::vector<double>(3)); }) == ErrorCode::DimensionMismatch);
}
