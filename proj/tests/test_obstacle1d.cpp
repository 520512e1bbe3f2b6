#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "profiles.hpp"
#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"
#include "sc_obstacle/obstacle1d.hpp"

using namespace sc_obstacle;

namespace {

const RevolutionSurface& sphere() {
  static const RevolutionSurface s = build_revolution(RevolutionProfile::sphere(), 1024);
  return s;
}

double sup_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

double eps_for(const Profile1D& p) { return default_eps_active(p.h, p.beta_c, p.beta); }

}  // namespace

TEST_CASE("sphere case 1 against the closed form") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  const auto f = derive_fields(a, s);
  const Profile1D p = solve_regime(a, s, f, 0.5);
  CHECK(p.regime == Regime::OneComponent);
  REQUIRE(p.alphas.size() == 1);
  const double alpha = oracle::sphere_alpha(0.5);
  CHECK(p.alphas[0] == doctest::Approx(alpha).epsilon(1e-10));
  CHECK(p.alphas[0] == doctest::Approx(0.139).epsilon(2e-3));
  const double pm = oracle::sphere_phi_minus(alpha);
  CHECK(pm == doctest::Approx(0.556).epsilon(2e-3));
  REQUIRE(p.pieces.size() == 1);
  CHECK(p.pieces[0].lo == doctest::Approx(pm).epsilon(1e-10));
  CHECK(p.pieces[0].hi == doctest::Approx(oracle::pi - pm).epsilon(1e-10));
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    CHECK(p.v[i] == doctest::Approx(oracle::sphere_v(0.5, p.phi[i])).epsilon(1e-9).scale(1.0));
  }
  CHECK(regime_value(p, a, s, 1.3) == doctest::Approx(oracle::sphere_v(0.5, 1.3)).epsilon(1e-9).scale(1.0));
  const auto comps = components_1d(p, eps_for(p));
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].lo == doctest::Approx(pm).epsilon(2 * s.h()).scale(1.0));
  CHECK(comps[0].hi == doctest::Approx(oracle::pi - pm).epsilon(2 * s.h()).scale(1.0));
  CHECK(comps[0].lo_side == -1);
  CHECK(comps[0].hi_side == 1);
}

TEST_CASE("solve_regime rejects beta outside (0, beta_c)") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  const auto f = derive_fields(a, s);
  for (double b : {0.0, -0.1, beta_critical(a, s), 1.5}) {
    try {
      solve_regime(a, s, f, b);
      FAIL("expected BetaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BetaOutOfRange);
    }
  }
}

TEST_CASE("projected relaxation matches the construction on the sphere") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  const auto f = derive_fields(a, s);
  const Profile1D r = solve_regime(a, s, f, 0.5);
  const Profile1D q = solve_pgs_1d(a, s, 0.5);
  CHECK(q.sweeps > 0);
  CHECK(q.residual < 1e-12);
  CHECK(sup_diff(r.v, q.v) < 10 * s.h() * s.h());
  CHECK(q.regime == Regime::OneComponent);
}

TEST_CASE("beta at beta_c gives the shifted primitive") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  const auto f = derive_fields(a, s);
  const Profile1D q = solve_pgs_1d(a, s, f.beta_c);
  const auto [lo, hi] = std::minmax_element(f.starF.begin(), f.starF.end());
  double m = 0.0;
  for (std::size_t i = 0; i < q.v.size(); ++i) m = std::max(m, std::abs(q.v[i] - (f.starF[i] - 0.5 * (*lo + *hi))));
  CHECK(m < 10 * s.h() * s.h());
  CHECK(*std::max_element(q.v.begin(), q.v.end()) == doctest::Approx(0.5 * f.beta_c).epsilon(10 * s.h() * s.h()).scale(1.0));
  const auto comps = components_1d(q, 1e-3 * s.h() * s.h());
  REQUIRE(comps.size() >= 1);
  const auto r = residual_check(q, a, s);
  CHECK(r.ode_residual < 1e-3);

  // Strictly above β_c no obstacle is touched.
  const Profile1D big = solve_pgs_1d(a, s, 1.2 * f.beta_c);
  CHECK(big.regime == Regime::Vortexless);
  const auto bc = components_1d(big, eps_for(big));
  REQUIRE(bc.size() == 1);
  CHECK(bc[0].lo == 0.0);
  CHECK(bc[0].hi == doctest::Approx(oracle::pi));
  CHECK(bc[0].lo_side == 0);
  CHECK(bc[0].hi_side == 0);
  const auto rb = residual_check(big, a, s);
  CHECK(rb.sign_violations == 0);
  CHECK(rb.ode_residual < 1e-6);
}

TEST_CASE("unreachable tolerance reports NotConverged") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  Pgs1dOptions opt;
  opt.max_sweeps = 1;
  try {
    solve_pgs_1d(a, s, 0.5, opt);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
    CHECK(e.sweeps() == 1);
    CHECK(e.residual() > opt.tol);
  }
}

TEST_CASE("canonical profile regimes") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const auto f = derive_fields(a, s);
  const auto cb = critical_betas(a, s);
  CHECK(cb.beta1 == doctest::Approx(0.288458).epsilon(1e-4));
  CHECK(cb.beta2 == doctest::Approx(0.224626).epsilon(1e-4));

  SUBCASE("one component above beta*_1") {
    const auto p = solve_regime(a, s, f, 1.0);
    CHECK(p.regime == Regime::OneComponent);
    CHECK(components_1d(p, eps_for(p)).size() == 1);
  }
  SUBCASE("two components with a frozen interval") {
    const double b1 = cb.beta2 + 0.25 * (cb.beta1 - cb.beta2);
    const double b2 = cb.beta2 + 0.75 * (cb.beta1 - cb.beta2);
    const auto p1 = solve_regime(a, s, f, b1);
    const auto p2 = solve_regime(a, s, f, b2);
    CHECK(p1.regime == Regime::TwoComponentFrozen);
    CHECK(!p1.mirrored);
    REQUIRE(p1.pieces.size() == 2);
    REQUIRE(p2.pieces.size() == 2);
    CHECK(p1.pieces[0].lo == p2.pieces[0].lo);
    CHECK(p1.pieces[0].hi == p2.pieces[0].hi);
    CHECK(p1.alphas[1] == doctest::Approx(cb.alpha_star).epsilon(1e-14));
    // Frozen interval endpoints are the outer crossings of {a = α*} on the first two branches.
    CHECK(p1.pieces[0].lo == doctest::Approx(oracle::root([&](double x) { return oracle::triple_a(x) - cb.alpha_star; }, 1e-6, a.crit()[0])).epsilon(1e-11));
    const auto c1 = components_1d(p1, eps_for(p1));
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].lo_side == -1);
    CHECK(c1[0].hi_side == -1);
    CHECK(c1[1].lo_side == -1);
    CHECK(c1[1].hi_side == 1);
    // Plateau at -β/2 between the two intervals.
    for (std::size_t i = 0; i < p1.v.size(); ++i) {
      if (p1.phi[i] >= p1.pieces[0].hi && p1.phi[i] <= p1.pieces[1].lo) CHECK(p1.v[i] == -0.5 * b1);
    }
    const auto c2 = components_1d(p2, eps_for(p2));
    REQUIRE(c2.size() == 2);
    CHECK(c2[0].lo == doctest::Approx(c1[0].lo).epsilon(1e-9));
    CHECK(c2[0].hi == doctest::Approx(c1[0].hi).epsilon(1e-9));
  }
  SUBCASE("three components below beta*_2") {
    const double beta = 0.5 * cb.beta2;
    const auto p = solve_regime(a, s, f, beta);
    CHECK(p.regime == Regime::ThreeComponent);
    REQUIRE(p.alphas.size() == 3);
    const auto r = integrals_IJ(a, s, p.alphas[0]);
    CHECK(r.I_minus == doctest::Approx(beta).epsilon(1e-10));
    CHECK(integrals_IJ(a, s, p.alphas[1]).J == doctest::Approx(beta).epsilon(1e-10));
    CHECK(integrals_IJ(a, s, p.alphas[2]).I_plus == doctest::Approx(beta).epsilon(1e-10));
    const auto c = components_1d(p, eps_for(p));
    REQUIRE(c.size() == 3);
    CHECK(c[0].hi < c[1].lo);
    CHECK(c[1].hi < c[2].lo);
    // Monotone on each: increasing, decreasing, increasing.
    const int dir[3] = {1, -1, 1};
    for (int k = 0; k < 3; ++k) {
      for (std::size_t i = c[k].first; i < c[k].last; ++i) CHECK(dir[k] * (p.v[i + 1] - p.v[i]) >= 0.0);
    }
    const auto q = solve_pgs_1d(a, s, beta);
    CHECK(q.regime == Regime::ThreeComponent);
    CHECK(sup_diff(p.v, q.v) < 10 * s.h() * s.h());
  }
}

TEST_CASE("mirrored two-component regime") {
  const auto mirrored = testprof::mirrored_potential();
  const auto& s = sphere();
  REQUIRE(mirrored.shape() == PotentialShape::TripleZero);
  const auto cb = critical_betas(mirrored, s);
  REQUIRE(cb.mirrored);
  const auto f = derive_fields(mirrored, s);
  const double beta = 0.5 * (cb.beta1 + cb.beta2);
  const auto p = solve_regime(mirrored, s, f, beta);
  CHECK(p.regime == Regime::TwoComponentFrozen);
  CHECK(p.mirrored);
  const auto c = components_1d(p, eps_for(p));
  REQUIRE(c.size() == 2);
  CHECK(c[1].lo_side == 1);
  CHECK(c[1].hi_side == 1);
  const auto q = solve_pgs_1d(mirrored, s, beta);
  CHECK(sup_diff(p.v, q.v) < 10 * s.h() * s.h());
  const auto r = residual_check(p, mirrored, s);
  CHECK(r.sign_violations == 0);
}

TEST_CASE("residual check") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const auto f = derive_fields(a, s);
  const auto cb = critical_betas(a, s);
  for (double beta : {0.1, 0.5 * (cb.beta1 + cb.beta2), 1.5}) {
    const auto p = solve_regime(a, s, f, beta);
    const auto r = residual_check(p, a, s);
    CHECK(r.sign_violations == 0);
    CHECK(r.free_nodes_checked > 0);
    CHECK(r.ode_residual < 100 * s.h() * s.h());
    CHECK(r.min_aprime_minus >= -1e-9);
    CHECK(r.max_aprime_plus <= 1e-9);
    CHECK(r.endpoint_slope < 1e-9);
  }

  // Hand-built violator: -β/2 on a stretch where a' < 0.
  auto p = solve_regime(a, s, f, 1.0);
  const std::size_t i0 = static_cast<std::size_t>(2.6 / s.h());
  REQUIRE(a.a_prime(p.phi[i0]) < 0.0);
  p.v[i0] = -0.5 * p.beta;
  p.active_minus.push_back(i0);
  const auto r = residual_check(p, a, s);
  CHECK(r.sign_violations >= 1);
  CHECK(r.min_aprime_minus < 0.0);
}

TEST_CASE("regime properties over random inputs") {
  std::mt19937_64 rng(20260101);
  const auto& sph = sphere();
  const auto ell = build_revolution(named_profile("ellipsoid:1.4"), 1024);
  const char* names[] = {"uniform", "triple", "symmetric"};
  for (int trial = 0; trial < 20; ++trial) {
    const auto& s = (trial % 2 == 0) ? sph : ell;
    const auto a = AxiPotential::named(names[trial % 3]).scaled(std::uniform_real_distribution<>(0.5, 2.0)(rng));
    const auto f = derive_fields(a, s);
    const double beta = f.beta_c * std::uniform_real_distribution<>(0.02, 0.95)(rng);
    CAPTURE(trial);
    CAPTURE(beta);
    const auto p = solve_regime(a, s, f, beta);
    const auto q = solve_pgs_1d(a, s, beta);
    CHECK(sup_diff(p.v, q.v) < 10 * s.h() * s.h());
    for (const auto* x : {&p, &q}) {
      const auto [lo, hi] = std::minmax_element(x->v.begin(), x->v.end());
      CHECK(*lo == -0.5 * beta);
      CHECK(*hi - *lo == doctest::Approx(beta).epsilon(1e-12));
      for (double v : x->v) CHECK(std::abs(v) <= 0.5 * beta + 1e-12);
    }
    CHECK(std::abs(p.v[1] - p.v[0]) / s.h() < 10 * s.h());
    CHECK(std::abs(q.v[1] - q.v[0]) / s.h() < 10 * s.h());
  }
}

TEST_CASE("monotonicity and continuity in beta") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("triple");
  const auto f = derive_fields(a, s);
  std::vector<double> betas;
  for (int k = 0; k < 14; ++k) betas.push_back(0.02 * std::pow(1.45, k));
  std::vector<Profile1D> ps;
  for (double b : betas) ps.push_back(solve_regime(a, s, f, b));
  for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
    CAPTURE(betas[k]);
    const auto c0 = components_1d(ps[k], eps_for(ps[k]));
    const auto c1 = components_1d(ps[k + 1], eps_for(ps[k + 1]));
    for (const auto& x : c0) {
      const bool inside = std::any_of(c1.begin(), c1.end(), [&](const Interval1D& y) {
        return y.first <= x.first && x.last <= y.last;
      });
      CHECK(inside);
    }
    CHECK(sup_diff(ps[k].v, ps[k + 1].v) <= 0.5 * (betas[k + 1] - betas[k]) + 10 * s.h() * s.h());
  }
}

TEST_CASE("profile CSV") {
  const auto& s = sphere();
  const auto a = AxiPotential::named("uniform");
  const auto p = solve_regime(a, s, derive_fields(a, s), 0.5);
  const std::string path = "test_profile1d.csv";
  write_profile_csv(p, path);
  const auto cols = read_csv_columns(path, 3);
  REQUIRE(cols.size() == 3);
  CHECK(cols[0].size() == p.v.size());
  CHECK(cols[1][300] == p.v[300]);
  CHECK(cols[2][0] == -1.0);
  CHECK(cols[2].back() == 1.0);
}
