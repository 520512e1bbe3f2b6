#include "sc_obstacle/obstacle1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"
#include "sc_obstacle/kernels.hpp"

namespace sc_obstacle {

namespace {

constexpr double kPi = std::numbers::pi;

double rate(const AxiPotential& a, const RevolutionSurface& s, double alpha, double phi) {
  return (a.a(phi) - alpha) * s.gamma_at(phi) / s.rho_at(phi);
}

// Level-set integrals without the critical-value guard; the bisections below
// may pass through a₁ or a₂ where these stay continuous.
struct RawIntegrals {
  const AxiPotential& a;
  const RevolutionSurface& s;
  int last;

  double I(double alpha) const {
    return weighted_area(a, s, alpha, branch_root(a, 0, alpha), branch_root(a, last, alpha));
  }
  double I_minus(double alpha) const {
    return weighted_area(a, s, alpha, branch_root(a, 0, alpha), branch_root(a, 1, alpha));
  }
  double I_plus(double alpha) const {
    return weighted_area(a, s, alpha, branch_root(a, 2, alpha), branch_root(a, 3, alpha));
  }
  double J(double alpha) const {
    return -weighted_area(a, s, alpha, branch_root(a, 1, alpha), branch_root(a, 2, alpha));
  }
};

template <class F>
double solve_level(F&& f, double beta, double lo, double hi) {
  return bisect_root([&](double alpha) { return f(alpha) - beta; }, lo, hi, 1e-12);
}

void fill_nodes(Profile1D& p, const AxiPotential& a, const RevolutionSurface& s) {
  const std::size_t n = p.phi.size() - 1;
  const double h = p.h;
  p.v.assign(n + 1, 0.0);
  p.active_plus.clear();
  p.active_minus.clear();
  for (std::size_t i = 0; i <= n; ++i) {
    double val = p.pieces.front().base;
    for (const auto& pc : p.pieces) {
      if (pc.hi <= p.phi[i]) val = pc.end_value;
    }
    p.v[i] = val;
  }
  for (const auto& pc : p.pieces) {
    auto j = static_cast<std::size_t>(std::ceil(pc.lo / h));
    if (p.phi[j] <= pc.lo) ++j;
    if (j > n || p.phi[j] >= pc.hi) continue;
    const auto f = [&](double phi) { return rate(a, s, pc.alpha, phi); };
    double acc = pc.base + simpson(f, pc.lo, p.phi[j], 8);
    for (; j <= n && p.phi[j] < pc.hi; ++j) {
      if (j > 0 && p.phi[j - 1] > pc.lo) acc += simpson(f, p.phi[j - 1], p.phi[j], 4);
      p.v[j] = acc;
    }
  }
  const double half = 0.5 * p.beta;
  for (std::size_t i = 0; i <= n; ++i) {
    p.v[i] = std::clamp(p.v[i], -half, half);
    bool inside = false;
    for (const auto& pc : p.pieces) inside = inside || (p.phi[i] > pc.lo && p.phi[i] < pc.hi);
    if (inside) continue;
    (p.v[i] > 0.0 ? p.active_plus : p.active_minus).push_back(i);
  }
}

}  // namespace

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Vortexless: return "vortexless";
    case Regime::OneComponent: return "one-component";
    case Regime::TwoComponentFrozen: return "two-component-frozen";
    case Regime::ThreeComponent: return "three-component";
  }
  return "unknown";
}

double default_eps_active(double h, double beta_c, double beta) {
  return std::min(10.0 * h * h * beta_c, 1e-3 * beta);
}

void classify_active(Profile1D& p, double eps_active) {
  p.active_plus.clear();
  p.active_minus.clear();
  const double half = 0.5 * p.beta;
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    if (half - std::abs(p.v[i]) > eps_active) continue;
    (p.v[i] > 0.0 ? p.active_plus : p.active_minus).push_back(i);
  }
}

Profile1D solve_regime(const AxiPotential& a, const RevolutionSurface& s, const FieldPair& f,
                       double beta) {
  const double bc = beta_critical(a, s);
  if (!(beta > 0.0 && beta < bc)) {
    throw Error(ErrorCode::BetaOutOfRange,
                "beta " + std::to_string(beta) + " outside (0, beta_c = " + std::to_string(bc) + ")");
  }
  if (f.H.size() != s.nodes()) throw Error(ErrorCode::DimensionMismatch, "field pair / surface size");
  Profile1D p;
  p.phi.assign(s.phi().begin(), s.phi().end());
  p.beta = beta;
  p.beta_c = f.beta_c;
  p.h = s.h();
  p.solver = "regime";
  const double half = 0.5 * beta;
  const RawIntegrals raw{a, s, static_cast<int>(a.crit().size())};
  const double a1 = a.crit_vals()[0];
  const double tiny = 1e-12 * a.a_max();

  const auto case1 = [&](double alpha_hi) {
    const double alpha = solve_level([&](double x) { return raw.I(x); }, beta, tiny, alpha_hi);
    p.regime = Regime::OneComponent;
    p.alphas = {alpha};
    p.pieces = {{branch_root(a, 0, alpha), branch_root(a, raw.last, alpha), alpha, -half, half}};
  };

  if (a.shape() == PotentialShape::SingleBump) {
    case1(a1 - tiny);
    fill_nodes(p, a, s);
    return p;
  }

  const CriticalBetas cb = critical_betas(a, s);
  const double as = cb.alpha_star;
  const double a3 = a.crit_vals()[2];
  if (beta > cb.beta1) {
    case1(as);
  } else if (beta > cb.beta2) {
    p.regime = Regime::TwoComponentFrozen;
    p.mirrored = cb.mirrored;
    if (!cb.mirrored) {
      const double alpha = solve_level([&](double x) { return raw.I_plus(x); }, beta, as, a3 - tiny);
      p.alphas = {alpha, as};
      p.pieces = {{branch_root(a, 0, as), branch_root(a, 2, as), as, -half, -half},
                  {branch_root(a, 2, alpha), branch_root(a, 3, alpha), alpha, -half, half}};
    } else {
      const double alpha = solve_level([&](double x) { return raw.I_minus(x); }, beta, as, a1 - tiny);
      p.alphas = {alpha, as};
      p.pieces = {{branch_root(a, 0, alpha), branch_root(a, 1, alpha), alpha, -half, half},
                  {branch_root(a, 1, as), branch_root(a, 3, as), as, half, half}};
    }
  } else {
    p.regime = Regime::ThreeComponent;
    const double a2 = a.crit_vals()[1];
    const double al1 = solve_level([&](double x) { return raw.I_minus(x); }, beta, as, a1 - tiny);
    const double al2 = solve_level([&](double x) { return raw.J(x); }, beta, a2 + tiny, as);
    const double al3 = solve_level([&](double x) { return raw.I_plus(x); }, beta, as, a3 - tiny);
    p.alphas = {al1, al2, al3};
    p.pieces = {{branch_root(a, 0, al1), branch_root(a, 1, al1), al1, -half, half},
                {branch_root(a, 1, al2), branch_root(a, 2, al2), al2, half, -half},
                {branch_root(a, 2, al3), branch_root(a, 3, al3), al3, -half, half}};
  }
  fill_nodes(p, a, s);
  return p;
}

double regime_value(const Profile1D& p, const AxiPotential& a, const RevolutionSurface& s,
                    double phi) {
  if (p.pieces.empty()) throw Error(ErrorCode::InvalidInput, "profile was not built by the regime construction");
  double val = p.pieces.front().base;
  for (const auto& pc : p.pieces) {
    if (phi > pc.lo && phi < pc.hi) {
      return std::clamp(pc.base + weighted_area(a, s, pc.alpha, pc.lo, phi), -0.5 * p.beta, 0.5 * p.beta);
    }
    if (pc.hi <= phi) val = pc.end_value;
  }
  return val;
}

Profile1D solve_pgs_1d(const AxiPotential& a, const RevolutionSurface& s, double beta,
                       const Pgs1dOptions& opt) {
  if (!(beta > 0.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must be positive");
  if (!(opt.tol > 0.0) || opt.max_sweeps < 1) throw Error(ErrorCode::InvalidInput, "tol and max_sweeps must be positive");
  const std::size_t n = static_cast<std::size_t>(s.intervals());
  const std::size_t m = n / 2;
  const double h = s.h();
  const auto mw = s.mid_weight();
  const auto phi = s.phi();
  const FieldPair fp = derive_fields(a, s);

  // Load h² a', made exactly compatible with the Neumann operator.
  std::vector<double> b(n + 1);
  double bsum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    b[i] = -h * h * a.a_prime(phi[i]);
    bsum += (i == 0 || i == n ? 0.5 : 1.0) * b[i];
  }
  for (double& x : b) x -= bsum / static_cast<double>(n);

  std::vector<double> v(n + 1);
  const double half = 0.5 * beta;
  if (!opt.initial.empty()) {
    if (opt.initial.size() != n + 1) throw Error(ErrorCode::DimensionMismatch, "initial guess length");
    for (std::size_t i = 0; i <= n; ++i) v[i] = std::clamp(opt.initial[i], -half, half);
  } else {
    const auto [lo, hi] = std::minmax_element(fp.starF.begin(), fp.starF.end());
    const double shift = 0.5 * (*lo + *hi);
    for (std::size_t i = 0; i <= n; ++i) v[i] = std::clamp(fp.starF[i] - shift, -half, half);
  }

  double omega = opt.omega;
  if (omega == 0.0) {
    const std::vector<double> ones(n + 1, 1.0);
    const double area = integrate(s, ones);
    double g2 = 0.0;
    for (double g : s.gamma()) g2 += g * g;
    g2 /= static_cast<double>(n + 1);
    const double rho_j = 1.0 - (8.0 * kPi / area) * h * h * g2 / 2.0;
    omega = 2.0 / (1.0 + std::sqrt(std::max(1.0 - rho_j * rho_j, 0.0)));
  }
  if (!(omega > 0.0 && omega < 2.0)) throw Error(ErrorCode::InvalidInput, "relaxation factor must lie in (0, 2)");

  // Deinterleave: even nodes 2j, odd nodes 2j+1 stored at odd[j+1] with
  // mirror ghosts odd[0] = v₁ and odd[m+1] = v_{n-1}.
  std::vector<double> even(m + 1), odd(m + 2);
  std::vector<double> wl_e(m + 1), wr_e(m + 1), id_e(m + 1), b_e(m + 1);
  std::vector<double> wl_o(m), wr_o(m), id_o(m), b_o(m);
  for (std::size_t j = 0; j <= m; ++j) {
    even[j] = v[2 * j];
    wl_e[j] = j == 0 ? mw[0] : mw[2 * j - 1];
    wr_e[j] = j == m ? mw[n - 1] : mw[2 * j];
    id_e[j] = 1.0 / (wl_e[j] + wr_e[j]);
    b_e[j] = b[2 * j];
  }
  for (std::size_t j = 0; j < m; ++j) {
    odd[j + 1] = v[2 * j + 1];
    wl_o[j] = mw[2 * j];
    wr_o[j] = mw[2 * j + 1];
    id_o[j] = 1.0 / (wl_o[j] + wr_o[j]);
    b_o[j] = b[2 * j + 1];
  }
  const auto ghosts = [&] {
    odd[0] = odd[1];
    odd[m + 1] = odd[m];
  };
  ghosts();

  const auto& k = kernels::active();
  kernels::RbSweepArgs red{even, odd, wl_e, wr_e, id_e, b_e, omega, -half, half};
  kernels::RbSweepArgs black{std::span<double>(odd).subspan(1, m), even, wl_o, wr_o, id_o, b_o, omega, -half, half};
  long sweeps = 0;
  double change = INFINITY;
  while (sweeps < opt.max_sweeps) {
    change = k.rb_sweep(red);
    change = std::max(change, k.rb_sweep(black));
    ghosts();
    ++sweeps;
    if (change < opt.tol) break;
  }
  if (!(change < opt.tol)) throw NotConverged(sweeps, change);

  for (std::size_t j = 0; j <= m; ++j) v[2 * j] = even[j];
  for (std::size_t j = 0; j < m; ++j) v[2 * j + 1] = odd[j + 1];
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double shift = 0.5 * (*lo + *hi);
  for (double& x : v) x = std::clamp(x - shift, -half, half);

  Profile1D p;
  p.phi.assign(phi.begin(), phi.end());
  p.v = std::move(v);
  p.beta = beta;
  p.beta_c = fp.beta_c;
  p.h = h;
  p.solver = "pgs";
  p.sweeps = sweeps;
  p.residual = change;
  const double eps = opt.eps_active > 0.0 ? opt.eps_active : default_eps_active(h, fp.beta_c, beta);
  classify_active(p, eps);
  if (p.active_plus.empty() && p.active_minus.empty()) {
    p.regime = Regime::Vortexless;
  } else {
    const auto comps = components_1d(p, eps);
    p.regime = comps.size() >= 3 ? Regime::ThreeComponent
               : comps.size() == 2 ? Regime::TwoComponentFrozen
                                   : Regime::OneComponent;
  }
  return p;
}

std::vector<Interval1D> components_1d(const Profile1D& p, double eps_active) {
  const std::size_t n = p.v.size();
  const double half = 0.5 * p.beta;
  const auto gap = [&](std::size_t i) { return half - std::abs(p.v[i]); };
  const auto root_gap = [&](std::size_t i) { return std::sqrt(std::max(gap(i), 0.0)); };
  const auto side = [&](std::size_t i) { return p.v[i] > 0.0 ? 1 : -1; };
  // Nodes within eps of the obstacle but not on it still lie in the contact
  // zone; the extrapolated endpoint may move back as far as true contact.
  const double touch = 1e-12 * p.beta;
  std::vector<Interval1D> out;
  std::size_t i = 0;
  while (i < n) {
    if (gap(i) <= eps_active) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    while (i + 1 < n && gap(i + 1) > eps_active) ++i;
    const std::size_t last = i;
    ++i;
    Interval1D c{p.phi[first], p.phi[last], first, last, 0, 0};
    // Contact is quadratic, so sqrt(gap) is locally linear in φ: extrapolate
    // it from the two innermost free nodes, falling back to linear
    // interpolation of the gap across the boundary cell.
    if (first > 0) {
      c.lo_side = side(first - 1);
      std::size_t k = first - 1;
      while (k > 0 && gap(k) > touch) --k;
      const double g0 = root_gap(first);
      const double g1 = last > first ? root_gap(first + 1) : g0;
      double x = p.phi[first] - g0 * p.h / std::max(g1 - g0, 1e-300);
      if (!(g1 > g0) || x < p.phi[k]) {
        const double ga = gap(first - 1);
        const double gb = gap(first);
        x = p.phi[first - 1] + p.h * (0.0 - ga) / (gb - ga);
      }
      c.lo = std::clamp(x, p.phi[k], p.phi[first]);
    } else {
      c.lo = p.phi.front();
    }
    if (last + 1 < n) {
      c.hi_side = side(last + 1);
      std::size_t k = last + 1;
      while (k + 1 < n && gap(k) > touch) ++k;
      const double g0 = root_gap(last);
      const double g1 = last > first ? root_gap(last - 1) : g0;
      double x = p.phi[last] + g0 * p.h / std::max(g1 - g0, 1e-300);
      if (!(g1 > g0) || x > p.phi[k]) {
        const double ga = gap(last);
        const double gb = gap(last + 1);
        x = p.phi[last] + p.h * ga / (ga - gb);
      }
      c.hi = std::clamp(x, p.phi[last], p.phi[k]);
    } else {
      c.hi = p.phi.back();
    }
    out.push_back(c);
  }
  return out;
}

ResidualReport residual_check(const Profile1D& p, const AxiPotential& a, const RevolutionSurface& s,
                              double sign_tol) {
  if (p.v.size() != s.nodes()) throw Error(ErrorCode::DimensionMismatch, "profile / surface size");
  ResidualReport r;
  const std::size_t n = p.v.size() - 1;
  const double h = s.h();
  const auto mw = s.mid_weight();
  const double eps = default_eps_active(h, p.beta_c > 0.0 ? p.beta_c : p.beta, p.beta);
  const double half = 0.5 * p.beta;
  const auto free = [&](std::size_t i) { return half - std::abs(p.v[i]) > eps; };
  const auto flux = [&](std::size_t i) {
    return mw[i] * (p.v[i + 1] - p.v[i]) / h - a.a(p.phi[i] + 0.5 * h);
  };
  for (std::size_t i = 1; i < n; ++i) {
    if (!(free(i - 1) && free(i) && free(i + 1))) continue;
    r.ode_residual = std::max(r.ode_residual, std::abs(flux(i) - flux(i - 1)) / h);
    ++r.free_nodes_checked;
  }
  r.min_aprime_minus = INFINITY;
  r.max_aprime_plus = -INFINITY;
  for (std::size_t i : p.active_minus) {
    const double d = a.a_prime(p.phi[i]);
    r.min_aprime_minus = std::min(r.min_aprime_minus, d);
    if (d < -sign_tol) ++r.sign_violations;
  }
  for (std::size_t i : p.active_plus) {
    const double d = a.a_prime(p.phi[i]);
    r.max_aprime_plus = std::max(r.max_aprime_plus, d);
    if (d > sign_tol) ++r.sign_violations;
  }
  r.endpoint_slope = std::max(std::abs(p.v[1] - p.v[0]), std::abs(p.v[n] - p.v[n - 1])) / h;
  return r;
}

void write_profile_csv(const Profile1D& p, const std::string& path) {
  std::vector<double> flag(p.v.size(), 0.0);
  for (std::size_t i : p.active_plus) flag[i] = 1.0;
  for (std::size_t i : p.active_minus) flag[i] = -1.0;
  write_csv_columns(path, {"phi", "v", "active"}, {p.phi, p.v, flag});
}

}  // namespace sc_obstacle
