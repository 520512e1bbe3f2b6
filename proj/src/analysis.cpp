#include "sc_obstacle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include "sc_obstacle/error.hpp"

namespace sc_obstacle {

namespace {

std::vector<double> sorted_betas(std::span<const double> betas) {
  std::vector<double> b(betas.begin(), betas.end());
  for (double x : b) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::BetaOutOfRange, "sweep betas must be positive");
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double interp(std::span<const double> x, std::span<const double> y, double t) {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

int side_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

int common_side(int a, int b) {
  if (a == 0) return b;
  if (b == 0) return a;
  return a == b ? a : 0;
}

void record_failure(SweepRecord& rec, const Error& e) {
  rec.ok = false;
  rec.error = e.what();
  rec.error_code = static_cast<int>(e.code());
}

// Merge of two sorted arc-length lists: smallest |x - y|.
double nearest_pair(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (double x : xs) {
    while (j + 1 < ys.size() && ys[j + 1] <= x) ++j;
    best = std::min(best, std::abs(x - ys[j]));
    if (j + 1 < ys.size()) best = std::min(best, std::abs(ys[j + 1] - x));
  }
  return best;
}

void summarize_1d(SweepRecord& rec, const Profile1D& p, const RevolutionSurface& s, const FieldPair& f) {
  const auto arc = s.arc_length();
  const auto phi = s.phi();
  rec.solver = p.solver;
  rec.regime = to_string(p.regime);
  rec.sweeps = p.sweeps;
  rec.residual = p.residual;
  rec.active_plus = p.active_plus.size();
  rec.active_minus = p.active_minus.size();

  std::vector<Interval1D> comps;
  if (!p.pieces.empty()) {
    // Exact endpoints from the construction.
    for (const auto& pc : p.pieces) {
      Interval1D c{pc.lo, pc.hi, 0, 0, side_of(pc.base), side_of(pc.end_value)};
      c.first = static_cast<std::size_t>(std::ceil(pc.lo / p.h));
      c.last = std::min(static_cast<std::size_t>(std::floor(pc.hi / p.h)), phi.size() - 1);
      comps.push_back(c);
    }
  } else {
    comps = components_1d(p, rec.eps_active);
  }
  for (const auto& c : comps) {
    ComponentSummary cs;
    cs.lo = c.lo;
    cs.hi = c.hi;
    cs.first = c.first;
    cs.last = c.last;
    cs.lo_side = c.lo_side;
    cs.hi_side = c.hi_side;
    cs.boundary_side = common_side(c.lo_side, c.hi_side);
    cs.width = interp(phi, arc, c.hi) - interp(phi, arc, c.lo);
    rec.components.push_back(cs);
  }

  for (std::size_t i = 0; i + 1 < p.v.size(); ++i) {
    const double ds = arc[i + 1] - arc[i];
    if (ds > 0.0) rec.max_gradient = std::max(rec.max_gradient, std::abs(p.v[i + 1] - p.v[i]) / ds);
  }

  std::vector<double> hv(p.v.size());
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = f.H[i] * p.v[i];
  const double dir = dirichlet_form(s, p.v, p.v);
  rec.energy_F = dir + 2.0 * integrate(s, hv);
  auto mu = laplacian_axisymmetric(s, p.v);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = std::abs(f.H[i] - mu[i]);
  rec.energy_E = dir + p.beta * integrate(s, mu);

  std::vector<double> ap, am;
  for (auto i : p.active_plus) ap.push_back(arc[i]);
  for (auto i : p.active_minus) am.push_back(arc[i]);
  std::sort(ap.begin(), ap.end());
  std::sort(am.begin(), am.end());
  rec.separation = nearest_pair(ap, am);
}

// Multi-source Dijkstra over mesh edges from `from`, stopping at the first
// vertex of `to`.
double graph_distance(const TriMesh& mesh, const std::vector<int>& from, const std::vector<int>& to) {
  if (from.empty() || to.empty()) return std::numeric_limits<double>::infinity();
  const auto verts = mesh.vertices();
  std::vector<char> target(mesh.vertex_count(), 0);
  for (int v : to) target[static_cast<std::size_t>(v)] = 1;
  std::vector<double> dist(mesh.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int v : from) {
    dist[static_cast<std::size_t>(v)] = 0.0;
    pq.push({0.0, v});
  }
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    const auto vv = static_cast<std::size_t>(v);
    if (d > dist[vv]) continue;
    if (target[vv]) return d;
    for (int u : mesh.neighbors(vv)) {
      const auto uu = static_cast<std::size_t>(u);
      const double dx = verts[uu][0] - verts[vv][0];
      const double dy = verts[uu][1] - verts[vv][1];
      const double dz = verts[uu][2] - verts[vv][2];
      const double nd = d + std::sqrt(dx * dx + dy * dy + dz * dz);
      if (nd < dist[uu]) {
        dist[uu] = nd;
        pq.push({nd, u});
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

// Polar extent of a component on the unit sphere. Contact is C¹ with V'' = H
// on the free side, so a free vertex next to the active set sits about
// sqrt(2 gap / |H|) inside the boundary; the estimate is pushed that far
// towards its active neighbours and averaged over each boundary curve.
void polar_extent(const MeshComponent& c, const TriMesh& mesh, const MeshSolution& sol,
                  std::span<const double> H, std::span<const double> polar,
                  const std::vector<char>& free, ComponentSummary& cs) {
  const double half = 0.5 * sol.beta;
  const double cap = 2.0 * mesh.mean_edge_length();
  double lo_sum = 0.0, hi_sum = 0.0;
  std::size_t lo_n = 0, hi_n = 0;
  for (int v : c.vertices) {
    const auto i = static_cast<std::size_t>(v);
    double dir = 0.0;
    for (int u : mesh.neighbors(i)) {
      const auto uu = static_cast<std::size_t>(u);
      if (!free[uu]) dir += polar[uu] - polar[i];
    }
    if (dir == 0.0) continue;
    const double gap = half - std::abs(sol.V[i]);
    const double d = std::abs(H[i]) > 0.0 ? std::min(std::sqrt(2.0 * gap / std::abs(H[i])), cap) : cap;
    if (dir < 0.0) {
      lo_sum += polar[i] - d;
      ++lo_n;
    } else {
      hi_sum += polar[i] + d;
      ++hi_n;
    }
  }
  const double pi = std::acos(-1.0);
  cs.lo = lo_n > 0 ? std::max(lo_sum / static_cast<double>(lo_n), 0.0) : 0.0;
  cs.hi = hi_n > 0 ? std::min(hi_sum / static_cast<double>(hi_n), pi) : pi;
}

void summarize_2d(SweepRecord& rec, const MeshSolution& sol, const MeshProblem& pr) {
  const auto& mesh = pr.mesh;
  rec.solver = "pgs";
  rec.sweeps = sol.iterations;
  rec.residual = sol.residual;
  rec.active_plus = sol.active_plus.size();
  rec.active_minus = sol.active_minus.size();
  const auto comps = sc_region(sol, mesh, rec.eps_active);
  const auto polar = vertex_polar_angles(mesh);
  for (const auto& c : comps.components) {
    ComponentSummary cs;
    cs.area = c.area;
    cs.vertex_count = c.vertices.size();
    cs.vertices = c.vertices;
    cs.first = static_cast<std::size_t>(c.vertices.front());
    cs.last = static_cast<std::size_t>(c.vertices.back());
    if (c.boundary_plus > 0 && c.boundary_minus == 0) cs.boundary_side = 1;
    if (c.boundary_minus > 0 && c.boundary_plus == 0) cs.boundary_side = -1;
    if (mesh.on_unit_sphere()) {
      polar_extent(c, mesh, sol, pr.field.H, polar, comps.free, cs);
      cs.width = cs.hi - cs.lo;
    } else {
      cs.lo = c.phi_min;
      cs.hi = c.phi_max;
      cs.width = c.boundary_length > 0.0 ? 2.0 * c.area / c.boundary_length : 0.0;
    }
    // Two-sided components: lower curve touches one obstacle, upper the other.
    if (cs.boundary_side != 0) {
      cs.lo_side = cs.hi_side = cs.boundary_side;
    }
    rec.components.push_back(std::move(cs));
  }
  std::stable_sort(rec.components.begin(), rec.components.end(),
                   [](const ComponentSummary& a, const ComponentSummary& b) { return a.lo < b.lo; });
  rec.regime = rec.components.empty() ? "vortexless" : std::to_string(rec.components.size()) + "-component";

  const auto g = gradient_magnitude(mesh, sol.V);
  rec.max_gradient = g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
  rec.energy_F = energy_F(sol.V, pr.field.H, mesh);
  rec.energy_E = energy_E(sol.V, pr.field.H, mesh, sol.beta);
  rec.separation = graph_distance(mesh, sol.active_plus, sol.active_minus);
}

}  // namespace

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw Error(ErrorCode::InvalidInput, "logspace needs positive ends");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  if (n > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out[i] = lo + t * (hi - lo);
  }
  if (n > 1) out.back() = hi;
  return out;
}

SweepReport sweep(const AxiProblem& pr, std::span<const double> betas_in, const SweepOptions& opt) {
  SweepReport r;
  r.problem = pr.a.name() + "@" + pr.s.name();
  r.h = pr.s.h();
  r.betas = sorted_betas(betas_in);
  r.phi.assign(pr.s.phi().begin(), pr.s.phi().end());
  r.arc.assign(pr.s.arc_length().begin(), pr.s.arc_length().end());
  if (r.betas.empty()) return r;
  const FieldPair f = derive_fields(pr.a, pr.s);
  r.beta_c = f.beta_c;
  const double beta_c_exact = beta_critical(pr.a, pr.s);
  r.records.resize(r.betas.size());
  std::vector<double> warm;
  for (std::size_t k = r.betas.size(); k-- > 0;) {
    SweepRecord& rec = r.records[k];
    const double beta = r.betas[k];
    rec.beta = beta;
    rec.eps_active = default_eps_active(r.h, r.beta_c, beta);
    const auto run_pgs = [&] {
      Pgs1dOptions po;
      po.tol = opt.tol_1d;
      po.max_sweeps = opt.max_sweeps;
      po.eps_active = rec.eps_active;
      if (!warm.empty()) po.initial = warm;
      return solve_pgs_1d(pr.a, pr.s, beta, po);
    };
    try {
      Profile1D p;
      const bool regime = opt.solver == SweepSolver::Regime ||
                          (opt.solver == SweepSolver::Auto && beta < beta_c_exact);
      if (regime) {
        try {
          p = solve_regime(pr.a, pr.s, f, beta);
        } catch (const Error& e) {
          // Within quadrature error of β_c the construction has no root.
          if (opt.solver == SweepSolver::Regime ||
              (e.code() != ErrorCode::RootNotBracketed && e.code() != ErrorCode::BetaOutOfRange)) {
            throw;
          }
          p = run_pgs();
        }
      } else {
        p = run_pgs();
      }
      summarize_1d(rec, p, pr.s, f);
      rec.ok = true;
      warm = p.v;
      if (opt.keep_solutions) rec.V = std::move(p.v);
    } catch (const Error& e) {
      record_failure(rec, e);
    }
  }
  return r;
}

SweepReport sweep(const MeshProblem& pr, std::span<const double> betas_in, const SweepOptions& opt) {
  SweepReport r;
  r.problem = "mesh";
  r.mesh = true;
  r.h = pr.mesh.mean_edge_length();
  r.betas = sorted_betas(betas_in);
  if (r.betas.empty()) return r;
  if (opt.solver == SweepSolver::Regime) {
    throw Error(ErrorCode::InvalidInput, "the regime construction needs an axisymmetric problem");
  }
  const auto starF = mesh_primitive(pr.mesh, pr.field.H);
  const auto [mn, mx] = std::minmax_element(starF.begin(), starF.end());
  r.beta_c = *mx - *mn;
  r.records.resize(r.betas.size());
  std::vector<double> warm;
  for (std::size_t k = r.betas.size(); k-- > 0;) {
    SweepRecord& rec = r.records[k];
    const double beta = r.betas[k];
    rec.beta = beta;
    rec.eps_active = default_eps_active_2d(pr.mesh, r.beta_c, beta);
    try {
      Pgs2dOptions po;
      po.tol = opt.tol_2d;
      po.max_sweeps = opt.max_sweeps;
      po.starF = starF;
      po.eps_active = rec.eps_active;
      if (!warm.empty()) po.initial = warm;
      MeshSolution sol = solve_pgs_2d(pr.mesh, pr.field, beta, po);
      summarize_2d(rec, sol, pr);
      rec.ok = true;
      warm = sol.V;
      if (opt.keep_solutions) rec.V = std::move(sol.V);
    } catch (const Error& e) {
      record_failure(rec, e);
    }
  }
  return r;
}

std::vector<MonotonicityViolation> check_monotonicity(const SweepReport& r) {
  std::vector<MonotonicityViolation> out;
  for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
    const auto& a = r.records[k];
    const auto& b = r.records[k + 1];
    if (!a.ok || !b.ok || a.V.size() != b.V.size() || a.V.empty()) continue;
    MonotonicityViolation v{k, a.beta, b.beta, 0, 0};
    for (std::size_t i = 0; i < a.V.size(); ++i) {
      const double ga = 0.5 * a.beta - std::abs(a.V[i]);
      const double gb = 0.5 * b.beta - std::abs(b.V[i]);
      if (ga > 2.0 * a.eps_active && gb <= b.eps_active) {
        if (v.points == 0) v.first_point = i;
        ++v.points;
      }
    }
    if (v.points > 0) out.push_back(v);
  }
  return out;
}

ContinuityReport check_continuity(const SweepReport& r) {
  ContinuityReport c;
  c.tolerance = 10.0 * r.h * r.h;
  for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
    const auto& a = r.records[k];
    const auto& b = r.records[k + 1];
    if (!a.ok || !b.ok || a.V.size() != b.V.size() || a.V.empty()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < a.V.size(); ++i) {
      const double d = a.V[i] - b.V[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double e = 0.5 * (hi - lo) - 0.5 * std::abs(b.beta - a.beta);
    c.excess.push_back(e);
    c.max_excess = std::max(c.max_excess, e);
  }
  c.pass = c.max_excess <= c.tolerance;
  return c;
}

ScalingFit fit_scaling(const SweepReport& r, ScalingQuantity q, std::size_t component) {
  ScalingFit fit;
  const double cap = 1e-2 * (r.beta_c > 0.0 ? r.beta_c : 1.0) * (1.0 + 1e-12);
  for (const auto& rec : r.records) {
    if (!rec.ok || rec.beta > cap) continue;
    double value = 0.0;
    if (q == ScalingQuantity::Gradient) {
      value = rec.max_gradient;
    } else {
      if (component >= rec.components.size()) continue;
      value = rec.components[component].width;
    }
    if (!(value > 0.0)) continue;
    fit.betas.push_back(rec.beta);
    fit.values.push_back(value);
  }
  fit.samples = fit.betas.size();
  if (fit.samples < 6) {
    throw Error(ErrorCode::InsufficientRange,
                "scaling fit needs at least 6 samples with beta <= 1e-2 beta_c, got " + std::to_string(fit.samples));
  }
  const double decades = std::log10(fit.betas.back() / fit.betas.front());
  if (decades < 2.0 - 1e-9) {
    throw Error(ErrorCode::InsufficientRange, "scaling fit needs 2 decades of beta, got " + std::to_string(decades));
  }
  const double n = static_cast<double>(fit.samples);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < fit.samples; ++i) {
    sx += std::log(fit.betas[i]);
    sy += std::log(fit.values[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.samples; ++i) {
    const double dx = std::log(fit.betas[i]) - mx;
    const double dy = std::log(fit.values[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

ThicknessReport check_thickness(const SweepReport& r) {
  ThicknessReport t;
  t.min_ratio = std::numeric_limits<double>::infinity();
  t.max_ratio = 0.0;
  for (const auto& rec : r.records) {
    if (!rec.ok || !std::isfinite(rec.separation)) continue;
    const double b3 = std::cbrt(rec.beta);
    const double ratio = rec.separation / b3;
    t.betas.push_back(rec.beta);
    t.ratios.push_back(ratio);
    t.min_ratio = std::min(t.min_ratio, ratio);
    t.max_ratio = std::max(t.max_ratio, ratio);
    std::vector<double> per;
    for (const auto& c : rec.components) {
      if (c.lo_side != 0 && c.hi_side != 0 && c.lo_side != c.hi_side) per.push_back(c.width / b3);
    }
    t.component_ratios.push_back(std::move(per));
  }
  if (t.ratios.empty()) {
    t.min_ratio = 0.0;
    return t;
  }
  t.pass = t.min_ratio > 0.0 && t.max_ratio < 3.0 * t.min_ratio;
  return t;
}

std::vector<Transition> transitions(const SweepReport& r) {
  std::vector<Transition> out;
  const SweepRecord* prev = nullptr;
  for (const auto& rec : r.records) {
    if (!rec.ok) continue;
    if (prev && prev->components.size() != rec.components.size()) {
      out.push_back({prev->beta, rec.beta, prev->components.size(), rec.components.size()});
    }
    prev = &rec;
  }
  return out;
}

std::vector<FreezeRecord> detect_freezing(const SweepReport& r, double tol_move) {
  std::vector<FreezeRecord> out;
  const std::size_t n = r.records.size();
  std::vector<std::vector<char>> used(n);
  for (std::size_t k = 0; k < n; ++k) used[k].assign(r.records[k].components.size(), 0);
  const double tol = tol_move * r.h;

  for (std::size_t top = n; top-- > 0;) {
    const auto& ref = r.records[top];
    if (!ref.ok) continue;
    for (std::size_t ci = 0; ci < ref.components.size(); ++ci) {
      const auto& c0 = ref.components[ci];
      if (used[top][ci] || c0.boundary_side == 0) continue;
      used[top][ci] = 1;
      FreezeRecord fr;
      fr.component = ci;
      fr.beta_hi = ref.beta;
      fr.beta_lo = ref.beta;
      fr.side = c0.boundary_side;
      fr.lo = c0.lo;
      fr.hi = c0.hi;
      fr.records = 1;
      std::size_t bottom = top;
      for (std::size_t k = top; k-- > 0;) {
        const auto& rec = r.records[k];
        if (!rec.ok) break;
        std::size_t match = rec.components.size();
        double move = 0.0;
        for (std::size_t cj = 0; cj < rec.components.size(); ++cj) {
          const auto& c = rec.components[cj];
          if (used[k][cj] || c.boundary_side != fr.side) continue;
          if (c.hi < c0.lo || c.lo > c0.hi) continue;
          const double mv = std::max(std::abs(c.lo - c0.lo), std::abs(c.hi - c0.hi));
          if (mv < tol) {
            match = cj;
            move = mv;
            break;
          }
        }
        if (match == rec.components.size()) break;
        used[k][match] = 1;
        fr.max_move = std::max(fr.max_move, move / r.h);
        fr.beta_lo = rec.beta;
        ++fr.records;
        bottom = k;
      }
      if (fr.records < 2) continue;

      // m over the closed component at β₀: nodes from the last active one
      // below to the first active one above.
      const auto& V = ref.V;
      if (!V.empty()) {
        double m = fr.side < 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        if (r.mesh) {
          for (int v : c0.vertices) {
            const double x = V[static_cast<std::size_t>(v)];
            m = fr.side < 0 ? std::max(m, x) : std::min(m, x);
          }
        } else {
          const std::size_t b = c0.first > 0 ? c0.first - 1 : 0;
          const std::size_t e = std::min(c0.last + 1, V.size() - 1);
          for (std::size_t i = b; i <= e; ++i) m = fr.side < 0 ? std::max(m, V[i]) : std::min(m, V[i]);
        }
        fr.m = m;
        fr.delta = fr.side < 0 ? 0.5 * fr.beta_hi - m : 0.5 * fr.beta_hi + m;
      }
      fr.predicted_lo = fr.beta_hi - fr.delta;
      fr.truncated = bottom == 0;
      double step = 0.0;
      if (bottom > 0) step = r.records[bottom].beta - r.records[bottom - 1].beta;
      fr.window_ok = fr.delta > 0.0 && (fr.truncated || fr.beta_lo - fr.predicted_lo <= step * (1.0 + 1e-9));
      out.push_back(fr);
    }
  }
  std::sort(out.begin(), out.end(), [](const FreezeRecord& a, const FreezeRecord& b) { return a.beta_hi < b.beta_hi; });
  return out;
}

}  // namespace sc_obstacle
