#include "sc_obstacle/obstacle2d.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"

namespace sc_obstacle {

namespace {

constexpr double kPi = std::numbers::pi;

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  }
}

double auto_omega(const TriMesh& mesh) {
  const auto m = mesh.vertex_areas();
  const auto d = mesh.stiffness_diagonal();
  double ratio = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) ratio += m[i] / d[i];
  ratio /= static_cast<double>(m.size());
  const double lambda1 = 8.0 * kPi / mesh.total_area();
  const double rho_j = 1.0 - lambda1 * ratio;
  return 2.0 / (1.0 + std::sqrt(std::max(1.0 - rho_j * rho_j, 0.0)));
}

}  // namespace

std::vector<double> mesh_primitive(const TriMesh& mesh, std::span<const double> H) {
  const std::size_t n = mesh.vertex_count();
  check_size(H.size(), n, "field");
  const auto m = mesh.vertex_areas();
  // K F = -M H with vertex 0 pinned; K is singular only along constants.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 2 * mesh.edge_count());
  const auto d = mesh.stiffness_diagonal();
  for (std::size_t i = 1; i < n; ++i) trip.emplace_back(i - 1, i - 1, d[i]);
  const auto edges = mesh.edges();
  const auto w = mesh.cotan_weights();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int i = edges[e][0];
    const int j = edges[e][1];
    if (i == 0 || j == 0) continue;
    trip.emplace_back(i - 1, j - 1, -w[e]);
    trip.emplace_back(j - 1, i - 1, -w[e]);
  }
  Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
  for (std::size_t i = 1; i < n; ++i) rhs[static_cast<Eigen::Index>(i - 1)] = -m[i] * H[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::InvalidMesh, "stiffness factorisation failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  std::vector<double> F(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) F[i] = x[static_cast<Eigen::Index>(i - 1)];
  const double mean = integrate(mesh, F) / mesh.total_area();
  for (double& v : F) v -= mean;
  return F;
}

BoxSolve solve_box_2d(const TriMesh& mesh, std::span<const double> H, double lo, double hi,
                      const Pgs2dOptions& opt) {
  const std::size_t n = mesh.vertex_count();
  check_size(H.size(), n, "field");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidInput, "empty box");
  if (!(opt.tol > 0.0) || opt.max_sweeps < 1) throw Error(ErrorCode::InvalidInput, "tol and max_sweeps must be positive");
  const double omega = opt.omega == 0.0 ? auto_omega(mesh) : opt.omega;
  if (!(omega > 0.0 && omega < 2.0)) throw Error(ErrorCode::InvalidInput, "relaxation factor must lie in (0, 2)");

  BoxSolve out;
  out.V.assign(n, 0.0);
  if (!opt.initial.empty()) {
    check_size(opt.initial.size(), n, "initial guess");
    for (std::size_t i = 0; i < n; ++i) out.V[i] = opt.initial[i];
  }
  auto& V = out.V;
  for (double& x : V) x = std::clamp(x, lo, hi);

  const auto m = mesh.vertex_areas();
  const auto d = mesh.stiffness_diagonal();
  std::vector<double> load(n), inv_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    load[i] = -m[i] * H[i];
    inv_d[i] = 1.0 / d[i];
  }
  double change = INFINITY;
  long sweeps = 0;
  while (sweeps < opt.max_sweeps) {
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto nb = mesh.neighbors(i);
      const auto w = mesh.neighbor_weights(i);
      double acc = load[i];
      for (std::size_t k = 0; k < nb.size(); ++k) acc += w[k] * V[static_cast<std::size_t>(nb[k])];
      const double next = std::clamp(V[i] + omega * (acc * inv_d[i] - V[i]), lo, hi);
      change = std::max(change, std::abs(next - V[i]));
      V[i] = next;
    }
    ++sweeps;
    if (change < opt.tol) break;
  }
  if (!(change < opt.tol)) throw NotConverged(sweeps, change);
  out.sweeps = sweeps;
  out.residual = change;
  return out;
}

double default_eps_active_2d(const TriMesh& mesh, double beta_c, double beta) {
  const double h = mesh.mean_edge_length();
  return std::min(10.0 * h * h * (beta_c > 0.0 ? beta_c : beta), 1e-3 * beta);
}

MeshSolution solve_pgs_2d(const TriMesh& mesh, const MeshField& H, double beta,
                          const Pgs2dOptions& opt) {
  const std::size_t n = mesh.vertex_count();
  check_size(H.H.size(), n, "field");
  if (!(beta > 0.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must be positive");
  const double half = 0.5 * beta;

  MeshSolution sol;
  sol.beta = beta;
  sol.nondegenerate = H.nondegenerate;
  if (!H.nondegenerate) {
    sol.warnings.push_back("NondegeneracyViolated: min(|H| + |grad H|) = " + std::to_string(H.nondegen_margin));
  }

  std::vector<double> F;
  std::span<const double> starF = opt.starF;
  if (starF.empty() && opt.warm_start && opt.initial.empty()) {
    F = mesh_primitive(mesh, H.H);
    starF = F;
  }
  std::vector<double> init;
  if (!starF.empty()) {
    check_size(starF.size(), n, "*F");
    const auto [lo, hi] = std::minmax_element(starF.begin(), starF.end());
    sol.beta_c = *hi - *lo;
    if (opt.initial.empty() && opt.warm_start) {
      const double shift = 0.5 * (*lo + *hi);
      init.resize(n);
      for (std::size_t i = 0; i < n; ++i) init[i] = starF[i] - shift;
    }
  }
  Pgs2dOptions o = opt;
  if (!init.empty()) o.initial = init;
  BoxSolve bs = solve_box_2d(mesh, H.H, -half, half, o);

  const auto [lo, hi] = std::minmax_element(bs.V.begin(), bs.V.end());
  const double shift = 0.5 * (*lo + *hi);
  for (double& x : bs.V) x = std::clamp(x - shift, -half, half);
  sol.V = std::move(bs.V);
  sol.iterations = bs.sweeps;
  sol.residual = bs.residual;

  const double eps = opt.eps_active > 0.0 ? opt.eps_active : default_eps_active_2d(mesh, sol.beta_c, beta);
  for (std::size_t i = 0; i < n; ++i) {
    if (half - std::abs(sol.V[i]) > eps) continue;
    (sol.V[i] > 0.0 ? sol.active_plus : sol.active_minus).push_back(static_cast<int>(i));
  }
  return sol;
}

ComponentReport sc_region(const MeshSolution& sol, const TriMesh& mesh, double eps_active) {
  const std::size_t n = mesh.vertex_count();
  check_size(sol.V.size(), n, "solution");
  const double half = 0.5 * sol.beta;
  const auto gap = [&](std::size_t i) { return half - std::abs(sol.V[i]) - eps_active; };
  ComponentReport rep;
  rep.eps_active = eps_active;
  rep.free.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) rep.free[i] = gap(i) > 0.0;

  const auto polar = vertex_polar_angles(mesh);
  const auto m = mesh.vertex_areas();
  std::vector<int> label(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (!rep.free[s] || label[s] >= 0) continue;
    MeshComponent c;
    c.phi_min = polar[s];
    c.phi_max = polar[s];
    const int id = static_cast<int>(rep.components.size());
    std::deque<int> queue{static_cast<int>(s)};
    label[s] = id;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      c.vertices.push_back(v);
      c.area += m[static_cast<std::size_t>(v)];
      c.phi_min = std::min(c.phi_min, polar[static_cast<std::size_t>(v)]);
      c.phi_max = std::max(c.phi_max, polar[static_cast<std::size_t>(v)]);
      for (int u : mesh.neighbors(static_cast<std::size_t>(v))) {
        const auto uu = static_cast<std::size_t>(u);
        if (!rep.free[uu]) {
          ++(sol.V[uu] > 0.0 ? c.boundary_plus : c.boundary_minus);
        } else if (label[uu] < 0) {
          label[uu] = id;
          queue.push_back(u);
        }
      }
    }
    std::sort(c.vertices.begin(), c.vertices.end());
    rep.components.push_back(std::move(c));
  }

  // Free boundary length: in each face with mixed states, the chord between
  // the zero crossings of the gap on its two mixed edges. The polyline follows
  // the vertex lattice, so it overestimates smooth curves by a few percent.
  const auto verts = mesh.vertices();
  for (const auto& f : mesh.faces()) {
    Vec3 pts[2];
    int found = 0;
    int owner = -1;
    for (int k = 0; k < 3; ++k) {
      const auto i = static_cast<std::size_t>(f[k]);
      const auto j = static_cast<std::size_t>(f[(k + 1) % 3]);
      if (rep.free[i]) owner = label[i];
      if (rep.free[i] == rep.free[j]) continue;
      const double gi = gap(i);
      const double gj = gap(j);
      const double t = gi / (gi - gj);
      for (int c = 0; c < 3; ++c) pts[found][c] = verts[i][c] + t * (verts[j][c] - verts[i][c]);
      ++found;
    }
    if (found != 2 || owner < 0) continue;
    const double dx = pts[0][0] - pts[1][0];
    const double dy = pts[0][1] - pts[1][1];
    const double dz = pts[0][2] - pts[1][2];
    rep.components[static_cast<std::size_t>(owner)].boundary_length += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  std::stable_sort(rep.components.begin(), rep.components.end(),
                   [](const MeshComponent& a, const MeshComponent& b) { return a.area > b.area; });
  return rep;
}

VorticityReport vorticity(const MeshSolution& sol, std::span<const double> H, const TriMesh& mesh,
                          double eps_active, double sign_tol) {
  const std::size_t n = mesh.vertex_count();
  check_size(sol.V.size(), n, "solution");
  check_size(H.size(), n, "field");
  VorticityReport r;
  r.mu = apply_laplacian(mesh, sol.V);
  const auto m = mesh.vertex_areas();
  const double half = 0.5 * sol.beta;
  std::vector<char> free(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.mu[i] = H[i] - r.mu[i];
    free[i] = half - std::abs(sol.V[i]) > eps_active;
    r.total += r.mu[i] * m[i];
    r.total_variation += std::abs(r.mu[i]) * m[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = mesh.neighbors(i);
    const bool ring_free = std::all_of(nb.begin(), nb.end(), [&](int u) { return free[static_cast<std::size_t>(u)] != 0; });
    const bool ring_active = std::none_of(nb.begin(), nb.end(), [&](int u) { return free[static_cast<std::size_t>(u)] != 0; });
    if (free[i]) {
      if (ring_free) r.max_free_interior = std::max(r.max_free_interior, std::abs(r.mu[i]));
      continue;
    }
    if (!ring_active) continue;
    ++r.sign_checked;
    // μ <= 0 on {V = β/2}, μ >= 0 on {V = -β/2}.
    const double wrong = sol.V[i] > 0.0 ? r.mu[i] : -r.mu[i];
    if (wrong > sign_tol) {
      ++r.sign_violations;
      r.max_sign_violation = std::max(r.max_sign_violation, wrong);
    }
  }
  return r;
}

double energy_F(std::span<const double> V, std::span<const double> H, const TriMesh& mesh) {
  check_size(V.size(), mesh.vertex_count(), "V");
  check_size(H.size(), mesh.vertex_count(), "H");
  const auto m = mesh.vertex_areas();
  double load = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) load += m[i] * H[i] * V[i];
  return dirichlet_energy(mesh, V) + 2.0 * load;
}

double energy_E(std::span<const double> V, std::span<const double> H, const TriMesh& mesh,
                double beta) {
  check_size(V.size(), mesh.vertex_count(), "V");
  check_size(H.size(), mesh.vertex_count(), "H");
  const auto lap = apply_laplacian(mesh, V);
  const auto m = mesh.vertex_areas();
  double tv = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) tv += m[i] * std::abs(H[i] - lap[i]);
  return dirichlet_energy(mesh, V) + beta * tv;
}

void write_mesh_solution_csv(const MeshSolution& sol, std::span<const double> mu,
                             const std::string& path) {
  const std::size_t n = sol.V.size();
  check_size(mu.size(), n, "mu");
  std::vector<double> id(n), flag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<double>(i);
  for (int i : sol.active_plus) flag[static_cast<std::size_t>(i)] = 1.0;
  for (int i : sol.active_minus) flag[static_cast<std::size_t>(i)] = -1.0;
  write_csv_columns(path, {"vertex", "V", "mu", "active"},
                    {id, sol.V, std::vector<double>(mu.begin(), mu.end()), flag});
}

}  // namespace sc_obstacle
