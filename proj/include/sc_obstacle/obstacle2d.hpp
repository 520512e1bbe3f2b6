#pragma once

// Two-sided obstacle problem on a closed triangulated surface.

#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

struct Pgs2dOptions {
  double tol = 1e-10;
  long max_sweeps = 1'000'000;
  // 0 picks an over-relaxation factor from the mesh; 1 is plain Gauss-Seidel.
  double omega = 0.0;
  // Starting iterate. Empty means clamp(*F) when warm_start, else 0.
  std::span<const double> initial;
  // Precomputed *F; computed by a Poisson solve when empty and needed.
  std::span<const double> starF;
  bool warm_start = true;
  double eps_active = -1.0;
};

struct MeshSolution {
  std::vector<double> V;
  double beta = 0.0;
  // max *F - min *F when *F was available, else 0.
  double beta_c = 0.0;
  std::vector<int> active_plus;
  std::vector<int> active_minus;
  long iterations = 0;
  double residual = 0.0;
  bool nondegenerate = true;
  std::vector<std::string> warnings;
};

// *F with Δ*F = H (H must have zero mean) and zero mean itself.
std::vector<double> mesh_primitive(const TriMesh& mesh, std::span<const double> H);

struct BoxSolve {
  std::vector<double> V;
  long sweeps = 0;
  double residual = 0.0;
};

// min Σ w_ij (V_i - V_j)² + 2 Σ m_i H_i V_i over lo <= V <= hi. H need not
// have zero mean. Throws NotConverged.
BoxSolve solve_box_2d(const TriMesh& mesh, std::span<const double> H, double lo, double hi,
                      const Pgs2dOptions& opt = {});

MeshSolution solve_pgs_2d(const TriMesh& mesh, const MeshField& H, double beta,
                          const Pgs2dOptions& opt = {});

double default_eps_active_2d(const TriMesh& mesh, double beta_c, double beta);

struct MeshComponent {
  std::vector<int> vertices;
  double area = 0.0;
  double boundary_length = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  // Non-free neighbours of the component at +β/2 and at -β/2.
  std::size_t boundary_plus = 0;
  std::size_t boundary_minus = 0;
};

struct ComponentReport {
  double eps_active = 0.0;
  std::vector<char> free;
  std::vector<MeshComponent> components;
  std::size_t count() const noexcept { return components.size(); }
};

// Components of {β/2 - |V| > eps} over mesh edges, largest area first.
ComponentReport sc_region(const MeshSolution& sol, const TriMesh& mesh, double eps_active);

struct VorticityReport {
  std::vector<double> mu;
  double total = 0.0;
  double total_variation = 0.0;
  // max |μ| over free vertices whose whole one-ring is free.
  double max_free_interior = 0.0;
  std::size_t sign_checked = 0;
  std::size_t sign_violations = 0;
  double max_sign_violation = 0.0;
};

// μ = -ΔV + H. Sign tests skip active vertices with a free neighbour.
VorticityReport vorticity(const MeshSolution& sol, std::span<const double> H, const TriMesh& mesh,
                          double eps_active, double sign_tol = 1e-9);

// Σ w (V_i - V_j)² + 2 Σ m H V.
double energy_F(std::span<const double> V, std::span<const double> H, const TriMesh& mesh);
// Σ w (V_i - V_j)² + β Σ m |-ΔV + H|.
double energy_E(std::span<const double> V, std::span<const double> H, const TriMesh& mesh,
                double beta);

// vertex, V, μ, active flag (-1, 0, +1).
void write_mesh_solution_csv(const MeshSolution& sol, std::span<const double> mu,
                             const std::string& path);

}  // namespace sc_obstacle
