#pragma once

// β sweeps and the comparative checks run on them: set monotonicity,
// continuity in β, width and gradient scaling, thickness, regime transitions
// and freezing of components.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/obstacle1d.hpp"
#include "sc_obstacle/obstacle2d.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

struct AxiProblem {
  AxiPotential a;
  RevolutionSurface s;
};

struct MeshProblem {
  TriMesh mesh;
  MeshField field;
};

enum class SweepSolver { Auto, Regime, Pgs };

struct SweepOptions {
  // Auto: the regime construction below β_c, projected SOR at and above it.
  SweepSolver solver = SweepSolver::Auto;
  double tol_1d = 1e-12;
  double tol_2d = 1e-10;
  long max_sweeps = 2'000'000;
  bool keep_solutions = true;
};

struct ComponentSummary {
  // 1D: φ endpoints. 2D: polar-angle extent estimated from the boundary.
  double lo = 0.0;
  double hi = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  int lo_side = 0;
  int hi_side = 0;
  // ±1 when every boundary piece sits on the same obstacle, 0 otherwise.
  int boundary_side = 0;
  double width = 0.0;
  double area = 0.0;
  std::size_t vertex_count = 0;
  std::vector<int> vertices;
};

struct SweepRecord {
  double beta = 0.0;
  bool ok = false;
  std::string error;
  int error_code = 0;
  std::string solver;
  std::string regime;
  double eps_active = 0.0;
  std::vector<ComponentSummary> components;
  double max_gradient = 0.0;
  double energy_F = 0.0;
  double energy_E = 0.0;
  std::size_t active_plus = 0;
  std::size_t active_minus = 0;
  // Geodesic distance between the two active sets; infinite when one is empty.
  double separation = std::numeric_limits<double>::infinity();
  long sweeps = 0;
  double residual = 0.0;
  std::vector<double> V;
};

struct SweepReport {
  std::string problem;
  bool mesh = false;
  double beta_c = 0.0;
  // Grid spacing: φ step in 1D, mean edge length in 2D.
  double h = 0.0;
  std::vector<double> betas;
  std::vector<SweepRecord> records;
  // 1D node positions and arc length, for the per-β CSV.
  std::vector<double> phi;
  std::vector<double> arc;
};

// Betas are sorted and deduplicated; solves run from the largest β down, each
// warm-started from the previous solution. Per-β failures are recorded and the
// sweep continues.
SweepReport sweep(const AxiProblem& problem, std::span<const double> betas,
                  const SweepOptions& opt = {});
SweepReport sweep(const MeshProblem& problem, std::span<const double> betas,
                  const SweepOptions& opt = {});

// n points from lo to hi, geometric.
std::vector<double> logspace(double lo, double hi, std::size_t n);
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct MonotonicityViolation {
  std::size_t pair = 0;
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  // Points free at the smaller β (gap > 2 eps) but active at the larger one.
  std::size_t points = 0;
  std::size_t first_point = 0;
};

std::vector<MonotonicityViolation> check_monotonicity(const SweepReport& r);

struct ContinuityReport {
  // max over consecutive pairs of min_c sup|V₁ - V₂ - c| - |β₂ - β₁|/2.
  double max_excess = 0.0;
  std::vector<double> excess;
  double tolerance = 0.0;
  bool pass = true;
};

ContinuityReport check_continuity(const SweepReport& r);

enum class ScalingQuantity { Width, Gradient };

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
  std::vector<double> betas;
  std::vector<double> values;
};

// Least squares of log(quantity) on log β over records with β <= 1e-2 β_c.
// Width uses the component with the given index (ordered by position).
// Throws InsufficientRange below 6 samples or 2 decades.
ScalingFit fit_scaling(const SweepReport& r, ScalingQuantity q, std::size_t component = 0);

struct ThicknessReport {
  std::vector<double> betas;
  std::vector<double> ratios;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  // Width / β^{1/3} for each component separating the two obstacles.
  std::vector<std::vector<double>> component_ratios;
  bool pass = false;
};

ThicknessReport check_thickness(const SweepReport& r);

struct Transition {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::size_t count_lo = 0;
  std::size_t count_hi = 0;
};

// Brackets between consecutive successful records whose component count changes.
std::vector<Transition> transitions(const SweepReport& r);

struct FreezeRecord {
  // Component index within the record at beta_hi.
  std::size_t component = 0;
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::size_t records = 0;
  // Obstacle value on the boundary: +1 for β/2, -1 for -β/2.
  int side = 0;
  double lo = 0.0;
  double hi = 0.0;
  // Largest endpoint displacement over the window, in grid cells.
  double max_move = 0.0;
  double m = 0.0;
  double delta = 0.0;
  double predicted_lo = 0.0;
  // Window reaches β₀ - δ up to one sweep step, or the run reaches the
  // smallest β of the sweep.
  bool window_ok = false;
  bool truncated = false;
};

std::vector<FreezeRecord> detect_freezing(const SweepReport& r, double tol_move = 3.0);

}  // namespace sc_obstacle
