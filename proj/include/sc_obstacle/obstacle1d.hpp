#pragma once

// Axisymmetric two-sided obstacle problem: the explicit regime construction
// and a projected SOR solver for the discretised functional.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

enum class Regime { Vortexless, OneComponent, TwoComponentFrozen, ThreeComponent };

const char* to_string(Regime r) noexcept;

// v(φ) = base + ∫_lo^φ (a - α) γ/ρ on [lo, hi], ending at end_value.
struct Piece1D {
  double lo;
  double hi;
  double alpha;
  double base;
  double end_value;
};

struct Profile1D {
  std::vector<double> phi;
  std::vector<double> v;
  double beta = 0.0;
  double beta_c = 0.0;
  double h = 0.0;
  std::vector<std::size_t> active_plus;
  std::vector<std::size_t> active_minus;
  Regime regime = Regime::Vortexless;
  bool mirrored = false;
  std::vector<double> alphas;
  // Exact superconducting pieces when built by the regime construction.
  std::vector<Piece1D> pieces;
  std::string solver;
  long sweeps = 0;
  double residual = 0.0;
};

// Default active-set tolerance: min(10 h² β_c, 1e-3 β).
double default_eps_active(double h, double beta_c, double beta);

// Recomputes active_plus/active_minus from β/2 - |v| <= eps.
void classify_active(Profile1D& p, double eps_active);

Profile1D solve_regime(const AxiPotential& a, const RevolutionSurface& s, const FieldPair& f,
                       double beta);

// v(φ) of a regime profile at an arbitrary φ.
double regime_value(const Profile1D& p, const AxiPotential& a, const RevolutionSurface& s,
                    double phi);

struct Pgs1dOptions {
  double tol = 1e-12;
  long max_sweeps = 2'000'000;
  // 0 picks 2 / (1 + sin(π/n)); 1 is plain projected Gauss-Seidel.
  double omega = 0.0;
  // Starting iterate; empty means the clamped, centred *F.
  std::span<const double> initial;
  double eps_active = -1.0;
};

Profile1D solve_pgs_1d(const AxiPotential& a, const RevolutionSurface& s, double beta,
                       const Pgs1dOptions& opt = {});

struct Interval1D {
  double lo;
  double hi;
  std::size_t first;
  std::size_t last;
  // Obstacle touched at each end: -1 or +1, 0 at a pole.
  int lo_side;
  int hi_side;
};

std::vector<Interval1D> components_1d(const Profile1D& p, double eps_active);

struct ResidualReport {
  double ode_residual = 0.0;
  double min_aprime_minus = 0.0;
  double max_aprime_plus = 0.0;
  std::size_t sign_violations = 0;
  std::size_t free_nodes_checked = 0;
  double endpoint_slope = 0.0;
};

ResidualReport residual_check(const Profile1D& p, const AxiPotential& a, const RevolutionSurface& s,
                              double sign_tol = 1e-9);

// φ, v, active flag (-1, 0, +1).
void write_profile_csv(const Profile1D& p, const std::string& path);

}  // namespace sc_obstacle
