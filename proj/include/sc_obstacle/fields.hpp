#pragma once

// Axisymmetric potentials a(φ), the induced field H and primitive *F, and the
// level-set integrals that organise the superconducting regimes.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/numerics.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

enum class PotentialShape { SingleBump, TripleZero };

class AxiPotential {
 public:
  // Validates a(0) = a(π) = 0, a > 0 inside, and the sign pattern of a'.
  AxiPotential(std::string name, ScalarFn a, ScalarFn a_prime);

  // "uniform" (sin²φ/2), "triple" (asymmetric two-maximum profile),
  // "symmetric" (mirror-symmetric two-maximum profile).
  static AxiPotential named(const std::string& name);
  // Two-column CSV (φ, a) spanning [0, π].
  static AxiPotential from_csv(const std::string& path);

  AxiPotential scaled(double k) const;

  double a(double phi) const { return a_(phi); }
  double a_prime(double phi) const { return a_prime_(phi); }
  const std::string& name() const noexcept { return name_; }
  PotentialShape shape() const noexcept { return shape_; }
  // Interior critical points in increasing order: one maximum, or max/min/max.
  std::span<const double> crit() const noexcept { return crit_; }
  std::span<const double> crit_vals() const noexcept { return crit_vals_; }
  double a_max() const noexcept;

  std::vector<double> sample(const RevolutionSurface& s) const;
  std::vector<double> sample_prime(const RevolutionSurface& s) const;

 private:
  std::string name_;
  ScalarFn a_;
  ScalarFn a_prime_;
  PotentialShape shape_ = PotentialShape::SingleBump;
  std::vector<double> crit_;
  std::vector<double> crit_vals_;
};

struct FieldPair {
  std::vector<double> H;
  std::vector<double> starF;
  double beta_c = 0.0;
  // Mass-weighted mean removed from the nodal H (quadrature defect only).
  double h_mean_removed = 0.0;
};

FieldPair derive_fields(const AxiPotential& a, const RevolutionSurface& s, double ratio_cap = 1e8);

// H(φ) = a'/(ργ) off the grid; pole values by the one-sided limit.
double field_at(const AxiPotential& a, const RevolutionSurface& s, double phi);

// Crossings of {a = α} labelled as in the regime construction. Unused labels
// stay empty.
struct LevelSet {
  std::optional<double> phi_minus;
  std::optional<double> psi_plus;
  std::optional<double> psi_minus;
  std::optional<double> phi_plus;
  std::vector<double> ordered() const;
};

LevelSet level_points(const AxiPotential& a, double alpha);

// The crossing of {a = α} on monotone branch k (0-based, between consecutive
// critical points). No critical-value guard, so usable inside root searches.
double branch_root(const AxiPotential& a, int k, double alpha);

// ∫_lo^hi (a - α) γ/ρ dφ.
double weighted_area(const AxiPotential& a, const RevolutionSurface& s, double alpha, double lo,
                     double hi);

struct IntegralsIJ {
  double I_minus;
  double I_plus;
  double J;
};

IntegralsIJ integrals_IJ(const AxiPotential& a, const RevolutionSurface& s, double alpha);
// The single integrals, each on its own range of levels: I₊ on (a₂, a₃),
// I₋ and J on (a₂, a₁). Two-maximum shape only.
double integral_I_plus(const AxiPotential& a, const RevolutionSurface& s, double alpha);
double integral_I_minus(const AxiPotential& a, const RevolutionSurface& s, double alpha);
double integral_J(const AxiPotential& a, const RevolutionSurface& s, double alpha);
// ∫ from the crossing on the first branch to the crossing on the last, α ∈ (0, a₁).
double integral_I(const AxiPotential& a, const RevolutionSurface& s, double alpha);

// β_c = ∫_0^π a γ/ρ dφ, the total rise of *F.
double beta_critical(const AxiPotential& a, const RevolutionSurface& s);

double critical_alpha(const AxiPotential& a, const RevolutionSurface& s);

struct CriticalBetas {
  double alpha_star;
  double beta1;
  double beta2;
  // True when I₊(α*) < I₋(α*): the frozen component sits on the other side.
  bool mirrored;
};

CriticalBetas critical_betas(const AxiPotential& a, const RevolutionSurface& s);

struct MeshField {
  std::vector<double> H;
  std::vector<double> grad_norm;
  double nondegen_margin = 0.0;
  bool nondegenerate = false;
  double mean_removed = 0.0;
};

// Removes the area-weighted mean and evaluates |H| + |∇H| per vertex.
MeshField make_mesh_field(const TriMesh& mesh, std::vector<double> values);

// H of an axisymmetric potential on the unit sphere, with φ the polar angle
// from +z.
MeshField mesh_field_from_potential(const TriMesh& mesh, const AxiPotential& a,
                                    const RevolutionSurface& s);

// "z", "potential:<name>".
MeshField named_mesh_field(const TriMesh& mesh, const std::string& spec);

}  // namespace sc_obstacle
