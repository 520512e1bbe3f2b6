#pragma once

// Piecewise-cubic comparison profiles across a zero curve of H, in the normal
// coordinate z (H < 0 for z < 0). The profile is β/2 for z < -η₋, -β/2 for
// z > η₊, and cubic in between with v'' = k₋ z (z < 0), k₊ z (z > 0).

#include <optional>
#include <string>
#include <vector>

#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

struct BarrierProfile {
  double c = 0.0;
  double C = 0.0;
  double beta = 0.0;
  // Slopes of v'' on each side: (2C, c/2) for the upper barrier V₁,
  // (c/2, 2C) for its mirror V₂.
  double k_minus = 0.0;
  double k_plus = 0.0;
  bool mirrored = false;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double eta_minus = 0.0;
  double eta_plus = 0.0;
  double A_minus = 0.0;
  double A_plus = 0.0;
  double B_minus = 0.0;
  double B_plus = 0.0;

  double value(double z) const;
  double d1(double z) const;
  double d2(double z) const;
};

// V₁, with H₁ = v'' <= H for every H between the slope bounds c <= ∂zH <= C.
BarrierProfile build_barrier(double c, double C, double beta);
// V₂(z) = -V₁(-z), with H₂ = v'' >= H.
BarrierProfile build_mirror_barrier(double c, double C, double beta);

struct BarrierReport {
  std::size_t samples = 0;
  double max_excess = 0.0;    // max(|v| - β/2, 0)
  double jump_v = 0.0;        // largest one-sided mismatch of v at -η₋, 0, η₊
  double jump_d1 = 0.0;       // same for v'
  double jump_d1_at_zero = 0.0;
  double d2_error = 0.0;      // max |v'' - k z| on (-η₋, η₊)
  double max_d1 = 0.0;
  double max_d2 = 0.0;
  double smallness_ratio = 0.0;  // max(|v'| + |v''|) / β^{1/3}
  double smallness_bound = 0.0;
  double lipschitz_d1 = 0.0;     // max sampled |Δv'| / Δz
  bool bounded = false;
  bool continuous = false;
  bool d2_equality = false;
  bool small = false;
  bool w2inf = false;
  bool ok() const noexcept { return bounded && continuous && d2_equality && small && w2inf; }
};

BarrierReport verify_barrier(const BarrierProfile& bp, std::size_t n_samples = 4001);

// Inclusions implied by V₂ <= V <= V₁: (-η₋, η₋) ⊂ SC_β ⊂ (-η₊, η₊) in the
// normal coordinate, with η± from V₁.
struct WidthBracket {
  double w_lo = 0.0;
  double w_hi = 0.0;
  double inner_minus = 0.0;
  double inner_plus = 0.0;
  double outer_minus = 0.0;
  double outer_plus = 0.0;
};

WidthBracket width_bracket(double c, double C, double beta);

struct SlopeBounds {
  double c = 0.0;
  double C = 0.0;
  std::size_t samples = 0;
};

// Zero crossings of H = a'/(ργ) in (0, π).
std::vector<double> field_zeros(const AxiPotential& a, const RevolutionSurface& s);

// min and max of |∂H/∂s| (s = arc length) over the collar |s - s(φ₀)| < half_width.
SlopeBounds collar_slopes(const AxiPotential& a, const RevolutionSurface& s, double phi0,
                          double half_width);

// Mesh version: vertices with |H| < half_width · |∇H| (first-order distance
// to {H = 0}).
SlopeBounds collar_slopes(const TriMesh& mesh, const MeshField& field, double half_width);

// z, V₁, V₂ sampled over [-2η₊, 2η₊].
void write_barrier_csv(const BarrierProfile& bp, const std::string& path, std::size_t n_samples = 801);

}  // namespace sc_obstacle
