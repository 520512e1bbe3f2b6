#include "sc_obstacle/barriers.hpp"

#include <algorithm>
#include <cmath>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"

namespace sc_obstacle {

namespace {

void check_bounds(double c, double C, double beta) {
  if (!(c > 0.0) || !(C >= c) || !std::isfinite(C)) {
    throw Error(ErrorCode::InvalidBounds, "need 0 < c <= C, got c = " + std::to_string(c) + ", C = " + std::to_string(C));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidInput, "beta must be positive");
}

// k₋η₋² = k₊η₊² (v' matches at 0) and (k₋η₋³ + k₊η₊³)/3 = β (v matches at 0).
BarrierProfile sided(double c, double C, double beta, double km, double kp, bool mirrored) {
  BarrierProfile bp;
  bp.c = c;
  bp.C = C;
  bp.beta = beta;
  bp.k_minus = km;
  bp.k_plus = kp;
  bp.mirrored = mirrored;
  const double r = std::sqrt(km / kp);
  bp.alpha_minus = std::cbrt(1.0 / (kp / 3.0 * r * r * r + km / 3.0));
  bp.alpha_plus = bp.alpha_minus * r;
  const double b3 = std::cbrt(beta);
  bp.eta_minus = bp.alpha_minus * b3;
  bp.eta_plus = bp.alpha_plus * b3;
  bp.A_minus = km / 6.0;
  bp.A_plus = kp / 6.0;
  bp.B_minus = -2.0 * bp.eta_minus * bp.A_minus;
  bp.B_plus = 2.0 * bp.eta_plus * bp.A_plus;
  return bp;
}

struct Pieces {
  const BarrierProfile& b;
  double vm(double z) const { return (z + b.eta_minus) * (z + b.eta_minus) * (b.A_minus * z + b.B_minus) + 0.5 * b.beta; }
  double vp(double z) const { return (z - b.eta_plus) * (z - b.eta_plus) * (b.A_plus * z + b.B_plus) - 0.5 * b.beta; }
  double dm(double z) const {
    const double t = z + b.eta_minus;
    return 2.0 * t * (b.A_minus * z + b.B_minus) + b.A_minus * t * t;
  }
  double dp(double z) const {
    const double t = z - b.eta_plus;
    return 2.0 * t * (b.A_plus * z + b.B_plus) + b.A_plus * t * t;
  }
  double ddm(double z) const { return 6.0 * b.A_minus * z + 2.0 * b.B_minus + 4.0 * b.A_minus * b.eta_minus; }
  double ddp(double z) const { return 6.0 * b.A_plus * z + 2.0 * b.B_plus - 4.0 * b.A_plus * b.eta_plus; }
};

}  // namespace

double BarrierProfile::value(double z) const {
  const Pieces p{*this};
  if (z <= -eta_minus) return 0.5 * beta;
  if (z >= eta_plus) return -0.5 * beta;
  return z < 0.0 ? p.vm(z) : p.vp(z);
}

double BarrierProfile::d1(double z) const {
  const Pieces p{*this};
  if (z <= -eta_minus || z >= eta_plus) return 0.0;
  return z < 0.0 ? p.dm(z) : p.dp(z);
}

double BarrierProfile::d2(double z) const {
  const Pieces p{*this};
  if (z <= -eta_minus || z >= eta_plus) return 0.0;
  return z < 0.0 ? p.ddm(z) : p.ddp(z);
}

BarrierProfile build_barrier(double c, double C, double beta) {
  check_bounds(c, C, beta);
  return sided(c, C, beta, 2.0 * C, 0.5 * c, false);
}

BarrierProfile build_mirror_barrier(double c, double C, double beta) {
  check_bounds(c, C, beta);
  return sided(c, C, beta, 0.5 * c, 2.0 * C, true);
}

BarrierReport verify_barrier(const BarrierProfile& bp, std::size_t n_samples) {
  if (n_samples < 3) throw Error(ErrorCode::InvalidInput, "need at least 3 samples");
  const Pieces p{bp};
  BarrierReport r;
  const double half = 0.5 * bp.beta;
  const double b3 = std::cbrt(bp.beta);
  const double em = bp.eta_minus;
  const double ep = bp.eta_plus;

  r.jump_v = std::max({std::abs(p.vm(-em) - half), std::abs(p.vm(0.0) - p.vp(0.0)), std::abs(p.vp(ep) + half)});
  r.jump_d1_at_zero = std::abs(p.dm(0.0) - p.dp(0.0));
  r.jump_d1 = std::max({std::abs(p.dm(-em)), r.jump_d1_at_zero, std::abs(p.dp(ep))});
  const double jump_tol = 1e-10 * b3;
  r.continuous = r.jump_v < jump_tol && r.jump_d1 < jump_tol;

  // Grid over [-2η₋, 2η₊] plus the one-sided limits at the breakpoints.
  std::vector<double> zs(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    zs[i] = -2.0 * em + 2.0 * (em + ep) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  struct Sample {
    double z, v, d1, d2;
    int piece;  // -1 left cubic, +1 right cubic, 0 plateau
  };
  std::vector<Sample> all;
  all.reserve(n_samples + 4);
  for (double z : zs) {
    const int piece = z <= -em || z >= ep ? 0 : (z < 0.0 ? -1 : 1);
    all.push_back({z, bp.value(z), bp.d1(z), bp.d2(z), piece});
  }
  all.push_back({-em, p.vm(-em), p.dm(-em), p.ddm(-em), -1});
  all.push_back({0.0, p.vm(0.0), p.dm(0.0), p.ddm(0.0), -1});
  all.push_back({0.0, p.vp(0.0), p.dp(0.0), p.ddp(0.0), 1});
  all.push_back({ep, p.vp(ep), p.dp(ep), p.ddp(ep), 1});

  double d2_scale = 0.0;
  double combo = 0.0;
  for (const auto& s : all) {
    r.max_excess = std::max(r.max_excess, std::abs(s.v) - half);
    r.max_d1 = std::max(r.max_d1, std::abs(s.d1));
    r.max_d2 = std::max(r.max_d2, std::abs(s.d2));
    combo = std::max(combo, std::abs(s.d1) + std::abs(s.d2));
    if (s.piece == 0) continue;
    const double target = (s.piece < 0 ? bp.k_minus : bp.k_plus) * s.z;
    r.d2_error = std::max(r.d2_error, std::abs(s.d2 - target));
    d2_scale = std::max(d2_scale, std::abs(target));
  }
  r.max_excess = std::max(r.max_excess, 0.0);
  r.samples = all.size();
  r.bounded = r.max_excess <= 1e-12 * std::max(1.0, half);
  r.d2_equality = r.d2_error <= 1e-9 * std::max(d2_scale, 1e-300);
  r.smallness_ratio = combo / b3;
  r.smallness_bound = std::max(bp.k_minus * bp.alpha_minus, bp.k_plus * bp.alpha_plus) +
                      0.5 * bp.k_minus * bp.alpha_minus * bp.alpha_minus * b3;
  r.small = r.smallness_ratio <= r.smallness_bound * (1.0 + 1e-9);

  for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
    const double dz = zs[i + 1] - zs[i];
    r.lipschitz_d1 = std::max(r.lipschitz_d1, std::abs(bp.d1(zs[i + 1]) - bp.d1(zs[i])) / dz);
  }
  r.w2inf = r.lipschitz_d1 <= r.max_d2 * (1.0 + 1e-6) + 1e-12 * b3;
  return r;
}

WidthBracket width_bracket(double c, double C, double beta) {
  const BarrierProfile v1 = build_barrier(c, C, beta);
  const BarrierProfile v2 = build_mirror_barrier(c, C, beta);
  WidthBracket w;
  // V₂ <= V <= V₁: SC_β contains {V₁ < β/2} ∩ {V₂ > -β/2} and lies in
  // {V₁ > -β/2} ∩ {V₂ < β/2}.
  w.inner_minus = v1.eta_minus;
  w.inner_plus = v2.eta_plus;
  w.outer_minus = v2.eta_minus;
  w.outer_plus = v1.eta_plus;
  w.w_lo = w.inner_minus + w.inner_plus;
  w.w_hi = w.outer_minus + w.outer_plus;
  return w;
}

std::vector<double> field_zeros(const AxiPotential& a, const RevolutionSurface&) {
  return {a.crit().begin(), a.crit().end()};
}

SlopeBounds collar_slopes(const AxiPotential& a, const RevolutionSurface& s, double phi0,
                          double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidInput, "collar half width must be positive");
  const auto phi = s.phi();
  const auto g = s.gamma();
  // Arc length by the trapezoid rule on nodes, plus the partial cell to φ₀.
  std::vector<double> arc(phi.size(), 0.0);
  for (std::size_t i = 1; i < phi.size(); ++i) arc[i] = arc[i - 1] + 0.5 * s.h() * (g[i - 1] + g[i]);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(phi0 / s.h()), phi.size() - 2);
  const double arc0 = arc[k] + (phi0 - phi[k]) * s.gamma_at(0.5 * (phi0 + phi[k]));
  const double step = 1e-6;
  const auto slope = [&](double x) {
    return std::abs(field_at(a, s, x + step) - field_at(a, s, x - step)) / (2.0 * step * s.gamma_at(x));
  };
  SlopeBounds b;
  b.c = slope(phi0);
  b.C = b.c;
  b.samples = 1;
  for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
    if (std::abs(arc[i] - arc0) >= half_width) continue;
    const double d = slope(phi[i]);
    b.c = std::min(b.c, d);
    b.C = std::max(b.C, d);
    ++b.samples;
  }
  return b;
}

SlopeBounds collar_slopes(const TriMesh& mesh, const MeshField& field, double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidInput, "collar half width must be positive");
  if (field.H.size() != mesh.vertex_count()) throw Error(ErrorCode::DimensionMismatch, "field / mesh size");
  SlopeBounds b;
  b.c = INFINITY;
  b.C = 0.0;
  for (std::size_t i = 0; i < field.H.size(); ++i) {
    if (!(std::abs(field.H[i]) < half_width * field.grad_norm[i])) continue;
    b.c = std::min(b.c, field.grad_norm[i]);
    b.C = std::max(b.C, field.grad_norm[i]);
    ++b.samples;
  }
  if (b.samples == 0) throw Error(ErrorCode::InsufficientRange, "no vertices in the collar of {H = 0}");
  return b;
}

void write_barrier_csv(const BarrierProfile& bp, const std::string& path, std::size_t n_samples) {
  if (n_samples < 2) throw Error(ErrorCode::InvalidInput, "need at least 2 samples");
  const BarrierProfile other = bp.mirrored ? build_barrier(bp.c, bp.C, bp.beta) : build_mirror_barrier(bp.c, bp.C, bp.beta);
  const BarrierProfile& v1 = bp.mirrored ? other : bp;
  const BarrierProfile& v2 = bp.mirrored ? bp : other;
  const double span = 2.0 * std::max(v1.eta_plus, v1.eta_minus);
  std::vector<double> z(n_samples), a(n_samples), b(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    z[i] = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    a[i] = v1.value(z[i]);
    b[i] = v2.value(z[i]);
  }
  write_csv_columns(path, {"z", "V1", "V2"}, {z, a, b});
}

}  // namespace sc_obstacle
