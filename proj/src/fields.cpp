#include "sc_obstacle/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"

namespace sc_obstacle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanels = 2048;
constexpr int kShapeSamples = 8192;
constexpr double kRhoPole = 1e-8;

// Branch k of a: the monotone piece between consecutive critical points.
std::pair<double, double> branch(const AxiPotential& a, int k) {
  const auto c = a.crit();
  const double lo = k == 0 ? 0.0 : c[static_cast<std::size_t>(k - 1)];
  const double hi = static_cast<std::size_t>(k) == c.size() ? kPi : c[static_cast<std::size_t>(k)];
  return {lo, hi};
}

void check_level(const AxiPotential& a, double alpha) {
  if (!(alpha > 0.0 && alpha < a.a_max())) {
    throw Error(ErrorCode::InvalidInput, "level " + std::to_string(alpha) + " outside (0, max a)");
  }
  const double band = 1e-10 * a.a_max();
  for (double v : a.crit_vals()) {
    if (std::abs(alpha - v) < band) {
      throw Error(ErrorCode::AlphaAtCriticalValue, "level " + std::to_string(alpha) + " is a critical value");
    }
  }
}

void require_triple(const AxiPotential& a, const char* what) {
  if (a.shape() != PotentialShape::TripleZero) {
    throw Error(ErrorCode::BracketFailure, std::string(what) + " needs a two-maximum potential");
  }
}

void require_open(double alpha, double lo, double hi, const char* what) {
  if (!(alpha > lo && alpha < hi)) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": level " + std::to_string(alpha) +
                                             " outside (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}

// aγ/ρ with its removable pole limit a'γ/ρ'.
double primitive_rate(const AxiPotential& a, const RevolutionSurface& s, double phi) {
  const double rho = s.rho_at(phi);
  if (std::abs(rho) < kRhoPole) return a.a_prime(phi) * s.gamma_at(phi) / s.rho_prime_at(phi);
  return a.a(phi) * s.gamma_at(phi) / rho;
}

}  // namespace

AxiPotential::AxiPotential(std::string name, ScalarFn a, ScalarFn a_prime)
    : name_(std::move(name)), a_(std::move(a)), a_prime_(std::move(a_prime)) {
  double amax = 0.0;
  double amin = INFINITY;
  for (int k = 1; k < kShapeSamples; ++k) {
    const double v = a_(kPi * k / kShapeSamples);
    amax = std::max(amax, v);
    amin = std::min(amin, v);
  }
  if (!(amin > 0.0)) throw Error(ErrorCode::ShapeViolation, name_ + ": a must be positive inside (0, pi)");
  if (std::abs(a_(0.0)) > 1e-12 * amax || std::abs(a_(kPi)) > 1e-12 * amax) {
    throw Error(ErrorCode::ShapeViolation, name_ + ": a must vanish at both poles");
  }

  // Sign changes of a' on a fine grid, each refined by bisection.
  int prev_sign = 0;
  double prev_phi = 0.0;
  std::vector<int> signs;
  for (int k = 1; k < kShapeSamples; ++k) {
    const double phi = kPi * k / kShapeSamples;
    const double d = a_prime_(phi);
    const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sg == 0) continue;
    if (prev_sign == 0) {
      signs.push_back(sg);
    } else if (sg != prev_sign) {
      crit_.push_back(bisect_root(a_prime_, prev_phi, phi, 1e-12));
      signs.push_back(sg);
    }
    prev_sign = sg;
    prev_phi = phi;
  }
  for (double c : crit_) crit_vals_.push_back(a_(c));
  if (crit_.size() == 1 && signs.front() > 0) {
    shape_ = PotentialShape::SingleBump;
  } else if (crit_.size() == 3 && signs.front() > 0) {
    shape_ = PotentialShape::TripleZero;
    if (crit_vals_[0] > crit_vals_[2] + 1e-12 * amax) {
      throw Error(ErrorCode::ShapeViolation,
                  name_ + ": the first maximum must not exceed the second (reflect phi -> pi - phi)");
    }
  } else {
    throw Error(ErrorCode::ShapeViolation,
                name_ + ": a' must change sign +,- or +,-,+,- (found " + std::to_string(crit_.size()) +
                    " critical points)");
  }
}

AxiPotential AxiPotential::named(const std::string& name) {
  if (name == "uniform") {
    return {name, [](double p) { return 0.5 * std::sin(p) * std::sin(p); },
            [](double p) { return std::sin(p) * std::cos(p); }};
  }
  if (name == "triple") {
    return {name,
            [](double p) {
              const double s2 = std::sin(2.0 * p);
              const double s = std::sin(p);
              return s2 * s2 + s * s * (0.3 - 0.1 * std::cos(p));
            },
            [](double p) {
              const double s = std::sin(p);
              return 2.0 * std::sin(4.0 * p) + std::sin(2.0 * p) * (0.3 - 0.1 * std::cos(p)) +
                     0.1 * s * s * s;
            }};
  }
  if (name == "symmetric") {
    return {name,
            [](double p) {
              const double s2 = std::sin(2.0 * p);
              const double s = std::sin(p);
              return s2 * s2 + 0.3 * s * s;
            },
            [](double p) { return 2.0 * std::sin(4.0 * p) + 0.3 * std::sin(2.0 * p); }};
  }
  throw Error(ErrorCode::InvalidInput, "unknown potential '" + name + "'");
}

AxiPotential AxiPotential::from_csv(const std::string& path) {
  auto cols = read_csv_columns(path, 2);
  if (cols[0].empty() || std::abs(cols[0].front()) > 1e-9 || std::abs(cols[0].back() - kPi) > 1e-9) {
    throw Error(ErrorCode::InvalidInput, path + ": potential table must span [0, pi]");
  }
  const TableFunction t(std::move(cols[0]), std::move(cols[1]));
  return {path, t, [t](double p) { return t.prime(p); }};
}

AxiPotential AxiPotential::scaled(double k) const {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidInput, "potential scale must be positive");
  auto a = a_;
  auto ap = a_prime_;
  return {name_ + "*" + std::to_string(k), [a, k](double p) { return k * a(p); },
          [ap, k](double p) { return k * ap(p); }};
}

double AxiPotential::a_max() const noexcept {
  return *std::max_element(crit_vals_.begin(), crit_vals_.end());
}

std::vector<double> AxiPotential::sample(const RevolutionSurface& s) const {
  std::vector<double> out;
  out.reserve(s.nodes());
  for (double p : s.phi()) out.push_back(a_(p));
  return out;
}

std::vector<double> AxiPotential::sample_prime(const RevolutionSurface& s) const {
  std::vector<double> out;
  out.reserve(s.nodes());
  for (double p : s.phi()) out.push_back(a_prime_(p));
  return out;
}

double field_at(const AxiPotential& a, const RevolutionSurface& s, double phi) {
  const double p = std::clamp(phi, 1e-6, kPi - 1e-6);
  return a.a_prime(p) / (s.rho_at(p) * s.gamma_at(p));
}

FieldPair derive_fields(const AxiPotential& a, const RevolutionSurface& s, double ratio_cap) {
  const std::size_t n = s.nodes() - 1;
  const auto phi = s.phi();
  const auto rho = s.rho();
  const double h = s.h();
  FieldPair f;
  f.H.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f.H[i] = field_at(a, s, phi[i]);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(a.a(phi[i]) / rho[i]) > ratio_cap) {
      throw Error(ErrorCode::UnboundedRatio, "a/rho exceeds cap near phi = " + std::to_string(phi[i]));
    }
  }

  std::vector<double> rate(n + 1);
  for (std::size_t i = 0; i <= n; ++i) rate[i] = primitive_rate(a, s, phi[i]);
  const auto cell = [&](std::size_t i) {
    return h / 6.0 * (rate[i] + 4.0 * primitive_rate(a, s, phi[i] + 0.5 * h) + rate[i + 1]);
  };
  f.starF.assign(n + 1, 0.0);
  const std::size_t mid = n / 2;
  for (std::size_t i = mid; i < n; ++i) f.starF[i + 1] = f.starF[i] + cell(i);
  for (std::size_t i = mid; i > 0; --i) f.starF[i - 1] = f.starF[i] - cell(i - 1);

  const std::vector<double> ones(n + 1, 1.0);
  const double area = integrate(s, ones);
  const double fmean = integrate(s, f.starF) / area;
  for (double& v : f.starF) v -= fmean;
  f.h_mean_removed = integrate(s, f.H) / area;
  for (double& v : f.H) v -= f.h_mean_removed;

  const auto [lo, hi] = std::minmax_element(f.starF.begin(), f.starF.end());
  f.beta_c = *hi - *lo;
  if (!(f.beta_c > 0.0)) throw Error(ErrorCode::ShapeViolation, "beta_c must be positive");
  return f;
}

double branch_root(const AxiPotential& a, int k, double alpha) {
  if (k < 0 || static_cast<std::size_t>(k) > a.crit().size()) {
    throw Error(ErrorCode::InvalidInput, "no branch " + std::to_string(k));
  }
  const auto [lo, hi] = branch(a, k);
  return bisect_root([&a, alpha](double p) { return a.a(p) - alpha; }, lo, hi, 1e-13);
}

std::vector<double> LevelSet::ordered() const {
  std::vector<double> out;
  for (const auto& p : {phi_minus, psi_plus, psi_minus, phi_plus}) {
    if (p) out.push_back(*p);
  }
  return out;
}

LevelSet level_points(const AxiPotential& a, double alpha) {
  check_level(a, alpha);
  LevelSet ls;
  const auto v = a.crit_vals();
  if (a.shape() == PotentialShape::SingleBump) {
    ls.phi_minus = branch_root(a, 0, alpha);
    ls.phi_plus = branch_root(a, 1, alpha);
    return ls;
  }
  if (alpha < v[1]) {
    ls.phi_minus = branch_root(a, 0, alpha);
    ls.phi_plus = branch_root(a, 3, alpha);
  } else if (alpha < v[0]) {
    ls.phi_minus = branch_root(a, 0, alpha);
    ls.psi_plus = branch_root(a, 1, alpha);
    ls.psi_minus = branch_root(a, 2, alpha);
    ls.phi_plus = branch_root(a, 3, alpha);
  } else {
    ls.psi_minus = branch_root(a, 2, alpha);
    ls.phi_plus = branch_root(a, 3, alpha);
  }
  return ls;
}

double weighted_area(const AxiPotential& a, const RevolutionSurface& s, double alpha, double lo,
                     double hi) {
  if (lo == hi) return 0.0;
  if (lo > hi) return -weighted_area(a, s, alpha, hi, lo);
  const auto f = [&](double p) { return (a.a(p) - alpha) * s.gamma_at(p) / s.rho_at(p); };
  return integrate_polar(f, lo, hi, kPanels);
}

double integral_I_minus(const AxiPotential& a, const RevolutionSurface& s, double alpha) {
  require_triple(a, "I-");
  require_open(alpha, a.crit_vals()[1], a.crit_vals()[0], "I-");
  check_level(a, alpha);
  return weighted_area(a, s, alpha, branch_root(a, 0, alpha), branch_root(a, 1, alpha));
}

double integral_I_plus(const AxiPotential& a, const RevolutionSurface& s, double alpha) {
  require_triple(a, "I+");
  require_open(alpha, a.crit_vals()[1], a.crit_vals()[2], "I+");
  check_level(a, alpha);
  return weighted_area(a, s, alpha, branch_root(a, 2, alpha), branch_root(a, 3, alpha));
}

double integral_J(const AxiPotential& a, const RevolutionSurface& s, double alpha) {
  require_triple(a, "J");
  require_open(alpha, a.crit_vals()[1], a.crit_vals()[0], "J");
  check_level(a, alpha);
  return -weighted_area(a, s, alpha, branch_root(a, 1, alpha), branch_root(a, 2, alpha));
}

IntegralsIJ integrals_IJ(const AxiPotential& a, const RevolutionSurface& s, double alpha) {
  require_triple(a, "integrals_IJ");
  const LevelSet ls = level_points(a, alpha);
  if (!ls.psi_plus) {
    throw Error(ErrorCode::InvalidInput, "integrals_IJ needs a level between the minimum and the first maximum");
  }
  return {weighted_area(a, s, alpha, *ls.phi_minus, *ls.psi_plus),
          weighted_area(a, s, alpha, *ls.psi_minus, *ls.phi_plus),
          -weighted_area(a, s, alpha, *ls.psi_plus, *ls.psi_minus)};
}

double integral_I(const AxiPotential& a, const RevolutionSurface& s, double alpha) {
  require_open(alpha, 0.0, a.crit_vals()[0], "I");
  check_level(a, alpha);
  const int last = static_cast<int>(a.crit().size());
  return weighted_area(a, s, alpha, branch_root(a, 0, alpha), branch_root(a, last, alpha));
}

double beta_critical(const AxiPotential& a, const RevolutionSurface& s) {
  return simpson([&](double p) { return primitive_rate(a, s, p); }, 0.0, kPi, 8 * kPanels);
}

double critical_alpha(const AxiPotential& a, const RevolutionSurface& s) {
  if (a.shape() != PotentialShape::TripleZero) {
    throw Error(ErrorCode::BracketFailure, "no interval (a2, a1): potential has a single maximum");
  }
  const double a1 = a.crit_vals()[0];
  const double a2 = a.crit_vals()[1];
  const double eps = 1e-7 * (a1 - a2);
  const auto g = [&](double alpha) {
    const IntegralsIJ r = integrals_IJ(a, s, alpha);
    return r.J - std::min(r.I_minus, r.I_plus);
  };
  const double g_lo = g(a2 + eps);
  const double g_hi = g(a1 - eps);
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    throw Error(ErrorCode::BracketFailure, "J - min(I-, I+) does not change sign on (a2, a1)");
  }
  return bisect_root(g, a2 + eps, a1 - eps, 1e-13);
}

CriticalBetas critical_betas(const AxiPotential& a, const RevolutionSurface& s) {
  CriticalBetas cb{};
  cb.alpha_star = critical_alpha(a, s);
  const IntegralsIJ r = integrals_IJ(a, s, cb.alpha_star);
  cb.beta1 = std::max(r.I_minus, r.I_plus);
  cb.beta2 = std::min(r.I_minus, r.I_plus);
  cb.mirrored = r.I_plus < r.I_minus;
  if (!(cb.beta2 > 0.0 && cb.beta1 < beta_critical(a, s))) {
    throw Error(ErrorCode::ShapeViolation, "critical betas out of order");
  }
  return cb;
}

MeshField make_mesh_field(const TriMesh& mesh, std::vector<double> values) {
  if (values.size() != mesh.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "field length differs from vertex count");
  }
  MeshField mf;
  mf.mean_removed = integrate(mesh, values) / mesh.total_area();
  for (double& v : values) v -= mf.mean_removed;
  mf.grad_norm = gradient_magnitude(mesh, values);
  mf.nondegen_margin = INFINITY;
  double gmax = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mf.nondegen_margin = std::min(mf.nondegen_margin, std::abs(values[i]) + mf.grad_norm[i]);
    gmax = std::max(gmax, mf.grad_norm[i]);
  }
  mf.nondegenerate = mf.nondegen_margin > 0.1 * mesh.mean_edge_length() * gmax;
  mf.H = std::move(values);
  return mf;
}

MeshField mesh_field_from_potential(const TriMesh& mesh, const AxiPotential& a,
                                    const RevolutionSurface& s) {
  if (!mesh.on_unit_sphere()) {
    throw Error(ErrorCode::InvalidInput, "axisymmetric fields need a mesh on the unit sphere");
  }
  std::vector<double> h;
  h.reserve(mesh.vertex_count());
  for (double p : vertex_polar_angles(mesh)) h.push_back(field_at(a, s, p));
  return make_mesh_field(mesh, std::move(h));
}

MeshField named_mesh_field(const TriMesh& mesh, const std::string& spec) {
  if (spec == "z") {
    std::vector<double> h;
    h.reserve(mesh.vertex_count());
    for (const auto& p : mesh.vertices()) h.push_back(p[2]);
    return make_mesh_field(mesh, std::move(h));
  }
  const std::string prefix = "potential:";
  if (spec.rfind(prefix, 0) == 0) {
    const AxiPotential a = AxiPotential::named(spec.substr(prefix.size()));
    const RevolutionSurface s = build_revolution(RevolutionProfile::sphere(), 512);
    return mesh_field_from_potential(mesh, a, s);
  }
  throw Error(ErrorCode::InvalidInput, "unknown mesh field '" + spec + "'");
}

}  // namespace sc_obstacle
