#include "sc_obstacle/vortexapprox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/kernels.hpp"
#include "sc_obstacle/obstacle2d.hpp"

namespace sc_obstacle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-200;

double dist2(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Runs body(i) for i in [0, n) on worker_count() threads in contiguous blocks.
template <class F>
void parallel_for(std::size_t n, F body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n / 64, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * block;
    const std::size_t e = std::min(n, b + block);
    pool.emplace_back([=, &body] {
      for (std::size_t i = b; i < e; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Σ_p q_p Σ_{y≠p} q_y G(p, y) over charges in SoA form. Per-point partial
// sums are reduced in index order so the result does not depend on threads.
double pair_energy(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<double>& zs, const std::vector<double>& q) {
  const auto& k = kernels::active();
  const std::size_t n = q.size();
  double total_q = 0.0;
  for (double x : q) total_q += x;
  std::vector<double> part(n);
  parallel_for(n, [&](std::size_t i) {
    const double p[3] = {xs[i], ys[i], zs[i]};
    // The kernel clamps the self pair to log(floor); take it back out.
    const double s = k.log_dist2_sum(p, xs, ys, zs, q, kFloor) - q[i] * std::log(kFloor);
    const double rest = total_q - q[i];
    part[i] = q[i] * (-(s - std::log(4.0) * rest) / (4.0 * kPi) - rest / (4.0 * kPi));
  });
  double e = 0.0;
  for (double x : part) e += x;
  return e;
}

// Missing diagonal of the m-point self-circle sum: exact mean of G over the
// circle minus the mean over distinct sample pairs. With chord radius R the
// sample chords are 2R sin(πk/m) and Σ_k ln(2 sin(πk/m)) = ln m.
double circle_diagonal_correction(double radius, int m) {
  const double R = std::sin(radius);
  return -(std::log(R / (2.0 * m)) + 0.5) / (2.0 * kPi * m);
}

}  // namespace

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SC_OBSTACLE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return hw;
}

double green_sphere(const Vec3& x, const Vec3& y) {
  const double d2 = dist2(x, y);
  if (!(d2 > 0.0)) throw Error(ErrorCode::CoincidentPoints, "Green function at coincident points");
  // (1 - x·y)/2 = |x - y|²/4 for unit vectors, without the cancellation.
  return -std::log(0.25 * d2) / (4.0 * kPi) - 1.0 / (4.0 * kPi);
}

double circle_self_energy(double radius) {
  return -std::log(0.5 * std::sin(radius)) / (2.0 * kPi) - 1.0 / (4.0 * kPi);
}

std::vector<Vec3> circle_points(const Vec3& c, double r, int m) {
  // Tangent frame at c.
  const Vec3 axis = std::abs(c[2]) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  const Vec3 e1 = normalized({axis[1] * c[2] - axis[2] * c[1], axis[2] * c[0] - axis[0] * c[2],
                              axis[0] * c[1] - axis[1] * c[0]});
  const Vec3 e2 = {c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
  std::vector<Vec3> out(static_cast<std::size_t>(m));
  const double cr = std::cos(r);
  const double sr = std::sin(r);
  for (int a = 0; a < m; ++a) {
    const double t = 2.0 * kPi * a / m;
    const double ct = std::cos(t);
    const double st = std::sin(t);
    for (int d = 0; d < 3; ++d) out[static_cast<std::size_t>(a)][d] = cr * c[d] + sr * (ct * e1[d] + st * e2[d]);
  }
  return out;
}

PointVortexSet sample_measure(const TriMesh& mesh, std::span<const double> mu_plus,
                              std::span<const double> mu_minus, double kappa, double h,
                              const SampleOptions& opt) {
  const std::size_t n = mesh.vertex_count();
  if (mu_plus.size() != n || mu_minus.size() != n) throw Error(ErrorCode::DimensionMismatch, "density / mesh size");
  if (!mesh.on_unit_sphere()) throw Error(ErrorCode::InvalidMesh, "point vortices need the unit sphere");
  if (!(kappa > 0.0) || !(h > 0.0)) throw Error(ErrorCode::InvalidInput, "kappa and h must be positive");
  if (opt.circle_samples < 3) throw Error(ErrorCode::InvalidInput, "need at least 3 circle samples");
  const auto m = mesh.vertex_areas();
  double mass_p = 0.0, mass_m = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu_plus[i] < 0.0 || mu_minus[i] < 0.0) throw Error(ErrorCode::InvalidInput, "densities must be non-negative");
    mass_p += mu_plus[i] * m[i];
    mass_m += mu_minus[i] * m[i];
    peak = std::max({peak, mu_plus[i], mu_minus[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::min(mu_plus[i], mu_minus[i]) > 1e-12 * peak) {
      throw Error(ErrorCode::InvalidInput, "positive and negative parts overlap at vertex " + std::to_string(i));
    }
  }
  if (std::abs(mass_p - mass_m) > 1e-6 * std::max(mass_p, mass_m)) {
    throw Error(ErrorCode::InvalidInput, "measure does not have zero average");
  }

  PointVortexSet pvs;
  pvs.kappa = kappa;
  pvs.h = h;
  pvs.weight = 2.0 * kPi / h;
  pvs.circle_radius = 1.0 / kappa;
  pvs.circle_samples = opt.circle_samples;
  pvs.seed = opt.seed;
  pvs.target_plus = static_cast<std::size_t>(std::llround(h * mass_p / (2.0 * kPi)));
  pvs.target_minus = static_cast<std::size_t>(std::llround(h * mass_m / (2.0 * kPi)));
  if (pvs.target_plus == 0 || pvs.target_minus == 0) {
    throw Error(ErrorCode::InvalidInput, "h mu(M) / 2pi rounds to zero points");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto verts = mesh.vertices();
  const auto faces = mesh.faces();
  const auto fa = mesh.face_areas();
  // Same-sign centres more than 4/κ apart; opposite signs kept 2/κ apart so
  // no two circles overlap.
  const double same_chord = 2.0 * std::sin(std::min(2.0 / kappa, 0.5 * kPi));
  const double other_chord = 2.0 * std::sin(std::min(1.0 / kappa, 0.5 * kPi));

  const auto draw = [&](std::span<const double> mu, std::size_t target, std::vector<Vec3>& out,
                        const std::vector<Vec3>& other) {
    std::vector<double> w(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const auto& t = faces[f];
      w[f] = fa[f] * (mu[static_cast<std::size_t>(t[0])] + mu[static_cast<std::size_t>(t[1])] +
                      mu[static_cast<std::size_t>(t[2])]);
    }
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::size_t budget = opt.attempts_per_point * target;
    for (std::size_t attempt = 0; attempt < budget && out.size() < target; ++attempt) {
      const auto& t = faces[pick(rng)];
      const double r1 = std::sqrt(unit(rng));
      const double r2 = unit(rng);
      const double a = 1.0 - r1, b = r1 * (1.0 - r2), c = r1 * r2;
      Vec3 x;
      for (int d = 0; d < 3; ++d) {
        x[d] = a * verts[static_cast<std::size_t>(t[0])][d] + b * verts[static_cast<std::size_t>(t[1])][d] +
               c * verts[static_cast<std::size_t>(t[2])][d];
      }
      x = normalized(x);
      const auto far = [&](const std::vector<Vec3>& pts, double chord) {
        return std::all_of(pts.begin(), pts.end(), [&](const Vec3& y) { return dist2(x, y) > chord * chord; });
      };
      if (far(out, same_chord) && far(other, other_chord)) out.push_back(x);
    }
    if (out.size() < target) {
      throw Error(ErrorCode::PackingFailure, "placed " + std::to_string(out.size()) + " of " +
                                                 std::to_string(target) + " points at separation 4/kappa");
    }
  };
  draw(mu_plus, pvs.target_plus, pvs.points_plus, pvs.points_minus);
  draw(mu_minus, pvs.target_minus, pvs.points_minus, pvs.points_plus);

  // Balance: drop the surplus points of the larger class that lie farthest
  // from the support of the other sign.
  const bool plus_larger = pvs.points_plus.size() > pvs.points_minus.size();
  auto& big = plus_larger ? pvs.points_plus : pvs.points_minus;
  const auto& small = plus_larger ? pvs.points_minus : pvs.points_plus;
  const auto other_mu = plus_larger ? mu_minus : mu_plus;
  const std::size_t surplus = big.size() - small.size();
  if (surplus > 0) {
    std::vector<std::pair<double, std::size_t>> d(big.size());
    for (std::size_t j = 0; j < big.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (other_mu[i] > 0.0) best = std::min(best, dist2(big[j], verts[i]));
      }
      d[j] = {best, j};
    }
    std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<char> drop(big.size(), 0);
    for (std::size_t k = 0; k < surplus; ++k) drop[d[k].second] = 1;
    std::vector<Vec3> kept;
    for (std::size_t j = 0; j < big.size(); ++j) {
      if (!drop[j]) kept.push_back(big[j]);
    }
    big = std::move(kept);
    pvs.removed = surplus;
  }
  return pvs;
}

double green_energy(const PointVortexSet& pvs) {
  std::vector<Vec3> centres = pvs.points_plus;
  centres.insert(centres.end(), pvs.points_minus.begin(), pvs.points_minus.end());
  const double chord = 2.0 * std::sin(std::min(pvs.circle_radius, 0.5 * kPi));
  for (std::size_t i = 0; i < centres.size(); ++i) {
    for (std::size_t j = i + 1; j < centres.size(); ++j) {
      if (dist2(centres[i], centres[j]) <= chord * chord) {
        throw Error(ErrorCode::CoincidentPoints, "vortex circles " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " overlap");
      }
    }
  }
  if (centres.empty()) return 0.0;
  const int m = pvs.circle_samples;
  const double qa = pvs.weight / m;
  std::vector<double> xs, ys, zs, q;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    const double sign = i < pvs.points_plus.size() ? 1.0 : -1.0;
    for (const auto& p : circle_points(centres[i], pvs.circle_radius, m)) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
      zs.push_back(p[2]);
      q.push_back(sign * qa);
    }
  }
  const double diag = circle_diagonal_correction(pvs.circle_radius, m);
  return pair_energy(xs, ys, zs, q) + static_cast<double>(centres.size()) * pvs.weight * pvs.weight * diag;
}

double pairing(const PointVortexSet& pvs, const std::function<double(const Vec3&)>& f) {
  double acc = 0.0;
  const auto add = [&](const std::vector<Vec3>& pts, double sign) {
    for (const auto& c : pts) {
      double s = 0.0;
      for (const auto& p : circle_points(c, pvs.circle_radius, pvs.circle_samples)) s += f(p);
      acc += sign * s / pvs.circle_samples;
    }
  };
  add(pvs.points_plus, 1.0);
  add(pvs.points_minus, -1.0);
  return pvs.weight * acc;
}

double green_energy(const TriMesh& mesh, std::span<const double> mu) {
  const std::size_t n = mesh.vertex_count();
  if (mu.size() != n) throw Error(ErrorCode::DimensionMismatch, "density / mesh size");
  const auto m = mesh.vertex_areas();
  const auto verts = mesh.vertices();
  std::vector<double> xs(n), ys(n), zs(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = verts[i][0];
    ys[i] = verts[i][1];
    zs[i] = verts[i][2];
    q[i] = mu[i] * m[i];
  }
  double e = pair_energy(xs, ys, zs, q);
  // Self cell: disc of radius ρ with πρ² = m_i; the mean of ln|x - y| over two
  // uniform points of a disc is ln ρ - 1/4.
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = std::sqrt(m[i] / kPi);
    const double g = -(std::log(rho) - 0.25 - std::log(2.0)) / (2.0 * kPi) - 1.0 / (4.0 * kPi);
    e += q[i] * q[i] * g;
  }
  return e;
}

double green_energy_poisson(const TriMesh& mesh, std::span<const double> mu) {
  if (mu.size() != mesh.vertex_count()) throw Error(ErrorCode::DimensionMismatch, "density / mesh size");
  std::vector<double> f(mu.begin(), mu.end());
  const double mean = integrate(mesh, f) / mesh.total_area();
  for (double& x : f) x -= mean;
  // mesh_primitive solves ΔF = f, so W = -F.
  return dirichlet_energy(mesh, mesh_primitive(mesh, f));
}

double energy_J(const TriMesh& mesh, std::span<const double> mu, double beta) {
  const auto m = mesh.vertex_areas();
  double tv = 0.0;
  for (std::size_t i = 0; i < mu.size() && i < m.size(); ++i) tv += std::abs(mu[i]) * m[i];
  return beta * tv + green_energy(mesh, mu);
}

ConvergenceSeries convergence_check(const TriMesh& mesh, std::span<const double> mu, double beta,
                                    std::span<const double> kappas, const ConvergenceOptions& opt) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidInput, "beta must be positive");
  if (opt.repeats < 1) throw Error(ErrorCode::InvalidInput, "repeats must be at least 1");
  const std::size_t n = mesh.vertex_count();
  if (mu.size() != n) throw Error(ErrorCode::DimensionMismatch, "density / mesh size");
  std::vector<double> mp(n), mm(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp[i] = std::max(mu[i], 0.0);
    mm[i] = std::max(-mu[i], 0.0);
    peak = std::max(peak, std::abs(mu[i]));
  }
  ConvergenceSeries s;
  s.beta = beta;
  s.J = peak > 0.0 ? energy_J(mesh, mu, beta) : 0.0;
  for (double kappa : kappas) {
    if (!(kappa > 1.0)) throw Error(ErrorCode::InvalidInput, "kappa must exceed 1");
    const double h = std::log(kappa) / beta;
    s.kappas.push_back(kappa);
    s.h.push_back(h);
    if (peak == 0.0) {
      s.n_plus.push_back(0);
      s.n_minus.push_back(0);
      s.energy.push_back(0.0);
      s.energy_sd.push_back(0.0);
      s.excess.push_back(0.0);
      s.abs_excess.push_back(0.0);
      continue;
    }
    std::vector<double> e;
    std::size_t np = 0, nm = 0;
    for (int r = 0; r < opt.repeats; ++r) {
      SampleOptions so;
      so.seed = opt.seed + static_cast<std::uint64_t>(r);
      so.circle_samples = opt.circle_samples;
      const auto pvs = sample_measure(mesh, mp, mm, kappa, h, so);
      np = pvs.points_plus.size();
      nm = pvs.points_minus.size();
      e.push_back(green_energy(pvs));
    }
    double mean = 0.0;
    for (double x : e) mean += x;
    mean /= static_cast<double>(e.size());
    double var = 0.0;
    for (double x : e) var += (x - mean) * (x - mean);
    var = e.size() > 1 ? var / static_cast<double>(e.size() - 1) : 0.0;
    s.n_plus.push_back(np);
    s.n_minus.push_back(nm);
    s.energy.push_back(mean);
    s.energy_sd.push_back(std::sqrt(var));
    s.excess.push_back((mean - s.J) / s.J);
    s.abs_excess.push_back(std::abs(mean - s.J) / s.J);
  }
  const std::size_t len = s.excess.size();
  const std::size_t tail = len / 2 + 1;
  s.tail_decreasing = len >= 2;
  for (std::size_t i = len - std::min(tail, len) + 1; i < len; ++i) {
    if (!(s.excess[i] < s.excess[i - 1])) s.tail_decreasing = false;
  }
  return s;
}

void write_point_vortex_csv(const PointVortexSet& pvs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  out.precision(17);
  out << "sign,x,y,z\n";
  for (const auto& p : pvs.points_plus) out << 1 << ',' << p[0] << ',' << p[1] << ',' << p[2] << '\n';
  for (const auto& p : pvs.points_minus) out << -1 << ',' << p[0] << ',' << p[1] << ',' << p[2] << '\n';
}

}  // namespace sc_obstacle
