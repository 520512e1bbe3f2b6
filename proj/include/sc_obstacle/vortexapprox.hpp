#pragma once

// Point-vortex approximations of a vorticity measure on the unit sphere and
// their Green energies.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/surface.hpp"

namespace sc_obstacle {

// Zero-mean Green function of the unit sphere: -(1/4π) ln((1 - x·y)/2) - 1/(4π).
// Throws CoincidentPoints for x = y.
double green_sphere(const Vec3& x, const Vec3& y);

// Mean of G over two independent uniform points on a geodesic circle of the
// given radius: -(1/2π) ln(sin(r)/2) - 1/(4π).
double circle_self_energy(double radius);

struct PointVortexSet {
  double kappa = 0.0;
  double h = 0.0;
  std::vector<Vec3> points_plus;
  std::vector<Vec3> points_minus;
  // Mass of each circle: 2π/h.
  double weight = 0.0;
  double circle_radius = 0.0;
  int circle_samples = 32;
  std::uint64_t seed = 0;
  // round(h μ±(M) / 2π) before balancing.
  std::size_t target_plus = 0;
  std::size_t target_minus = 0;
  std::size_t removed = 0;
};

struct SampleOptions {
  std::uint64_t seed = 1;
  int circle_samples = 32;
  // Candidate draws allowed per requested point before PackingFailure.
  std::size_t attempts_per_point = 400;
};

// Seeded rejection sampler: candidates drawn with probability proportional to
// the density, rejected within 4/κ of an accepted point of the same sign; the
// larger class then drops the points farthest from the other sign's support.
PointVortexSet sample_measure(const TriMesh& mesh, std::span<const double> mu_plus,
                              std::span<const double> mu_minus, double kappa, double h,
                              const SampleOptions& opt = {});

// Points of the geodesic circle of radius r around c, m equally spaced.
std::vector<Vec3> circle_points(const Vec3& c, double r, int m);

// ∬ G dμ_κ dμ_κ with each circle discretised by its samples. Different circles
// interact through all sample pairs; a circle with itself uses the pairs of
// distinct samples plus the exact correction for the missing diagonal.
// Throws CoincidentPoints when two circles overlap.
double green_energy(const PointVortexSet& pvs);

// ∫ f dμ_κ.
double pairing(const PointVortexSet& pvs, const std::function<double(const Vec3&)>& f);

// ∬ G dμ dμ for a vertex density, the diagonal taken as the mean of G over a
// geodesic disc with the vertex area.
double green_energy(const TriMesh& mesh, std::span<const double> mu);
// Same quantity as the Dirichlet energy of W with -ΔW = μ.
double green_energy_poisson(const TriMesh& mesh, std::span<const double> mu);

// β Σ|μ| m + ∬ G dμ dμ.
double energy_J(const TriMesh& mesh, std::span<const double> mu, double beta);

struct ConvergenceOptions {
  std::uint64_t seed = 1;
  int circle_samples = 32;
  int repeats = 8;
};

struct ConvergenceSeries {
  double beta = 0.0;
  double J = 0.0;
  std::vector<double> kappas;
  std::vector<double> h;
  std::vector<std::size_t> n_plus;
  std::vector<std::size_t> n_minus;
  // Mean and standard deviation over repeats.
  std::vector<double> energy;
  std::vector<double> energy_sd;
  // (energy - J) / J; zero when J = 0.
  std::vector<double> excess;
  std::vector<double> abs_excess;
  // Excess strictly decreasing over the last n/2 + 1 entries.
  bool tail_decreasing = false;
};

// h(κ) = ln κ / β for each κ; the same measure is resampled `repeats` times
// with consecutive seeds.
ConvergenceSeries convergence_check(const TriMesh& mesh, std::span<const double> mu, double beta,
                                    std::span<const double> kappas,
                                    const ConvergenceOptions& opt = {});

// sign, x, y, z per point.
void write_point_vortex_csv(const PointVortexSet& pvs, const std::string& path);

// Worker count for embarrassingly parallel loops: SC_OBSTACLE_THREADS if set,
// else the hardware concurrency.
unsigned worker_count();

}  // namespace sc_obstacle
