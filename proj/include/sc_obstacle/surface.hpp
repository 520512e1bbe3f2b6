#pragma once

// Surfaces of revolution (φ-profiles) and closed triangle meshes with the
// lumped cotangent Laplace-Beltrami operator.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sc_obstacle/kernels.hpp"
#include "sc_obstacle/numerics.hpp"

namespace sc_obstacle {

// Meridian (ρ(φ), z(φ)) of an axisymmetric genus-0 surface, φ ∈ [0, π].
struct RevolutionProfile {
  std::string name;
  ScalarFn rho;
  ScalarFn zed;
  ScalarFn rho_prime;
  ScalarFn zed_prime;

  static RevolutionProfile sphere();
  // ρ = sin φ, z = -c cos φ.
  static RevolutionProfile ellipsoid(double c);
  // Derivatives taken by centred differences of the callables.
  static RevolutionProfile from_functions(std::string name, ScalarFn rho, ScalarFn zed);
  static RevolutionProfile from_table(std::string name, std::vector<double> phi,
                                      std::vector<double> rho, std::vector<double> zed);
};

// "sphere" or "ellipsoid:<c>".
RevolutionProfile named_profile(const std::string& spec);

// CSV with header; either one file with columns (phi, rho, z) or a (phi, rho)
// file plus a (phi, z) file sampled on the same φ values.
RevolutionProfile load_profile_csv(const std::string& path, const std::string& z_path = {});

class RevolutionSurface {
 public:
  std::span<const double> phi() const noexcept { return phi_; }
  std::span<const double> rho() const noexcept { return rho_; }
  std::span<const double> zed() const noexcept { return zed_; }
  std::span<const double> gamma() const noexcept { return gamma_; }
  // ργ per node: area density divided by 2π. Exactly zero at the poles.
  std::span<const double> weight() const noexcept { return weight_; }
  // ρ/γ at the cell midpoints φ_{i+1/2}, one per interval.
  std::span<const double> mid_weight() const noexcept { return mid_weight_; }

  std::size_t nodes() const noexcept { return phi_.size(); }
  int intervals() const noexcept { return static_cast<int>(phi_.size()) - 1; }
  double h() const noexcept { return h_; }
  double gamma_floor() const noexcept { return gamma_floor_; }
  const std::string& name() const noexcept { return profile_.name; }

  double rho_at(double phi) const { return profile_.rho(phi); }
  double rho_prime_at(double phi) const { return profile_.rho_prime(phi); }
  double gamma_at(double phi) const;
  // Arc length ∫γ dφ from the φ = 0 pole at every node.
  std::span<const double> arc_length() const noexcept { return arc_; }

  friend RevolutionSurface build_revolution(const RevolutionProfile& profile, int intervals,
                                            double gamma_floor);

 private:
  RevolutionProfile profile_;
  std::vector<double> phi_, rho_, zed_, gamma_, weight_, mid_weight_, arc_;
  double h_ = 0.0;
  double gamma_floor_ = 0.0;
};

// Uniform grid of `intervals` (even, >= 16) cells on [0, π].
RevolutionSurface build_revolution(const RevolutionProfile& profile, int intervals,
                                   double gamma_floor = 1e-6);

// 2π · Simpson(field · ργ).
double integrate(const RevolutionSurface& s, std::span<const double> field);

// Δf = (ργ)⁻¹ (ρ/γ f')' at interior nodes (second order); the pole entries use
// the mirrored stencil.
std::vector<double> laplacian_axisymmetric(const RevolutionSurface& s, std::span<const double> f);

// 2π ∫ (ρ/γ) f' g' dφ with midpoint differences.
double dirichlet_form(const RevolutionSurface& s, std::span<const double> f,
                      std::span<const double> g);

using Vec3 = std::array<double, 3>;

class TriMesh {
 public:
  std::span<const Vec3> vertices() const noexcept { return vertices_; }
  std::span<const std::array<int, 3>> faces() const noexcept { return faces_; }
  std::span<const std::array<int, 2>> edges() const noexcept { return edges_; }
  std::span<const double> cotan_weights() const noexcept { return cotan_; }
  // Mixed Voronoi lumped areas (positive, summing to the surface area).
  std::span<const double> vertex_areas() const noexcept { return vertex_area_; }
  std::span<const double> face_areas() const noexcept { return face_area_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double mean_edge_length() const noexcept { return mean_edge_; }
  double total_area() const noexcept { return total_area_; }
  // True when every vertex lies on the unit sphere (to 1e-9).
  bool on_unit_sphere() const noexcept { return unit_sphere_; }

  // Neighbours of v and the matching cotangent weights.
  std::span<const int> neighbors(std::size_t v) const noexcept {
    return {adj_.data() + adj_off_[v], adj_.data() + adj_off_[v + 1]};
  }
  std::span<const double> neighbor_weights(std::size_t v) const noexcept {
    return {adj_w_.data() + adj_off_[v], adj_w_.data() + adj_off_[v + 1]};
  }
  // Row sums of the cotangent weights.
  std::span<const double> stiffness_diagonal() const noexcept { return diag_; }

  kernels::EllView laplacian_view() const noexcept;

  friend TriMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<double> cotan_, vertex_area_, face_area_;
  std::vector<std::size_t> adj_off_;
  std::vector<int> adj_;
  std::vector<double> adj_w_;
  std::vector<double> diag_, inv_area_;
  std::size_t ell_width_ = 0;
  std::vector<int> ell_col_;
  std::vector<double> ell_val_;
  double mean_edge_ = 0.0;
  double total_area_ = 0.0;
  bool unit_sphere_ = false;
};

// Validates a closed, oriented, genus-0 manifold and assembles the operator.
TriMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

// Subdivided icosahedron projected to the unit sphere, 0 <= subdivisions <= 7.
TriMesh build_icosphere(int subdivisions);

// "icosphere:<k>" or "off:<path>".
TriMesh named_mesh(const std::string& spec);

TriMesh read_off(const std::string& path);
void write_off(const TriMesh& mesh, const std::string& path);

// Lumped cotangent Laplacian M⁻¹(W - D)f; Δ of a local maximum is <= 0.
std::vector<double> apply_laplacian(const TriMesh& mesh, std::span<const double> field);

// Stiffness K f = (D - W) f, symmetric positive semidefinite.
std::vector<double> apply_stiffness(const TriMesh& mesh, std::span<const double> field);

// Σ_edges w_ij (f_i - f_j)².
double dirichlet_energy(const TriMesh& mesh, std::span<const double> field);

// Σ f_i · area_i.
double integrate(const TriMesh& mesh, std::span<const double> field);

// Polar angle arccos(z/|x|) of every vertex.
std::vector<double> vertex_polar_angles(const TriMesh& mesh);

// Per-vertex surface gradient magnitude (area-weighted average of face gradients).
std::vector<double> gradient_magnitude(const TriMesh& mesh, std::span<const double> field);

}  // namespace sc_obstacle
