#include "sc_obstacle/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <unordered_map>

#include "sc_obstacle/error.hpp"
#include "sc_obstacle/io.hpp"

namespace sc_obstacle {

namespace {

constexpr double kPi = std::numbers::pi;

ScalarFn centred_derivative(ScalarFn f) {
  return [f = std::move(f)](double x) {
    constexpr double step = 1e-5;
    const double lo = std::max(x - step, 0.0);
    const double hi = std::min(x + step, kPi);
    return (f(hi) - f(lo)) / (hi - lo);
  };
}

void check_length(std::size_t got, std::size_t want) {
  if (got != want) {
    throw Error(ErrorCode::DimensionMismatch,
                "field has " + std::to_string(got) + " entries, expected " + std::to_string(want));
  }
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

}  // namespace

RevolutionProfile RevolutionProfile::sphere() {
  return {"sphere", [](double p) { return std::sin(p); }, [](double p) { return -std::cos(p); },
          [](double p) { return std::cos(p); }, [](double p) { return std::sin(p); }};
}

RevolutionProfile RevolutionProfile::ellipsoid(double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidInput, "ellipsoid axis must be positive");
  return {"ellipsoid:" + std::to_string(c), [](double p) { return std::sin(p); },
          [c](double p) { return -c * std::cos(p); }, [](double p) { return std::cos(p); },
          [c](double p) { return c * std::sin(p); }};
}

RevolutionProfile RevolutionProfile::from_functions(std::string name, ScalarFn rho, ScalarFn zed) {
  RevolutionProfile p;
  p.name = std::move(name);
  p.rho_prime = centred_derivative(rho);
  p.zed_prime = centred_derivative(zed);
  p.rho = std::move(rho);
  p.zed = std::move(zed);
  return p;
}

RevolutionProfile RevolutionProfile::from_table(std::string name, std::vector<double> phi,
                                                std::vector<double> rho, std::vector<double> zed) {
  if (phi.size() != rho.size() || phi.size() != zed.size()) {
    throw Error(ErrorCode::DimensionMismatch, "profile table columns differ in length");
  }
  if (phi.empty() || std::abs(phi.front()) > 1e-9 || std::abs(phi.back() - kPi) > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "profile table must span [0, pi]");
  }
  const TableFunction r(phi, std::move(rho));
  const TableFunction z(std::move(phi), std::move(zed));
  return {std::move(name), r, z, [r](double p) { return r.prime(p); },
          [z](double p) { return z.prime(p); }};
}

RevolutionProfile named_profile(const std::string& spec) {
  if (spec == "sphere") return RevolutionProfile::sphere();
  const std::string prefix = "ellipsoid:";
  if (spec.rfind(prefix, 0) == 0) {
    double c = 0.0;
    try {
      c = std::stod(spec.substr(prefix.size()));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad ellipsoid axis in '" + spec + "'");
    }
    return RevolutionProfile::ellipsoid(c);
  }
  throw Error(ErrorCode::InvalidInput, "unknown profile '" + spec + "'");
}

RevolutionProfile load_profile_csv(const std::string& path, const std::string& z_path) {
  auto cols = read_csv_columns(path, 2);
  std::vector<double> zed;
  if (z_path.empty()) {
    if (cols.size() < 3) throw Error(ErrorCode::InvalidInput, path + ": need phi, rho, z columns");
    zed = cols[2];
  } else {
    auto zc = read_csv_columns(z_path, 2);
    if (zc[0] != cols[0]) throw Error(ErrorCode::InvalidInput, "rho and z tables use different phi samples");
    zed = zc[1];
  }
  return RevolutionProfile::from_table(path, cols[0], cols[1], std::move(zed));
}

double RevolutionSurface::gamma_at(double phi) const {
  return std::hypot(profile_.rho_prime(phi), profile_.zed_prime(phi));
}

RevolutionSurface build_revolution(const RevolutionProfile& profile, int intervals,
                                   double gamma_floor) {
  if (intervals < 16 || intervals % 2 != 0) {
    throw Error(ErrorCode::InvalidInput, "need an even number of intervals >= 16");
  }
  if (!(gamma_floor > 0.0)) throw Error(ErrorCode::InvalidInput, "gamma floor must be positive");
  RevolutionSurface s;
  s.profile_ = profile;
  s.gamma_floor_ = gamma_floor;
  const auto n = static_cast<std::size_t>(intervals);
  s.h_ = kPi / intervals;
  s.phi_.resize(n + 1);
  s.rho_.resize(n + 1);
  s.zed_.resize(n + 1);
  s.gamma_.resize(n + 1);
  s.weight_.resize(n + 1);
  s.mid_weight_.resize(n);
  s.arc_.resize(n + 1);

  double scale = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double phi = i == n ? kPi : static_cast<double>(i) * s.h_;
    s.phi_[i] = phi;
    s.rho_[i] = profile.rho(phi);
    s.zed_[i] = profile.zed(phi);
    s.gamma_[i] = s.gamma_at(phi);
    scale = std::max(scale, std::abs(s.rho_[i]));
    if (i > 0 && i < n && !(s.rho_[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveRho, "rho(" + std::to_string(phi) + ") = " + std::to_string(s.rho_[i]));
    }
    if (!(s.gamma_[i] >= gamma_floor)) {
      throw Error(ErrorCode::DegenerateGamma,
                  "gamma(" + std::to_string(phi) + ") = " + std::to_string(s.gamma_[i]) + " below " +
                      std::to_string(gamma_floor));
    }
  }
  if (std::abs(s.rho_.front()) > 1e-9 * scale || std::abs(s.rho_.back()) > 1e-9 * scale) {
    throw Error(ErrorCode::InvalidInput, "profile must close at both poles (rho = 0)");
  }
  const double gmax = *std::max_element(s.gamma_.begin(), s.gamma_.end());
  if (std::abs(profile.zed_prime(0.0)) > 1e-3 * gmax || std::abs(profile.zed_prime(kPi)) > 1e-3 * gmax) {
    throw Error(ErrorCode::InvalidInput, "z' must vanish at the poles (surface not smooth there)");
  }
  s.rho_.front() = 0.0;
  s.rho_.back() = 0.0;

  for (std::size_t i = 0; i <= n; ++i) s.weight_[i] = s.rho_[i] * s.gamma_[i];
  s.weight_.front() = 0.0;
  s.weight_.back() = 0.0;

  s.arc_[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = s.phi_[i] + 0.5 * s.h_;
    const double g_mid = s.gamma_at(mid);
    s.mid_weight_[i] = profile.rho(mid) / g_mid;
    s.arc_[i + 1] = s.arc_[i] + s.h_ / 6.0 * (s.gamma_[i] + 4.0 * g_mid + s.gamma_[i + 1]);
  }
  return s;
}

double integrate(const RevolutionSurface& s, std::span<const double> field) {
  check_length(field.size(), s.nodes());
  std::vector<double> g(field.size());
  const auto w = s.weight();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = field[i] * w[i];
  return 2.0 * kPi * simpson_samples(g, s.h());
}

std::vector<double> laplacian_axisymmetric(const RevolutionSurface& s, std::span<const double> f) {
  check_length(f.size(), s.nodes());
  const std::size_t n = s.nodes() - 1;
  const double h = s.h();
  const auto mw = s.mid_weight();
  const auto w = s.weight();
  std::vector<double> out(n + 1);
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = (mw[i] * (f[i + 1] - f[i]) - mw[i - 1] * (f[i] - f[i - 1])) / (h * h * w[i]);
  }
  // Pole cells [0, h/2] and [π - h/2, π]: flux through the half-node face over
  // the cap area.
  const auto cap = [&s, h](double lo) {
    return simpson([&s](double p) { return s.rho_at(p) * s.gamma_at(p); }, lo, lo + 0.5 * h, 8);
  };
  out[0] = mw[0] * (f[1] - f[0]) / h / cap(0.0);
  out[n] = mw[n - 1] * (f[n - 1] - f[n]) / h / cap(kPi - 0.5 * h);
  return out;
}

double dirichlet_form(const RevolutionSurface& s, std::span<const double> f,
                      std::span<const double> g) {
  check_length(f.size(), s.nodes());
  check_length(g.size(), s.nodes());
  const auto mw = s.mid_weight();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) acc += mw[i] * (f[i + 1] - f[i]) * (g[i + 1] - g[i]);
  return 2.0 * kPi * acc / s.h();
}

TriMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
  const std::size_t nv = vertices.size();
  if (nv < 4 || faces.size() < 4) throw Error(ErrorCode::InvalidMesh, "mesh too small");
  TriMesh m;

  // Each undirected edge must be shared by exactly two faces with opposite
  // orientation.
  std::map<std::pair<int, int>, int> directed;
  std::vector<int> used(nv, 0);
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= nv || static_cast<std::size_t>(b) >= nv || a == b) {
        throw Error(ErrorCode::InvalidMesh, "face index out of range or repeated");
      }
      if (!directed.emplace(std::make_pair(a, b), 1).second) {
        throw Error(ErrorCode::InvalidMesh, "directed edge used twice (orientation or non-manifold)");
      }
      used[static_cast<std::size_t>(a)] = 1;
    }
  }
  std::map<std::pair<int, int>, std::size_t> edge_id;
  for (const auto& [key, unused] : directed) {
    (void)unused;
    if (!directed.contains({key.second, key.first})) throw Error(ErrorCode::InvalidMesh, "mesh has a boundary edge");
    if (key.first < key.second) {
      edge_id.emplace(key, m.edges_.size());
      m.edges_.push_back({key.first, key.second});
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw Error(ErrorCode::InvalidMesh, "isolated vertex");
  }
  const long euler = static_cast<long>(nv) - static_cast<long>(m.edges_.size()) + static_cast<long>(faces.size());
  if (euler != 2) throw Error(ErrorCode::InvalidMesh, "Euler characteristic " + std::to_string(euler) + " != 2");

  m.cotan_.assign(m.edges_.size(), 0.0);
  m.vertex_area_.assign(nv, 0.0);
  m.face_area_.resize(faces.size());
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& f = faces[fi];
    const Vec3& p0 = vertices[static_cast<std::size_t>(f[0])];
    const Vec3& p1 = vertices[static_cast<std::size_t>(f[1])];
    const Vec3& p2 = vertices[static_cast<std::size_t>(f[2])];
    const double twice_area = norm(cross(sub(p1, p0), sub(p2, p0)));
    if (!(twice_area > 0.0)) throw Error(ErrorCode::InvalidMesh, "degenerate face " + std::to_string(fi));
    const double area = 0.5 * twice_area;
    m.face_area_[fi] = area;
    std::array<double, 3> cot{};
    std::array<double, 3> len2{};
    for (int k = 0; k < 3; ++k) {
      const Vec3& o = vertices[static_cast<std::size_t>(f[k])];
      const int a = f[(k + 1) % 3];
      const int b = f[(k + 2) % 3];
      const Vec3 ea = sub(vertices[static_cast<std::size_t>(a)], o);
      const Vec3 eb = sub(vertices[static_cast<std::size_t>(b)], o);
      cot[k] = dot(ea, eb) / twice_area;
      const Vec3 opp = sub(vertices[static_cast<std::size_t>(b)], vertices[static_cast<std::size_t>(a)]);
      len2[k] = dot(opp, opp);
      m.cotan_[edge_id.at({std::min(a, b), std::max(a, b)})] += 0.5 * cot[k];
    }
    // Mixed Voronoi areas: circumcentric cells for non-obtuse triangles,
    // half/quarter splits otherwise.
    const int obtuse = cot[0] < 0.0 ? 0 : cot[1] < 0.0 ? 1 : cot[2] < 0.0 ? 2 : -1;
    for (int k = 0; k < 3; ++k) {
      double share = 0.0;
      if (obtuse < 0) {
        share = (len2[(k + 1) % 3] * cot[(k + 1) % 3] + len2[(k + 2) % 3] * cot[(k + 2) % 3]) / 8.0;
      } else {
        share = obtuse == k ? 0.5 * area : 0.25 * area;
      }
      m.vertex_area_[static_cast<std::size_t>(f[k])] += share;
    }
  }

  std::vector<std::vector<std::pair<int, double>>> adj(nv);
  double edge_len = 0.0;
  for (std::size_t e = 0; e < m.edges_.size(); ++e) {
    const auto [a, b] = m.edges_[e];
    adj[static_cast<std::size_t>(a)].emplace_back(b, m.cotan_[e]);
    adj[static_cast<std::size_t>(b)].emplace_back(a, m.cotan_[e]);
    edge_len += norm(sub(vertices[static_cast<std::size_t>(a)], vertices[static_cast<std::size_t>(b)]));
  }
  m.mean_edge_ = edge_len / static_cast<double>(m.edges_.size());
  m.adj_off_.assign(nv + 1, 0);
  m.diag_.assign(nv, 0.0);
  m.inv_area_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    auto& row = adj[v];
    std::sort(row.begin(), row.end());
    m.adj_off_[v + 1] = m.adj_off_[v] + row.size();
    for (const auto& [j, w] : row) {
      m.adj_.push_back(j);
      m.adj_w_.push_back(w);
      m.diag_[v] += w;
    }
    m.ell_width_ = std::max(m.ell_width_, row.size());
    m.inv_area_[v] = 1.0 / m.vertex_area_[v];
  }
  m.ell_col_.resize(m.ell_width_ * nv);
  m.ell_val_.assign(m.ell_width_ * nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t s = 0; s < m.ell_width_; ++s) {
      const std::size_t at = s * nv + v;
      if (s < adj[v].size()) {
        m.ell_col_[at] = adj[v][s].first;
        m.ell_val_[at] = adj[v][s].second;
      } else {
        m.ell_col_[at] = static_cast<int>(v);
      }
    }
  }
  m.total_area_ = 0.0;
  for (double a : m.face_area_) m.total_area_ += a;
  m.unit_sphere_ = std::all_of(vertices.begin(), vertices.end(),
                               [](const Vec3& p) { return std::abs(norm(p) - 1.0) < 1e-9; });
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  return m;
}

kernels::EllView TriMesh::laplacian_view() const noexcept {
  return {vertices_.size(), ell_width_, ell_col_, ell_val_, diag_, inv_area_};
}

TriMesh build_icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 7) {
    throw Error(ErrorCode::InvalidInput, "icosphere subdivisions must be in [0, 7]");
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  const auto project = [](Vec3 p) {
    const double r = norm(p);
    return Vec3{p[0] / r, p[1] / r, p[2] / r};
  };
  for (auto& p : v) p = project(p);
  for (int level = 0; level < subdivisions; ++level) {
    std::unordered_map<std::uint64_t, int> midpoint;
    const auto mid = [&](int a, int b) {
      const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3& pa = v[static_cast<std::size_t>(a)];
      const Vec3& pb = v[static_cast<std::size_t>(b)];
      v.push_back(project({pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]}));
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int ab = mid(tri[0], tri[1]);
      const int bc = mid(tri[1], tri[2]);
      const int ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return build_mesh(std::move(v), std::move(f));
}

TriMesh named_mesh(const std::string& spec) {
  if (spec.rfind("icosphere:", 0) == 0) {
    int k = -1;
    try {
      k = std::stoi(spec.substr(10));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad icosphere level in '" + spec + "'");
    }
    return build_icosphere(k);
  }
  if (spec.rfind("off:", 0) == 0) return read_off(spec.substr(4));
  throw Error(ErrorCode::InvalidInput, "unknown mesh '" + spec + "'");
}

std::vector<double> apply_laplacian(const TriMesh& mesh, std::span<const double> field) {
  check_length(field.size(), mesh.vertex_count());
  std::vector<double> out(field.size());
  kernels::active().ell_apply(mesh.laplacian_view(), field, out);
  return out;
}

std::vector<double> apply_stiffness(const TriMesh& mesh, std::span<const double> field) {
  check_length(field.size(), mesh.vertex_count());
  std::vector<double> out(field.size());
  const auto diag = mesh.stiffness_diagonal();
  for (std::size_t i = 0; i < field.size(); ++i) {
    double acc = diag[i] * field[i];
    const auto nb = mesh.neighbors(i);
    const auto w = mesh.neighbor_weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) acc -= w[k] * field[static_cast<std::size_t>(nb[k])];
    out[i] = acc;
  }
  return out;
}

double dirichlet_energy(const TriMesh& mesh, std::span<const double> field) {
  check_length(field.size(), mesh.vertex_count());
  const auto edges = mesh.edges();
  const auto w = mesh.cotan_weights();
  double acc = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double d = field[static_cast<std::size_t>(edges[e][0])] - field[static_cast<std::size_t>(edges[e][1])];
    acc += w[e] * d * d;
  }
  return acc;
}

double integrate(const TriMesh& mesh, std::span<const double> field) {
  check_length(field.size(), mesh.vertex_count());
  const auto area = mesh.vertex_areas();
  double acc = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) acc += field[i] * area[i];
  return acc;
}

std::vector<double> vertex_polar_angles(const TriMesh& mesh) {
  std::vector<double> out;
  out.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) out.push_back(std::acos(std::clamp(p[2] / norm(p), -1.0, 1.0)));
  return out;
}

std::vector<double> gradient_magnitude(const TriMesh& mesh, std::span<const double> field) {
  check_length(field.size(), mesh.vertex_count());
  std::vector<double> acc(field.size(), 0.0);
  std::vector<double> wsum(field.size(), 0.0);
  const auto verts = mesh.vertices();
  const auto faces = mesh.faces();
  const auto areas = mesh.face_areas();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& f = faces[fi];
    const Vec3& p0 = verts[static_cast<std::size_t>(f[0])];
    const Vec3& p1 = verts[static_cast<std::size_t>(f[1])];
    const Vec3& p2 = verts[static_cast<std::size_t>(f[2])];
    const Vec3 nrm = cross(sub(p1, p0), sub(p2, p0));
    const double twice = norm(nrm);
    const Vec3 unit{nrm[0] / twice, nrm[1] / twice, nrm[2] / twice};
    // ∇f = Σ f_k (n × e_k) / 2A with e_k the edge opposite vertex k.
    Vec3 g{0, 0, 0};
    const std::array<const Vec3*, 3> p{&p0, &p1, &p2};
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = sub(*p[(k + 2) % 3], *p[(k + 1) % 3]);
      const Vec3 r = cross(unit, e);
      const double fk = field[static_cast<std::size_t>(f[k])];
      for (int d = 0; d < 3; ++d) g[d] += fk * r[d] / twice;
    }
    const double mag = norm(g);
    for (int k = 0; k < 3; ++k) {
      acc[static_cast<std::size_t>(f[k])] += areas[fi] * mag;
      wsum[static_cast<std::size_t>(f[k])] += areas[fi];
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] /= wsum[i];
  return acc;
}

}  // namespace sc_obstacle
