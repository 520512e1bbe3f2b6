// sc_obstacle: command-line front end for the obstacle solvers and analyses.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "sc_obstacle/analysis.hpp"
#include "sc_obstacle/barriers.hpp"
#include "sc_obstacle/error.hpp"
#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/obstacle1d.hpp"
#include "sc_obstacle/obstacle2d.hpp"
#include "sc_obstacle/report.hpp"
#include "sc_obstacle/vortexapprox.hpp"

namespace fs = std::filesystem;
using namespace sc_obstacle;
using report::Json;

namespace {

constexpr int kConfigVersion = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct Common {
  std::string out = ".";
  bool svg = false;
};

struct Axi {
  std::string profile = "sphere";
  std::string potential = "uniform";
  std::string z_csv;
  int intervals = 1024;
};

struct Mesh {
  std::string mesh;
  std::string field = "z";
};

struct Betas {
  std::string list;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::string spacing = "lin";
};

struct Args {
  Common common;
  Axi axi;
  Mesh mesh;
  Betas betas;
  double beta = 0.0;
  std::string solver = "auto";
  double tol = 0.0;
  long max_sweeps = 0;
  double tol_move = 3.0;
  double c = 0.5;
  double C = 0.5;
  int samples = 4001;
  std::string kappas = "100,300,1000,3000";
  std::uint64_t seed = 1;
  int repeats = 8;
  int circle_samples = 32;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      invalid("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) invalid("not a number: '" + item + "'");
    v.push_back(x);
  }
  return v;
}

bool is_file_spec(const std::string& s) { return s.ends_with(".csv") || s.find('/') != std::string::npos; }

AxiProblem make_axi(Axi opt) {
  static const std::set<std::string> potentials{"uniform", "triple", "symmetric"};
  if (potentials.contains(opt.profile)) {
    opt.potential = opt.profile;
    opt.profile = "sphere";
  }
  if (opt.intervals < 16 || opt.intervals % 2 != 0) invalid("--intervals must be even and >= 16");
  const RevolutionProfile prof =
      is_file_spec(opt.profile) ? load_profile_csv(opt.profile, opt.z_csv) : named_profile(opt.profile);
  AxiPotential a = is_file_spec(opt.potential) ? AxiPotential::from_csv(opt.potential)
                                               : AxiPotential::named(opt.potential);
  return {std::move(a), build_revolution(prof, opt.intervals)};
}

MeshProblem make_mesh(const Mesh& opt) {
  TriMesh m = named_mesh(opt.mesh);
  MeshField f = named_mesh_field(m, opt.field);
  return {std::move(m), std::move(f)};
}

void check_beta(double beta, double beta_c) {
  if (!(beta > 0.0) || !std::isfinite(beta)) invalid("beta must be positive");
  if (beta_c > 0.0 && beta > beta_c * (1.0 + 1e-9)) {
    invalid("beta " + std::to_string(beta) + " exceeds beta_c " + std::to_string(beta_c));
  }
}

SweepSolver sweep_solver(const std::string& s) {
  if (s == "auto") return SweepSolver::Auto;
  if (s == "regime") return SweepSolver::Regime;
  if (s == "pgs") return SweepSolver::Pgs;
  invalid("unknown solver '" + s + "'");
}

std::vector<double> beta_list(const Betas& b, std::vector<double> fallback) {
  std::vector<double> v;
  if (!b.list.empty()) {
    v = parse_list(b.list);
  } else if (b.count > 0) {
    if (!(b.lo > 0.0) || !(b.hi > b.lo)) invalid("need 0 < --beta-min < --beta-max");
    if (b.spacing == "log") v = logspace(b.lo, b.hi, static_cast<std::size_t>(b.count));
    else if (b.spacing == "lin") v = linspace(b.lo, b.hi, static_cast<std::size_t>(b.count));
    else invalid("--spacing must be lin or log");
  } else {
    v = std::move(fallback);
  }
  if (v.empty()) invalid("no beta values given");
  for (double x : v) check_beta(x, 0.0);
  return v;
}

std::string path_in(const Common& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void emit(const Common& c, const std::string& name, const Json& j) {
  report::write_json(j, path_in(c, name));
  std::cout << path_in(c, name) << "\n";
}

void emit_svg(const Common& c, const std::string& name, const report::Plot& p) {
  if (!c.svg) return;
  report::write_text(report::render_svg(p), path_in(c, name));
  std::cout << path_in(c, name) << "\n";
}

double discrete_beta_c(const AxiProblem& p) { return derive_fields(p.a, p.s).beta_c; }

double mesh_beta_c(const MeshProblem& p) {
  const auto F = mesh_primitive(p.mesh, p.field.H);
  const auto [lo, hi] = std::minmax_element(F.begin(), F.end());
  return *hi - *lo;
}

Json header(const std::string& command) { return {{"command", command}, {"version", kConfigVersion}}; }

int cmd_derive(const Args& g) {
  const auto p = make_axi(g.axi);
  const auto f = derive_fields(p.a, p.s);
  Json j = header("derive");
  j["profile"] = g.axi.profile;
  j["potential"] = p.a.name();
  j["intervals"] = g.axi.intervals;
  j["shape"] = p.a.shape() == PotentialShape::TripleZero ? "triple-zero" : "single-bump";
  j["beta_c"] = beta_critical(p.a, p.s);
  j["beta_c_discrete"] = f.beta_c;
  j["h_mean_removed"] = f.h_mean_removed;
  j["a_max"] = p.a.a_max();
  Json crit = Json::array();
  for (std::size_t i = 0; i < p.a.crit().size(); ++i) {
    crit.push_back({{"phi", p.a.crit()[i]}, {"a", p.a.crit_vals()[i]}});
  }
  j["critical_points"] = crit;
  j["field_zeros"] = field_zeros(p.a, p.s);
  if (p.a.shape() == PotentialShape::TripleZero) j["critical_betas"] = report::to_json(critical_betas(p.a, p.s));
  emit(g.common, "derive.json", j);
  return 0;
}

Profile1D solve_1d(const AxiProblem& p, const FieldPair& f, double beta, const Args& g) {
  Pgs1dOptions o;
  if (g.tol > 0.0) o.tol = g.tol;
  if (g.max_sweeps > 0) o.max_sweeps = g.max_sweeps;
  const auto solver = sweep_solver(g.solver);
  if (solver == SweepSolver::Pgs) return solve_pgs_1d(p.a, p.s, beta, o);
  if (solver == SweepSolver::Regime || beta < beta_critical(p.a, p.s)) {
    try {
      return solve_regime(p.a, p.s, f, beta);
    } catch (const Error& e) {
      if (solver == SweepSolver::Regime ||
          (e.code() != ErrorCode::RootNotBracketed && e.code() != ErrorCode::BetaOutOfRange)) {
        throw;
      }
    }
  }
  return solve_pgs_1d(p.a, p.s, beta, o);
}

int cmd_solve1d(const Args& g) {
  const auto p = make_axi(g.axi);
  const auto f = derive_fields(p.a, p.s);
  check_beta(g.beta, f.beta_c);
  auto prof = solve_1d(p, f, g.beta, g);
  const double eps = default_eps_active(prof.h, f.beta_c, g.beta);
  classify_active(prof, eps);
  Json j = header("solve1d");
  j["profile"] = report::to_json(prof);
  j["eps_active"] = eps;
  j["residual_check"] = report::to_json(residual_check(prof, p.a, p.s));
  Json comps = Json::array();
  for (const auto& c : components_1d(prof, eps)) {
    comps.push_back({{"lo", c.lo}, {"hi", c.hi}, {"lo_side", c.lo_side}, {"hi_side", c.hi_side}});
  }
  j["components"] = comps;
  write_profile_csv(prof, path_in(g.common, "profile1d.csv"));
  std::cout << path_in(g.common, "profile1d.csv") << "\n";
  emit(g.common, "solve1d.json", j);
  return 0;
}

int cmd_solve2d(const Args& g) {
  if (g.mesh.mesh.empty()) invalid("--mesh is required");
  const auto p = make_mesh(g.mesh);
  const double bc = mesh_beta_c(p);
  check_beta(g.beta, bc);
  Pgs2dOptions o;
  if (g.tol > 0.0) o.tol = g.tol;
  if (g.max_sweeps > 0) o.max_sweeps = g.max_sweeps;
  const auto sol = solve_pgs_2d(p.mesh, p.field, g.beta, o);
  const double eps = default_eps_active_2d(p.mesh, bc, g.beta);
  const auto vort = vorticity(sol, p.field.H, p.mesh, eps);
  Json j = header("solve2d");
  j["mesh"] = g.mesh.mesh;
  j["field"] = g.mesh.field;
  j["nondegenerate_margin"] = p.field.nondegen_margin;
  j["solution"] = report::to_json(sol);
  j["components"] = report::to_json(sc_region(sol, p.mesh, eps), p.mesh);
  j["vorticity"] = report::to_json(vort);
  j["energy_F"] = energy_F(sol.V, p.field.H, p.mesh);
  j["energy_E"] = energy_E(sol.V, p.field.H, p.mesh, g.beta);
  write_mesh_solution_csv(sol, vort.mu, path_in(g.common, "mesh_solution.csv"));
  std::cout << path_in(g.common, "mesh_solution.csv") << "\n";
  emit(g.common, "solve2d.json", j);
  return 0;
}

SweepOptions sweep_options(const Args& g) {
  SweepOptions o;
  o.solver = sweep_solver(g.solver);
  if (g.tol > 0.0) o.tol_1d = o.tol_2d = g.tol;
  if (g.max_sweeps > 0) o.max_sweeps = g.max_sweeps;
  return o;
}

SweepReport run_sweep(const Args& g, const std::vector<double>& fallback_1d,
                      std::optional<CriticalBetas>* crit = nullptr) {
  const auto opt = sweep_options(g);
  if (!g.mesh.mesh.empty()) {
    const auto p = make_mesh(g.mesh);
    const auto betas = beta_list(g.betas, {});
    for (double b : betas) check_beta(b, mesh_beta_c(p));
    return sweep(p, betas, opt);
  }
  const auto p = make_axi(g.axi);
  if (crit != nullptr && p.a.shape() == PotentialShape::TripleZero) *crit = critical_betas(p.a, p.s);
  const auto betas = beta_list(g.betas, fallback_1d);
  const double bc = discrete_beta_c(p);
  for (double b : betas) check_beta(b, bc);
  return sweep(p, betas, opt);
}

std::vector<double> triple_window(const Args& g) {
  const auto p = make_axi(g.axi);
  if (p.a.shape() != PotentialShape::TripleZero) return {};
  const auto cb = critical_betas(p.a, p.s);
  return linspace(0.5 * cb.beta2, 1.5 * cb.beta1, 40);
}

std::vector<std::pair<double, std::string>> crit_marks(const std::optional<CriticalBetas>& c) {
  if (!c) return {};
  return {{c->beta1, "beta*1"}, {c->beta2, "beta*2"}};
}

int cmd_sweep(const Args& g) {
  std::optional<CriticalBetas> crit;
  const auto r = run_sweep(g, g.mesh.mesh.empty() ? triple_window(g) : std::vector<double>{}, &crit);
  Json j = header("sweep");
  j["sweep"] = report::to_json(r);
  j["transitions"] = report::to_json(transitions(r));
  j["monotonicity_violations"] = report::to_json(check_monotonicity(r));
  j["continuity"] = report::to_json(check_continuity(r));
  j["freezing"] = report::to_json(detect_freezing(r, g.tol_move));
  if (crit) j["critical_betas"] = report::to_json(*crit);
  report::write_sweep_csv(r, path_in(g.common, "sweep.csv"));
  std::cout << path_in(g.common, "sweep.csv") << "\n";
  if (!r.mesh) {
    report::write_sweep_profiles_csv(r, path_in(g.common, "sweep_profiles.csv"));
    std::cout << path_in(g.common, "sweep_profiles.csv") << "\n";
    emit_svg(g.common, "sweep_profiles.svg", report::profile_plot(r));
  }
  emit_svg(g.common, "sweep_counts.svg", report::count_plot(r, crit_marks(crit)));
  emit(g.common, "sweep.json", j);
  return 0;
}

int cmd_scaling(const Args& g) {
  Args h = g;
  if (h.betas.list.empty() && h.betas.count == 0) h.betas = {"", 1e-5, 1e-2, 8, "log"};
  const auto r = run_sweep(h, {});
  const auto width = fit_scaling(r, ScalingQuantity::Width);
  const auto grad = fit_scaling(r, ScalingQuantity::Gradient);
  Json j = header("scaling");
  j["problem"] = r.problem;
  j["beta_c"] = r.beta_c;
  j["width"] = report::to_json(width);
  j["gradient"] = report::to_json(grad);
  j["thickness"] = report::to_json(check_thickness(r));
  j["monotonicity_violations"] = report::to_json(check_monotonicity(r));
  j["continuity"] = report::to_json(check_continuity(r));
  if (!r.mesh) {
    // Barrier bracket across the first zero of H.
    const auto p = make_axi(h.axi);
    const auto zeros = field_zeros(p.a, p.s);
    Json brackets = Json::array();
    for (const auto& rec : r.records) {
      if (!rec.ok || rec.components.empty() || zeros.empty()) continue;
      const double w = rec.components.front().width;
      const auto sl = collar_slopes(p.a, p.s, zeros.front(), 2.0 * w);
      const auto wb = width_bracket(sl.c, sl.C, rec.beta);
      brackets.push_back({{"beta", rec.beta},
                          {"width", w},
                          {"c", sl.c},
                          {"C", sl.C},
                          {"w_lo", wb.w_lo},
                          {"w_hi", wb.w_hi},
                          {"inside", w >= 0.5 * wb.w_lo && w <= 2.0 * wb.w_hi}});
    }
    j["barrier_brackets"] = brackets;
  }
  emit_svg(g.common, "scaling_width.svg", report::width_plot(width, "width"));
  emit_svg(g.common, "scaling_gradient.svg", report::width_plot(grad, "max gradient"));
  report::write_sweep_csv(r, path_in(g.common, "scaling.csv"));
  std::cout << path_in(g.common, "scaling.csv") << "\n";
  emit(g.common, "scaling.json", j);
  return 0;
}

int cmd_freeze(const Args& g) {
  Args h = g;
  if (h.mesh.mesh.empty() && h.axi.potential == "uniform" && h.axi.profile == "sphere") h.axi.potential = "triple";
  std::optional<CriticalBetas> crit;
  const auto r = run_sweep(h, h.mesh.mesh.empty() ? triple_window(h) : std::vector<double>{}, &crit);
  Json j = header("freeze");
  j["problem"] = r.problem;
  j["h"] = r.h;
  if (crit) j["critical_betas"] = report::to_json(*crit);
  j["transitions"] = report::to_json(transitions(r));
  j["freezing"] = report::to_json(detect_freezing(r, g.tol_move));
  emit_svg(g.common, "freeze_counts.svg", report::count_plot(r, crit_marks(crit)));
  emit(g.common, "freeze.json", j);
  return 0;
}

int cmd_barrier(const Args& g) {
  if (!(g.beta > 0.0)) invalid("beta must be positive");
  if (g.samples < 3) invalid("--samples must be >= 3");
  const auto up = build_barrier(g.c, g.C, g.beta);
  const auto down = build_mirror_barrier(g.c, g.C, g.beta);
  Json j = header("barrier");
  j["barrier"] = report::to_json(up);
  j["mirror"] = report::to_json(down);
  j["verification"] = report::to_json(verify_barrier(up, static_cast<std::size_t>(g.samples)));
  j["mirror_verification"] = report::to_json(verify_barrier(down, static_cast<std::size_t>(g.samples)));
  j["width_bracket"] = report::to_json(width_bracket(g.c, g.C, g.beta));
  write_barrier_csv(up, path_in(g.common, "barrier.csv"));
  std::cout << path_in(g.common, "barrier.csv") << "\n";
  if (g.common.svg) {
    report::Plot p;
    p.title = "barrier profiles";
    p.xlabel = "z";
    p.ylabel = "v";
    report::Series a{"upper", {}, {}, false, false, true}, b{"lower", {}, {}, false, false, true};
    const double span = 2.0 * std::max(up.eta_plus, up.eta_minus);
    for (int i = 0; i <= 400; ++i) {
      const double z = -span + 2.0 * span * i / 400.0;
      a.x.push_back(z);
      a.y.push_back(up.value(z));
      b.x.push_back(z);
      b.y.push_back(down.value(z));
    }
    p.series = {a, b};
    emit_svg(g.common, "barrier.svg", p);
  }
  emit(g.common, "barrier.json", j);
  return 0;
}

int cmd_vortex(const Args& g) {
  Mesh m = g.mesh;
  if (m.mesh.empty()) m.mesh = "icosphere:5";
  const auto p = make_mesh(m);
  if (!p.mesh.on_unit_sphere()) invalid("vortex needs a unit-sphere mesh");
  const double bc = mesh_beta_c(p);
  check_beta(g.beta, bc);
  const auto kappas = parse_list(g.kappas);
  if (kappas.empty()) invalid("no kappa values given");
  if (g.repeats < 1 || g.circle_samples < 3) invalid("--repeats >= 1 and --circle-samples >= 3 required");
  Pgs2dOptions o;
  if (g.tol > 0.0) o.tol = g.tol;
  if (g.max_sweeps > 0) o.max_sweeps = g.max_sweeps;
  const auto sol = solve_pgs_2d(p.mesh, p.field, g.beta, o);
  const auto mu = vorticity(sol, p.field.H, p.mesh, default_eps_active_2d(p.mesh, bc, g.beta)).mu;
  ConvergenceOptions co;
  co.seed = g.seed;
  co.repeats = g.repeats;
  co.circle_samples = g.circle_samples;
  const auto s = convergence_check(p.mesh, mu, g.beta, kappas, co);
  Json j = header("vortex");
  j["mesh"] = m.mesh;
  j["field"] = m.field;
  j["seed"] = g.seed;
  j["green_energy_sum"] = green_energy(p.mesh, mu);
  j["green_energy_poisson"] = green_energy_poisson(p.mesh, mu);
  j["series"] = report::to_json(s);
  if (s.J > 0.0) {
    std::vector<double> plus(mu.size()), minus(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      plus[i] = std::max(mu[i], 0.0);
      minus[i] = std::max(-mu[i], 0.0);
    }
    SampleOptions so;
    so.seed = g.seed;
    so.circle_samples = g.circle_samples;
    const double kappa = kappas.back();
    const auto pvs = sample_measure(p.mesh, plus, minus, kappa, std::log(kappa) / g.beta, so);
    write_point_vortex_csv(pvs, path_in(g.common, "vortices.csv"));
    std::cout << path_in(g.common, "vortices.csv") << "\n";
  }
  emit_svg(g.common, "vortex_energy.svg", report::convergence_plot(s));
  emit(g.common, "vortex.json", j);
  return 0;
}

// Turns {"version": 1, "command": ..., "key": value} into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");
  if (!j.contains("version") || j["version"] != kConfigVersion) {
    invalid("config version must be " + std::to_string(kConfigVersion));
  }
  std::vector<std::string> t;
  for (const auto& [key, v] : j.items()) {
    if (key == "version") continue;
    if (key == "command") {
      if (!v.is_string()) invalid("config command must be a string");
      command = v.get<std::string>();
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (v.is_boolean()) {
      if (v.get<bool>()) t.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) {
        if (!e.is_number()) invalid("config list '" + key + "' must hold numbers");
        joined += (joined.empty() ? "" : ",") + report::dump(e).substr(0, report::dump(e).size() - 1);
      }
      t.push_back(flag);
      t.push_back(joined);
    } else if (v.is_string()) {
      t.push_back(flag);
      t.push_back(v.get<std::string>());
    } else if (v.is_number()) {
      t.push_back(flag);
      t.push_back(v.is_number_float() ? report::dump(v).substr(0, report::dump(v).size() - 1) : v.dump());
    } else {
      invalid("config key '" + key + "' has an unsupported type");
    }
  }
  return t;
}

const std::set<std::string>& commands() {
  static const std::set<std::string> c{"derive", "solve1d", "solve2d", "sweep", "scaling", "freeze", "barrier", "vortex"};
  return c;
}

// Config values go first so command-line flags, parsed later, win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) invalid("--config needs a path");
      cfg = args[++i];
    } else if (args[i].starts_with("--config=")) {
      cfg = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (cfg.empty()) return rest;
  std::string command;
  auto tokens = config_tokens(cfg, command);
  std::string given;
  if (!rest.empty() && commands().contains(rest.front())) {
    given = rest.front();
    rest.erase(rest.begin());
  }
  if (!given.empty() && !command.empty() && given != command) {
    invalid("config is for '" + command + "', not '" + given + "'");
  }
  if (given.empty()) given = command;
  if (given.empty()) invalid("no command given");
  std::vector<std::string> out{given};
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void add_common(CLI::App* s, Args& g) {
  s->add_option("--out", g.common.out, "output directory");
  s->add_flag("--svg", g.common.svg, "also write SVG plots");
}

void add_axi(CLI::App* s, Args& g) {
  s->add_option("--profile", g.axi.profile, "surface: sphere, ellipsoid:<c>, or a CSV path (phi,rho,z)");
  s->add_option("--potential", g.axi.potential, "a(phi): uniform, triple, symmetric, or a CSV path (phi,a)");
  s->add_option("--z-csv", g.axi.z_csv, "separate (phi,z) CSV for the profile");
  s->add_option("--intervals", g.axi.intervals, "grid intervals on [0, pi]");
}

void add_mesh(CLI::App* s, Args& g) {
  s->add_option("--mesh", g.mesh.mesh, "icosphere:<k> or off:<path>");
  s->add_option("--field", g.mesh.field, "z or potential:<name>");
}

void add_solver(CLI::App* s, Args& g) {
  s->add_option("--solver", g.solver, "auto, regime or pgs");
  s->add_option("--tol", g.tol, "max update at convergence");
  s->add_option("--max-sweeps", g.max_sweeps, "sweep budget");
}

void add_betas(CLI::App* s, Args& g) {
  s->add_option("--betas", g.betas.list, "comma-separated beta values");
  s->add_option("--beta-min", g.betas.lo);
  s->add_option("--beta-max", g.betas.hi);
  s->add_option("--count", g.betas.count, "number of beta values");
  s->add_option("--spacing", g.betas.spacing, "lin or log");
}

}  // namespace

int main(int argc, char** argv) {
  Args g;
  CLI::App app{"Two-sided obstacle problems for vortex-free regions on surfaces"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "JSON config with a version field; flags override it");

  auto* derive = app.add_subcommand("derive", "field, primitive and critical values of a profile");
  add_common(derive, g);
  add_axi(derive, g);

  auto* solve1d = app.add_subcommand("solve1d", "axisymmetric solve at one beta");
  add_common(solve1d, g);
  add_axi(solve1d, g);
  add_solver(solve1d, g);
  solve1d->add_option("--beta", g.beta)->required();

  auto* solve2d = app.add_subcommand("solve2d", "mesh solve at one beta");
  add_common(solve2d, g);
  add_mesh(solve2d, g);
  solve2d->add_option("--tol", g.tol);
  solve2d->add_option("--max-sweeps", g.max_sweeps);
  solve2d->add_option("--beta", g.beta)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "beta sweep with transitions, monotonicity, continuity, freezing");
  auto* scaling = app.add_subcommand("scaling", "width and gradient exponents at small beta");
  auto* freeze = app.add_subcommand("freeze", "frozen components of a sweep");
  for (auto* s : {sweep_cmd, scaling, freeze}) {
    add_common(s, g);
    add_axi(s, g);
    add_mesh(s, g);
    add_solver(s, g);
    add_betas(s, g);
  }
  for (auto* s : {sweep_cmd, freeze}) s->add_option("--tol-move", g.tol_move, "freeze tolerance in grid cells");

  auto* barrier = app.add_subcommand("barrier", "piecewise-cubic comparison profiles");
  add_common(barrier, g);
  barrier->add_option("--c", g.c, "lower slope bound");
  barrier->add_option("--C", g.C, "upper slope bound");
  barrier->add_option("--beta", g.beta)->required();
  barrier->add_option("--samples", g.samples);

  auto* vortex = app.add_subcommand("vortex", "point-vortex approximation and Green energy trend");
  add_common(vortex, g);
  add_mesh(vortex, g);
  vortex->add_option("--tol", g.tol);
  vortex->add_option("--max-sweeps", g.max_sweeps);
  vortex->add_option("--beta", g.beta)->required();
  vortex->add_option("--kappas", g.kappas, "comma-separated kappa values");
  vortex->add_option("--seed", g.seed);
  vortex->add_option("--repeats", g.repeats);
  vortex->add_option("--circle-samples", g.circle_samples);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    fs::create_directories(g.common.out);
    if (*derive) return cmd_derive(g);
    if (*solve1d) return cmd_solve1d(g);
    if (*solve2d) return cmd_solve2d(g);
    if (*sweep_cmd) return cmd_sweep(g);
    if (*scaling) return cmd_scaling(g);
    if (*freeze) return cmd_freeze(g);
    if (*barrier) return cmd_barrier(g);
    if (*vortex) return cmd_vortex(g);
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NotConverged ? kExitNotConverged : kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
