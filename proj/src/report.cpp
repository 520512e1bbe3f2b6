#include "sc_obstacle/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sc_obstacle/error.hpp"

namespace sc_obstacle::report {

namespace {

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep integral doubles recognisable as floats.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_into(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        dump_into(v, out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_into(v, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  return out;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

void write_json(const Json& j, const std::string& path) { write_text(dump(j), path); }

void write_text(const std::string& text, const std::string& path) {
  auto out = open_out(path);
  out << text;
}

Json to_json(const CriticalBetas& c) {
  return {{"alpha_star", c.alpha_star}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"mirrored", c.mirrored}};
}

Json to_json(const ResidualReport& r) {
  return {{"ode_residual", r.ode_residual},
          {"min_aprime_minus", finite_or_null(r.min_aprime_minus)},
          {"max_aprime_plus", finite_or_null(r.max_aprime_plus)},
          {"sign_violations", r.sign_violations},
          {"free_nodes_checked", r.free_nodes_checked},
          {"endpoint_slope", r.endpoint_slope}};
}

Json to_json(const Profile1D& p, bool with_values) {
  Json j{{"beta", p.beta},
         {"beta_c", p.beta_c},
         {"h", p.h},
         {"nodes", p.phi.size()},
         {"regime", to_string(p.regime)},
         {"mirrored", p.mirrored},
         {"solver", p.solver},
         {"sweeps", p.sweeps},
         {"residual", p.residual},
         {"active_plus", p.active_plus.size()},
         {"active_minus", p.active_minus.size()},
         {"alphas", p.alphas}};
  Json pieces = Json::array();
  for (const auto& q : p.pieces) {
    pieces.push_back({{"lo", q.lo}, {"hi", q.hi}, {"alpha", q.alpha}, {"base", q.base}, {"end_value", q.end_value}});
  }
  j["pieces"] = pieces;
  if (with_values) {
    j["phi"] = p.phi;
    j["v"] = p.v;
  }
  return j;
}

Json to_json(const ComponentReport& r, const TriMesh& mesh) {
  Json comps = Json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"vertices", c.vertices.size()},
                     {"area", c.area},
                     {"area_fraction", c.area / mesh.total_area()},
                     {"boundary_length", c.boundary_length},
                     {"phi_min", c.phi_min},
                     {"phi_max", c.phi_max},
                     {"boundary_plus", c.boundary_plus},
                     {"boundary_minus", c.boundary_minus}});
  }
  return {{"eps_active", r.eps_active}, {"count", r.count()}, {"components", comps}};
}

Json to_json(const VorticityReport& r) {
  return {{"total", r.total},
          {"total_variation", r.total_variation},
          {"max_free_interior", r.max_free_interior},
          {"sign_checked", r.sign_checked},
          {"sign_violations", r.sign_violations},
          {"max_sign_violation", r.max_sign_violation}};
}

Json to_json(const MeshSolution& s) {
  double lo = 0.0, hi = 0.0;
  if (!s.V.empty()) {
    const auto [a, b] = std::minmax_element(s.V.begin(), s.V.end());
    lo = *a;
    hi = *b;
  }
  return {{"beta", s.beta},
          {"beta_c", s.beta_c},
          {"vertices", s.V.size()},
          {"min_V", lo},
          {"max_V", hi},
          {"active_plus", s.active_plus.size()},
          {"active_minus", s.active_minus.size()},
          {"iterations", s.iterations},
          {"residual", s.residual},
          {"nondegenerate", s.nondegenerate},
          {"warnings", s.warnings}};
}

Json to_json(const BarrierProfile& b) {
  return {{"c", b.c},
          {"C", b.C},
          {"beta", b.beta},
          {"mirrored", b.mirrored},
          {"k_minus", b.k_minus},
          {"k_plus", b.k_plus},
          {"alpha_minus", b.alpha_minus},
          {"alpha_plus", b.alpha_plus},
          {"eta_minus", b.eta_minus},
          {"eta_plus", b.eta_plus},
          {"A_minus", b.A_minus},
          {"A_plus", b.A_plus},
          {"B_minus", b.B_minus},
          {"B_plus", b.B_plus}};
}

Json to_json(const BarrierReport& r) {
  return {{"samples", r.samples},
          {"max_excess", r.max_excess},
          {"jump_v", r.jump_v},
          {"jump_d1", r.jump_d1},
          {"jump_d1_at_zero", r.jump_d1_at_zero},
          {"d2_error", r.d2_error},
          {"max_d1", r.max_d1},
          {"max_d2", r.max_d2},
          {"smallness_ratio", r.smallness_ratio},
          {"smallness_bound", r.smallness_bound},
          {"lipschitz_d1", r.lipschitz_d1},
          {"bounded", r.bounded},
          {"continuous", r.continuous},
          {"d2_equality", r.d2_equality},
          {"small", r.small},
          {"w2inf", r.w2inf},
          {"ok", r.ok()}};
}

Json to_json(const WidthBracket& w) {
  return {{"w_lo", w.w_lo},
          {"w_hi", w.w_hi},
          {"inner_minus", w.inner_minus},
          {"inner_plus", w.inner_plus},
          {"outer_minus", w.outer_minus},
          {"outer_plus", w.outer_plus}};
}

Json to_json(const SweepRecord& r) {
  Json comps = Json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"lo", c.lo},
                     {"hi", c.hi},
                     {"lo_side", c.lo_side},
                     {"hi_side", c.hi_side},
                     {"boundary_side", c.boundary_side},
                     {"width", c.width},
                     {"area", c.area},
                     {"vertex_count", c.vertex_count}});
  }
  Json j{{"beta", r.beta}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    j["error_code"] = r.error_code;
    return j;
  }
  j["solver"] = r.solver;
  j["regime"] = r.regime;
  j["eps_active"] = r.eps_active;
  j["count"] = r.components.size();
  j["components"] = comps;
  j["max_gradient"] = r.max_gradient;
  j["energy_F"] = r.energy_F;
  j["energy_E"] = r.energy_E;
  j["active_plus"] = r.active_plus;
  j["active_minus"] = r.active_minus;
  j["separation"] = finite_or_null(r.separation);
  j["sweeps"] = r.sweeps;
  j["residual"] = r.residual;
  return j;
}

Json to_json(const SweepReport& r) {
  Json recs = Json::array();
  for (const auto& rec : r.records) recs.push_back(to_json(rec));
  return {{"problem", r.problem},
          {"mesh", r.mesh},
          {"beta_c", r.beta_c},
          {"h", r.h},
          {"betas", r.betas},
          {"records", recs}};
}

Json to_json(const ScalingFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"r2", f.r2},
          {"samples", f.samples},
          {"betas", f.betas},
          {"values", f.values}};
}

Json to_json(const ThicknessReport& t) {
  return {{"betas", t.betas},
          {"ratios", t.ratios},
          {"min_ratio", t.min_ratio},
          {"max_ratio", t.max_ratio},
          {"component_ratios", t.component_ratios},
          {"pass", t.pass}};
}

Json to_json(const ContinuityReport& c) {
  return {{"max_excess", c.max_excess}, {"excess", c.excess}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

Json to_json(const std::vector<MonotonicityViolation>& v) {
  Json a = Json::array();
  for (const auto& x : v) {
    a.push_back({{"pair", x.pair},
                 {"beta_lo", x.beta_lo},
                 {"beta_hi", x.beta_hi},
                 {"points", x.points},
                 {"first_point", x.first_point}});
  }
  return a;
}

Json to_json(const std::vector<Transition>& t) {
  Json a = Json::array();
  for (const auto& x : t) {
    a.push_back({{"beta_lo", x.beta_lo}, {"beta_hi", x.beta_hi}, {"count_lo", x.count_lo}, {"count_hi", x.count_hi}});
  }
  return a;
}

Json to_json(const std::vector<FreezeRecord>& f) {
  Json a = Json::array();
  for (const auto& x : f) {
    a.push_back({{"component", x.component},
                 {"beta_lo", x.beta_lo},
                 {"beta_hi", x.beta_hi},
                 {"records", x.records},
                 {"side", x.side},
                 {"lo", x.lo},
                 {"hi", x.hi},
                 {"max_move_cells", x.max_move},
                 {"m", x.m},
                 {"delta", x.delta},
                 {"predicted_lo", x.predicted_lo},
                 {"window_ok", x.window_ok},
                 {"truncated", x.truncated}});
  }
  return a;
}

Json to_json(const ConvergenceSeries& s) {
  return {{"beta", s.beta},
          {"J", s.J},
          {"kappas", s.kappas},
          {"h", s.h},
          {"n_plus", s.n_plus},
          {"n_minus", s.n_minus},
          {"energy", s.energy},
          {"energy_sd", s.energy_sd},
          {"excess", s.excess},
          {"abs_excess", s.abs_excess},
          {"tail_decreasing", s.tail_decreasing}};
}

void write_sweep_csv(const SweepReport& r, const std::string& path) {
  auto out = open_out(path);
  out << "beta,ok,solver,regime,components,lo,hi,width,max_gradient,energy_F,energy_E,"
         "active_plus,active_minus,separation,sweeps,residual\n";
  for (const auto& rec : r.records) {
    out << number(rec.beta) << ',' << (rec.ok ? 1 : 0) << ',';
    if (!rec.ok) {
      out << ",,,,,,,,,,,,,\n";
      continue;
    }
    out << rec.solver << ',' << rec.regime << ',' << rec.components.size() << ',';
    if (rec.components.empty()) {
      out << ",,,";
    } else {
      const auto& c = rec.components.front();
      out << number(c.lo) << ',' << number(c.hi) << ',' << number(c.width) << ',';
    }
    out << number(rec.max_gradient) << ',' << number(rec.energy_F) << ',' << number(rec.energy_E) << ','
        << rec.active_plus << ',' << rec.active_minus << ',' << (std::isfinite(rec.separation) ? number(rec.separation) : "")
        << ',' << rec.sweeps << ',' << number(rec.residual) << '\n';
  }
}

void write_sweep_profiles_csv(const SweepReport& r, const std::string& path) {
  if (r.mesh || r.phi.empty()) throw Error(ErrorCode::InvalidInput, "profile CSV needs a 1D sweep");
  std::vector<const SweepRecord*> recs;
  for (const auto& rec : r.records) {
    if (rec.ok && rec.V.size() == r.phi.size()) recs.push_back(&rec);
  }
  auto out = open_out(path);
  out << "phi";
  for (const auto* rec : recs) out << ",v_" << number(rec->beta);
  out << '\n';
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    out << number(r.phi[i]);
    for (const auto* rec : recs) out << ',' << number(rec->V[i]);
    out << '\n';
  }
}

namespace {

constexpr double kW = 720, kH = 460, kL = 80, kR = 180, kT = 40, kB = 60;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo, hi;
  bool log;
  double pix0, pix1;

  double map(double v) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return pix0 + t * (pix1 - pix0);
  }

  std::vector<std::pair<double, std::string>> ticks() const {
    std::vector<std::pair<double, std::string>> t;
    if (log) {
      for (int e = static_cast<int>(std::ceil(lo - 1e-9)); e <= static_cast<int>(std::floor(hi + 1e-9)); ++e) {
        t.emplace_back(std::pow(10.0, e), "1e" + std::to_string(e));
      }
      return t;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) {
      t.emplace_back(std::abs(v) < 1e-12 * step ? 0.0 : v, fmt(std::abs(v) < 1e-12 * step ? 0.0 : v));
    }
    return t;
  }
};

Axis make_axis(std::vector<double> values, bool log, double pix0, double pix1) {
  if (log) {
    std::erase_if(values, [](double v) { return !(v > 0.0) || !std::isfinite(v); });
    for (double& v : values) v = std::log10(v);
  } else {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
  }
  double lo = 0.0, hi = 1.0;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  if (log) {
    lo = std::min(lo, std::floor(lo));
    hi = std::max(hi, std::ceil(hi));
  }
  return {lo, hi, log, pix0, pix1};
}

}  // namespace

std::string render_svg(const Plot& p) {
  std::vector<double> xs, ys;
  for (const auto& s : p.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  for (const auto& [v, label] : p.vlines) xs.push_back(v);
  const Axis ax = make_axis(xs, p.logx, kL, kW - kR);
  const Axis ay = make_axis(ys, p.logy, kH - kB, kT);
  const auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!p.logx || x > 0.0) && (!p.logy || y > 0.0);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(p.title) << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& [v, label] : ax.ticks()) {
    const double x = ax.map(v);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << kH - kB << "\" x2=\"" << fmt(x) << "\" y2=\"" << kT
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  for (const auto& [v, label] : ay.ticks()) {
    const double y = ay.map(v);
    o << "<line x1=\"" << kL << "\" y1=\"" << fmt(y) << "\" x2=\"" << kW - kR << "\" y2=\"" << fmt(y)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << kL - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  o << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 18 << "\" text-anchor=\"middle\">"
    << escape(p.xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << (kT + kH - kB) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(p.ylabel) << "</text>\n";

  for (const auto& [v, label] : p.vlines) {
    if (p.logx && v <= 0.0) continue;
    const double x = ax.map(v);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << kH - kB << "\" x2=\"" << fmt(x) << "\" y2=\"" << kT
      << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    o << "<text x=\"" << fmt(x + 3) << "\" y=\"" << kT + 14 << "\" fill=\"#555\">" << escape(label) << "</text>\n";
  }

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* colour = kColours[k % std::size(kColours)];
    std::string path;
    double px = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ok(s.x[i], s.y[i])) {
        have = false;
        continue;
      }
      const double x = ax.map(s.x[i]), y = ay.map(s.y[i]);
      if (!have) {
        path += "M" + fmt(x) + " " + fmt(y);
      } else if (s.step) {
        path += " H" + fmt(0.5 * (px + x)) + " V" + fmt(y) + " H" + fmt(x);
      } else {
        path += " L" + fmt(x) + " " + fmt(y);
      }
      px = x;
      have = true;
    }
    if (s.line && !path.empty()) {
      o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\"/>\n";
    }
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!ok(s.x[i], s.y[i])) continue;
        o << "<circle cx=\"" << fmt(ax.map(s.x[i])) << "\" cy=\"" << fmt(ay.map(s.y[i])) << "\" r=\"2.8\" fill=\""
          << colour << "\"/>\n";
      }
    }
    const double ly = kT + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << kW - kR + 12 << "\" y1=\"" << ly << "\" x2=\"" << kW - kR + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kR + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  for (std::size_t k = 0; k < p.notes.size(); ++k) {
    o << "<text x=\"" << kL + 8 << "\" y=\"" << kH - kB - 10 - 16.0 * static_cast<double>(p.notes.size() - 1 - k)
      << "\">" << escape(p.notes[k]) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

Plot width_plot(const ScalingFit& fit, const std::string& quantity) {
  Plot p;
  p.title = quantity + " against beta";
  p.xlabel = "beta";
  p.ylabel = quantity;
  p.logx = p.logy = true;
  Series data{"measured", fit.betas, fit.values, false, true, false};
  Series line{"fit", {}, {}, false, false, true};
  if (!fit.betas.empty()) {
    const auto [lo, hi] = std::minmax_element(fit.betas.begin(), fit.betas.end());
    for (double b : {*lo, *hi}) {
      line.x.push_back(b);
      line.y.push_back(std::exp(fit.intercept) * std::pow(b, fit.slope));
    }
  }
  p.series = {data, line};
  p.notes.push_back("slope " + fmt(fit.slope) + ", r2 " + fmt(fit.r2) + ", " + std::to_string(fit.samples) + " samples");
  return p;
}

Plot count_plot(const SweepReport& r, const std::vector<std::pair<double, std::string>>& marks) {
  Plot p;
  p.title = "components of the superconducting set";
  p.xlabel = "beta";
  p.ylabel = "components";
  Series s{"count", {}, {}, true, true, true};
  for (const auto& rec : r.records) {
    if (!rec.ok) continue;
    s.x.push_back(rec.beta);
    s.y.push_back(static_cast<double>(rec.components.size()));
  }
  p.series = {s};
  p.vlines = marks;
  return p;
}

Plot profile_plot(const SweepReport& r, std::size_t max_curves) {
  Plot p;
  p.title = "profiles V(phi)";
  p.xlabel = "phi";
  p.ylabel = "V";
  std::vector<const SweepRecord*> recs;
  for (const auto& rec : r.records) {
    if (rec.ok && rec.V.size() == r.phi.size() && !r.phi.empty()) recs.push_back(&rec);
  }
  if (recs.empty() || max_curves == 0) return p;
  const std::size_t n = std::min(max_curves, recs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = n == 1 ? 0 : k * (recs.size() - 1) / (n - 1);
    const auto* rec = recs[idx];
    Series s{"beta " + fmt(rec->beta), r.phi, rec->V, false, false, true};
    p.series.push_back(std::move(s));
  }
  return p;
}

Plot convergence_plot(const ConvergenceSeries& s) {
  Plot p;
  p.title = "Green energy of sampled vortices";
  p.xlabel = "kappa";
  p.ylabel = "energy";
  p.logx = true;
  p.series.push_back({"sampled", s.kappas, s.energy, false, true, true});
  p.series.push_back({"J", s.kappas, std::vector<double>(s.kappas.size(), s.J), false, false, true});
  p.notes.push_back("beta " + fmt(s.beta) + ", J " + fmt(s.J));
  return p;
}

}  // namespace sc_obstacle::report
