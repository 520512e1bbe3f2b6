#pragma once

// JSON, CSV and SVG emitters for solver and analysis results.

#include <string>
#include <vector>

#include "json.hpp"
#include "sc_obstacle/analysis.hpp"
#include "sc_obstacle/barriers.hpp"
#include "sc_obstacle/fields.hpp"
#include "sc_obstacle/obstacle1d.hpp"
#include "sc_obstacle/obstacle2d.hpp"
#include "sc_obstacle/vortexapprox.hpp"

namespace sc_obstacle::report {

using Json = nlohmann::ordered_json;

// Two-space indent, doubles at 17 significant digits, non-finite values as null.
std::string dump(const Json& j);
void write_json(const Json& j, const std::string& path);
void write_text(const std::string& text, const std::string& path);

Json to_json(const CriticalBetas& c);
Json to_json(const ResidualReport& r);
Json to_json(const Profile1D& p, bool with_values = false);
Json to_json(const ComponentReport& r, const TriMesh& mesh);
Json to_json(const VorticityReport& r);
Json to_json(const MeshSolution& s);
Json to_json(const BarrierProfile& b);
Json to_json(const BarrierReport& r);
Json to_json(const WidthBracket& w);
Json to_json(const SweepRecord& r);
Json to_json(const SweepReport& r);
Json to_json(const ScalingFit& f);
Json to_json(const ThicknessReport& t);
Json to_json(const ContinuityReport& c);
Json to_json(const std::vector<MonotonicityViolation>& v);
Json to_json(const std::vector<Transition>& t);
Json to_json(const std::vector<FreezeRecord>& f);
Json to_json(const ConvergenceSeries& s);

// One row per β: counts, first-component geometry, gradient, energies.
void write_sweep_csv(const SweepReport& r, const std::string& path);
// φ followed by one V column per successful β (1D sweeps only).
void write_sweep_profiles_csv(const SweepReport& r, const std::string& path);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;
  bool markers = true;
  bool line = true;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
  // Dashed vertical markers with labels.
  std::vector<std::pair<double, std::string>> vlines;
  std::vector<std::string> notes;
};

std::string render_svg(const Plot& p);

// Width against β on log axes, with the fitted line when given.
Plot width_plot(const ScalingFit& fit, const std::string& quantity);
// Component count against β, with optional reference β markers.
Plot count_plot(const SweepReport& r, const std::vector<std::pair<double, std::string>>& marks = {});
// V(φ) for up to max_curves evenly chosen successful records (1D sweeps only).
Plot profile_plot(const SweepReport& r, std::size_t max_curves = 6);
// Green energy of the sampled measures against κ, with J as a reference line.
Plot convergence_plot(const ConvergenceSeries& s);

}  // namespace sc_obstacle::report
