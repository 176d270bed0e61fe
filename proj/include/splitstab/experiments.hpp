// Declarative scenario runner: named presets and JSON configs resolve to
// grids, schemes, and analyses, and emit CSV/JSON artifacts plus static SVG
// line plots into a per-scenario directory.
#pragma once

#include <splitstab/euler1d.hpp>
#include <splitstab/floquet.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace splitstab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Analysis {
  Spectra,
  ErrorGrowth,
  Floquet,
  PerturbationRun,
  NearVacuum,
  EulerDensityWave,
  BurgersDemo,
};

inline std::string analysis_name(Analysis a) {
  switch (a) {
    case Analysis::Spectra: return "spectra";
    case Analysis::ErrorGrowth: return "error-growth";
    case Analysis::Floquet: return "floquet";
    case Analysis::PerturbationRun: return "perturbation-run";
    case Analysis::NearVacuum: return "near-vacuum";
    case Analysis::EulerDensityWave: return "euler-density-wave";
    case Analysis::BurgersDemo: return "burgers-demo";
  }
  return "?";
}

inline Analysis analysis_from(const std::string& s) {
  for (Analysis a : {Analysis::Spectra, Analysis::ErrorGrowth, Analysis::Floquet,
                     Analysis::PerturbationRun, Analysis::NearVacuum,
                     Analysis::EulerDensityWave, Analysis::BurgersDemo}) {
    if (analysis_name(a) == s) return a;
  }
  throw std::invalid_argument("config error: unknown analysis '" + s + "'");
}

struct GridSpec {
  std::string family{"csbp"};  // csbp | circulant
  int accuracy{1};             // csbp degree p, or circulant order
  int n_nodes{40};             // nodes per block
  int n_blocks{1};
  double x_min{0.0};
  double x_max{1.0};
};

struct SchemeSpec {
  std::string equation{"advection"};  // advection | burgers | euler
  // split selects the alpha-blended form; the other names select a two-point
  // flux by flux_name()
  std::string form{"split"};
  double alpha{1.0};
  std::string sat{"conservative"};  // none | conservative | upwind
  double sigma{0.0};
  int diss_s{0};
  double diss_eps{0.0};
  std::string diss_variable{"conservative"};  // conservative | entropy
};

struct TimeSpec {
  double t_end{0.0};
  double dt{0.0};  // > 0: fixed-step RK4; otherwise adaptive RK8
  double rtol{1e-12};
  double atol{1e-12};
};

struct PerturbSpec {
  std::string source{"none"};  // none | random | floquet-mode
  double amp{0.0};
  std::uint64_t seed{1};
};

struct FloquetSpec {
  double period{0.0};  // 0: one traversal of the domain
  int k{256};
  double tol{1e-8};
};

struct FilterSpec {
  bool enabled{false};
  double floor{5e-4};
  double cut{5e-2};
};

struct SweepSpec {
  std::vector<int> n_nodes;   // spectra: mesh-refinement sweep
  std::vector<double> eps;    // near-vacuum: profile-shift sweep
};

struct Scenario {
  std::string name;
  Analysis analysis{Analysis::Spectra};
  GridSpec grid;
  SchemeSpec scheme;
  std::string coefficient{"constant"};  // constant | sinusoid | skewed-sinusoid
  double coefficient_value{1.0};
  std::string init{"gaussian-pulse"};  // gaussian-pulse | density-wave | shifted-sine
  double init_shift{0.0};
  TimeSpec time;
  PerturbSpec pert;
  FloquetSpec floquet;
  FilterSpec filter;
  SweepSpec sweep;

  void validate() const;
};

// ---------------------------------------------------------------------------
// JSON serialization with strict key checking

namespace detail {

inline bool key_in(const std::string& k, std::initializer_list<const char*> set) {
  for (const char* s : set)
    if (k == s) return true;
  return false;
}

inline void require_keys(const json& j, const std::string& where,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional) {
  if (!j.is_object())
    throw std::invalid_argument("config error: '" + where + "' must be an object");
  std::string unknown;
  for (const auto& item : j.items()) {
    if (!key_in(item.key(), required) && !key_in(item.key(), optional))
      unknown += (unknown.empty() ? "" : ", ") + item.key();
  }
  if (!unknown.empty())
    throw std::invalid_argument("config error: unknown key(s) in " + where + ": " +
                                unknown);
  std::string missing;
  for (const char* k : required)
    if (!j.contains(k)) missing += std::string(missing.empty() ? "" : ", ") + k;
  if (!missing.empty())
    throw std::invalid_argument("config error: missing key(s) in " + where + ": " +
                                missing);
}

template <typename T>
T get_field(const json& j, const std::string& where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config error: bad value for " + where + "." + key);
  }
}

template <typename T>
T get_required(const json& j, const std::string& where, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config error: bad value for " + where + "." + key);
  }
}

}  // namespace detail

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = sc.name;
  j["analysis"] = analysis_name(sc.analysis);
  j["grid"] = {{"family", sc.grid.family},   {"accuracy", sc.grid.accuracy},
               {"n_nodes", sc.grid.n_nodes}, {"n_blocks", sc.grid.n_blocks},
               {"x_min", sc.grid.x_min},     {"x_max", sc.grid.x_max}};
  j["scheme"] = {{"equation", sc.scheme.equation},
                 {"form", sc.scheme.form},
                 {"alpha", sc.scheme.alpha},
                 {"sat", sc.scheme.sat},
                 {"sigma", sc.scheme.sigma},
                 {"dissipation",
                  {{"s", sc.scheme.diss_s},
                   {"eps", sc.scheme.diss_eps},
                   {"variable", sc.scheme.diss_variable}}}};
  j["coefficient"] = {{"id", sc.coefficient}, {"value", sc.coefficient_value}};
  j["init"] = {{"id", sc.init}, {"shift", sc.init_shift}};
  j["time"] = {{"t_end", sc.time.t_end},
               {"dt", sc.time.dt},
               {"rtol", sc.time.rtol},
               {"atol", sc.time.atol}};
  j["perturbation"] = {{"source", sc.pert.source},
                       {"amp", sc.pert.amp},
                       {"seed", sc.pert.seed}};
  j["floquet"] = {{"period", sc.floquet.period},
                  {"k", sc.floquet.k},
                  {"tol", sc.floquet.tol}};
  j["filter"] = {{"enabled", sc.filter.enabled},
                 {"floor", sc.filter.floor},
                 {"cut", sc.filter.cut}};
  j["sweep"] = {{"n_nodes", sc.sweep.n_nodes}, {"eps", sc.sweep.eps}};
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  using detail::get_field;
  using detail::get_required;
  detail::require_keys(
      j, "config",
      {"schema_version", "name", "analysis", "grid", "scheme", "coefficient",
       "init", "time"},
      {"perturbation", "floquet", "filter", "sweep"});
  const int ver = get_required<int>(j, "config", "schema_version");
  if (ver != kSchemaVersion)
    throw std::invalid_argument("config error: unsupported schema_version " +
                                std::to_string(ver));
  Scenario sc;
  sc.name = get_required<std::string>(j, "config", "name");
  sc.analysis = analysis_from(get_required<std::string>(j, "config", "analysis"));

  const json& jg = j.at("grid");
  detail::require_keys(jg, "grid", {"family", "accuracy", "n_nodes"},
                       {"n_blocks", "x_min", "x_max"});
  sc.grid.family = get_required<std::string>(jg, "grid", "family");
  sc.grid.accuracy = get_required<int>(jg, "grid", "accuracy");
  sc.grid.n_nodes = get_required<int>(jg, "grid", "n_nodes");
  sc.grid.n_blocks = get_field(jg, "grid", "n_blocks", 1);
  sc.grid.x_min = get_field(jg, "grid", "x_min", 0.0);
  sc.grid.x_max = get_field(jg, "grid", "x_max", 1.0);

  const json& js = j.at("scheme");
  detail::require_keys(js, "scheme", {"equation", "form"},
                       {"alpha", "sat", "sigma", "dissipation"});
  sc.scheme.equation = get_required<std::string>(js, "scheme", "equation");
  sc.scheme.form = get_required<std::string>(js, "scheme", "form");
  sc.scheme.alpha = get_field(js, "scheme", "alpha", 1.0);
  sc.scheme.sat = get_field<std::string>(js, "scheme", "sat", "conservative");
  sc.scheme.sigma = get_field(js, "scheme", "sigma", 0.0);
  if (js.contains("dissipation")) {
    const json& jd = js.at("dissipation");
    detail::require_keys(jd, "scheme.dissipation", {}, {"s", "eps", "variable"});
    sc.scheme.diss_s = get_field(jd, "scheme.dissipation", "s", 0);
    sc.scheme.diss_eps = get_field(jd, "scheme.dissipation", "eps", 0.0);
    sc.scheme.diss_variable =
        get_field<std::string>(jd, "scheme.dissipation", "variable", "conservative");
  }

  const json& jc = j.at("coefficient");
  detail::require_keys(jc, "coefficient", {"id"}, {"value"});
  sc.coefficient = get_required<std::string>(jc, "coefficient", "id");
  sc.coefficient_value = get_field(jc, "coefficient", "value", 1.0);

  const json& ji = j.at("init");
  detail::require_keys(ji, "init", {"id"}, {"shift"});
  sc.init = get_required<std::string>(ji, "init", "id");
  sc.init_shift = get_field(ji, "init", "shift", 0.0);

  const json& jt = j.at("time");
  detail::require_keys(jt, "time", {}, {"t_end", "dt", "rtol", "atol"});
  sc.time.t_end = get_field(jt, "time", "t_end", 0.0);
  sc.time.dt = get_field(jt, "time", "dt", 0.0);
  sc.time.rtol = get_field(jt, "time", "rtol", 1e-12);
  sc.time.atol = get_field(jt, "time", "atol", 1e-12);

  if (j.contains("perturbation")) {
    const json& jp = j.at("perturbation");
    detail::require_keys(jp, "perturbation", {}, {"source", "amp", "seed"});
    sc.pert.source = get_field<std::string>(jp, "perturbation", "source", "none");
    sc.pert.amp = get_field(jp, "perturbation", "amp", 0.0);
    sc.pert.seed = get_field<std::uint64_t>(jp, "perturbation", "seed", 1);
  }
  if (j.contains("floquet")) {
    const json& jf = j.at("floquet");
    detail::require_keys(jf, "floquet", {}, {"period", "k", "tol"});
    sc.floquet.period = get_field(jf, "floquet", "period", 0.0);
    sc.floquet.k = get_field(jf, "floquet", "k", 256);
    sc.floquet.tol = get_field(jf, "floquet", "tol", 1e-8);
  }
  if (j.contains("filter")) {
    const json& jf = j.at("filter");
    detail::require_keys(jf, "filter", {}, {"enabled", "floor", "cut"});
    sc.filter.enabled = get_field(jf, "filter", "enabled", false);
    sc.filter.floor = get_field(jf, "filter", "floor", 5e-4);
    sc.filter.cut = get_field(jf, "filter", "cut", 5e-2);
  }
  if (j.contains("sweep")) {
    const json& jw = j.at("sweep");
    detail::require_keys(jw, "sweep", {}, {"n_nodes", "eps"});
    sc.sweep.n_nodes = get_field(jw, "sweep", "n_nodes", std::vector<int>{});
    sc.sweep.eps = get_field(jw, "sweep", "eps", std::vector<double>{});
  }
  sc.validate();
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config error: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config error: '" + path + "' is not valid JSON: " +
                                e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Resolution of a scenario into library objects

inline Grid build_grid(const GridSpec& gs) {
  if (gs.family == "csbp")
    return assemble_grid(gs.x_min, gs.x_max, gs.n_blocks,
                         build_csbp(gs.accuracy, gs.n_nodes));
  if (gs.family == "circulant")
    return assemble_grid(gs.x_min, gs.x_max, gs.n_blocks,
                         build_circulant(gs.accuracy, gs.n_nodes,
                                         (gs.x_max - gs.x_min) / gs.n_nodes));
  throw std::invalid_argument("config error: unknown grid family '" + gs.family + "'");
}

inline std::function<double(double)> coefficient_fn(const Scenario& sc) {
  if (sc.coefficient == "constant") {
    const double v = sc.coefficient_value;
    return [v](double) { return v; };
  }
  if (sc.coefficient == "sinusoid")
    return [](double x) { return std::sin(2.0 * M_PI * x) + 1.5; };
  if (sc.coefficient == "skewed-sinusoid")
    return [](double x) {
      double v = 1.5;
      const double binom[5] = {210.0, 120.0, 45.0, 10.0, 1.0};
      for (int k = 1; k <= 5; ++k)
        v += binom[k - 1] / (252.0 * k) * std::sin(k * (2.0 * M_PI * x + 4.0));
      return v;
    };
  throw std::invalid_argument("config error: unknown coefficient '" +
                              sc.coefficient + "'");
}

inline std::function<double(double)> initial_fn(const Scenario& sc) {
  const double shift = sc.init_shift;
  if (sc.init == "gaussian-pulse")
    return [shift](double x) {
      const double z = (x - 0.5) / 0.08;
      return std::exp(-0.5 * z * z) + 0.5 + shift;
    };
  if (sc.init == "density-wave")
    return [shift](double x) { return 0.98 * std::sin(2.0 * M_PI * x) + 1.0 + shift; };
  if (sc.init == "shifted-sine")
    return [shift](double x) { return 0.5 * (std::sin(2.0 * M_PI * x) + 1.0) + shift; };
  // smooth profile with an isolated zero at x = 0 and O(1) values at the
  // neighboring nodes of grids with h >= 0.05, so a shift by eps drives the
  // neighbor ratio deep into the stiff regime across the whole sweep range
  if (sc.init == "vacuum-well")
    return [shift](double x) {
      const double z = x / 0.05;
      return 1.0 - std::exp(-z * z) + shift;
    };
  throw std::invalid_argument("config error: unknown init '" + sc.init + "'");
}

inline SchemeConfig scheme_config(const Scenario& sc) {
  SchemeConfig cfg;
  if (sc.scheme.equation == "advection") cfg.equation = Equation::VarAdvection;
  else if (sc.scheme.equation == "burgers") cfg.equation = Equation::Burgers;
  else if (sc.scheme.equation == "euler") cfg.equation = Equation::Euler;
  else
    throw std::invalid_argument("config error: unknown equation '" +
                                sc.scheme.equation + "'");
  if (sc.scheme.form == "split") {
    cfg.use_split = true;
  } else {
    cfg.use_split = false;
    cfg.kind = flux_kind_from(sc.scheme.form);
  }
  cfg.alpha = sc.scheme.alpha;
  if (sc.scheme.sat == "none") cfg.sat = SatMode::None;
  else if (sc.scheme.sat == "conservative") cfg.sat = SatMode::Conservative;
  else if (sc.scheme.sat == "upwind") cfg.sat = SatMode::Upwind;
  else throw std::invalid_argument("config error: unknown sat '" + sc.scheme.sat + "'");
  cfg.sigma = sc.scheme.sigma;
  cfg.diss.s = sc.scheme.diss_s;
  cfg.diss.eps = sc.scheme.diss_eps;
  if (sc.scheme.diss_variable == "conservative")
    cfg.diss.variable = DissVariable::Conservative;
  else if (sc.scheme.diss_variable == "entropy")
    cfg.diss.variable = DissVariable::Entropy;
  else
    throw std::invalid_argument("config error: unknown dissipation variable '" +
                                sc.scheme.diss_variable + "'");
  cfg.validate();
  return cfg;
}

inline void Scenario::validate() const {
  if (name.empty()) throw std::invalid_argument("config error: empty scenario name");
  if (name.find('/') != std::string::npos || name.find(' ') != std::string::npos)
    throw std::invalid_argument("config error: scenario name must not contain '/' or spaces");
  if (grid.n_nodes < 4) throw std::invalid_argument("config error: grid.n_nodes < 4");
  if (grid.n_blocks < 1) throw std::invalid_argument("config error: grid.n_blocks < 1");
  if (!(grid.x_max > grid.x_min))
    throw std::invalid_argument("config error: grid.x_max must exceed grid.x_min");
  scheme_config(*this);  // rejects unknown scheme fields
  const bool euler_analysis = analysis == Analysis::EulerDensityWave;
  if (euler_analysis != (scheme.equation == "euler"))
    throw std::invalid_argument(
        "config error: the euler-density-wave analysis and the euler equation "
        "require each other");
  if ((analysis == Analysis::BurgersDemo) != (scheme.equation == "burgers"))
    throw std::invalid_argument(
        "config error: the burgers-demo analysis and the burgers equation "
        "require each other");
  if (!detail::key_in(pert.source, {"none", "random", "floquet-mode"}))
    throw std::invalid_argument("config error: unknown perturbation source '" +
                                pert.source + "'");
  const bool needs_time = analysis == Analysis::ErrorGrowth ||
                          analysis == Analysis::PerturbationRun ||
                          analysis == Analysis::EulerDensityWave ||
                          analysis == Analysis::BurgersDemo ||
                          (analysis == Analysis::NearVacuum && sweep.eps.empty());
  if (needs_time && !(time.t_end > 0.0))
    throw std::invalid_argument("config error: time.t_end must be positive");
  const bool needs_dt = analysis == Analysis::PerturbationRun ||
                        analysis == Analysis::EulerDensityWave ||
                        analysis == Analysis::BurgersDemo ||
                        (analysis == Analysis::NearVacuum && sweep.eps.empty());
  if (needs_dt && !(time.dt > 0.0))
    throw std::invalid_argument(
        "config error: this analysis is fixed-step; set time.dt");
  if (analysis == Analysis::EulerDensityWave && grid.family != "circulant")
    throw std::invalid_argument("config error: euler runs need a circulant grid");
  if (filter.enabled && !(filter.cut > filter.floor && filter.floor > 0.0))
    throw std::invalid_argument("config error: filter needs cut > floor > 0");
}

// ---------------------------------------------------------------------------
// CSV artifacts: comma-separated, header row, 17 significant digits

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::string& path, const CsvTable& t) {
  if (t.columns.empty()) throw std::invalid_argument("write_csv: no columns");
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  char buf[40];
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw std::invalid_argument("write_csv: row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  f << out;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("read_csv: cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(f, line))
    throw std::invalid_argument("read_csv: '" + path + "' is empty");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) {
      // strtod instead of stod: subnormals must parse, not raise out_of_range
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw std::invalid_argument("read_csv: non-numeric cell '" + cell + "' in " +
                                    path);
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw std::invalid_argument("read_csv: ragged row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Deterministic SVG line plots

struct PlotSpec {
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_x{false};
  bool log_y{false};
  std::string title;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v, bool log_axis) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", log_axis ? std::pow(10.0, v) : v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Renders the named columns of a CSV file as polylines. Output depends only
// on the CSV contents and the spec, so identical inputs give identical bytes.
// Nonpositive values on a log axis are clipped to 1e-300 and flagged with a
// warning annotation.
inline void plot_lines(const std::string& csv_path, const PlotSpec& spec,
                       const std::string& svg_path) {
  const CsvTable t = read_csv(csv_path);
  if (t.rows.empty())
    throw std::invalid_argument("plot_lines: no data rows in '" + csv_path + "'");
  if (spec.y_columns.empty())
    throw std::invalid_argument("plot_lines: no y columns requested");
  auto col_index = [&](const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      if (t.columns[c] == name) return static_cast<int>(c);
    return -1;
  };
  std::string missing;
  const int xc = col_index(spec.x_column);
  if (xc < 0) missing = spec.x_column;
  std::vector<int> yc;
  for (const auto& name : spec.y_columns) {
    const int c = col_index(name);
    if (c < 0) missing += (missing.empty() ? "" : ", ") + name;
    yc.push_back(c);
  }
  if (!missing.empty())
    throw std::invalid_argument("plot_lines: missing column(s): " + missing);

  bool clipped = false;
  auto coord = [&](double v, bool log_axis) {
    if (std::isnan(v) || !log_axis) return v;
    if (!(v > 0.0)) {
      clipped = true;
      v = 1e-300;
    }
    return std::log10(v);
  };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double x_lo = nan, x_hi = nan, y_lo = nan, y_hi = nan;
  auto widen = [](double& lo, double& hi, double v) {
    if (std::isnan(v)) return;
    if (std::isnan(lo) || v < lo) lo = v;
    if (std::isnan(hi) || v > hi) hi = v;
  };
  for (const auto& row : t.rows) {
    widen(x_lo, x_hi, coord(row[xc], spec.log_x));
    for (int c : yc) widen(y_lo, y_hi, coord(row[c], spec.log_y));
  }
  if (std::isnan(x_lo) || std::isnan(y_lo))
    throw std::invalid_argument("plot_lines: no finite data to plot");
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi == y_lo) { y_lo -= 0.5; y_hi += 0.5; }

  const double W = 860, H = 480, ml = 78, mr = 24, mt = 40, mb = 52;
  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb); };
  static const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"480\" "
         "viewBox=\"0 0 860 480\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg += "<rect width=\"860\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) +
         "\" width=\"" + detail::svg_num(W - ml - mr) + "\" height=\"" +
         detail::svg_num(H - mt - mb) +
         "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  if (!spec.title.empty())
    svg += "<text x=\"430\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           detail::xml_escape(spec.title) + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_lo + k * (x_hi - x_lo) / 4.0;
    const double fy = y_lo + k * (y_hi - y_lo) / 4.0;
    svg += "<text x=\"" + detail::svg_num(px(fx)) + "\" y=\"" +
           detail::svg_num(H - mb + 18) + "\" text-anchor=\"middle\">" +
           detail::tick_label(fx, spec.log_x) + "</text>\n";
    svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" +
           detail::svg_num(py(fy) + 4) + "\" text-anchor=\"end\">" +
           detail::tick_label(fy, spec.log_y) + "</text>\n";
  }
  for (std::size_t s = 0; s < yc.size(); ++s) {
    std::string pts;
    for (const auto& row : t.rows) {
      const double x = coord(row[xc], spec.log_x);
      const double y = coord(row[yc[s]], spec.log_y);
      if (std::isnan(x) || std::isnan(y)) continue;
      pts += detail::svg_num(px(x)) + "," + detail::svg_num(py(y)) + " ";
    }
    const char* color = kPalette[s % 6];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    svg += "<text x=\"" + detail::svg_num(W - mr - 10) + "\" y=\"" +
           detail::svg_num(mt + 18 + 17 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" fill=\"";
    svg += color;
    svg += "\">" + detail::xml_escape(spec.y_columns[s]) + "</text>\n";
  }
  if (clipped)
    svg += "<text x=\"" + detail::svg_num(W - mr - 10) + "\" y=\"" +
           detail::svg_num(H - mb - 8) + "\" text-anchor=\"end\" fill=\"#d62728\">"
           "nonpositive values clipped to 1e-300</text>\n";
  svg += "</svg>\n";

  std::ofstream f(svg_path, std::ios::binary);
  if (!f) throw std::runtime_error("plot_lines: cannot open '" + svg_path + "'");
  f << svg;
}

// ---------------------------------------------------------------------------
// Scenario runners

struct RunResult {
  std::string dir;
  bool ok{false};
  bool crashed{false};
  double crash_time{std::numeric_limits<double>::quiet_NaN()};
  std::string message;
  json summary;
};

namespace detail {

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  f << j.dump(2) << "\n";
}

// Thins a channel table to at most ~4000 rows, always keeping the last row.
inline CsvTable strided(CsvTable t) {
  const std::size_t cap = 4000;
  if (t.rows.size() <= cap + 1) return t;
  const std::size_t stride = (t.rows.size() + cap - 1) / cap;
  CsvTable out;
  out.columns = t.columns;
  for (std::size_t k = 0; k < t.rows.size(); k += stride) out.rows.push_back(t.rows[k]);
  if (out.rows.back() != t.rows.back()) out.rows.push_back(t.rows.back());
  return out;
}

inline CsvTable trajectory_table(const Trajectory& tr, const std::vector<double>* ph,
                                 const std::vector<double>* pinf) {
  CsvTable t;
  t.columns = {"time", "dt", "energy_h", "energy_ah", "entropy", "min_u",
               "err_h", "err_inf"};
  if (ph != nullptr) {
    t.columns.push_back("pert_h");
    t.columns.push_back("pert_inf");
  }
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> row = {tr.times[k], tr.dts[k],    tr.energy_h[k],
                               tr.energy_ah[k], tr.entropy_s[k], tr.min_u[k],
                               tr.err_h[k],  tr.err_inf[k]};
    if (ph != nullptr) {
      row.push_back((*ph)[k]);
      row.push_back((*pinf)[k]);
    }
    t.rows.push_back(std::move(row));
  }
  return strided(std::move(t));
}

inline std::function<Vec(double)> exact_provider(const Scenario& sc, const Grid& g) {
  if (sc.scheme.equation != "advection") return nullptr;
  auto a_fn = coefficient_fn(sc);
  auto u0_fn = initial_fn(sc);
  auto map = std::make_shared<CharacteristicMap>(a_fn, sc.grid.x_min, sc.grid.x_max);
  Vec x = g.x;
  return [map, a_fn, u0_fn, x](double t) {
    return exact_advection_solution(*map, a_fn, u0_fn, x, t);
  };
}

inline FluxKind channel_kind(const SchemeConfig& cfg) {
  return cfg.use_split ? FluxKind::Central : cfg.kind;
}

// Initial perturbation, shared machinery for perturbation-run and
// near-vacuum scenarios. The Floquet mode is computed from the
// dissipation-free operator on the exact baseflow so that every variant of a
// scenario family perturbs the same way.
inline Vec initial_perturbation(const Scenario& sc, const Grid& g, const Vec& a) {
  if (sc.pert.source == "random")
    return random_perturbation(g.n_total(), sc.pert.amp, sc.pert.seed);
  if (sc.pert.source == "floquet-mode") {
    SchemeConfig cfg = scheme_config(sc);
    cfg.diss = Dissipation{};
    auto a_fn = coefficient_fn(sc);
    auto u0_fn = initial_fn(sc);
    CharacteristicMap map(a_fn, sc.grid.x_min, sc.grid.x_max);
    const double T =
        sc.floquet.period > 0.0 ? sc.floquet.period : map.traversal_time();
    auto jac_at = [&](double t) {
      Vec ub = exact_advection_solution(map, a_fn, u0_fn, g.x, t);
      return cfg.use_split ? jac_split_form(g, cfg, a).matrix
                           : jac_flux_diff(g, cfg, a, ub).matrix;
    };
    Monodromy m = floquet_diagnostics(
        monodromy(jac_at, T, sc.floquet.k, sc.floquet.tol), g.h_global);
    return scaled_mode(m.dominant_mode, sc.pert.amp);
  }
  return Vec::Zero(g.n_total());
}

inline void run_spectra(const Scenario& sc, const std::filesystem::path& dir,
                        RunResult& res) {
  SchemeConfig cfg = scheme_config(sc);
  auto a_fn = coefficient_fn(sc);
  auto jac_of = [&](const Grid& g) {
    Vec a = sample(g, a_fn);
    if (cfg.use_split) return jac_split_form(g, cfg, a).matrix;
    Vec u0 = sample(g, initial_fn(sc));
    return jac_flux_diff(g, cfg, a, u0).matrix;
  };
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  if (!sc.sweep.n_nodes.empty()) {
    CsvTable t;
    t.columns = {"n_nodes", "re_lambda_max", "spectral_radius"};
    json entries = json::array();
    for (int n : sc.sweep.n_nodes) {
      GridSpec gs = sc.grid;
      gs.n_nodes = n;
      Grid g = build_grid(gs);
      auto rep = eig(jac_of(g), &g);
      t.rows.push_back({static_cast<double>(n), rep.re_lambda_max, rep.spectral_radius});
      entries.push_back({{"n_nodes", n},
                         {"re_lambda_max", rep.re_lambda_max},
                         {"spectral_radius", rep.spectral_radius}});
    }
    write_csv((dir / "spectra.csv").string(), t);
    summary["entries"] = entries;
    write_json_file((dir / "spectra.json").string(), summary);
    plot_lines((dir / "spectra.csv").string(),
               PlotSpec{"n_nodes", {"re_lambda_max"}, true, true,
                        "growth rate under mesh refinement"},
               (dir / "plots" / "decay.svg").string());
  } else {
    Grid g = build_grid(sc.grid);
    auto rep = eig(jac_of(g), &g);
    CsvTable t;
    t.columns = {"re", "im", "rho_bdy"};
    json modes = json::array();
    for (int k = 0; k < rep.eigenvalues.size(); ++k) {
      t.rows.push_back(
          {rep.eigenvalues(k).real(), rep.eigenvalues(k).imag(), rep.rho_bdy(k)});
      modes.push_back(
          {{"re", rep.eigenvalues(k).real()}, {"im", rep.eigenvalues(k).imag()}});
    }
    write_csv((dir / "eigenvalues.csv").string(), t);
    summary["n_nodes"] = sc.grid.n_nodes;
    summary["re_lambda_max"] = rep.re_lambda_max;
    summary["spectral_radius"] = rep.spectral_radius;
    summary["rho_bdy_dominant"] = rep.rho_bdy(0);
    summary["eigenvalues"] = modes;
    write_json_file((dir / "spectra.json").string(), summary);
  }
  res.summary = summary;
  res.ok = true;
}

inline void run_error_growth(const Scenario& sc, const std::filesystem::path& dir,
                             RunResult& res) {
  Grid g = build_grid(sc.grid);
  SchemeConfig cfg = scheme_config(sc);
  Vec a = sample(g, coefficient_fn(sc));
  Vec u0 = sample(g, initial_fn(sc));
  Residual f = [&g, cfg, a](double, const Vec& u) { return residual(g, cfg, a, u); };
  ChannelSpec cs;
  cs.grid = &g;
  cs.a = a;
  cs.kind = channel_kind(cfg);
  cs.exact = exact_provider(sc, g);
  Trajectory tr = sc.time.dt > 0.0
                      ? rk4(f, u0, 0.0, sc.time.t_end, sc.time.dt, cs)
                      : rk8_adaptive(f, u0, 0.0, sc.time.t_end, sc.time.rtol,
                                     sc.time.atol, cs);
  write_csv((dir / "trajectory.csv").string(), trajectory_table(tr, nullptr, nullptr));
  if (cs.exact)
    plot_lines((dir / "trajectory.csv").string(),
               PlotSpec{"time", {"err_h", "err_inf"}, false, true, sc.name},
               (dir / "plots" / "error.svg").string());
  plot_lines((dir / "trajectory.csv").string(),
             PlotSpec{"time", {"energy_h", "energy_ah"}, false, false,
                      "solution energy"},
             (dir / "plots" / "energy.svg").string());
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  summary["crashed"] = tr.crashed;
  summary["steps"] = tr.times.size() - 1;
  summary["final_time"] = tr.times.back();
  summary["final_err_h"] = tr.err_h.back();
  summary["final_energy_h"] = tr.energy_h.back();
  summary["final_energy_ah"] = tr.energy_ah.back();
  write_json_file((dir / "summary.json").string(), summary);
  res.summary = summary;
  res.crashed = tr.crashed;
  res.crash_time = tr.crash_time;
  res.ok = !tr.crashed;
  if (tr.crashed) res.message = "solver crash at t = " + std::to_string(tr.crash_time);
}

inline void run_floquet(const Scenario& sc, const std::filesystem::path& dir,
                        RunResult& res) {
  Grid g = build_grid(sc.grid);
  SchemeConfig cfg = scheme_config(sc);
  Vec a = sample(g, coefficient_fn(sc));
  auto a_fn = coefficient_fn(sc);
  auto u0_fn = initial_fn(sc);
  CharacteristicMap map(a_fn, sc.grid.x_min, sc.grid.x_max);
  const double T = sc.floquet.period > 0.0 ? sc.floquet.period : map.traversal_time();
  auto jac_at = [&](double t) {
    Vec ub = exact_advection_solution(map, a_fn, u0_fn, g.x, t);
    return cfg.use_split ? jac_split_form(g, cfg, a).matrix
                         : jac_flux_diff(g, cfg, a, ub).matrix;
  };
  Monodromy m = floquet_diagnostics(
      monodromy(jac_at, T, sc.floquet.k, sc.floquet.tol), g.h_global);
  CsvTable te, tm;
  te.columns = {"re", "im"};
  tm.columns = {"re", "im"};
  json jm = json::array(), je = json::array();
  double max_re = 0.0;
  for (int k = 0; k < m.exponents.size(); ++k) {
    te.rows.push_back({m.exponents(k).real(), m.exponents(k).imag()});
    tm.rows.push_back({m.multipliers(k).real(), m.multipliers(k).imag()});
    je.push_back({{"re", m.exponents(k).real()}, {"im", m.exponents(k).imag()}});
    jm.push_back({{"re", m.multipliers(k).real()}, {"im", m.multipliers(k).imag()}});
    max_re = std::max(max_re, std::abs(m.exponents(k).real()));
  }
  write_csv((dir / "exponents.csv").string(), te);
  write_csv((dir / "multipliers.csv").string(), tm);
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  summary["T"] = m.T;
  summary["K"] = m.K;
  summary["sigma_max"] = m.sigma_max;
  summary["defective"] = m.defective;
  summary["max_abs_re_exponent"] = max_re;
  summary["multipliers"] = jm;
  summary["exponents"] = je;
  write_json_file((dir / "floquet.json").string(), summary);
  res.summary = summary;
  res.ok = true;
}

inline void run_perturbation(const Scenario& sc, const std::filesystem::path& dir,
                             RunResult& res, const FilterSpec* filter = nullptr,
                             bool telemetry = false) {
  Grid g = build_grid(sc.grid);
  SchemeConfig cfg = scheme_config(sc);
  Vec a = sample(g, coefficient_fn(sc));
  Vec u0 = sample(g, initial_fn(sc));
  Residual f = [&g, cfg, a](double, const Vec& u) { return residual(g, cfg, a, u); };
  ChannelSpec cs;
  cs.grid = &g;
  cs.a = a;
  cs.kind = channel_kind(cfg);
  cs.exact = exact_provider(sc, g);
  if (filter != nullptr && filter->enabled) {
    const double lo = filter->floor, cut = filter->cut;
    cs.post_step = [lo, cut](double, Vec& u) { u = positivity_filter(u, lo, cut); };
  }
  if (telemetry) {
    const long steps = static_cast<long>(std::llround(sc.time.t_end / sc.time.dt));
    cs.state_stride = std::max(1L, steps / 64);
  }

  Trajectory base;
  const std::vector<double>* ph = nullptr;
  const std::vector<double>* pinf = nullptr;
  PerturbationResult pr;
  if (sc.pert.source == "none") {
    base = rk4(f, u0, 0.0, sc.time.t_end, sc.time.dt, cs);
  } else {
    Vec v0 = initial_perturbation(sc, g, a);
    PerturbationConfig pc;
    pc.residual = f;
    pc.dt = sc.time.dt;
    pc.channels = cs;
    pr = perturbation_experiment(pc, u0, v0, 0.0, sc.time.t_end);
    base = std::move(pr.base);
    ph = &pr.pert_h;
    pinf = &pr.pert_inf;
  }
  write_csv((dir / "run.csv").string(), trajectory_table(base, ph, pinf));
  if (ph != nullptr)
    plot_lines((dir / "run.csv").string(),
               PlotSpec{"time", {"pert_h", "pert_inf"}, false, true, sc.name},
               (dir / "plots" / "pert.svg").string());
  plot_lines((dir / "run.csv").string(),
             PlotSpec{"time", {"min_u"}, false, false, "solution minimum"},
             (dir / "plots" / "minu.svg").string());

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  summary["crashed"] = base.crashed;
  summary["final_time"] = base.times.back();
  summary["min_u_overall"] =
      *std::min_element(base.min_u.begin(), base.min_u.end());
  if (ph != nullptr) {
    summary["pert_h_initial"] = ph->front();
    summary["pert_h_final"] = ph->back();
    summary["pert_h_max"] = *std::max_element(ph->begin(), ph->end());
  }
  if (telemetry) {
    CsvTable t;
    t.columns = {"time", "min_u", "lambda_max_sym", "spectral_radius"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < base.states.size(); ++k) {
      double lam = nan, rho = nan;
      try {
        Mat J = cfg.use_split ? jac_split_form(g, cfg, a).matrix
                              : jac_flux_diff(g, cfg, a, base.states[k]).matrix;
        lam = lambda_max_sym(J, Weighting::Hnorm, g);
        rho = eig(J).spectral_radius;
      } catch (const std::exception&) {
        // states outside the admissible set have no linearization
      }
      t.rows.push_back({base.state_times[k], base.states[k].minCoeff(), lam, rho});
    }
    write_csv((dir / "telemetry.csv").string(), t);
    if (!t.rows.empty()) {
      summary["lambda_max_sym_initial"] = t.rows.front()[2];
      summary["lambda_max_sym_final"] = t.rows.back()[2];
      double worst = t.rows.front()[2];
      for (const auto& row : t.rows)
        if (std::isfinite(row[2])) worst = std::max(worst, row[2]);
      summary["lambda_max_sym_max"] = worst;
    }
  }
  write_json_file((dir / "summary.json").string(), summary);
  res.summary = summary;
  res.crashed = base.crashed;
  res.crash_time = base.crash_time;
  res.ok = !base.crashed;
  if (base.crashed)
    res.message = "solver crash at t = " + std::to_string(base.crash_time);
}

inline void run_near_vacuum(const Scenario& sc, const std::filesystem::path& dir,
                            RunResult& res) {
  if (!sc.sweep.eps.empty()) {
    Grid g = build_grid(sc.grid);
    SchemeConfig cfg = scheme_config(sc);
    Vec a = sample(g, coefficient_fn(sc));
    Vec u_base = sample(g, initial_fn(sc));
    CsvTable t;
    t.columns = {"eps", "lambda_max_sym", "spectral_radius"};
    json entries = json::array();
    for (double eps : sc.sweep.eps) {
      Vec u = u_base.array() + eps;
      Mat J = jac_flux_diff(g, cfg, a, u).matrix;
      const double lam = lambda_max_sym(J, Weighting::Hnorm, g);
      const double rho = eig(J).spectral_radius;
      t.rows.push_back({eps, lam, rho});
      entries.push_back(
          {{"eps", eps}, {"lambda_max_sym", lam}, {"spectral_radius", rho}});
    }
    write_csv((dir / "sweep.csv").string(), t);
    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["name"] = sc.name;
    summary["entries"] = entries;
    write_json_file((dir / "sweep.json").string(), summary);
    plot_lines((dir / "sweep.csv").string(),
               PlotSpec{"eps", {"lambda_max_sym", "spectral_radius"}, true, true,
                        "near-vacuum stiffness"},
               (dir / "plots" / "sweep.svg").string());
    res.summary = summary;
    res.ok = true;
    return;
  }
  run_perturbation(sc, dir, res, &sc.filter, /*telemetry=*/true);
}

inline void run_euler(const Scenario& sc, const std::filesystem::path& dir,
                      RunResult& res) {
  DensityWave wave = density_wave_scenario(sc.grid.n_nodes, sc.grid.accuracy);
  const Grid& g = wave.grid;
  EulerConfig ecfg = wave.config;
  ecfg.u_floor = sc.filter.floor;
  ecfg.u_cut = sc.filter.cut;
  if (sc.scheme.diss_s > 0 && sc.scheme.diss_eps > 0.0) {
    ecfg.diss = sc.scheme.diss_variable == "entropy" ? EulerDiss::Entropy
                                                     : EulerDiss::Conservative;
    ecfg.diss_s = sc.scheme.diss_s;
    ecfg.diss_eps = sc.scheme.diss_eps;
  }
  ecfg.validate();
  auto f = euler_rhs(g, ecfg);
  const Vec u0 = pack(wave.init);

  // Per-step record: admissibility margins and the running filter account.
  FilterDelta sink;
  CsvTable rec;
  rec.columns = {"time", "min_rho", "min_p", "filter_mass", "filter_energy"};
  const double gamma = ecfg.gamma;
  const bool filtered = sc.filter.enabled;
  ChannelSpec cs;
  cs.post_step = [&, gamma, filtered](double t, Vec& u) {
    EulerState s = unpack_euler(u);
    if (filtered) {
      const FilterDelta d = apply_euler_filter(ecfg, g, s);
      sink.mass += d.mass;
      sink.energy += d.energy;
      u = pack(s);
    }
    double min_p = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.n(); ++i) {
      const double p =
          (gamma - 1.0) * (s.e(i) - 0.5 * s.m(i) * s.m(i) / s.rho(i));
      min_p = std::min(min_p, p);
    }
    rec.rows.push_back({t, s.rho.minCoeff(), min_p, sink.mass, sink.energy});
  };
  const long steps = static_cast<long>(std::llround(sc.time.t_end / sc.time.dt));
  cs.state_stride = std::max(1L, steps / 24);

  Trajectory tr = rk4(f, u0, 0.0, sc.time.t_end, sc.time.dt, cs);
  write_csv((dir / "run.csv").string(), strided(rec));

  // Sparse telemetry: baseflow error and linearized stiffness at the kept states.
  CsvTable tt;
  tt.columns = {"time", "err_rho_h", "lambda_max_sym", "spectral_radius"};
  Vec w3(3 * g.n_total());
  w3 << g.h_global, g.h_global, g.h_global;
  const Vec isqrt = w3.cwiseSqrt().cwiseInverse();
  const Vec wsqrt = w3.cwiseSqrt();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const double t = tr.state_times[k];
    EulerState s = unpack_euler(tr.states[k]);
    Vec rho_ex(g.n_total());
    for (int i = 0; i < g.n_total(); ++i) rho_ex(i) = wave.rho_exact(g.x(i), t);
    const Vec e = s.rho - rho_ex;
    const double err = std::sqrt(e.dot(g.h_global.cwiseProduct(e)));
    double lam = nan, rho_j = nan;
    try {
      Mat J = jac_fd([&](const Vec& v) { return f(t, v); }, tr.states[k]);
      Mat S = 0.5 * (wsqrt.asDiagonal() * J * isqrt.asDiagonal() +
                     isqrt.asDiagonal() * J.transpose() * wsqrt.asDiagonal());
      Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
      lam = es.eigenvalues().maxCoeff();
      rho_j = eig(J).spectral_radius;
    } catch (const std::exception&) {
      // inadmissible or defective states carry no linearization
    }
    tt.rows.push_back({t, err, lam, rho_j});
  }
  write_csv((dir / "telemetry.csv").string(), tt);
  plot_lines((dir / "run.csv").string(),
             PlotSpec{"time", {"min_rho", "min_p"}, false, false,
                      "admissibility margins"},
             (dir / "plots" / "minrho.svg").string());
  plot_lines((dir / "telemetry.csv").string(),
             PlotSpec{"time", {"err_rho_h"}, false, true, "density error"},
             (dir / "plots" / "err.svg").string());

  // Entropy-condition residual of the two-point flux on seeded random pairs.
  double ec_worst = 0.0;
  auto unit = [](std::uint64_t s) { return (splitmix64(s) >> 11) * 0x1.0p-53; };
  for (int k = 0; k < 50; ++k) {
    const std::uint64_t s = 7000 + 10 * static_cast<std::uint64_t>(k);
    const double rl = 0.1 + 4.9 * unit(s), vl = -3.0 + 6.0 * unit(s + 1),
                 pl = 0.1 + 4.9 * unit(s + 2);
    const double rr = 0.1 + 4.9 * unit(s + 3), vr = -3.0 + 6.0 * unit(s + 4),
                 pr = 0.1 + 4.9 * unit(s + 5);
    const Vec3 ul(rl, rl * vl, pl / (gamma - 1.0) + 0.5 * rl * vl * vl);
    const Vec3 ur(rr, rr * vr, pr / (gamma - 1.0) + 0.5 * rr * vr * vr);
    const Vec3 fs = euler_ec_flux(ecfg, ul, ur);
    const Vec3 wl = euler_entropy_variables(ecfg, rl, vl, pl);
    const Vec3 wr = euler_entropy_variables(ecfg, rr, vr, pr);
    const double lhs = (wr - wl).dot(fs);
    const double rhs = euler_flux_potential(rr, vr) - euler_flux_potential(rl, vl);
    ec_worst = std::max(ec_worst, std::abs(lhs - rhs));
  }

  EulerState s_end = unpack_euler(tr.final_state);
  const double mass0 = g.h_global.dot(wave.init.rho);
  const double mass1 = g.h_global.dot(s_end.rho);
  const double energy0 = g.h_global.dot(wave.init.e);
  const double energy1 = g.h_global.dot(s_end.e);
  double min_rho_overall = std::numeric_limits<double>::infinity();
  for (const auto& row : rec.rows) min_rho_overall = std::min(min_rho_overall, row[1]);

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  summary["crashed"] = tr.crashed;
  summary["final_time"] = tr.times.back();
  summary["min_rho_overall"] = min_rho_overall;
  summary["mass_initial"] = mass0;
  summary["mass_final"] = mass1;
  summary["filter_mass"] = sink.mass;
  summary["mass_defect"] = mass1 - mass0 - sink.mass;
  summary["energy_initial"] = energy0;
  summary["energy_final"] = energy1;
  summary["filter_energy"] = sink.energy;
  summary["energy_defect"] = energy1 - energy0 - sink.energy;
  summary["ec_residual_max"] = ec_worst;
  if (!tt.rows.empty()) {
    summary["lambda_max_sym_initial"] = tt.rows.front()[2];
    double worst = tt.rows.front()[2];
    for (const auto& row : tt.rows)
      if (std::isfinite(row[2])) worst = std::max(worst, row[2]);
    summary["lambda_max_sym_max"] = worst;
  }
  write_json_file((dir / "summary.json").string(), summary);
  res.summary = summary;
  res.crashed = tr.crashed;
  res.crash_time = tr.crash_time;
  res.ok = !tr.crashed;
  if (tr.crashed) res.message = "solver crash at t = " + std::to_string(tr.crash_time);
}

inline void run_burgers(const Scenario& sc, const std::filesystem::path& dir,
                        RunResult& res) {
  Grid g = build_grid(sc.grid);
  SchemeConfig cfg = scheme_config(sc);
  Vec ones = Vec::Ones(g.n_total());
  Vec u0 = sample(g, initial_fn(sc));
  Residual f = [&g, cfg, ones](double, const Vec& u) {
    return residual(g, cfg, ones, u);
  };
  ChannelSpec cs;
  cs.grid = &g;
  cs.a = ones;
  Trajectory tr = rk4(f, u0, 0.0, sc.time.t_end, sc.time.dt, cs);
  write_csv((dir / "trajectory.csv").string(), trajectory_table(tr, nullptr, nullptr));
  plot_lines((dir / "trajectory.csv").string(),
             PlotSpec{"time", {"energy_h"}, false, false, "burgers energy"},
             (dir / "plots" / "energy.svg").string());
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = sc.name;
  summary["crashed"] = tr.crashed;
  summary["final_time"] = tr.times.back();
  summary["energy_initial"] = tr.energy_h.front();
  summary["energy_final"] = tr.energy_h.back();
  summary["energy_drift_rel"] =
      std::abs(tr.energy_h.back() - tr.energy_h.front()) / tr.energy_h.front();
  write_json_file((dir / "summary.json").string(), summary);
  res.summary = summary;
  res.crashed = tr.crashed;
  res.crash_time = tr.crash_time;
  res.ok = !tr.crashed;
  if (tr.crashed) res.message = "solver crash at t = " + std::to_string(tr.crash_time);
}

}  // namespace detail

// Runs one scenario and writes its artifact directory <out_root>/<name>:
// inputs.json (the resolved config), CSV data files, a JSON report, and
// plots/*.svg. Configuration errors throw std::invalid_argument before
// anything is written; runtime failures return ok = false with a crash.json
// record alongside whatever channel data was collected.
inline RunResult run_scenario(const Scenario& sc, const std::string& out_root) {
  sc.validate();
  RunResult res;
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_root) / sc.name;
  fs::create_directories(dir / "plots");
  res.dir = dir.string();
  detail::write_json_file((dir / "inputs.json").string(), scenario_to_json(sc));
  try {
    switch (sc.analysis) {
      case Analysis::Spectra: detail::run_spectra(sc, dir, res); break;
      case Analysis::ErrorGrowth: detail::run_error_growth(sc, dir, res); break;
      case Analysis::Floquet: detail::run_floquet(sc, dir, res); break;
      case Analysis::PerturbationRun: detail::run_perturbation(sc, dir, res); break;
      case Analysis::NearVacuum: detail::run_near_vacuum(sc, dir, res); break;
      case Analysis::EulerDensityWave: detail::run_euler(sc, dir, res); break;
      case Analysis::BurgersDemo: detail::run_burgers(sc, dir, res); break;
    }
  } catch (const std::exception& e) {
    res.ok = false;
    res.message = e.what();
  }
  if (!res.ok) {
    json crash;
    crash["schema_version"] = kSchemaVersion;
    crash["name"] = sc.name;
    crash["crashed"] = true;
    crash["crash_time"] = res.crash_time;
    crash["message"] = res.message;
    detail::write_json_file((dir / "crash.json").string(), crash);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Built-in presets

inline std::vector<Scenario> catalog() {
  std::vector<Scenario> out;
  auto add = [&out](Scenario sc) {
    sc.validate();
    out.push_back(std::move(sc));
  };

  {  // single-block CSBP spectra: the boundary-driven worst case
    Scenario sc;
    sc.name = "spectra-fig2a";
    sc.analysis = Analysis::Spectra;
    sc.grid = {"csbp", 1, 40, 1, 0.0, 1.0};
    sc.scheme.form = "split";
    sc.scheme.alpha = 0.0;
    sc.coefficient = "skewed-sinusoid";
    add(sc);

    sc.name = "spectra-fig2b";
    sc.scheme.sat = "upwind";
    sc.scheme.sigma = 1.0;
    add(sc);
  }
  {  // periodic circulant spectra: weak interior growth, killed by dissipation
    Scenario sc;
    sc.name = "spectra-fig2c";
    sc.analysis = Analysis::Spectra;
    sc.grid = {"circulant", 2, 39, 1, 0.0, 1.0};
    sc.scheme.form = "split";
    sc.scheme.alpha = 0.0;
    sc.coefficient = "skewed-sinusoid";
    add(sc);

    sc.name = "spectra-fig2d";
    sc.scheme.diss_s = 2;
    sc.scheme.diss_eps = 0.025;
    add(sc);

    sc.name = "spectra-refinement";
    sc.scheme.diss_s = 0;
    sc.scheme.diss_eps = 0.0;
    sc.grid.accuracy = 8;
    sc.sweep.n_nodes = {39, 99, 399};
    add(sc);
  }
  {  // conserved a-weighted energy of the central scheme, two exact periods
    Scenario sc;
    sc.name = "vce-exact";
    sc.analysis = Analysis::ErrorGrowth;
    sc.grid = {"circulant", 4, 64, 1, 0.0, 1.0};
    sc.scheme.form = "split";
    sc.scheme.alpha = 1.0;
    sc.coefficient = "sinusoid";
    sc.time.t_end = 4.0 / std::sqrt(5.0);
    add(sc);
  }
  {  // long-time error growth of the product scheme
    Scenario sc;
    sc.name = "error-growth-csbp";
    sc.analysis = Analysis::ErrorGrowth;
    sc.grid = {"csbp", 1, 40, 1, 0.0, 1.0};
    sc.scheme.form = "split";
    sc.scheme.alpha = 0.0;
    sc.coefficient = "skewed-sinusoid";
    sc.time.t_end = 5.0;
    sc.time.rtol = 1e-10;
    add(sc);

    sc.name = "error-growth-circulant";
    sc.grid = {"circulant", 8, 39, 1, 0.0, 1.0};
    sc.time.t_end = 50.0;
    add(sc);
  }
  {  // Floquet exponents of nonlinear fluxes on a periodic baseflow
    Scenario sc;
    sc.name = "floquet-lce";
    sc.analysis = Analysis::Floquet;
    sc.grid = {"csbp", 1, 100, 1, 0.0, 1.0};
    sc.scheme.form = "geometric";
    sc.coefficient = "constant";
    add(sc);

    sc.name = "floquet-logarithmic";
    sc.scheme.form = "logarithmic";
    add(sc);
  }
  {  // 100-period random-perturbation runs
    Scenario sc;
    sc.analysis = Analysis::PerturbationRun;
    sc.grid = {"circulant", 8, 40, 1, 0.0, 1.0};
    sc.coefficient = "constant";
    sc.time.t_end = 100.0;
    sc.time.dt = 1e-3;
    sc.pert = {"random", 1e-3, 20260816ull};
    for (const char* form : {"central", "geometric", "logarithmic"}) {
      sc.name = std::string("pert-") + form;
      sc.scheme.form = form;
      add(sc);
    }
  }
  {  // near-vacuum advection of the density-wave profile
    Scenario sc;
    sc.analysis = Analysis::NearVacuum;
    sc.grid = {"circulant", 8, 39, 1, -1.0, 1.0};
    sc.scheme.form = "logarithmic";
    sc.coefficient = "constant";
    sc.init = "density-wave";
    sc.time.t_end = 20.0;
    sc.time.dt = 1e-4;
    sc.pert = {"floquet-mode", 1e-5, 1};

    sc.name = "near-vacuum-bare";
    add(sc);

    sc.name = "near-vacuum-consdiss";
    sc.scheme.diss_s = 4;
    sc.scheme.diss_eps = 1e-2;
    sc.scheme.diss_variable = "conservative";
    add(sc);

    sc.name = "near-vacuum-entdiss";
    sc.scheme.diss_variable = "entropy";
    add(sc);

    sc.name = "near-vacuum-filter";
    sc.scheme.diss_s = 0;
    sc.scheme.diss_eps = 0.0;
    sc.scheme.diss_variable = "conservative";
    sc.filter.enabled = true;
    add(sc);
  }
  {  // stiffness of the logarithmic linearization as the profile approaches
     // zero; n = 40 places a node exactly on the zero of the well
    Scenario sc;
    sc.name = "near-vacuum-sweep";
    sc.analysis = Analysis::NearVacuum;
    sc.grid = {"circulant", 8, 40, 1, -1.0, 1.0};
    sc.scheme.form = "logarithmic";
    sc.coefficient = "constant";
    sc.init = "vacuum-well";
    sc.sweep.eps = {1e-1, 1e-2, 1e-3, 1e-4};
    add(sc);
  }
  {  // Euler density wave with and without the positivity filter
    Scenario sc;
    sc.analysis = Analysis::EulerDensityWave;
    sc.grid = {"circulant", 8, 39, 1, -1.0, 1.0};
    sc.scheme.equation = "euler";
    sc.scheme.form = "logarithmic";
    sc.time.t_end = 10.0;
    sc.time.dt = 1e-4;

    sc.name = "euler-density-wave";
    sc.filter.enabled = true;
    add(sc);

    sc.name = "euler-density-wave-bare";
    sc.filter.enabled = false;
    add(sc);
  }
  {  // energy-conservative Burgers split form ahead of shock formation
    Scenario sc;
    sc.name = "burgers-demo";
    sc.analysis = Analysis::BurgersDemo;
    sc.grid = {"csbp", 2, 33, 2, 0.0, 1.0};
    sc.scheme.equation = "burgers";
    sc.scheme.form = "split";
    sc.scheme.alpha = 2.0 / 3.0;
    sc.time.t_end = 0.1;
    sc.time.dt = 5e-4;
    add(sc);
  }
  return out;
}

inline Scenario find_scenario(const std::string& name) {
  auto all = catalog();
  for (auto& sc : all)
    if (sc.name == name) return sc;
  std::string names;
  for (const auto& sc : all) names += (names.empty() ? "" : ", ") + sc.name;
  throw std::invalid_argument("unknown scenario '" + name + "'; available: " + names);
}

}  // namespace splitstab
