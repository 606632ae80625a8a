#ifndef SKDV_CONFIG_HPP
#define SKDV_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skdv/dynamics.hpp"

namespace skdv {

using json = nlohmann::json;

enum class Scenario { simulate, ensemble, conserve, probe, contraction, counterexample, hierarchy };

inline Scenario parse_scenario(const std::string& s) {
  if (s == "simulate") return Scenario::simulate;
  if (s == "ensemble") return Scenario::ensemble;
  if (s == "conserve") return Scenario::conserve;
  if (s == "probe") return Scenario::probe;
  if (s == "contraction") return Scenario::contraction;
  if (s == "counterexample") return Scenario::counterexample;
  if (s == "hierarchy") return Scenario::hierarchy;
  throw std::invalid_argument("unknown scenario: " + s);
}

inline std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::simulate: return "simulate";
    case Scenario::ensemble: return "ensemble";
    case Scenario::conserve: return "conserve";
    case Scenario::probe: return "probe";
    case Scenario::contraction: return "contraction";
    case Scenario::counterexample: return "counterexample";
    case Scenario::hierarchy: return "hierarchy";
  }
  return "?";
}

struct KernelSpec {
  std::string type = "gaussian"; // gaussian | zero | csv
  double l2_norm = 0.5;
  double width = 1.0;
  std::string path; // csv only

  RealField build(const Grid1D& g) const {
    if (type == "zero") return RealField(g);
    if (type == "gaussian") return gaussian_kernel(g, l2_norm, width);
    if (type == "csv") return load_csv_kernel(g, path);
    throw std::invalid_argument("unknown kernel type: " + type);
  }

  // (x, value) samples, linearly interpolated onto the grid.
  static RealField load_csv_kernel(const Grid1D& g, const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open kernel csv: " + file);
    std::vector<std::pair<double, double>> pts;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double x, v;
      if (ls >> x >> v) pts.emplace_back(x, v);
    }
    if (pts.size() < 2) throw std::runtime_error("kernel csv needs at least two samples");
    std::sort(pts.begin(), pts.end());
    RealField k(g);
    for (int j = 0; j < g.points; ++j) {
      double x = g.x(j);
      if (x <= pts.front().first || x >= pts.back().first) {
        k[j] = 0.0;
        continue;
      }
      auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(x, -1e300));
      auto lo = hi - 1;
      double s = (x - lo->first) / (hi->first - lo->first);
      k[j] = lo->second + s * (hi->second - lo->second);
    }
    return k;
  }
};

struct NoiseSpec {
  bool enabled = false;
  int basis_size = 129;
  KernelSpec kernel1;
  KernelSpec kernel2;
};

struct InitialSpec {
  double u_amplitude = 1.2;
  double u_sigma = 1.4142135623730951;
  double u_wavenumber = 0.5;
  double w_amplitude = 1.1;
  double w_sigma = 2.0;

  ComplexField build_u(const Grid1D& g) const {
    return sample_complex(g, [this](double x) {
      return u_amplitude * std::exp(-x * x / (2.0 * u_sigma * u_sigma)) *
             std::polar(1.0, u_wavenumber * x);
    });
  }
  RealField build_w(const Grid1D& g) const {
    return sample_real(g, [this](double x) {
      return w_amplitude * std::exp(-x * x / (2.0 * w_sigma * w_sigma));
    });
  }
};

struct DiagnosticsSpec {
  int stride = 10;
  bool track_bourgain = false;
  double bourgain_b = 0.45;
  int norm_cap = 96;
};

struct EnsembleSpec {
  int paths = 100;
  int moment_order = 1;
  std::vector<double> checkpoints{0.2, 0.4, 0.6, 0.8, 1.0};
};

struct ProbeSpec {
  std::vector<std::string> lemmas{"basic",      "bilinear_schrodinger",
                                  "trilinear",  "bilinear_kdv",
                                  "power",      "duhamel",
                                  "stochastic_convolution"};
  double a = 0.45;
  double b = 0.45;
  int trials = 100;
  int grid_points = 128;
  int time_points = 96;
  std::vector<int> alphas{2, 3, 4};
  std::vector<double> T_list{0.05, 0.1, 0.2, 0.4};
  int sc_paths = 200;     // stochastic-convolution ensemble size
  int sc_moment_order = 1;
  double box_length = 32.0 * kPi;
};

struct ContractionSpec {
  int pairs = 20;
  std::vector<double> T_list{0.2, 0.1, 0.05};
  double R = 2.0;
  int time_points = 129;
  double b = 0.45;
  int grid_points = 128;
  double box_length = 32.0 * kPi;
};

struct CounterexampleSpec {
  std::vector<int> n_values{4, 8, 16, 32};
  double r = 2.0;
  double q = 8.0;
  int time_points = 128;
  double box_length = 64.0;
  int grid_points = 1024;
};

struct HierarchyStudySpec {
  std::vector<double> K_values{1.0, 2.0, 4.0, 64.0};
  std::vector<double> n_values{2.0, 4.0, 8.0};
  std::vector<double> m_values{2.0, 4.0, 8.0};
  int paths = 4;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::simulate;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int threads = 1;
  Grid1D grid{64.0 * kPi, 1024};
  SystemParams system;
  std::optional<ApproxParams> approx;
  SchemeConfig scheme;
  Hierarchy hierarchy = Hierarchy::full;
  NoiseSpec noise;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;
  EnsembleSpec ensemble;
  ProbeSpec probe;
  ContractionSpec contraction;
  CounterexampleSpec counterexample;
  HierarchyStudySpec hierarchy_study;
  json raw; // config as parsed, echoed into summaries
};

namespace config_detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

inline KernelSpec parse_kernel(const json& j, const std::string& where) {
  require_keys(j, {"type", "l2_norm", "width", "path"}, where);
  KernelSpec k;
  k.type = j.value("type", k.type);
  k.l2_norm = j.value("l2_norm", k.l2_norm);
  k.width = j.value("width", k.width);
  k.path = j.value("path", k.path);
  if (k.type != "gaussian" && k.type != "zero" && k.type != "csv")
    throw std::invalid_argument("config: unknown kernel type in " + where);
  return k;
}

} // namespace config_detail

inline ExperimentConfig parse_config(const json& j) {
  using config_detail::parse_kernel;
  using config_detail::require_keys;

  require_keys(j,
               {"scenario", "master_seed", "output_dir", "threads", "grid", "system", "approx",
                "scheme", "hierarchy", "noise", "initial", "diagnostics", "ensemble", "probe",
                "contraction", "counterexample", "hierarchy_study"},
               "top level");
  ExperimentConfig c;
  c.raw = j;
  if (!j.contains("scenario")) throw std::invalid_argument("config: scenario is required");
  c.scenario = parse_scenario(j.at("scenario").get<std::string>());
  c.master_seed = j.value("master_seed", std::uint64_t{1});
  c.output_dir = j.value("output_dir", std::string("out"));
  c.threads = j.value("threads", 1);
  if (c.threads < 1) throw std::invalid_argument("config: threads must be >= 1");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    require_keys(g, {"length", "points"}, "grid");
    c.grid = Grid1D(g.value("length", 64.0 * kPi), g.value("points", 1024));
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    require_keys(s, {"alpha", "beta", "gamma1", "gamma2", "f_choice"}, "system");
    c.system.alpha = s.value("alpha", 1);
    c.system.beta = s.value("beta", 1.0);
    c.system.gamma1 = s.value("gamma1", 1.0);
    c.system.gamma2 = s.value("gamma2", 1.0);
    c.system.f_choice = parse_f_choice(s.value("f_choice", std::string("u")));
    c.system.validate();
  }
  if (j.contains("approx")) {
    const auto& a = j.at("approx");
    require_keys(a, {"m", "n", "K", "R"}, "approx");
    ApproxParams ap;
    ap.m = a.value("m", 6.0);
    ap.n = a.value("n", 8.0);
    ap.K = a.value("K", 8.0);
    ap.R = a.value("R", 2.0);
    ap.validate();
    c.approx = ap;
  }
  if (j.contains("scheme")) {
    const auto& s = j.at("scheme");
    require_keys(s, {"dt", "scheme", "T0", "dealias"}, "scheme");
    c.scheme.dt = s.value("dt", 1e-3);
    std::string name = s.value("scheme", std::string("exp_euler_maruyama"));
    if (name == "exp_euler_maruyama")
      c.scheme.scheme = Scheme::exp_euler_maruyama;
    else if (name == "strang_rk4")
      c.scheme.scheme = Scheme::strang_rk4;
    else
      throw std::invalid_argument("config: unknown scheme " + name);
    c.scheme.T0 = s.value("T0", 1.0);
    c.scheme.dealias = s.value("dealias", true);
    c.scheme.validate();
  }
  if (j.contains("hierarchy")) c.hierarchy = parse_hierarchy(j.at("hierarchy").get<std::string>());
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    require_keys(n, {"enabled", "basis_size", "kernel1", "kernel2"}, "noise");
    c.noise.enabled = n.value("enabled", false);
    c.noise.basis_size = n.value("basis_size", 129);
    if (c.noise.basis_size < 1) throw std::invalid_argument("config: basis_size must be >= 1");
    if (n.contains("kernel1")) c.noise.kernel1 = parse_kernel(n.at("kernel1"), "noise.kernel1");
    if (n.contains("kernel2")) c.noise.kernel2 = parse_kernel(n.at("kernel2"), "noise.kernel2");
  }
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    require_keys(i, {"u_amplitude", "u_sigma", "u_wavenumber", "w_amplitude", "w_sigma"},
                 "initial");
    c.initial.u_amplitude = i.value("u_amplitude", c.initial.u_amplitude);
    c.initial.u_sigma = i.value("u_sigma", c.initial.u_sigma);
    c.initial.u_wavenumber = i.value("u_wavenumber", c.initial.u_wavenumber);
    c.initial.w_amplitude = i.value("w_amplitude", c.initial.w_amplitude);
    c.initial.w_sigma = i.value("w_sigma", c.initial.w_sigma);
    if (!(c.initial.u_sigma > 0.0) || !(c.initial.w_sigma > 0.0))
      throw std::invalid_argument("config: initial widths must be positive");
  }
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    require_keys(d, {"stride", "track_bourgain", "bourgain_b", "norm_cap"}, "diagnostics");
    c.diagnostics.stride = d.value("stride", 10);
    c.diagnostics.track_bourgain = d.value("track_bourgain", false);
    c.diagnostics.bourgain_b = d.value("bourgain_b", 0.45);
    c.diagnostics.norm_cap = d.value("norm_cap", 96);
    if (c.diagnostics.stride < 1) throw std::invalid_argument("config: diagnostics stride >= 1");
    if (!(c.diagnostics.bourgain_b > 0.0 && c.diagnostics.bourgain_b < 0.5))
      throw std::invalid_argument("config: bourgain_b must lie in (0, 1/2)");
  }
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    require_keys(e, {"paths", "moment_order", "checkpoints"}, "ensemble");
    c.ensemble.paths = e.value("paths", 100);
    c.ensemble.moment_order = e.value("moment_order", 1);
    if (e.contains("checkpoints"))
      c.ensemble.checkpoints = e.at("checkpoints").get<std::vector<double>>();
    if (c.ensemble.paths < 1 || c.ensemble.moment_order < 1)
      throw std::invalid_argument("config: ensemble paths and moment_order must be >= 1");
  }
  if (j.contains("probe")) {
    const auto& p = j.at("probe");
    require_keys(p,
                 {"lemmas", "a", "b", "trials", "grid_points", "time_points", "alphas", "T_list",
                  "sc_paths", "sc_moment_order", "box_length"},
                 "probe");
    if (p.contains("lemmas")) c.probe.lemmas = p.at("lemmas").get<std::vector<std::string>>();
    c.probe.a = p.value("a", 0.45);
    c.probe.b = p.value("b", 0.45);
    c.probe.trials = p.value("trials", 100);
    c.probe.grid_points = p.value("grid_points", 128);
    c.probe.time_points = p.value("time_points", 96);
    if (p.contains("alphas")) c.probe.alphas = p.at("alphas").get<std::vector<int>>();
    if (p.contains("T_list")) c.probe.T_list = p.at("T_list").get<std::vector<double>>();
    c.probe.sc_paths = p.value("sc_paths", 200);
    c.probe.sc_moment_order = p.value("sc_moment_order", 1);
    c.probe.box_length = p.value("box_length", 32.0 * kPi);
  }
  if (j.contains("contraction")) {
    const auto& p = j.at("contraction");
    require_keys(p, {"pairs", "T_list", "R", "time_points", "b", "grid_points", "box_length"},
                 "contraction");
    c.contraction.pairs = p.value("pairs", 20);
    if (p.contains("T_list")) c.contraction.T_list = p.at("T_list").get<std::vector<double>>();
    c.contraction.R = p.value("R", 2.0);
    c.contraction.time_points = p.value("time_points", 129);
    c.contraction.b = p.value("b", 0.45);
    c.contraction.grid_points = p.value("grid_points", 128);
    c.contraction.box_length = p.value("box_length", 32.0 * kPi);
  }
  if (j.contains("counterexample")) {
    const auto& p = j.at("counterexample");
    require_keys(p, {"n_values", "r", "q", "time_points", "box_length", "grid_points"},
                 "counterexample");
    if (p.contains("n_values")) c.counterexample.n_values = p.at("n_values").get<std::vector<int>>();
    c.counterexample.r = p.value("r", 2.0);
    c.counterexample.q = p.value("q", 8.0);
    c.counterexample.time_points = p.value("time_points", 128);
    c.counterexample.box_length = p.value("box_length", 64.0);
    c.counterexample.grid_points = p.value("grid_points", 1024);
  }
  if (j.contains("hierarchy_study")) {
    const auto& p = j.at("hierarchy_study");
    require_keys(p, {"K_values", "n_values", "m_values", "paths"}, "hierarchy_study");
    if (p.contains("K_values"))
      c.hierarchy_study.K_values = p.at("K_values").get<std::vector<double>>();
    if (p.contains("n_values"))
      c.hierarchy_study.n_values = p.at("n_values").get<std::vector<double>>();
    if (p.contains("m_values"))
      c.hierarchy_study.m_values = p.at("m_values").get<std::vector<double>>();
    c.hierarchy_study.paths = p.value("paths", 4);
    if (c.hierarchy_study.paths < 1)
      throw std::invalid_argument("config: hierarchy_study paths must be >= 1");
  }

  bool needs_approx = c.hierarchy != Hierarchy::full || c.scenario == Scenario::conserve ||
                      c.scenario == Scenario::hierarchy;
  if (needs_approx && !c.approx)
    throw std::invalid_argument("config: this scenario/hierarchy requires an approx section");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  return parse_config(j);
}

} // namespace skdv

#endif
