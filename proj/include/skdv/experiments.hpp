#ifndef SKDV_EXPERIMENTS_HPP
#define SKDV_EXPERIMENTS_HPP

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skdv/config.hpp"
#include "skdv/diagnostics.hpp"
#include "skdv/parallel.hpp"
#include "skdv/picard.hpp"
#include "skdv/probes.hpp"
#include "skdv/quadrature.hpp"
#include "skdv/stats.hpp"

namespace skdv {

struct RunResult {
  json summary;
  bool pass = true;
};

namespace exp_detail {

struct NoiseOps {
  std::shared_ptr<const NoiseOperator> phi;
  std::shared_ptr<const NoiseOperator> psi;
};

inline NoiseOps build_noise(const ExperimentConfig& cfg) {
  NoiseOps ops;
  if (!cfg.noise.enabled) return ops;
  ops.phi = std::make_shared<const NoiseOperator>(cfg.noise.kernel1.build(cfg.grid),
                                                  cfg.noise.basis_size, "phi");
  ops.psi = std::make_shared<const NoiseOperator>(cfg.noise.kernel2.build(cfg.grid),
                                                  cfg.noise.basis_size, "psi");
  return ops;
}

inline StepperConfig stepper_config(const ExperimentConfig& cfg, const NoiseOps& ops) {
  StepperConfig sc;
  sc.params = cfg.system;
  sc.scheme = cfg.scheme;
  sc.hierarchy = cfg.hierarchy;
  sc.approx = cfg.approx;
  sc.phi = ops.phi;
  sc.psi = ops.psi;
  sc.bourgain_b = cfg.diagnostics.bourgain_b;
  sc.norm_cap = cfg.diagnostics.norm_cap;
  sc.track_norms = cfg.diagnostics.track_bourgain;
  return sc;
}

struct PathOutput {
  std::vector<DiagnosticsRow> rows;
  bool blown = false;
  std::vector<double> checkpoint_mass;
  std::vector<double> checkpoint_sup; // sup_{s<=t} ||(u,w)||_{H1 x H1}
};

inline DiagnosticsRow make_row(const Stepper& st, const ExperimentConfig& cfg,
                               std::uint64_t path_id, const TruncationFamily* fam) {
  const State& s = st.state();
  RealField w = st.physical_w(s);
  DiagnosticsRow r;
  r.path_id = path_id;
  r.t = s.t;
  r.mass = mass(s.u);
  r.momentum = momentum(s.u, w);
  r.energy = fam ? energy(s.u, w, *fam) : energy_uncut(s.u, w);
  r.u_h1 = sobolev_norm(s.u, 1.0);
  r.w_h1 = sobolev_norm(w, 1.0);
  r.w_hneg38 = sobolev_norm(w, 0.0, -0.375);
  const auto& tr = st.tracker();
  if (!tr.run_u.empty()) {
    r.run_xnorm_u = tr.run_u.back();
    r.run_ynorm_v = tr.run_v.back();
  }
  r.stopped_u = tr.sigma1.has_value();
  r.stopped_v = tr.sigma2.has_value();
  return r;
}

// One path of the configured system, rows at the diagnostics stride, running
// sup of the product-space H^1 norm sampled every step.
inline PathOutput run_path(const ExperimentConfig& cfg, const NoiseOps& ops,
                           std::uint64_t path_id) {
  PathOutput out;
  auto u0 = cfg.initial.build_u(cfg.grid);
  auto w0 = cfg.initial.build_w(cfg.grid);
  require_edge_decay(u0);
  require_edge_decay(w0);

  TruncationFamily fam;
  const TruncationFamily* fam_ptr = nullptr;
  if (cfg.hierarchy == Hierarchy::mnK) {
    fam = TruncationFamily(cfg.approx->K);
    fam_ptr = &fam;
  }

  Stepper st(cfg.grid, stepper_config(cfg, ops), u0, w0);
  const double dt = cfg.scheme.dt;
  const int n_steps = static_cast<int>(std::llround(cfg.scheme.T0 / dt));
  std::vector<int> checkpoint_steps;
  for (double t : cfg.ensemble.checkpoints)
    checkpoint_steps.push_back(static_cast<int>(std::llround(t / dt)));
  out.checkpoint_mass.assign(checkpoint_steps.size(), 0.0);
  out.checkpoint_sup.assign(checkpoint_steps.size(), 0.0);

  RngStream rng1(cfg.master_seed, path_id, 1);
  RngStream rng2(cfg.master_seed, path_id, 2);

  double running_sup = 0.0;
  auto note_state = [&](int step) {
    const State& s = st.state();
    RealField w = st.physical_w(s);
    double h1 = std::hypot(sobolev_norm(s.u, 1.0), sobolev_norm(w, 1.0));
    running_sup = std::max(running_sup, h1);
    for (std::size_t c = 0; c < checkpoint_steps.size(); ++c) {
      if (checkpoint_steps[c] == step) {
        out.checkpoint_mass[c] = mass(s.u);
        out.checkpoint_sup[c] = running_sup;
      }
    }
  };

  out.rows.push_back(make_row(st, cfg, path_id, fam_ptr));
  note_state(0);
  for (int i = 0; i < n_steps; ++i) {
    try {
      if (ops.phi) {
        auto i1 = sample_increment(rng1, dt, cfg.noise.basis_size, i, path_id);
        auto i2 = sample_increment(rng2, dt, cfg.noise.basis_size, i, path_id);
        st.advance(&i1, &i2);
      } else {
        st.advance(nullptr, nullptr);
      }
    } catch (const blow_up_error&) {
      out.blown = true;
      DiagnosticsRow r = out.rows.back();
      r.blowup = true;
      out.rows.push_back(r);
      break;
    }
    note_state(i + 1);
    if ((i + 1) % cfg.diagnostics.stride == 0 || i + 1 == n_steps)
      out.rows.push_back(make_row(st, cfg, path_id, fam_ptr));
  }
  return out;
}

inline void write_summary(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                          const json& verdicts, const json& extra, double runtime_s) {
  json s;
  s["scenario"] = scenario_name(cfg.scenario);
  s["master_seed"] = cfg.master_seed;
  s["config"] = cfg.raw;
  s["verdicts"] = verdicts;
  s["results"] = extra;
  s["runtime_seconds"] = runtime_s;
  std::ofstream out(dir / "summary.json");
  out << s.dump(2) << "\n";
}

inline bool all_true(const json& verdicts) {
  for (auto it = verdicts.begin(); it != verdicts.end(); ++it)
    if (it.value().is_boolean() && !it.value().get<bool>()) return false;
  return true;
}

// ---- scenario: simulate ---------------------------------------------------

inline RunResult run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  NoiseOps ops = build_noise(cfg);
  auto out = run_path(cfg, ops, 0);
  CsvWriter csv(dir / "diagnostics.csv", diagnostics_header());
  for (const auto& r : out.rows) csv.line(to_csv(r));
  json verdicts;
  verdicts["completed_without_blowup"] = !out.blown;
  json extra;
  extra["steps"] = static_cast<int>(std::llround(cfg.scheme.T0 / cfg.scheme.dt));
  extra["rows"] = out.rows.size();
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: ensemble ---------------------------------------------------

struct EnsembleMoments {
  std::vector<double> times;
  // per moment order l: estimates and standard errors across checkpoints
  std::map<int, MomentSeries> series;
  std::vector<double> mass_mean, mass_se, mass_oracle;
  int blown = 0;
  int paths = 0;
};

inline EnsembleMoments ensemble_statistics(const ExperimentConfig& cfg, const NoiseOps& ops,
                                           const std::vector<PathOutput>& outs) {
  EnsembleMoments em;
  em.times = cfg.ensemble.checkpoints;
  em.paths = static_cast<int>(outs.size());
  for (const auto& o : outs)
    if (o.blown) ++em.blown;

  const std::size_t nc = em.times.size();
  for (int l = 1; l <= cfg.ensemble.moment_order; ++l) {
    MomentSeries ms;
    ms.times = em.times;
    ms.moment_order = l;
    ms.ensemble_size = em.paths - em.blown;
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<double> samples;
      for (const auto& o : outs)
        if (!o.blown) samples.push_back(std::pow(o.checkpoint_sup[c], 2.0 * l));
      double nan = std::numeric_limits<double>::quiet_NaN();
      ms.estimates.push_back(samples.empty() ? nan : mean(samples));
      ms.std_errors.push_back(samples.size() > 1 ? standard_error(samples) : nan);
    }
    em.series[l] = std::move(ms);
  }

  // mean-mass law against the Ito oracle (alpha = 1, F = u)
  if (ops.phi && cfg.system.alpha == 1 && cfg.system.f_choice == FChoice::u) {
    bool projected = cfg.hierarchy == Hierarchy::mn || cfg.hierarchy == Hierarchy::mnK ||
                     cfg.hierarchy == Hierarchy::m_only;
    NoiseOperator eff = projected ? ops.phi->projected(cfg.approx->m) : *ops.phi;
    RealField D = diffusion_intensity(eff);
    auto u0 = cfg.initial.build_u(cfg.grid);
    if (projected) u0 = project_low(u0, cfg.approx->m);
    if (cfg.scheme.dealias) u0 = dealias(u0);
    double m0 = mass(u0);
    em.mass_oracle = mass_drift_oracle(m0, D, em.times);
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<double> samples;
      for (const auto& o : outs)
        if (!o.blown) samples.push_back(o.checkpoint_mass[c]);
      double nan = std::numeric_limits<double>::quiet_NaN();
      em.mass_mean.push_back(samples.empty() ? nan : mean(samples));
      em.mass_se.push_back(samples.size() > 1 ? standard_error(samples) : nan);
    }
  }
  return em;
}

inline RunResult run_ensemble(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  NoiseOps ops = build_noise(cfg);
  const int M = cfg.ensemble.paths;
  std::vector<PathOutput> outs(M);
  parallel_for(M, cfg.threads, [&](int p) { outs[p] = run_path(cfg, ops, p); });

  CsvWriter csv(dir / "diagnostics.csv", diagnostics_header());
  for (const auto& o : outs)
    for (const auto& r : o.rows) csv.line(to_csv(r));

  EnsembleMoments em = ensemble_statistics(cfg, ops, outs);

  CsvWriter mcsv(dir / "moments.csv", "l,t,estimate,stderr,paths");
  for (const auto& [l, ms] : em.series)
    for (std::size_t c = 0; c < ms.times.size(); ++c)
      mcsv.row(l, ms.times[c], ms.estimates[c], ms.std_errors[c], ms.ensemble_size);

  json verdicts;
  verdicts["blowup_fraction_le_10pct"] = em.blown <= M / 10;
  json extra;
  extra["paths"] = M;
  extra["blown"] = em.blown;

  if (!em.mass_oracle.empty()) {
    CsvWriter dcsv(dir / "massdrift.csv", "t,mc_mean,mc_stderr,oracle,z");
    bool within = true;
    json zs = json::array();
    for (std::size_t c = 0; c < em.times.size(); ++c) {
      double z = em.mass_se[c] > 0.0 ? (em.mass_mean[c] - em.mass_oracle[c]) / em.mass_se[c]
                                     : std::numeric_limits<double>::quiet_NaN();
      dcsv.row(em.times[c], em.mass_mean[c], em.mass_se[c], em.mass_oracle[c], z);
      zs.push_back(z);
      if (!(std::abs(z) <= 3.0)) within = false;
    }
    verdicts["mass_within_3_stderr_of_oracle"] = within;
    extra["mass_z_scores"] = zs;
  }
  bool finite = true;
  for (const auto& [l, ms] : em.series)
    for (double v : ms.estimates)
      if (!std::isfinite(v)) finite = false;
  verdicts["moment_curves_finite"] = finite;
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: conserve ---------------------------------------------------

inline RunResult run_conserve(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  if (cfg.noise.enabled) throw std::invalid_argument("conserve scenario is noise-off");
  if (cfg.hierarchy != Hierarchy::mnK)
    throw std::invalid_argument("conserve scenario runs the mnK hierarchy");
  NoiseOps ops; // none
  TruncationFamily fam(cfg.approx->K);

  struct RunOut {
    double dt;
    double drift_mass, drift_momentum, drift_energy;
    State final_state;
  };
  std::vector<RunOut> runs;
  for (double dt : {cfg.scheme.dt, cfg.scheme.dt / 2.0, cfg.scheme.dt / 4.0}) {
    ExperimentConfig c = cfg;
    c.scheme.dt = dt;
    auto u0 = c.initial.build_u(c.grid);
    auto w0 = c.initial.build_w(c.grid);
    require_edge_decay(u0);
    require_edge_decay(w0);
    Stepper st(c.grid, stepper_config(c, ops), u0, w0);
    double m0 = mass(st.state().u);
    double i0 = momentum(st.state().u, st.state().w);
    double e0 = energy(st.state().u, st.state().w, fam);
    int n_steps = static_cast<int>(std::llround(c.scheme.T0 / dt));
    RunOut ro{dt, 0.0, 0.0, 0.0, {}};
    for (int i = 0; i < n_steps; ++i) {
      st.advance(nullptr, nullptr);
      if ((i + 1) % cfg.diagnostics.stride == 0 || i + 1 == n_steps) {
        const State& s = st.state();
        ro.drift_mass = std::max(ro.drift_mass, std::abs(mass(s.u) - m0) / (1.0 + std::abs(m0)));
        ro.drift_momentum = std::max(
            ro.drift_momentum, std::abs(momentum(s.u, s.w) - i0) / (1.0 + std::abs(i0)));
        ro.drift_energy = std::max(
            ro.drift_energy, std::abs(energy(s.u, s.w, fam) - e0) / (1.0 + std::abs(e0)));
      }
    }
    ro.final_state = st.state();
    require_edge_decay(ro.final_state.u, 1e-6);
    runs.push_back(std::move(ro));
  }

  CsvWriter csv(dir / "conserve.csv", "dt,drift_mass,drift_momentum,drift_energy");
  for (const auto& r : runs) csv.row(r.dt, r.drift_mass, r.drift_momentum, r.drift_energy);

  double e1 = l2_distance(runs[0].final_state.u, runs[1].final_state.u) +
              l2_distance(runs[0].final_state.w, runs[1].final_state.w);
  double e2 = l2_distance(runs[1].final_state.u, runs[2].final_state.u) +
              l2_distance(runs[1].final_state.w, runs[2].final_state.w);
  double order = std::log2(e1 / e2);

  const auto& fine = runs.back();
  json verdicts;
  verdicts["mass_drift_below_1e6"] = fine.drift_mass < 1e-6;
  verdicts["momentum_drift_below_1e6"] = fine.drift_momentum < 1e-6;
  verdicts["energy_drift_below_1e6"] = fine.drift_energy < 1e-6;
  verdicts["richardson_order_ge_2"] = order >= 1.95; // 0.05 measurement guard
  json extra;
  extra["richardson_order"] = order;
  extra["drifts_finest"] = {fine.drift_mass, fine.drift_momentum, fine.drift_energy};
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: probe ------------------------------------------------------

inline json probe_report_json(const ProbeReport& r) {
  return json{{"lemma", r.lemma_id},
              {"a", r.a},
              {"b", r.b},
              {"trials", r.trials},
              {"max_ratio_coarse", r.max_ratio_coarse},
              {"max_ratio_refined", r.max_ratio_refined},
              {"stable", r.stable}};
}

inline void write_probe_json(const std::filesystem::path& dir, const std::string& name,
                             const json& j) {
  std::ofstream out(dir / ("probe_" + name + ".json"));
  out << j.dump(2) << "\n";
}

// Monte Carlo probe of the stochastic-convolution moment bound: the ratio
// E||int_0^t S(t-r) F(u)^alpha Phi dW||^{2l}_{X^T_{b,1}} over
// ||k1||^{2l}_{H^1} ||u^alpha||^{2l}_{X^T_{0,1}} for a frozen free-wave path.
struct StochasticConvolutionReport {
  double ratio_full = 0.0;
  double ratio_half = 0.0;
  double moment_full = 0.0;
  double moment_half = 0.0;
  int paths = 0;
  double b = 0.0;
  int moment_order = 1;

  bool stable() const {
    if (!(std::isfinite(ratio_full) && ratio_full > 0.0)) return false;
    return std::abs(ratio_full - ratio_half) <= 0.25 * ratio_full;
  }
};

inline StochasticConvolutionReport run_stochastic_convolution_probe(const ExperimentConfig& cfg) {
  const auto& ps = cfg.probe;
  Grid1D g(ps.box_length, ps.grid_points);
  const int n_t = ps.time_points | 1; // odd, so midpoint refinement nests
  const double T = 0.5;
  const double dt = T / (n_t - 1);

  auto u0 = sample_complex(g, [](double x) { return 0.9 * std::exp(-x * x / 4.0); });
  SpaceTimeField u(g, n_t, dt);
  for (int i = 0; i < n_t; ++i) u.set_slice(i, schrodinger_propagate(u0, u.t(i)));
  SpaceTimeField upow = pointwise_power(u, cfg.system.alpha);

  auto k1 = cfg.noise.kernel1.build(g);
  NoiseOperator phi(k1, std::min(cfg.noise.basis_size, g.points - 2), "phi");

  const int l = ps.sc_moment_order;
  BourgainWeight wb = BourgainWeight::X(ps.b, 1.0);
  BourgainWeight w0 = BourgainWeight::X(0.0, 1.0);
  double den = std::pow(sobolev_norm(k1, 1.0), 2.0 * l) *
               std::pow(restricted_norm(upow, T, w0), 2.0 * l);

  std::vector<std::vector<cplx>> mode_spec(n_t - 1);
  std::vector<double> vals(ps.sc_paths);
  parallel_for(ps.sc_paths, cfg.threads, [&](int path) {
    auto np = make_noise_path(cfg.master_seed, path, n_t - 1, dt, phi.basis_size);
    std::vector<std::vector<cplx>> gs(n_t - 1);
    for (int i = 0; i + 1 < n_t; ++i) {
      auto ui = u.slice(i);
      auto gi = noise_term_schrodinger(ui, phi, np.w1[i], cfg.system.alpha, cfg.system.f_choice);
      gs[i] = to_spectrum(gi);
    }
    auto Z = picard_detail::ito_sum(g, n_t, dt, gs, picard_detail::schrodinger_phase);
    vals[path] = std::pow(restricted_norm(Z, T, wb), 2.0 * l);
  });

  StochasticConvolutionReport rep;
  rep.paths = ps.sc_paths;
  rep.b = ps.b;
  rep.moment_order = l;
  rep.moment_full = mean(vals);
  rep.moment_half = mean(std::span<const double>(vals).subspan(0, std::max(1, ps.sc_paths / 2)));
  rep.ratio_full = den > 0.0 ? rep.moment_full / den : std::numeric_limits<double>::infinity();
  rep.ratio_half = den > 0.0 ? rep.moment_half / den : std::numeric_limits<double>::infinity();
  return rep;
}

inline RunResult run_probes(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto& ps = cfg.probe;
  json verdicts;
  json extra;
  for (const std::string& lemma : ps.lemmas) {
    if (lemma == "basic") {
      double spot = probe_basic_inequality(0.375, 0.375, 0.0, 0.0);
      json ratios = json::array();
      double worst = 0.0;
      for (double d : {0.0, 10.0, 100.0, 1000.0}) {
        double r = probe_basic_inequality(ps.a, ps.b, 0.0, d);
        ratios.push_back({{"separation", d}, {"ratio", r}});
        worst = std::max(worst, r);
      }
      json j{{"lemma", "basic_inequality"},
             {"spot_value_at_3_8", spot},
             {"ratios", ratios},
             {"max_ratio", worst}};
      write_probe_json(dir, "basic", j);
      verdicts["basic_spot_value"] = std::abs(spot - 4.0) <= 1e-6;
      verdicts["basic_bounded"] = std::isfinite(worst);
      extra["basic"] = j;
    } else if (lemma == "bilinear_schrodinger") {
      auto rep = probe_bilinear_schrodinger(ps.a, ps.b, ps.trials, cfg.master_seed,
                                            ps.box_length, ps.grid_points, ps.time_points);
      write_probe_json(dir, rep.lemma_id, probe_report_json(rep));
      verdicts["bilinear_schrodinger_stable"] = rep.stable;
      extra[rep.lemma_id] = probe_report_json(rep);
    } else if (lemma == "trilinear") {
      auto rep = probe_trilinear(ps.a, ps.b, ps.trials, cfg.master_seed, ps.box_length,
                                 ps.grid_points, ps.time_points);
      write_probe_json(dir, rep.lemma_id, probe_report_json(rep));
      verdicts["trilinear_stable"] = rep.stable;
      extra[rep.lemma_id] = probe_report_json(rep);
    } else if (lemma == "bilinear_kdv") {
      for (bool weighted : {false, true}) {
        auto rep = probe_bilinear_kdv(ps.a, ps.b, weighted, ps.trials, cfg.master_seed,
                                      ps.box_length, ps.grid_points, ps.time_points);
        write_probe_json(dir, rep.lemma_id, probe_report_json(rep));
        verdicts[rep.lemma_id + "_stable"] = rep.stable;
        extra[rep.lemma_id] = probe_report_json(rep);
      }
    } else if (lemma == "power") {
      for (int alpha : ps.alphas) {
        auto rep = probe_power(alpha, ps.b, ps.trials, cfg.master_seed, ps.box_length,
                               ps.grid_points, ps.time_points);
        write_probe_json(dir, rep.lemma_id, probe_report_json(rep));
        verdicts[rep.lemma_id + "_stable"] = rep.stable;
        extra[rep.lemma_id] = probe_report_json(rep);
      }
    } else if (lemma == "duhamel") {
      auto rep = probe_duhamel_gain(ps.a, ps.b, ps.T_list, ps.trials, cfg.master_seed,
                                    ps.box_length, ps.grid_points);
      json j{{"lemma", "duhamel_gain"},       {"a", rep.a},
             {"b", rep.b},                    {"trials", rep.trials},
             {"T_values", rep.T_values},      {"mean_gain", rep.mean_gain},
             {"mean_slope", rep.mean_slope},  {"target_slope", 1.0 - ps.a - ps.b}};
      write_probe_json(dir, "duhamel_gain", j);
      verdicts["duhamel_slope_within_band"] =
          std::abs(rep.mean_slope - (1.0 - ps.a - ps.b)) <= 0.25;
      extra["duhamel_gain"] = j;
    } else if (lemma == "stochastic_convolution") {
      auto rep = run_stochastic_convolution_probe(cfg);
      json j{{"lemma", "stochastic_convolution"},
             {"paths", rep.paths},
             {"moment_order", rep.moment_order},
             {"b", rep.b},
             {"moment_full", rep.moment_full},
             {"moment_half", rep.moment_half},
             {"ratio_full", rep.ratio_full},
             {"ratio_half", rep.ratio_half},
             {"stable", rep.stable()}};
      write_probe_json(dir, "stochastic_convolution", j);
      verdicts["stochastic_convolution_stable"] = rep.stable();
      extra["stochastic_convolution"] = j;
    } else {
      throw std::invalid_argument("unknown probe lemma: " + lemma);
    }
  }
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: contraction ------------------------------------------------

// Stationary random carriers normalized to a target restricted norm. Kept
// gentle in modulation so the trapezoid consistency check has margin.
inline PicardPair contraction_pair(RngStream& rng, const Grid1D& g, double T, int n_t,
                                   double target, double b) {
  ProbeFieldSpec su, sv;
  su.T = sv.T = T;
  su.taper = sv.taper = false;
  const int band = g.points / 6;
  for (int m = 0; m < 8; ++m) {
    ProbeMode pm;
    pm.j = static_cast<int>(rng.uniform01() * (2 * band + 1)) - band;
    double xi = 2.0 * kPi * pm.j / g.length;
    pm.amp = cplx(rng.normal(), rng.normal()) * std::pow(1.0 + std::abs(xi), -1.5);
    pm.omega = -xi * xi + 6.0 * std::tan(1.2 * (rng.uniform01() - 0.5));
    pm.t_center = 0.5 * T;
    pm.t_width = 1e9; // flat envelope; the sharp cut is the restriction
    su.modes.push_back(pm);
    ProbeMode qm = pm;
    qm.j = static_cast<int>(rng.uniform01() * (2 * band + 1)) - band;
    double xi2 = 2.0 * kPi * qm.j / g.length;
    qm.amp = cplx(rng.normal(), rng.normal()) * std::pow(1.0 + std::abs(xi2), -1.5);
    qm.omega = xi2 * xi2 * xi2 + 6.0 * std::tan(1.2 * (rng.uniform01() - 0.5));
    sv.modes.push_back(qm);
    ProbeMode cc = qm;
    cc.j = -qm.j;
    cc.amp = std::conj(qm.amp);
    cc.omega = -qm.omega;
    sv.modes.push_back(cc);
  }
  PicardPair p{evaluate_probe(su, g, n_t), evaluate_probe(sv, g, n_t)};
  BourgainWeight wx = BourgainWeight::X(b, 1.0);
  double nu = restricted_norm(p.u, T, wx);
  double nv = tilde_y_norm(p.v, T, b, 1.0);
  double s = target / std::max(1e-12, std::hypot(nu, nv));
  for (auto& z : p.u.values) z *= s;
  for (auto& z : p.v.values) z *= s;
  return p;
}

inline RunResult run_contraction(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto& cs = cfg.contraction;
  Grid1D g(cs.box_length, cs.grid_points);
  auto u0 = sample_complex(g, [](double x) { return 0.8 * std::exp(-x * x / 4.0); });
  auto w0 = sample_real(g, [](double x) { return 0.7 * std::exp(-x * x / 4.0); });
  std::shared_ptr<const NoiseOperator> phi, psi;
  if (cfg.noise.enabled) {
    int nb = std::min(cfg.noise.basis_size, g.points - 2);
    phi = std::make_shared<const NoiseOperator>(cfg.noise.kernel1.build(g), nb, "phi");
    psi = std::make_shared<const NoiseOperator>(cfg.noise.kernel2.build(g), nb, "psi");
  }

  CsvWriter csv(dir / "contraction.csv", "T,pair,factor");
  std::vector<double> max_factor(cs.T_list.size(), 0.0);
  std::vector<std::vector<double>> factors(cs.T_list.size(),
                                           std::vector<double>(cs.pairs, 0.0));
  for (std::size_t ti = 0; ti < cs.T_list.size(); ++ti) {
    double T = cs.T_list[ti];
    int n_t = cs.time_points;
    parallel_for(cs.pairs, cfg.threads, [&](int pair) {
      RngStream rng(cfg.master_seed, pair, 9);
      auto p1 = contraction_pair(rng, g, T, n_t, 0.5 * cs.R + 0.75 * cs.R * rng.uniform01(), cs.b);
      auto p2 = contraction_pair(rng, g, T, n_t, 0.5 * cs.R + 0.75 * cs.R * rng.uniform01(), cs.b);
      PicardContext ctx{u0, w0, cs.R, cfg.system, phi, psi, cs.b, true, 4};
      NoisePath path;
      if (phi)
        path = make_noise_path(cfg.master_seed + 1, pair, n_t - 1, T / (n_t - 1),
                               phi->basis_size);
      factors[ti][pair] = contraction_factor(p1, p2, ctx, phi ? &path : nullptr);
    });
    for (int pair = 0; pair < cs.pairs; ++pair) {
      csv.row(T, pair, factors[ti][pair]);
      max_factor[ti] = std::max(max_factor[ti], factors[ti][pair]);
    }
  }

  json verdicts;
  // smallest-T column must contract for every pair
  double worst_small_T = 0.0;
  std::size_t smallest = 0;
  for (std::size_t ti = 1; ti < cs.T_list.size(); ++ti)
    if (cs.T_list[ti] < cs.T_list[smallest]) smallest = ti;
  for (double f : factors[smallest]) worst_small_T = std::max(worst_small_T, f);
  verdicts["contracts_at_smallest_T"] = worst_small_T < 1.0;
  bool monotone = true;
  for (std::size_t ti = 0; ti + 1 < cs.T_list.size(); ++ti) {
    if (!(cs.T_list[ti] > cs.T_list[ti + 1]))
      throw std::invalid_argument("contraction T_list must be strictly decreasing");
    if (max_factor[ti + 1] > max_factor[ti]) monotone = false;
  }
  verdicts["factor_monotone_in_T"] = monotone;
  json extra;
  extra["max_factor_per_T"] = max_factor;
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: counterexample ----------------------------------------------

inline RunResult run_counterexample(const ExperimentConfig& cfg,
                                    const std::filesystem::path& dir) {
  const auto& cs = cfg.counterexample;
  Grid1D g(cs.box_length, cs.grid_points);
  CsvWriter csv(dir / "counterexample.csv", "n,sup_h1,mixed_norm");
  std::vector<double> ns, mixed;
  double h1_first = 0.0, h1_dev = 0.0;
  for (int n : cs.n_values) {
    auto r = counterexample_norms(n, cs.r, cs.q, g, cs.time_points);
    csv.row(n, r.sup_h1, r.mixed);
    if (ns.empty()) h1_first = r.sup_h1;
    h1_dev = std::max(h1_dev, std::abs(r.sup_h1 - h1_first) / h1_first);
    ns.push_back(n);
    mixed.push_back(r.mixed);
  }
  double slope = loglog_slope(ns, mixed);
  double target = 1.0 / cs.r - 1.0 / cs.q;
  json verdicts;
  verdicts["sup_h1_constant_in_n"] = h1_dev <= 1e-10;
  verdicts["mixed_norm_slope_matches"] = std::abs(slope - target) <= 0.05;
  json extra;
  extra["slope"] = slope;
  extra["target_slope"] = target;
  extra["h1_relative_deviation"] = h1_dev;
  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

// ---- scenario: hierarchy ----------------------------------------------------

// Pathwise self-convergence across one parameter sweep: all variants step
// with the same Brownian increments, and the running sup of the squared
// product H^1 distance between consecutive variants is averaged over paths.
inline std::vector<double> hierarchy_sweep(const ExperimentConfig& cfg, const NoiseOps& ops,
                                           char vary, const std::vector<double>& values) {
  const int n_var = static_cast<int>(values.size());
  std::vector<double> diffs(std::max(0, n_var - 1), 0.0);
  const double dt = cfg.scheme.dt;
  const int n_steps = static_cast<int>(std::llround(cfg.scheme.T0 / dt));
  auto u0 = cfg.initial.build_u(cfg.grid);
  auto w0 = cfg.initial.build_w(cfg.grid);

  std::vector<std::vector<double>> path_diffs(cfg.hierarchy_study.paths,
                                              std::vector<double>(diffs.size(), 0.0));
  parallel_for(cfg.hierarchy_study.paths, cfg.threads, [&](int path) {
    std::vector<std::unique_ptr<Stepper>> steppers;
    for (double v : values) {
      ExperimentConfig c = cfg;
      ApproxParams ap = *cfg.approx;
      if (vary == 'K') ap.K = v;
      if (vary == 'n') ap.n = std::max(v, ap.m);
      if (vary == 'm') { ap.m = v; ap.n = std::max(ap.n, v); }
      c.approx = ap;
      StepperConfig sc = stepper_config(c, ops);
      steppers.push_back(std::make_unique<Stepper>(cfg.grid, sc, u0, w0));
    }
    RngStream rng1(cfg.master_seed, path, 1);
    RngStream rng2(cfg.master_seed, path, 2);
    for (int i = 0; i < n_steps; ++i) {
      WienerIncrement i1, i2;
      if (ops.phi) {
        i1 = sample_increment(rng1, dt, cfg.noise.basis_size, i, path);
        i2 = sample_increment(rng2, dt, cfg.noise.basis_size, i, path);
      }
      for (auto& st : steppers) st->advance(ops.phi ? &i1 : nullptr, ops.phi ? &i2 : nullptr);
      if ((i + 1) % cfg.diagnostics.stride == 0 || i + 1 == n_steps) {
        for (int v = 0; v + 1 < n_var; ++v) {
          const State& a = steppers[v]->state();
          const State& b = steppers[v + 1]->state();
          ComplexField du = a.u;
          for (int j = 0; j < du.size(); ++j) du[j] -= b.u[j];
          RealField dw = a.w;
          for (int j = 0; j < dw.size(); ++j) dw[j] -= b.w[j];
          double d2 = std::pow(sobolev_norm(du, 1.0), 2) + std::pow(sobolev_norm(dw, 1.0), 2);
          path_diffs[path][v] = std::max(path_diffs[path][v], d2);
        }
      }
    }
  });
  for (std::size_t v = 0; v < diffs.size(); ++v) {
    for (int p = 0; p < cfg.hierarchy_study.paths; ++p) diffs[v] += path_diffs[p][v];
    diffs[v] /= cfg.hierarchy_study.paths;
  }
  return diffs;
}

// One-path comparison of the mnK and mn steppers under a common noise path
// with every cutoff inactive; they must coincide to rounding.
inline double hierarchy_inactive_identity(const ExperimentConfig& cfg, const NoiseOps& ops) {
  ApproxParams ap = *cfg.approx;
  ap.K = 1e9;
  ap.m = cfg.grid.xi_max() * 1.1;
  ap.n = cfg.grid.xi_max() * 1.2;
  ExperimentConfig ck = cfg;
  ck.approx = ap;
  ck.hierarchy = Hierarchy::mnK;
  ExperimentConfig cn = cfg;
  cn.approx = ap;
  cn.hierarchy = Hierarchy::mn;
  auto u0 = cfg.initial.build_u(cfg.grid);
  auto w0 = cfg.initial.build_w(cfg.grid);
  Stepper sk(cfg.grid, stepper_config(ck, ops), u0, w0);
  Stepper sn(cfg.grid, stepper_config(cn, ops), u0, w0);
  const double dt = cfg.scheme.dt;
  const int n_steps = std::min(200, static_cast<int>(std::llround(cfg.scheme.T0 / dt)));
  RngStream a1(cfg.master_seed, 0, 1), a2(cfg.master_seed, 0, 2);
  RngStream b1(cfg.master_seed, 0, 1), b2(cfg.master_seed, 0, 2);
  double worst = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    if (ops.phi) {
      auto i1 = sample_increment(a1, dt, cfg.noise.basis_size, i, 0);
      auto i2 = sample_increment(a2, dt, cfg.noise.basis_size, i, 0);
      sk.advance(&i1, &i2);
      auto j1 = sample_increment(b1, dt, cfg.noise.basis_size, i, 0);
      auto j2 = sample_increment(b2, dt, cfg.noise.basis_size, i, 0);
      sn.advance(&j1, &j2);
    } else {
      sk.advance(nullptr, nullptr);
      sn.advance(nullptr, nullptr);
    }
    worst = std::max(worst, l2_distance(sk.state().u, sn.state().u));
    worst = std::max(worst, l2_distance(sk.state().w, sn.state().w));
  }
  return worst;
}

inline RunResult run_hierarchy(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  NoiseOps ops = build_noise(cfg);
  const auto& hs = cfg.hierarchy_study;
  ExperimentConfig base = cfg;
  base.hierarchy = Hierarchy::mnK;

  CsvWriter csv(dir / "hierarchy.csv", "vary,lower,upper,mean_sup_sq_h1_diff");
  json verdicts, extra;
  auto run_sweep = [&](char vary, const std::vector<double>& values, const char* name) {
    if (values.size() < 2) return;
    auto diffs = hierarchy_sweep(base, ops, vary, values);
    bool nonincreasing = true;
    json darr = json::array();
    for (std::size_t v = 0; v < diffs.size(); ++v) {
      csv.row(std::string(1, vary), values[v], values[v + 1], diffs[v]);
      darr.push_back(diffs[v]);
      if (v > 0 && diffs[v] > diffs[v - 1] * (1.0 + 1e-12) + 1e-18) nonincreasing = false;
    }
    verdicts[std::string(name) + "_diffs_nonincreasing"] = nonincreasing;
    extra[std::string(name) + "_diffs"] = darr;
  };
  run_sweep('K', hs.K_values, "K");
  run_sweep('n', hs.n_values, "n");
  run_sweep('m', hs.m_values, "m");

  double ident = hierarchy_inactive_identity(base, ops);
  verdicts["inactive_cutoff_identity"] = ident <= 1e-12;
  extra["inactive_identity_sup_l2_diff"] = ident;

  return {json{{"verdicts", verdicts}, {"extra", extra}}, all_true(verdicts)};
}

} // namespace exp_detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  switch (cfg.scenario) {
    case Scenario::simulate: r = exp_detail::run_simulate(cfg, dir); break;
    case Scenario::ensemble: r = exp_detail::run_ensemble(cfg, dir); break;
    case Scenario::conserve: r = exp_detail::run_conserve(cfg, dir); break;
    case Scenario::probe: r = exp_detail::run_probes(cfg, dir); break;
    case Scenario::contraction: r = exp_detail::run_contraction(cfg, dir); break;
    case Scenario::counterexample: r = exp_detail::run_counterexample(cfg, dir); break;
    case Scenario::hierarchy: r = exp_detail::run_hierarchy(cfg, dir); break;
  }
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  exp_detail::write_summary(dir, cfg, r.summary.value("verdicts", json::object()),
                            r.summary.value("extra", json::object()), secs);
  return r;
}

} // namespace skdv

#endif
