#ifndef SKDV_DYNAMICS_HPP
#define SKDV_DYNAMICS_HPP

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skdv/bourgain.hpp"
#include "skdv/cutoffs.hpp"
#include "skdv/noise.hpp"
#include "skdv/spectral.hpp"

namespace skdv {

struct SystemParams {
  int alpha = 1;
  double beta = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  FChoice f_choice = FChoice::u;

  void validate() const {
    if (alpha < 1) throw std::invalid_argument("SystemParams: alpha must be a positive integer");
    if (!(gamma1 * gamma2 > 0.0))
      throw std::invalid_argument("SystemParams: gamma1*gamma2 must be positive");
  }
};

struct ApproxParams {
  double m = 0.0; // noise / initial-data frequency cutoff
  double n = 0.0; // nonlinearity frequency cutoff
  double K = 0.0; // physical truncation level
  double R = 0.0; // localization radius

  void validate() const {
    if (!(m > 0.0 && n > 0.0 && K > 0.0 && R > 0.0))
      throw std::invalid_argument("ApproxParams: all cutoffs must be positive");
    if (n < m) throw std::invalid_argument("ApproxParams: requires n >= m");
  }
};

struct State {
  ComplexField u;
  RealField w; // the evolved real component: w itself, or v in shifted forms
  double t = 0.0;
};

enum class Scheme { exp_euler_maruyama, strang_rk4 };

struct SchemeConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::exp_euler_maruyama;
  double T0 = 1.0;
  bool dealias = true;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be positive");
    if (!(T0 >= dt)) throw std::invalid_argument("SchemeConfig: horizon shorter than one step");
  }
};

enum class Hierarchy { full, localized, mnK, mn, m_only };

inline Hierarchy parse_hierarchy(const std::string& s) {
  if (s == "full") return Hierarchy::full;
  if (s == "localized") return Hierarchy::localized;
  if (s == "mnK") return Hierarchy::mnK;
  if (s == "mn") return Hierarchy::mn;
  if (s == "m") return Hierarchy::m_only;
  throw std::invalid_argument("unknown hierarchy: " + s);
}

struct blow_up_error : std::runtime_error {
  State last_state;
  blow_up_error(std::string msg, State s)
      : std::runtime_error(std::move(msg)), last_state(std::move(s)) {}
};

// ---- drifts --------------------------------------------------------------

inline ComplexField drift_schrodinger(const ComplexField& u, const RealField& w,
                                      const SystemParams& p, bool dealias_products = true) {
  require_same_grid(u.grid, w.grid);
  ComplexField out(u.grid);
  const cplx mi(0.0, -1.0);
  for (int j = 0; j < u.size(); ++j)
    out[j] = mi * (p.gamma1 * u[j] * w[j] + p.beta * std::norm(u[j]) * u[j]);
  return dealias_products ? dealias(out) : out;
}

// gamma2 d_x(|u|^2) - w d_x w, assembled in conservative form so the
// integral over the torus vanishes identically.
inline RealField drift_kdv(const ComplexField& u, const RealField& w, const SystemParams& p,
                           bool dealias_products = true,
                           std::optional<double> project_n = std::nullopt) {
  require_same_grid(u.grid, w.grid);
  const Grid1D& g = u.grid;
  RealField a(g), b(g);
  for (int j = 0; j < g.points; ++j) {
    a[j] = std::norm(u[j]);
    b[j] = w[j] * w[j];
  }
  auto as = to_spectrum(a);
  auto bs = to_spectrum(b);
  for (int k = 0; k < g.points; ++k) {
    double xi = g.xi(k);
    as[k] = cplx(0.0, xi) * (p.gamma2 * as[k] - 0.5 * bs[k]);
  }
  if (project_n) project_low_spectrum(g, as, *project_n);
  if (dealias_products) dealias_spectrum(g, as);
  return real_field_from_spectrum(g, std::move(as));
}

// Drift pair of the physically and spectrally truncated system:
// u: -i gamma1 psi_K(|u|^2) u w - i beta |u|^2 u phi_K(|u|^2)
// w: P_n d_x(gamma2 phi_K(|u|^2)|u|^2 - phi_K(w) w^2 / 2)
inline std::pair<ComplexField, RealField> drift_approx(const ComplexField& u, const RealField& w,
                                                       const SystemParams& p,
                                                       const ApproxParams& ap,
                                                       const TruncationFamily& fam,
                                                       bool dealias_products = true) {
  require_same_grid(u.grid, w.grid);
  ap.validate();
  const Grid1D& g = u.grid;
  ComplexField fu(g);
  RealField g1(g), g2(g);
  const cplx mi(0.0, -1.0);
  for (int j = 0; j < g.points; ++j) {
    double a2 = std::norm(u[j]);
    fu[j] = mi * (p.gamma1 * fam.psi(a2) * u[j] * w[j] +
                  p.beta * a2 * u[j] * fam.phi(a2));
    g1[j] = fam.phi(a2) * a2;
    g2[j] = fam.phi(w[j]) * w[j] * w[j];
  }
  if (dealias_products) fu = dealias(fu);
  auto s1 = to_spectrum(g1);
  auto s2 = to_spectrum(g2);
  for (int k = 0; k < g.points; ++k) {
    double xi = g.xi(k);
    s1[k] = cplx(0.0, xi) * (p.gamma2 * s1[k] - 0.5 * s2[k]);
  }
  project_low_spectrum(g, s1, ap.n);
  if (dealias_products) dealias_spectrum(g, s1);
  return {std::move(fu), real_field_from_spectrum(g, std::move(s1))};
}

// ---- stopping-time tracking ----------------------------------------------

// Per-step samples of the running restricted norms, monotonized by running
// max, with first-crossing times of the localization radius.
struct StoppingTracker {
  double R = std::numeric_limits<double>::infinity();
  double b = 0.45;
  std::vector<double> times;
  std::vector<double> run_u; // ||u||_{X^t_{b,1}} samples
  std::vector<double> run_v; // ||v||_{Y~^t_{b,1}} samples
  std::optional<double> sigma1;
  std::optional<double> sigma2;

  void update(double t, double norm_u, double norm_v) {
    if (!run_u.empty()) {
      norm_u = std::max(norm_u, run_u.back());
      norm_v = std::max(norm_v, run_v.back());
    }
    times.push_back(t);
    run_u.push_back(norm_u);
    run_v.push_back(norm_v);
    if (!sigma1 && norm_u >= R) sigma1 = t;
    if (!sigma2 && norm_v >= R) sigma2 = t;
  }
};

inline void stopping_update(StoppingTracker& tracker, double t, double norm_u, double norm_v) {
  tracker.update(t, norm_u, norm_v);
}

// History buffer from which the running Bourgain norms are evaluated. To
// bound the per-step transform cost the history is subsampled to at most
// `cap` slices before the 2D transform.
struct TrajectoryRecorder {
  double dt = 0.0;
  int cap = 96;
  std::vector<ComplexField> u_hist;
  std::vector<RealField> v_hist;

  void push(const ComplexField& u, const RealField& v) {
    u_hist.push_back(u);
    v_hist.push_back(v);
  }

  int stride() const {
    int n = static_cast<int>(u_hist.size());
    return std::max(1, (n + cap - 1) / cap);
  }

  // Current ||u||_{X^t_{b,1}} and ||v||_{Y~^t_{b,1}} over the recorded span.
  std::pair<double, double> running_norms(double b) const {
    int n = static_cast<int>(u_hist.size());
    if (n < 2) return {0.0, 0.0};
    int st = stride();
    std::vector<int> idx;
    for (int i = 0; i < n; i += st) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    int ns = static_cast<int>(idx.size());
    if (ns < 2) return {0.0, 0.0};
    const Grid1D& g = u_hist.front().grid;
    SpaceTimeField U(g, ns, dt * st);
    SpaceTimeField V(g, ns, dt * st);
    for (int i = 0; i < ns; ++i) {
      U.set_slice(i, u_hist[idx[i]]);
      V.set_slice(i, to_complex(v_hist[idx[i]]));
    }
    double span = U.span();
    BourgainWeight wx = BourgainWeight::X(b, 1.0);
    double nu = restricted_norm(U, span, wx);
    double nv = tilde_y_norm(V, span, b, 1.0);
    return {nu, nv};
  }
};

// ---- stepper ---------------------------------------------------------------

struct StepperConfig {
  SystemParams params;
  SchemeConfig scheme;
  Hierarchy hierarchy = Hierarchy::full;
  std::optional<ApproxParams> approx; // required for mnK / mn / m
  std::shared_ptr<const NoiseOperator> phi; // nullptr = noise off
  std::shared_ptr<const NoiseOperator> psi;
  double bourgain_b = 0.45;
  int norm_cap = 96;
  bool track_norms = false; // forced on for `localized`
};

class Stepper {
 public:
  Stepper(const Grid1D& g, StepperConfig cfg, const ComplexField& u0, const RealField& w0)
      : grid_(g), cfg_(std::move(cfg)) {
    cfg_.params.validate();
    cfg_.scheme.validate();
    require_same_grid(g, u0.grid);
    require_same_grid(g, w0.grid);
    if (needs_approx() && !cfg_.approx)
      throw std::invalid_argument("Stepper: hierarchy requires ApproxParams");
    if (cfg_.approx) cfg_.approx->validate();
    if (cfg_.hierarchy == Hierarchy::mnK) fam_ = TruncationFamily(cfg_.approx->K);
    if ((cfg_.phi == nullptr) != (cfg_.psi == nullptr))
      throw std::invalid_argument("Stepper: provide both noise operators or neither");
    if (cfg_.scheme.scheme == Scheme::strang_rk4 && cfg_.phi)
      throw std::invalid_argument("Stepper: the Strang/RK4 scheme is deterministic only");

    shifted_ = cfg_.hierarchy == Hierarchy::localized || cfg_.hierarchy == Hierarchy::m_only;
    track_ = cfg_.track_norms || cfg_.hierarchy == Hierarchy::localized;

    ComplexField u_init = u0;
    RealField w_init = w0;
    if (projected_data()) {
      u_init = project_low(u0, cfg_.approx->m);
      w_init = project_low(w0, cfg_.approx->m);
    }
    if (cfg_.scheme.dealias) {
      u_init = dealias(u_init);
      w_init = dealias(w_init);
    }
    if (shifted_) {
      w0_spec_ = to_spectrum(w_init); // linear part carried exactly
      state_ = State{u_init, RealField(grid_), 0.0};
    } else {
      state_ = State{u_init, w_init, 0.0};
    }
    tracker_.b = cfg_.bourgain_b;
    if (cfg_.approx) tracker_.R = cfg_.approx->R;
    recorder_.dt = cfg_.scheme.dt;
    recorder_.cap = cfg_.norm_cap;
    if (track_) record_current();
  }

  const State& state() const { return state_; }
  const StoppingTracker& tracker() const { return tracker_; }
  bool shifted() const { return shifted_; }

  RealField physical_w(const State& s) const {
    if (!shifted_) return s.w;
    RealField lin = linear_w(s.t);
    RealField out = s.w;
    for (int j = 0; j < out.size(); ++j) out[j] += lin[j];
    return out;
  }

  // One time step; increments must be pre-drawn so that hierarchy variants
  // can share a noise path.
  void advance(const WienerIncrement* inc1, const WienerIncrement* inc2) {
    const double dt = cfg_.scheme.dt;
    if (cfg_.phi && (!inc1 || !inc2))
      throw std::invalid_argument("Stepper: noise operators configured but increments missing");

    State& s = state_;
    if (cfg_.scheme.scheme == Scheme::exp_euler_maruyama) {
      auto [fu, fw] = drift(s.u, s.w, s.t);
      ComplexField nu(grid_);
      RealField nw(grid_);
      if (cfg_.phi) noise_terms(s, *inc1, *inc2, nu, nw);
      ComplexField u_pre = s.u;
      RealField w_pre = s.w;
      for (int j = 0; j < grid_.points; ++j) {
        u_pre[j] += dt * fu[j] + nu[j];
        w_pre[j] += dt * fw[j] + nw[j];
      }
      s.u = schrodinger_propagate(u_pre, dt);
      s.w = airy_propagate(w_pre, dt);
    } else {
      s.u = schrodinger_propagate(s.u, 0.5 * dt);
      s.w = airy_propagate(s.w, 0.5 * dt);
      rk4_drift(s, dt);
      s.u = schrodinger_propagate(s.u, 0.5 * dt);
      s.w = airy_propagate(s.w, 0.5 * dt);
    }
    s.t += dt;

    if (!s.u.all_finite() || !s.w.all_finite())
      throw blow_up_error("non-finite state at t = " + std::to_string(s.t), s);
    if (sobolev_norm(s.u, 1.0) > 1e8)
      throw blow_up_error("H^1 norm exceeded blow-up threshold at t = " + std::to_string(s.t), s);

    if (track_) record_current();
  }

  std::pair<double, double> current_running_norms() const {
    if (!track_ || tracker_.run_u.empty()) return {0.0, 0.0};
    return {tracker_.run_u.back(), tracker_.run_v.back()};
  }

 private:
  bool needs_approx() const {
    return cfg_.hierarchy == Hierarchy::mnK || cfg_.hierarchy == Hierarchy::mn ||
           cfg_.hierarchy == Hierarchy::m_only || cfg_.hierarchy == Hierarchy::localized;
  }

  bool projected_data() const {
    return cfg_.hierarchy == Hierarchy::mnK || cfg_.hierarchy == Hierarchy::mn ||
           cfg_.hierarchy == Hierarchy::m_only;
  }

  RealField linear_w(double t) const {
    auto spec = w0_spec_;
    propagate_spectrum_airy(grid_, spec, t);
    return real_field_from_spectrum(grid_, std::move(spec));
  }

  // Localization factors from the running norms recorded so far.
  std::pair<double, double> theta_factors() const {
    if (cfg_.hierarchy != Hierarchy::localized) return {1.0, 1.0};
    if (tracker_.run_u.empty()) return {1.0, 1.0};
    double R = tracker_.R;
    return {theta_R(tracker_.run_u.back(), R), theta_R(tracker_.run_v.back(), R)};
  }

  std::pair<ComplexField, RealField> drift(const ComplexField& u, const RealField& w,
                                           double t) const {
    const bool da = cfg_.scheme.dealias;
    switch (cfg_.hierarchy) {
      case Hierarchy::full:
        return {drift_schrodinger(u, w, cfg_.params, da), drift_kdv(u, w, cfg_.params, da)};
      case Hierarchy::mn:
        return {drift_schrodinger(u, w, cfg_.params, da),
                drift_kdv(u, w, cfg_.params, da, cfg_.approx->n)};
      case Hierarchy::mnK:
        return drift_approx(u, w, cfg_.params, *cfg_.approx, fam_, da);
      case Hierarchy::localized:
      case Hierarchy::m_only: {
        auto [tu, tv] = theta_factors();
        ComplexField ut = u;
        for (auto& z : ut.v) z *= tu;
        RealField weff = linear_w(t);
        for (int j = 0; j < grid_.points; ++j) weff[j] += tv * w[j];
        ComplexField fu = drift_schrodinger(ut, weff, cfg_.params, da);
        RealField fv = drift_kdv(ut, weff, cfg_.params, da);
        return {std::move(fu), std::move(fv)};
      }
    }
    throw std::logic_error("Stepper::drift: unhandled hierarchy");
  }

  void noise_terms(const State& s, const WienerIncrement& inc1, const WienerIncrement& inc2,
                   ComplexField& nu, RealField& nw) const {
    const auto& p = cfg_.params;
    switch (cfg_.hierarchy) {
      case Hierarchy::full:
        nu = noise_term_schrodinger(s.u, *cfg_.phi, inc1, p.alpha, p.f_choice);
        nw = noise_term_kdv(s.w, *cfg_.psi, inc2, p.alpha);
        break;
      case Hierarchy::mn:
      case Hierarchy::mnK:
        nu = noise_term_schrodinger(s.u, *cfg_.phi, inc1, p.alpha, p.f_choice, cfg_.approx->m);
        nw = noise_term_kdv(s.w, *cfg_.psi, inc2, p.alpha, cfg_.approx->m);
        break;
      case Hierarchy::localized: {
        auto [tu, tv] = theta_factors();
        (void)tv;
        ComplexField ut = s.u;
        for (auto& z : ut.v) z *= tu;
        nu = noise_term_schrodinger(ut, *cfg_.phi, inc1, p.alpha, p.f_choice);
        RealField weff = linear_w(s.t); // noise uses the untruncated v
        for (int j = 0; j < grid_.points; ++j) weff[j] += s.w[j];
        nw = noise_term_kdv(weff, *cfg_.psi, inc2, p.alpha);
        break;
      }
      case Hierarchy::m_only: {
        nu = noise_term_schrodinger(s.u, *cfg_.phi, inc1, p.alpha, p.f_choice, cfg_.approx->m);
        RealField weff = linear_w(s.t);
        for (int j = 0; j < grid_.points; ++j) weff[j] += s.w[j];
        nw = noise_term_kdv(weff, *cfg_.psi, inc2, p.alpha, cfg_.approx->m);
        break;
      }
    }
    if (cfg_.scheme.dealias) {
      nu = dealias(nu);
      nw = dealias(nw);
    }
  }

  void rk4_drift(State& s, double dt) {
    auto f = [&](const ComplexField& u, const RealField& w, double t) {
      return drift(u, w, t);
    };
    auto [k1u, k1w] = f(s.u, s.w, s.t);
    ComplexField u2 = s.u;
    RealField w2 = s.w;
    axpy(u2, w2, 0.5 * dt, k1u, k1w);
    auto [k2u, k2w] = f(u2, w2, s.t + 0.5 * dt);
    ComplexField u3 = s.u;
    RealField w3 = s.w;
    axpy(u3, w3, 0.5 * dt, k2u, k2w);
    auto [k3u, k3w] = f(u3, w3, s.t + 0.5 * dt);
    ComplexField u4 = s.u;
    RealField w4 = s.w;
    axpy(u4, w4, dt, k3u, k3w);
    auto [k4u, k4w] = f(u4, w4, s.t + dt);
    for (int j = 0; j < grid_.points; ++j) {
      s.u[j] += dt / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
      s.w[j] += dt / 6.0 * (k1w[j] + 2.0 * k2w[j] + 2.0 * k3w[j] + k4w[j]);
    }
  }

  static void axpy(ComplexField& u, RealField& w, double a, const ComplexField& du,
                   const RealField& dw) {
    for (int j = 0; j < u.size(); ++j) {
      u[j] += a * du[j];
      w[j] += a * dw[j];
    }
  }

  void record_current() {
    recorder_.push(state_.u, state_.w);
    auto [nu, nv] = recorder_.running_norms(cfg_.bourgain_b);
    tracker_.update(state_.t, nu, nv);
  }

  Grid1D grid_;
  StepperConfig cfg_;
  TruncationFamily fam_;
  State state_;
  bool shifted_ = false;
  bool track_ = false;
  std::vector<cplx> w0_spec_;
  StoppingTracker tracker_;
  TrajectoryRecorder recorder_;
};

} // namespace skdv

#endif
