#ifndef SKDV_PICARD_HPP
#define SKDV_PICARD_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "skdv/dynamics.hpp"

namespace skdv {

struct PicardPair {
  SpaceTimeField u;
  SpaceTimeField v;
};

struct NoisePath {
  std::vector<WienerIncrement> w1; // one per step interval
  std::vector<WienerIncrement> w2;
};

inline NoisePath make_noise_path(std::uint64_t master, std::uint64_t path_id, int n_steps,
                                 double dt, int n_basis) {
  NoisePath p;
  RngStream s1(master, path_id, 1), s2(master, path_id, 2);
  p.w1.reserve(n_steps);
  p.w2.reserve(n_steps);
  for (int i = 0; i < n_steps; ++i) {
    p.w1.push_back(sample_increment(s1, dt, n_basis, i, path_id));
    p.w2.push_back(sample_increment(s2, dt, n_basis, i, path_id));
  }
  return p;
}

struct accuracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace picard_detail {

// Duhamel integral int_0^t G(t-s) f(s) ds on the stored grid by cumulative
// trapezoid, with exact interior propagation: per spectral bin,
// A(t_k) = e^{-i h(xi) t_k} * cumtrapz_s[e^{i h(xi) s} f-hat(xi, s)].
// `phase(xi)` returns h(xi) with the sign convention of the group.
template <class Phase>
SpaceTimeField duhamel(const SpaceTimeField& f, Phase&& phase, int stride = 1) {
  const Grid1D& g = f.grid;
  const int nx = g.points;
  std::vector<int> idx;
  for (int i = 0; i < f.n_t; i += stride) idx.push_back(i);
  const int ns = static_cast<int>(idx.size());
  const double dt = f.dt * stride;

  // spectra of all used slices
  std::vector<std::vector<cplx>> spec(ns);
  for (int i = 0; i < ns; ++i) spec[i] = to_spectrum(f.slice(idx[i]));

  SpaceTimeField out(g, f.n_t, f.dt, f.pad_factor);
  std::vector<cplx> acc(nx, cplx(0.0));
  std::vector<cplx> prev(nx, cplx(0.0));
  std::vector<cplx> cur(nx);
  std::vector<cplx> slice(nx);
  for (int i = 0; i < ns; ++i) {
    double t = f.t(idx[i]);
    for (int k = 0; k < nx; ++k) {
      double h = phase(g.xi(k));
      cur[k] = std::polar(1.0, h * t) * spec[i][k];
      if (i > 0) acc[k] += 0.5 * dt * (prev[k] + cur[k]);
      slice[k] = std::polar(1.0, -h * t) * acc[k];
    }
    std::swap(prev, cur);
    auto phys = field_from_spectrum(g, slice);
    out.set_slice(idx[i], phys);
    // fill skipped slices by holding the propagated integral (stride > 1 is
    // only used for the internal step-halving consistency check)
    if (stride > 1 && i + 1 < ns)
      for (int j = idx[i] + 1; j < idx[i + 1]; ++j) out.set_slice(j, phys);
  }
  return out;
}

// Left-point Ito sum sum_{t_i < t} G(t - t_i) g_i with exact propagation.
template <class Phase>
SpaceTimeField ito_sum(const Grid1D& g, int n_t, double dt,
                       const std::vector<std::vector<cplx>>& increments_spec, Phase&& phase) {
  const int nx = g.points;
  SpaceTimeField out(g, n_t, dt);
  std::vector<cplx> acc(nx, cplx(0.0));
  std::vector<cplx> slice(nx);
  for (int i = 0; i < n_t; ++i) {
    double t = i * dt;
    for (int k = 0; k < nx; ++k) {
      double h = phase(g.xi(k));
      slice[k] = std::polar(1.0, -h * t) * acc[k];
    }
    out.set_slice(i, field_from_spectrum(g, slice));
    if (i + 1 < n_t) {
      double ti = t;
      for (int k = 0; k < nx; ++k) {
        double h = phase(g.xi(k));
        acc[k] += std::polar(1.0, h * ti) * increments_spec[i][k];
      }
    }
  }
  return out;
}

inline double schrodinger_phase(double xi) { return xi * xi; }
inline double airy_phase(double xi) { return -xi * xi * xi; }

} // namespace picard_detail

struct PicardContext {
  ComplexField u0;
  RealField w0;
  double R = 1.0;
  SystemParams params;
  std::shared_ptr<const NoiseOperator> phi; // may be null (deterministic map)
  std::shared_ptr<const NoiseOperator> psi;
  double b = 0.45;
  bool consistency_check = true;
  int theta_stride = 4; // running-norm sampling stride for the localization
};

// One application of the localized Duhamel map. The input pair lives on
// [0, T]; the output pair is the map image on the same grid, evaluated with
// the frozen noise path.
inline PicardPair picard_apply(const PicardPair& in, const PicardContext& ctx,
                               const NoisePath* path) {
  const Grid1D& g = in.u.grid;
  require_same_grid(g, ctx.u0.grid);
  if (in.u.n_t != in.v.n_t) throw std::invalid_argument("picard_apply: pair grids differ");
  const int n_t = in.u.n_t;
  const double dt = in.u.dt;
  if ((ctx.phi != nullptr) && (path == nullptr || static_cast<int>(path->w1.size()) < n_t - 1))
    throw std::invalid_argument("picard_apply: noise path too short");

  // running restricted norms of the inputs define the localization factors;
  // sampled on a stride and linearly interpolated so the integrands stay
  // continuous for the trapezoid quadrature
  BourgainWeight wx = BourgainWeight::X(ctx.b, 1.0);
  std::vector<double> theta_u(n_t), theta_v(n_t);
  {
    const int st = std::max(1, ctx.theta_stride);
    std::vector<int> knots;
    for (int i = 0; i < n_t; i += st) knots.push_back(i);
    if (knots.back() != n_t - 1) knots.push_back(n_t - 1);
    std::vector<double> ru(knots.size()), rv(knots.size());
    double run_u = 0.0, run_v = 0.0;
    for (std::size_t k = 0; k < knots.size(); ++k) {
      double t = in.u.t(knots[k]);
      run_u = std::max(run_u, restricted_norm(in.u, t, wx));
      run_v = std::max(run_v, tilde_y_norm(in.v, t, ctx.b, 1.0));
      ru[k] = run_u;
      rv[k] = run_v;
    }
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      for (int i = knots[k]; i <= knots[k + 1]; ++i) {
        double s = knots[k + 1] == knots[k]
                       ? 0.0
                       : static_cast<double>(i - knots[k]) / (knots[k + 1] - knots[k]);
        theta_u[i] = theta_R(ru[k] + s * (ru[k + 1] - ru[k]), ctx.R);
        theta_v[i] = theta_R(rv[k] + s * (rv[k + 1] - rv[k]), ctx.R);
      }
    }
  }

  auto w0_spec = to_spectrum(ctx.w0);
  auto linear_w_at = [&](double t) {
    auto sp = w0_spec;
    propagate_spectrum_airy(g, sp, t);
    return real_field_from_spectrum(g, std::move(sp));
  };

  // nonlinear integrands on the grid
  SpaceTimeField fS(g, n_t, dt), fK(g, n_t, dt);
  for (int i = 0; i < n_t; ++i) {
    double t = in.u.t(i);
    RealField wl = linear_w_at(t);
    ComplexField ut = in.u.slice(i);
    for (auto& z : ut.v) z *= theta_u[i];
    RealField weff = wl;
    for (int j = 0; j < g.points; ++j) weff[j] += theta_v[i] * in.v.at(i, j).real();
    fS.set_slice(i, drift_schrodinger(ut, weff, ctx.params, false));
    fK.set_slice(i, to_complex(drift_kdv(ut, weff, ctx.params, false)));
  }

  auto out_u = picard_detail::duhamel(fS, picard_detail::schrodinger_phase);
  auto out_v = picard_detail::duhamel(fK, picard_detail::airy_phase);

  if (ctx.consistency_check && n_t >= 5) {
    auto coarse_u = picard_detail::duhamel(fS, picard_detail::schrodinger_phase, 2);
    double fine = 0.0, diff = 0.0;
    for (int i = 0; i < n_t; i += 2) {
      auto a = out_u.slice(i);
      auto b = coarse_u.slice(i);
      fine = std::max(fine, l2_norm(a));
      diff = std::max(diff, l2_distance(a, b));
    }
    if (fine > 1e-12 && diff / fine > 1e-3)
      throw accuracy_error("picard_apply: quadrature step-halving disagreement above 1e-3");
  }

  // S(t) u0 homogeneous term
  {
    auto u0_spec = to_spectrum(ctx.u0);
    for (int i = 0; i < n_t; ++i) {
      auto sp = u0_spec;
      propagate_spectrum_schrodinger(g, sp, out_u.t(i));
      auto lin = field_from_spectrum(g, std::move(sp));
      for (int j = 0; j < g.points; ++j) out_u.at(i, j) += lin[j];
    }
  }

  // stochastic convolutions on the frozen path
  if (ctx.phi) {
    std::vector<std::vector<cplx>> gs1(n_t - 1), gs2(n_t - 1);
    for (int i = 0; i + 1 < n_t; ++i) {
      double t = in.u.t(i);
      ComplexField ut = in.u.slice(i);
      for (auto& z : ut.v) z *= theta_u[i];
      ComplexField gS =
          noise_term_schrodinger(ut, *ctx.phi, path->w1[i], ctx.params.alpha, ctx.params.f_choice);
      RealField wl = linear_w_at(t);
      RealField vt(g);
      for (int j = 0; j < g.points; ++j) vt[j] = in.v.at(i, j).real() + wl[j];
      RealField gK = noise_term_kdv(vt, *ctx.psi, path->w2[i], ctx.params.alpha);
      gs1[i] = to_spectrum(gS);
      gs2[i] = to_spectrum(gK);
    }
    auto su = picard_detail::ito_sum(g, n_t, dt, gs1, picard_detail::schrodinger_phase);
    auto sv = picard_detail::ito_sum(g, n_t, dt, gs2, picard_detail::airy_phase);
    for (std::size_t i = 0; i < out_u.values.size(); ++i) {
      out_u.values[i] += su.values[i];
      out_v.values[i] += sv.values[i];
    }
  }
  return {std::move(out_u), std::move(out_v)};
}

inline double pair_distance(const PicardPair& a, const PicardPair& b, double T, double bexp) {
  SpaceTimeField du = a.u, dv = a.v;
  for (std::size_t i = 0; i < du.values.size(); ++i) {
    du.values[i] -= b.u.values[i];
    dv.values[i] -= b.v.values[i];
  }
  BourgainWeight wx = BourgainWeight::X(bexp, 1.0);
  double nu = restricted_norm(du, T, wx);
  double nv = tilde_y_norm(dv, T, bexp, 1.0);
  return std::hypot(nu, nv);
}

// ||T p1 - T p2|| / ||p1 - p2|| in the X^T_{b,1} x Y~^T_{b,1} metric.
inline double contraction_factor(const PicardPair& p1, const PicardPair& p2,
                                 const PicardContext& ctx, const NoisePath* path) {
  double T = p1.u.span();
  double den = pair_distance(p1, p2, T, ctx.b);
  if (den == 0.0) throw std::invalid_argument("contraction_factor: identical input pairs");
  auto t1 = picard_apply(p1, ctx, path);
  auto t2 = picard_apply(p2, ctx, path);
  return pair_distance(t1, t2, T, ctx.b) / den;
}

} // namespace skdv

#endif
