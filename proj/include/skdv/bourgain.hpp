#ifndef SKDV_BOURGAIN_HPP
#define SKDV_BOURGAIN_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "skdv/spacetime.hpp"
#include "skdv/spectral.hpp"

namespace skdv {

// Weight of the restricted-norm spaces: (1+|xi|)^{2s} <tau -+ h(xi)>^{2b}
// with h the dispersion relation, plus the optional |xi|^{-3/4} homogeneous
// factor of Y_{b,s,-3/8} (which drops the xi = 0 column). The paper's
// bracket is <c> = 1 + |c|.
struct BourgainWeight {
  enum class Dispersion { schrodinger, kdv };

  Dispersion dispersion = Dispersion::schrodinger;
  double b = 0.0;
  double s = 0.0;
  bool homogeneous = false;

  BourgainWeight() = default;
  BourgainWeight(Dispersion d, double mod_exp, double reg_exp, bool hom = false)
      : dispersion(d), b(mod_exp), s(reg_exp), homogeneous(hom) {
    // b in (0,1) is the standard range; probes also need the negative
    // exponents of the dual norms, so the full sane range is accepted here.
    if (!(b > -1.0 && b <= 1.0)) throw std::invalid_argument("BourgainWeight: b out of (-1, 1]");
    if (!(s >= 0.0)) throw std::invalid_argument("BourgainWeight: s must be >= 0");
    if (homogeneous && dispersion != Dispersion::kdv)
      throw std::invalid_argument("BourgainWeight: homogeneous weight needs kdv dispersion");
  }

  static BourgainWeight X(double b, double s) { return {Dispersion::schrodinger, b, s}; }
  static BourgainWeight Y(double b, double s) { return {Dispersion::kdv, b, s}; }
  static BourgainWeight Y_hom(double b, double s) { return {Dispersion::kdv, b, s, true}; }

  double modulation(double xi, double tau) const {
    return dispersion == Dispersion::schrodinger ? tau + xi * xi : tau - xi * xi * xi;
  }

  double weight(double xi, double tau) const {
    double w = std::pow(1.0 + std::abs(xi), 2.0 * s) *
               std::pow(1.0 + std::abs(modulation(xi, tau)), 2.0 * b);
    if (homogeneous) {
      if (xi == 0.0) return 0.0;
      w *= std::pow(std::abs(xi), -0.75);
    }
    return w;
  }
};

// 2D spectrum of a SpaceTimeField, zero-padded in time to a power of two of
// at least pad_factor * n_t. Only |coefficients|^2 feed the norms, so the
// box-offset phases are irrelevant and omitted.
struct Spectrum2D {
  Grid1D grid;
  int n_tau = 0;
  double dtau = 0.0;
  double scale = 0.0; // dx*dt/(2*pi), applied squared in the quadrature
  std::vector<cplx> data; // row-major: [p * N + k]

  double tau(int p) const {
    int m = p <= n_tau / 2 - 1 ? p : p - n_tau;
    return dtau * m;
  }
};

inline Spectrum2D spacetime_spectrum(const SpaceTimeField& F) {
  const int nx = F.grid.points;
  std::size_t padded = 1;
  while (padded < static_cast<std::size_t>(F.pad_factor) * F.n_t) padded <<= 1;
  const int nt = static_cast<int>(padded);

  Spectrum2D sp;
  sp.grid = F.grid;
  sp.n_tau = nt;
  sp.dtau = 2.0 * kPi / (nt * F.dt);
  sp.scale = F.grid.dx * F.dt / (2.0 * kPi);
  sp.data.assign(static_cast<std::size_t>(nt) * nx, cplx(0.0));

  std::vector<cplx> row(nx);
  for (int i = 0; i < F.n_t; ++i) {
    for (int j = 0; j < nx; ++j) row[j] = F.at(i, j);
    fft_inplace(row, false);
    for (int j = 0; j < nx; ++j) sp.data[static_cast<std::size_t>(i) * nx + j] = row[j];
  }
  std::vector<cplx> col(nt);
  for (int j = 0; j < nx; ++j) {
    for (int p = 0; p < nt; ++p) col[p] = sp.data[static_cast<std::size_t>(p) * nx + j];
    fft_inplace(col, false);
    for (int p = 0; p < nt; ++p) sp.data[static_cast<std::size_t>(p) * nx + j] = col[p];
  }
  return sp;
}

inline std::vector<double> weighted_norms(const Spectrum2D& sp,
                                          std::span<const BourgainWeight> weights) {
  const int nx = sp.grid.points;
  std::vector<double> acc(weights.size(), 0.0);
  for (int p = 0; p < sp.n_tau; ++p) {
    double tau = sp.tau(p);
    for (int k = 0; k < nx; ++k) {
      double a2 = std::norm(sp.data[static_cast<std::size_t>(p) * nx + k]);
      if (a2 == 0.0) continue;
      double xi = sp.grid.xi(k);
      for (std::size_t w = 0; w < weights.size(); ++w)
        acc[w] += weights[w].weight(xi, tau) * a2;
    }
  }
  const double dxi = 2.0 * kPi / sp.grid.length;
  const double cell = dxi * sp.dtau * sp.scale * sp.scale;
  for (auto& v : acc) v = std::sqrt(v * cell);
  return acc;
}

// Whole-window Bourgain norm; requires a time-windowed input (taper both
// ends) so that the modulation weights are not corrupted by edge leakage.
inline std::vector<double> spacetime_norms(const SpaceTimeField& F,
                                           std::span<const BourgainWeight> weights) {
  if (!is_time_windowed(F))
    throw std::invalid_argument("spacetime_norm: input is not time-windowed");
  auto sp = spacetime_spectrum(F);
  return weighted_norms(sp, weights);
}

inline double spacetime_norm(const SpaceTimeField& F, const BourgainWeight& w) {
  return spacetime_norms(F, std::span<const BourgainWeight>(&w, 1))[0];
}

// Sharp-cut surrogate of the restricted norm: ||chi_{[0,T]} F||. Valid for
// b < 1/2 where the two-sided equivalence with the infimum norm holds; the
// cut edge is part of the definition, so no window precondition here.
inline std::vector<double> restricted_norms(const SpaceTimeField& F, double T,
                                            std::span<const BourgainWeight> weights) {
  for (const auto& w : weights)
    if (w.b >= 0.5)
      throw std::invalid_argument("restricted_norm: surrogate unjustified for b >= 1/2");
  if (T <= 0.0) return std::vector<double>(weights.size(), 0.0);
  SpaceTimeField cut = F;
  for (int i = 0; i < F.n_t; ++i) {
    if (F.t(i) <= T + 1e-12 * F.dt) continue;
    for (int j = 0; j < F.grid.points; ++j) cut.at(i, j) = 0.0;
  }
  auto sp = spacetime_spectrum(cut);
  return weighted_norms(sp, weights);
}

inline double restricted_norm(const SpaceTimeField& F, double T, const BourgainWeight& w) {
  return restricted_norms(F, T, std::span<const BourgainWeight>(&w, 1))[0];
}

// Intersection norm of Y_{b,s} and Y_{b,s,-3/8}.
inline double tilde_y_norm(const SpaceTimeField& F, double T, double b, double s) {
  BourgainWeight ws[2] = {BourgainWeight::Y(b, s), BourgainWeight::Y_hom(b, s)};
  auto n = restricted_norms(F, T, ws);
  return std::hypot(n[0], n[1]);
}

inline double sup_h1(const SpaceTimeField& F) {
  double m = 0.0;
  for (int i = 0; i < F.n_t; ++i) m = std::max(m, sobolev_norm(F.slice(i), 1.0));
  return m;
}

} // namespace skdv

#endif
