#ifndef SKDV_FUNCTIONALS_HPP
#define SKDV_FUNCTIONALS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "skdv/cutoffs.hpp"
#include "skdv/spacetime.hpp"
#include "skdv/spectral.hpp"

namespace skdv {

inline double mass(const ComplexField& u) {
  double s = 0.0;
  for (const auto& z : u.v) s += std::norm(z);
  return s * u.grid.dx;
}

// I_t = int Im(u d_x u-bar) + w^2/2 dx, spectral derivative.
inline double momentum(const ComplexField& u, const RealField& w) {
  require_same_grid(u.grid, w.grid);
  ComplexField ux = spectral_derivative(u);
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    s += std::imag(u[j] * std::conj(ux[j]));
    s += 0.5 * w[j] * w[j];
  }
  return s * u.grid.dx;
}

// E_t = int |u_x|^2 + (|w_x|^2 - psi2_K(w))/2 + phi_K(|u|^2)|u|^2 w
//           + psi1_K(|u|^2) dx.
inline double energy(const ComplexField& u, const RealField& w, const TruncationFamily& fam) {
  require_same_grid(u.grid, w.grid);
  ComplexField ux = spectral_derivative(u);
  RealField wx = spectral_derivative(w);
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    double a2 = std::norm(u[j]);
    s += std::norm(ux[j]);
    s += 0.5 * (wx[j] * wx[j] - fam.psi2(w[j]));
    s += fam.phi(a2) * a2 * w[j];
    s += fam.psi1(a2);
  }
  return s * u.grid.dx;
}

// K = infinity limit of the energy (phi == 1).
inline double energy_uncut(const ComplexField& u, const RealField& w) {
  require_same_grid(u.grid, w.grid);
  ComplexField ux = spectral_derivative(u);
  RealField wx = spectral_derivative(w);
  double s = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    double a2 = std::norm(u[j]);
    s += std::norm(ux[j]);
    s += 0.5 * wx[j] * wx[j] - w[j] * w[j] * w[j] / 6.0;
    s += a2 * w[j] + 0.5 * a2 * a2;
  }
  return s * u.grid.dx;
}

struct ConservedTriple {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double t = 0.0;
};

inline ConservedTriple conserved_triple(const ComplexField& u, const RealField& w,
                                        const TruncationFamily* fam, double t) {
  ConservedTriple c;
  c.mass = mass(u);
  c.momentum = momentum(u, w);
  c.energy = fam ? energy(u, w, *fam) : energy_uncut(u, w);
  c.t = t;
  return c;
}

// Q_t = ||u||^2 + ||u||^10 + |I| + |I|^{5/3} + |E|, all L^2-based.
inline double lyapunov_Q(const ComplexField& u, const RealField& w, const TruncationFamily& fam) {
  double m = mass(u);
  double i = momentum(u, w);
  double e = energy(u, w, fam);
  return m + std::pow(m, 5.0) + std::abs(i) + std::pow(std::abs(i), 5.0 / 3.0) + std::abs(e);
}

template <class Field>
double lp_norm(const Field& f, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: exponent must be positive");
  if (std::isinf(p)) return max_abs(f);
  double s = 0.0;
  for (const auto& z : f.v) s += std::pow(std::abs(z), p);
  return std::pow(s * f.grid.dx, 1.0 / p);
}

enum class Nesting { space_outer, time_outer };

// Nested Riemann-sum L^r_x L^q_t (space_outer) or L^q_t L^r_x (time_outer);
// the discrete sup realizes exponent infinity.
inline double mixed_norm(const SpaceTimeField& F, double q, double r, Nesting order) {
  if (!(q > 0.0) || !(r > 0.0))
    throw std::invalid_argument("mixed_norm: exponents must be in (0, inf]");
  const bool q_inf = std::isinf(q);
  const bool r_inf = std::isinf(r);
  if (order == Nesting::space_outer) {
    // inner: over time at fixed x; outer: over space
    double outer = 0.0;
    for (int j = 0; j < F.grid.points; ++j) {
      double inner = 0.0;
      for (int i = 0; i < F.n_t; ++i) {
        double a = std::abs(F.at(i, j));
        inner = q_inf ? std::max(inner, a) : inner + std::pow(a, q) * F.dt;
      }
      double g = q_inf ? inner : std::pow(inner, 1.0 / q);
      outer = r_inf ? std::max(outer, g) : outer + std::pow(g, r) * F.grid.dx;
    }
    return r_inf ? outer : std::pow(outer, 1.0 / r);
  }
  double outer = 0.0;
  for (int i = 0; i < F.n_t; ++i) {
    double inner = 0.0;
    for (int j = 0; j < F.grid.points; ++j) {
      double a = std::abs(F.at(i, j));
      inner = r_inf ? std::max(inner, a) : inner + std::pow(a, r) * F.grid.dx;
    }
    double g = r_inf ? inner : std::pow(inner, 1.0 / r);
    outer = q_inf ? std::max(outer, g) : outer + std::pow(g, q) * F.dt;
  }
  return q_inf ? outer : std::pow(outer, 1.0 / q);
}

// Predicted mean mass curve E||u(t)||^2 = ||u0||^2 exp(D0 t) for alpha = 1,
// F(u) = u: the Ito correction contributes int |u|^2 D dx = D0 ||u||^2 while
// drift rotations leave |u|^2 invariant and martingale terms vanish in mean.
inline std::vector<double> mass_drift_oracle(double mass0, const RealField& D,
                                             const std::vector<double>& times) {
  double mean = 0.0;
  for (double x : D.v) mean += x;
  mean /= D.size();
  double dev = 0.0;
  for (double x : D.v) dev = std::max(dev, std::abs(x - mean));
  if (mean > 0.0 && dev / mean > 1e-4)
    throw std::invalid_argument("mass_drift_oracle: diffusion intensity is not spatially constant");
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(mass0 * std::exp(mean * t));
  return out;
}

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> estimates; // E sup_{s<=t} ||(u,w)||_{H1xH1}^{2l}
  std::vector<double> std_errors;
  int moment_order = 1;
  int ensemble_size = 0;
};

} // namespace skdv

#endif
