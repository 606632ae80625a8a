#ifndef SKDV_SPECTRAL_HPP
#define SKDV_SPECTRAL_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include "skdv/field.hpp"

namespace skdv {

namespace detail {

template <class Mult>
ComplexField apply_multiplier(const ComplexField& f, Mult&& mult) {
  auto spec = to_spectrum(f);
  for (int k = 0; k < f.size(); ++k) spec[k] *= mult(f.grid.xi(k));
  return field_from_spectrum(f.grid, std::move(spec));
}

template <class Mult>
RealField apply_multiplier(const RealField& f, Mult&& mult) {
  auto spec = to_spectrum(f);
  for (int k = 0; k < f.size(); ++k) spec[k] *= mult(f.grid.xi(k));
  return real_part(field_from_spectrum(f.grid, std::move(spec)));
}

} // namespace detail

// Free Schroedinger group S(t): du = i u_xx dt, multiplier e^{-i xi^2 t}.
inline ComplexField schrodinger_propagate(const ComplexField& f, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("schrodinger_propagate: non-finite time");
  if (t == 0.0) return f;
  return detail::apply_multiplier(f, [t](double xi) {
    return std::polar(1.0, -xi * xi * t);
  });
}

// Airy group U(t): dw = -w_xxx dt, multiplier e^{+i xi^3 t}.
inline RealField airy_propagate(const RealField& g, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("airy_propagate: non-finite time");
  if (t == 0.0) return g;
  return detail::apply_multiplier(g, [t](double xi) {
    return std::polar(1.0, xi * xi * xi * t);
  });
}

inline void propagate_spectrum_schrodinger(const Grid1D& g, std::vector<cplx>& spec, double t) {
  for (int k = 0; k < g.points; ++k) spec[k] *= std::polar(1.0, -g.xi(k) * g.xi(k) * t);
}

inline void propagate_spectrum_airy(const Grid1D& g, std::vector<cplx>& spec, double t) {
  for (int k = 0; k < g.points; ++k) {
    double xi = g.xi(k);
    spec[k] *= std::polar(1.0, xi * xi * xi * t);
  }
}

// Sharp frequency projections P_m (keep |xi| <= m) and P_{>=m}.
template <class Field>
Field project_low(const Field& f, double m) {
  if (m < 0.0 || !std::isfinite(m)) throw std::invalid_argument("project_low: bound must be >= 0");
  return detail::apply_multiplier(f, [m](double xi) { return std::abs(xi) <= m ? 1.0 : 0.0; });
}

template <class Field>
Field project_high(const Field& f, double m) {
  if (m < 0.0 || !std::isfinite(m)) throw std::invalid_argument("project_high: bound must be >= 0");
  return detail::apply_multiplier(f, [m](double xi) { return std::abs(xi) <= m ? 0.0 : 1.0; });
}

inline void project_low_spectrum(const Grid1D& g, std::vector<cplx>& spec, double m) {
  for (int k = 0; k < g.points; ++k)
    if (std::abs(g.xi(k)) > m) spec[k] = 0.0;
}

// J^n: each mode scaled by (1+|xi|)^order.
template <class Field>
Field bessel_potential(const Field& f, double order) {
  if (!std::isfinite(order)) throw std::invalid_argument("bessel_potential: non-finite order");
  return detail::apply_multiplier(f, [order](double xi) {
    return std::pow(1.0 + std::abs(xi), order);
  });
}

template <class Field>
Field spectral_derivative(const Field& f) {
  return detail::apply_multiplier(f, [&](double xi) { return cplx(0.0, xi); });
}

// Sobolev norm via the spectral quadrature weight 2*pi/L. The optional
// homogeneous exponent (-3/8 only) adds |xi|^{-3/4} and drops the xi=0 mode.
template <class Field>
double sobolev_norm(const Field& f, double s,
                    std::optional<double> homogeneous_exponent = std::nullopt) {
  if (!std::isfinite(s)) throw std::invalid_argument("sobolev_norm: non-finite exponent");
  if (homogeneous_exponent && *homogeneous_exponent != -0.375)
    throw std::invalid_argument("sobolev_norm: unsupported homogeneous exponent");
  auto spec = to_spectrum(f);
  const double dxi = 2.0 * kPi / f.grid.length;
  double acc = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    double xi = f.grid.xi(k);
    double w = std::pow(1.0 + std::abs(xi), 2.0 * s);
    if (homogeneous_exponent) {
      if (xi == 0.0) continue;
      w *= std::pow(std::abs(xi), 2.0 * *homogeneous_exponent);
    }
    acc += w * std::norm(spec[k]);
  }
  return std::sqrt(acc * dxi);
}

// 2/3-rule dealiasing; the Nyquist bin is always zeroed (it has no
// conjugate partner and would break realness of products).
template <class Field>
Field dealias(const Field& f) {
  const int cut = f.grid.points / 3;
  return detail::apply_multiplier(f, [&](double xi) {
    double m = std::abs(xi) * f.grid.length / (2.0 * kPi);
    return (m > cut + 0.5 || std::abs(xi) >= f.grid.xi_max() - 1e-12) ? 0.0 : 1.0;
  });
}

inline void dealias_spectrum(const Grid1D& g, std::vector<cplx>& spec) {
  const int cut = g.points / 3;
  for (int k = 0; k < g.points; ++k) {
    int m = std::abs(g.mode(k));
    if (m > cut || k == g.nyquist_bin()) spec[k] = 0.0;
  }
}

// Experiments on the periodic surrogate of the line require data that
// vanishes near the box edges; wrap-around would otherwise contaminate runs.
template <class Field>
double edge_magnitude(const Field& f, double fraction = 0.02) {
  int band = std::max(1, static_cast<int>(f.size() * fraction));
  double m = 0.0;
  for (int j = 0; j < band; ++j) {
    m = std::max(m, std::abs(f[j]));
    m = std::max(m, std::abs(f[f.size() - 1 - j]));
  }
  return m;
}

template <class Field>
void require_edge_decay(const Field& f, double tol = 1e-8) {
  if (edge_magnitude(f) > tol)
    throw std::invalid_argument("field does not decay below tolerance near box edges");
}

} // namespace skdv

#endif
