#ifndef SKDV_FIELD_HPP
#define SKDV_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "skdv/fft.hpp"
#include "skdv/grid.hpp"

namespace skdv {

using cplx = std::complex<double>;

// Spectral convention used throughout: for a field f sampled at x_j,
//   spec(f)[k] = (dx/sqrt(2*pi)) * sum_j f(x_j) e^{-i xi_k x_j},
// an approximation of the unitary continuum transform, so that
//   sum_j |f_j|^2 dx = sum_k |spec_k|^2 * (2*pi/L)
// holds exactly (discrete Plancherel with quadrature weights dx and 2*pi/L).

struct ComplexField {
  Grid1D grid;
  std::vector<cplx> v;

  ComplexField() = default;
  explicit ComplexField(const Grid1D& g) : grid(g), v(g.points, cplx(0.0)) {}
  ComplexField(const Grid1D& g, std::vector<cplx> values)
      : grid(g), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.points)
      throw std::invalid_argument("ComplexField: sample count does not match grid");
  }

  int size() const { return grid.points; }
  cplx& operator[](int j) { return v[j]; }
  const cplx& operator[](int j) const { return v[j]; }

  bool all_finite() const {
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }
};

struct RealField {
  Grid1D grid;
  std::vector<double> v;

  RealField() = default;
  explicit RealField(const Grid1D& g) : grid(g), v(g.points, 0.0) {}
  RealField(const Grid1D& g, std::vector<double> values)
      : grid(g), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.points)
      throw std::invalid_argument("RealField: sample count does not match grid");
  }

  int size() const { return grid.points; }
  double& operator[](int j) { return v[j]; }
  const double& operator[](int j) const { return v[j]; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline cplx ipow(cplx z, int n) {
  cplx r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

inline double ipow(double z, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

inline ComplexField sample_complex(const Grid1D& g, const std::function<cplx(double)>& f) {
  ComplexField out(g);
  for (int j = 0; j < g.points; ++j) out[j] = f(g.x(j));
  return out;
}

inline RealField sample_real(const Grid1D& g, const std::function<double(double)>& f) {
  RealField out(g);
  for (int j = 0; j < g.points; ++j) out[j] = f(g.x(j));
  return out;
}

inline ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid);
  for (int j = 0; j < f.size(); ++j) out[j] = cplx(f[j], 0.0);
  return out;
}

inline RealField real_part(const ComplexField& f) {
  RealField out(f.grid);
  for (int j = 0; j < f.size(); ++j) out[j] = f[j].real();
  return out;
}

// Largest |Im| left behind by an operation that should have produced a real
// field; used both for assertions and for the conjugate-symmetry diagnostics.
inline double max_imag(const ComplexField& f) {
  double m = 0.0;
  for (const auto& z : f.v) m = std::max(m, std::abs(z.imag()));
  return m;
}

inline double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const auto& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

inline double max_abs(const RealField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

// ---- transforms ---------------------------------------------------------

// The x-offset of the box (-L/2) shows up as a (-1)^k phase on bin k.
inline std::vector<cplx> to_spectrum(const ComplexField& f) {
  std::vector<cplx> a = f.v;
  fft_inplace(a, false);
  const double s = f.grid.dx / std::sqrt(2.0 * kPi);
  for (int k = 0; k < f.size(); ++k) a[k] *= (k & 1) ? -s : s;
  return a;
}

inline std::vector<cplx> to_spectrum(const RealField& f) { return to_spectrum(to_complex(f)); }

inline ComplexField field_from_spectrum(const Grid1D& g, std::vector<cplx> spec) {
  if (static_cast<int>(spec.size()) != g.points)
    throw std::invalid_argument("field_from_spectrum: size mismatch");
  const double s = std::sqrt(2.0 * kPi) / g.dx;
  for (int k = 0; k < g.points; ++k) spec[k] *= (k & 1) ? -s : s;
  fft_inplace(spec, true);
  return ComplexField(g, std::move(spec));
}

inline RealField real_field_from_spectrum(const Grid1D& g, std::vector<cplx> spec) {
  return real_part(field_from_spectrum(g, std::move(spec)));
}

inline double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& z : f.v) s += std::norm(z);
  return std::sqrt(s * f.grid.dx);
}

inline double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  return std::sqrt(s * f.grid.dx);
}

inline double l2_distance(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * a.grid.dx);
}

inline double l2_distance(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s * a.grid.dx);
}

inline cplx inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid, b.grid);
  cplx s(0.0);
  for (int j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
  return s * a.grid.dx;
}

} // namespace skdv

#endif
