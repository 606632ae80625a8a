#ifndef SKDV_SPACETIME_HPP
#define SKDV_SPACETIME_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "skdv/field.hpp"

namespace skdv {

// Time-stacked complex field on [0, (n_t-1)*dt] x box, row-major in time.
// pad_factor controls the temporal zero-padding used by the 2D transforms.
struct SpaceTimeField {
  Grid1D grid;
  int n_t = 0;
  double dt = 0.0;
  int pad_factor = 4;
  std::vector<cplx> values;

  SpaceTimeField() = default;
  SpaceTimeField(const Grid1D& g, int steps, double step_dt, int pad = 4)
      : grid(g), n_t(steps), dt(step_dt), pad_factor(pad),
        values(static_cast<std::size_t>(steps) * g.points, cplx(0.0)) {
    if (steps < 2) throw std::invalid_argument("SpaceTimeField: need at least two time slices");
    if (!(step_dt > 0.0)) throw std::invalid_argument("SpaceTimeField: dt must be positive");
    if (pad < 1) throw std::invalid_argument("SpaceTimeField: pad factor must be >= 1");
  }

  double span() const { return dt * (n_t - 1); }
  double t(int i) const { return dt * i; }

  cplx& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.points + j]; }
  const cplx& at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * grid.points + j];
  }

  ComplexField slice(int i) const {
    ComplexField f(grid);
    for (int j = 0; j < grid.points; ++j) f[j] = at(i, j);
    return f;
  }

  void set_slice(int i, const ComplexField& f) {
    require_same_grid(grid, f.grid);
    for (int j = 0; j < grid.points; ++j) at(i, j) = f[j];
  }

  bool all_finite() const {
    for (const auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  double peak() const {
    double m = 0.0;
    for (const auto& z : values) m = std::max(m, std::abs(z));
    return m;
  }
};

// C^2 taper on [0, span]: identically zero on the outer 5%, quintic ramps up
// to the plateau. Guarantees the leakage precondition of the 2D norms.
inline double time_taper(double t, double span, double zero_frac = 0.05,
                         double ramp_frac = 0.15) {
  if (span <= 0.0) return 1.0;
  double s = t / span;
  if (s > 0.5) s = 1.0 - s;
  if (s <= zero_frac) return 0.0;
  double x = (s - zero_frac) / ramp_frac;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

inline void apply_time_taper(SpaceTimeField& F) {
  for (int i = 0; i < F.n_t; ++i) {
    double w = time_taper(F.t(i), F.span());
    for (int j = 0; j < F.grid.points; ++j) F.at(i, j) *= w;
  }
}

// True when the field's own leading/trailing 5% of samples are below
// 1e-6 of the peak -- the windowing precondition for leakage control.
inline bool is_time_windowed(const SpaceTimeField& F) {
  double pk = F.peak();
  if (pk == 0.0) return true;
  int band = std::max(1, static_cast<int>(F.n_t * 0.05));
  double tol = 1e-6 * pk;
  for (int i = 0; i < band; ++i) {
    for (int j = 0; j < F.grid.points; ++j) {
      if (std::abs(F.at(i, j)) > tol) return false;
      if (std::abs(F.at(F.n_t - 1 - i, j)) > tol) return false;
    }
  }
  return true;
}

} // namespace skdv

#endif
