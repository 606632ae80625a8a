#ifndef SKDV_GRID_HPP
#define SKDV_GRID_HPP

#include <cmath>
#include <stdexcept>

#include "skdv/fft.hpp"

namespace skdv {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Uniform periodic grid on [-L/2, L/2). Wavenumbers are xi_m = 2*pi*m/L for
// m in {-N/2, ..., N/2-1}, addressed through the usual FFT bin order.
struct Grid1D {
  double length = 0.0;
  int points = 0;
  double dx = 0.0;

  Grid1D() = default;
  Grid1D(double box_length, int n) : length(box_length), points(n) {
    if (!(box_length > 0.0) || !std::isfinite(box_length))
      throw std::invalid_argument("Grid1D: box length must be positive and finite");
    if (n < 16 || !is_pow2(static_cast<std::size_t>(n)))
      throw std::invalid_argument("Grid1D: point count must be a power of two >= 16");
    dx = length / points;
  }

  double x(int j) const { return -0.5 * length + dx * j; }

  // Signed mode index of FFT bin k.
  int mode(int k) const { return k <= points / 2 - 1 ? k : k - points; }
  double xi(int k) const { return 2.0 * kPi * mode(k) / length; }
  int nyquist_bin() const { return points / 2; }
  double xi_max() const { return kPi / dx; }

  bool operator==(const Grid1D& o) const {
    return length == o.length && points == o.points;
  }
  bool operator!=(const Grid1D& o) const { return !(*this == o); }
};

inline void require_same_grid(const Grid1D& a, const Grid1D& b) {
  if (a != b) throw std::invalid_argument("fields live on different grids");
}

} // namespace skdv

#endif
