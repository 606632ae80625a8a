#ifndef SKDV_QUADRATURE_HPP
#define SKDV_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace skdv {

namespace quad_detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace quad_detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int max_depth = 40) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = quad_detail::simpson(f, a, b, fa, fm, fb);
  return quad_detail::adaptive(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// int_{Z0}^inf z^{-p} (1 + d/z)^{-q} dz by the binomial series; requires
// d/Z0 < 1 (callers keep it <= 0.1) and p > 1.
inline double power_tail(double Z0, double p, double q, double d) {
  if (!(p > 1.0)) throw std::invalid_argument("power_tail: needs p > 1");
  if (!(std::abs(d) < Z0)) throw std::invalid_argument("power_tail: series does not converge");
  double sum = 0.0;
  double coef = 1.0; // binom(-q, j) * d^j
  for (int j = 0; j < 60; ++j) {
    double term = coef * std::pow(Z0, 1.0 - p - j) / (p + j - 1.0);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum) && j > 2) break;
    coef *= (-q - j) * d / (j + 1.0);
  }
  return sum;
}

// int_R <x-alpha>^{-2a} <x-beta>^{-2b} dx with <c> = 1 + |c|.
inline double basic_inequality_integral(double a, double b, double alpha, double beta) {
  double d = std::abs(beta - alpha);
  auto f = [a, b, d](double x) {
    return std::pow(1.0 + std::abs(x), -2.0 * a) * std::pow(1.0 + std::abs(x - d), -2.0 * b);
  };
  double pad = 10.0 * (1.0 + d);
  double xl = -pad, xr = d + pad;
  double core = adaptive_simpson(f, xl, 0.0, 1e-12) + adaptive_simpson(f, 0.0, d, 1e-12) +
                adaptive_simpson(f, d, xr, 1e-12);
  double p = 2.0 * (a + b);
  double left = power_tail(1.0 - xl, p, 2.0 * b, d);
  double right = power_tail(1.0 + xr - d, p, 2.0 * a, d);
  return core + left + right;
}

// Ratio against the claimed bound <alpha-beta>^{1-2a-2b}.
inline double probe_basic_inequality(double a, double b, double alpha, double beta) {
  if (!(a > 0.25 && a < 0.5 && b > 0.25 && b < 0.5))
    throw std::invalid_argument("probe_basic_inequality: exponents must lie in (1/4, 1/2)");
  double integral = basic_inequality_integral(a, b, alpha, beta);
  double bound = std::pow(1.0 + std::abs(alpha - beta), 1.0 - 2.0 * a - 2.0 * b);
  return integral / bound;
}

} // namespace skdv

#endif
