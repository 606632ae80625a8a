#ifndef SKDV_CUTOFFS_HPP
#define SKDV_CUTOFFS_HPP

#include <cmath>
#include <span>
#include <stdexcept>

#include "skdv/field.hpp"

namespace skdv {

// Quintic smoothstep: C^2 ramp 0 -> 1 on [0,1].
inline double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline double smoothstep5_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  double t = s * (1.0 - s);
  return 30.0 * t * t;
}

// Even C^2 plateau bump: 1 on [-1,1], 0 outside (-2,2), quintic ramps on the
// transition bands. Plays the role of both theta and the truncation profile.
struct SmoothCutoff {
  static double eval(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 1.0 - smoothstep5(a - 1.0);
  }
  static double deriv(double t) {
    double a = std::abs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    double d = -smoothstep5_deriv(a - 1.0);
    return t < 0.0 ? -d : d;
  }
};

inline double theta(double t) { return SmoothCutoff::eval(t); }

inline double theta_R(double x, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("theta_R: radius must be positive");
  return SmoothCutoff::eval(x / R);
}

// Amplitude truncation family: phi_K(x) = phi(x/K), psi_K = d/dx[x phi_K(x)],
// psi1/psi2 are the antiderivatives of s phi_K(s) and s^2 phi_K(s). Since the
// profile is piecewise polynomial, the antiderivatives are evaluated in
// closed form (exact, including the transition band).
struct TruncationFamily {
  double K = 1.0;

  TruncationFamily() = default;
  explicit TruncationFamily(double level) : K(level) {
    if (!(level > 0.0) || !std::isfinite(level))
      throw std::invalid_argument("TruncationFamily: level must be positive and finite");
  }

  double phi(double x) const { return SmoothCutoff::eval(x / K); }

  double psi(double x) const {
    return (x / K) * SmoothCutoff::deriv(x / K) + SmoothCutoff::eval(x / K);
  }

  // int_0^y (1+s)(1 - smoothstep5(s)) ds on [0,1]; A1(1) = 9/14.
  static double ramp_moment1(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 9.0 / 14.0;
    double y2 = y * y;
    return y + y2 / 2.0 +
           y2 * y2 * (-2.5 + y * (1.0 + y * (1.5 - (6.0 / 7.0) * y)));
  }

  // int_0^y (1+s)^2 (1 - smoothstep5(s)) ds on [0,1]; A2(1) = 71/84.
  static double ramp_moment2(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 71.0 / 84.0;
    double y2 = y * y;
    double y3 = y2 * y;
    return y + y2 + y3 / 3.0 +
           y2 * y2 * (-2.5 + y * (-1.0 + y * (7.0 / 3.0 + y * (3.0 / 7.0 - 0.75 * y))));
  }

  double psi1(double x) const {
    double a = std::abs(x);
    if (a <= K) return 0.5 * a * a;
    double base = 0.5 * K * K;
    return base + K * K * ramp_moment1(a / K - 1.0);
  }

  double psi2(double x) const {
    double a = std::abs(x);
    double val;
    if (a <= K)
      val = a * a * a / 3.0;
    else
      val = K * K * K * (1.0 / 3.0 + ramp_moment2(a / K - 1.0));
    return x < 0.0 ? -val : val;
  }

  enum class Member { phi, psi, psi1, psi2 };

  double eval(Member which, double x) const {
    switch (which) {
      case Member::phi: return phi(x);
      case Member::psi: return psi(x);
      case Member::psi1: return psi1(x);
      case Member::psi2: return psi2(x);
    }
    throw std::invalid_argument("TruncationFamily::eval: unknown member");
  }
};

// theta_R(||u||_{X^t}) u(.,t). The running-norm curve must come from a
// StoppingTracker (monotone by construction); a decreasing curve indicates a
// broken restricted-norm implementation upstream.
template <class Field>
Field localize_by_norm(std::span<const double> running_norm, const Field& f, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("localize_by_norm: radius must be positive");
  if (running_norm.empty())
    throw std::invalid_argument("localize_by_norm: empty running-norm history");
  for (std::size_t i = 1; i < running_norm.size(); ++i)
    if (running_norm[i] < running_norm[i - 1])
      throw std::logic_error("localize_by_norm: running norm decreased");
  double factor = theta_R(running_norm.back(), R);
  Field out = f;
  for (auto& z : out.v) z *= factor;
  return out;
}

} // namespace skdv

#endif
