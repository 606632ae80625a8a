#ifndef SKDV_NOISE_HPP
#define SKDV_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skdv/field.hpp"
#include "skdv/rng.hpp"
#include "skdv/spectral.hpp"

namespace skdv {

// Periodic convolution (k * f)(x) = int k(x-y) f(y) dy via the spectral
// product of the physical-normalization transforms.
inline ComplexField convolve(const RealField& kernel, const ComplexField& f) {
  require_same_grid(kernel.grid, f.grid);
  auto ks = to_spectrum(kernel);
  auto fs = to_spectrum(f);
  const double s = std::sqrt(2.0 * kPi); // restores the physical k-hat from the unitary one
  for (int k = 0; k < f.size(); ++k) fs[k] *= s * ks[k];
  return field_from_spectrum(f.grid, std::move(fs));
}

inline RealField convolve(const RealField& kernel, const RealField& f) {
  return real_part(convolve(kernel, to_complex(f)));
}

// Real trigonometric basis of L^2(box): e_0 = 1/sqrt(L),
// e_{2j-1} = sqrt(2/L) cos(xi_j x), e_{2j} = sqrt(2/L) sin(xi_j x).
inline RealField trig_basis_function(const Grid1D& g, int k) {
  RealField e(g);
  const double L = g.length;
  if (k == 0) {
    for (int j = 0; j < g.points; ++j) e[j] = 1.0 / std::sqrt(L);
    return e;
  }
  int mode = (k + 1) / 2;
  if (mode >= g.points / 2)
    throw std::invalid_argument("trig_basis_function: mode beyond grid resolution");
  double amp = std::sqrt(2.0 / L);
  double xi = 2.0 * kPi * mode / L;
  bool is_cos = (k % 2 == 1);
  for (int j = 0; j < g.points; ++j) {
    double ph = xi * g.x(j);
    e[j] = amp * (is_cos ? std::cos(ph) : std::sin(ph));
  }
  return e;
}

// Convolution kernel plus the truncated orthonormal basis it acts on.
// basis_images[k] = kernel * e_k, precomputed once and shared read-only.
struct NoiseOperator {
  RealField kernel;
  int basis_size = 0;
  std::vector<RealField> basis_images;
  std::string label;

  NoiseOperator() = default;
  NoiseOperator(RealField k, int n_basis, std::string which)
      : kernel(std::move(k)), basis_size(n_basis), label(std::move(which)) {
    if (n_basis < 1) throw std::invalid_argument("NoiseOperator: basis size must be >= 1");
    if (n_basis > kernel.grid.points - 2)
      throw std::invalid_argument("NoiseOperator: basis size exceeds grid resolution");
    basis_images.reserve(n_basis);
    for (int i = 0; i < n_basis; ++i)
      basis_images.push_back(convolve(kernel, trig_basis_function(kernel.grid, i)));
  }

  const Grid1D& grid() const { return kernel.grid; }

  NoiseOperator projected(double m) const {
    NoiseOperator out;
    out.kernel = kernel;
    out.basis_size = basis_size;
    out.label = label + "(projected)";
    out.basis_images.reserve(basis_size);
    for (const auto& img : basis_images) out.basis_images.push_back(project_low(img, m));
    return out;
  }
};

// Centered Gaussian kernel of unit width scaled to a prescribed L^2 norm.
inline RealField gaussian_kernel(const Grid1D& g, double l2_mass, double width = 1.0) {
  RealField k = sample_real(g, [width](double x) { return std::exp(-x * x / (2.0 * width * width)); });
  double base = l2_norm(k);
  if (base > 0.0 && l2_mass > 0.0)
    for (auto& v : k.v) v *= l2_mass / base;
  else
    for (auto& v : k.v) v = 0.0;
  return k;
}

// One step's worth of Brownian increments for a truncated expansion.
struct WienerIncrement {
  std::vector<double> values; // i.i.d. N(0, dt)
  std::int64_t step_index = 0;
  std::uint64_t path_id = 0;
};

inline WienerIncrement sample_increment(RngStream& stream, double dt, int n_basis,
                                        std::int64_t step_index = 0,
                                        std::uint64_t path_id = 0) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("sample_increment: dt must be positive");
  WienerIncrement inc;
  inc.step_index = step_index;
  inc.path_id = path_id;
  inc.values.resize(n_basis);
  double s = std::sqrt(dt);
  for (int k = 0; k < n_basis; ++k) inc.values[k] = s * stream.normal();
  return inc;
}

// sum_k (Phi e_k)(x) dbeta_k, the common factor of both noise terms.
inline RealField noise_field(const NoiseOperator& op, const WienerIncrement& inc) {
  if (static_cast<int>(inc.values.size()) < op.basis_size)
    throw std::invalid_argument("noise_field: increment shorter than basis");
  RealField acc(op.grid());
  for (int k = 0; k < op.basis_size; ++k) {
    const RealField& img = op.basis_images[k];
    double b = inc.values[k];
    for (int j = 0; j < acc.size(); ++j) acc[j] += b * img[j];
  }
  return acc;
}

enum class FChoice { u, conj_u, re_u, im_u };

inline cplx apply_f_choice(FChoice f, cplx u) {
  switch (f) {
    case FChoice::u: return u;
    case FChoice::conj_u: return std::conj(u);
    case FChoice::re_u: return cplx(u.real(), 0.0);
    case FChoice::im_u: return cplx(u.imag(), 0.0);
  }
  throw std::invalid_argument("apply_f_choice: unknown choice");
}

inline FChoice parse_f_choice(const std::string& s) {
  if (s == "u") return FChoice::u;
  if (s == "conj_u") return FChoice::conj_u;
  if (s == "re_u") return FChoice::re_u;
  if (s == "im_u") return FChoice::im_u;
  throw std::invalid_argument("unknown F choice: " + s);
}

// F(u)^alpha * sum_k (Phi e_k) dbeta_k. When projection_m is set the
// operator images are P_m-projected first (the hierarchy form u P_m Phi dW).
inline ComplexField noise_term_schrodinger(const ComplexField& u, const NoiseOperator& op,
                                           const WienerIncrement& inc, int alpha, FChoice f,
                                           std::optional<double> projection_m = std::nullopt) {
  require_same_grid(u.grid, op.grid());
  if (alpha < 1) throw std::invalid_argument("noise_term_schrodinger: alpha must be >= 1");
  RealField chi = noise_field(op, inc);
  if (projection_m) chi = project_low(chi, *projection_m);
  ComplexField out(u.grid);
  for (int j = 0; j < u.size(); ++j) out[j] = ipow(apply_f_choice(f, u[j]), alpha) * chi[j];
  return out;
}

// w^alpha * sum_k (Psi e_k) dbeta_k, with the outer P_m of the hierarchy form
// P_m(w Psi dW) applied when requested.
inline RealField noise_term_kdv(const RealField& w, const NoiseOperator& op,
                                const WienerIncrement& inc, int alpha,
                                std::optional<double> projection_m = std::nullopt) {
  require_same_grid(w.grid, op.grid());
  if (alpha < 1) throw std::invalid_argument("noise_term_kdv: alpha must be >= 1");
  RealField chi = noise_field(op, inc);
  RealField out(w.grid);
  for (int j = 0; j < w.size(); ++j) out[j] = ipow(w[j], alpha) * chi[j];
  if (projection_m) out = project_low(out, *projection_m);
  return out;
}

// D(x) = sum_k |(Phi e_k)(x)|^2; with the paired trig basis this is constant
// in x, which the mean-mass oracle relies on.
inline RealField diffusion_intensity(const NoiseOperator& op) {
  RealField d(op.grid());
  for (const auto& img : op.basis_images)
    for (int j = 0; j < d.size(); ++j) d[j] += img[j] * img[j];
  return d;
}

} // namespace skdv

#endif
