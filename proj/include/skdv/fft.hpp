#ifndef SKDV_FFT_HPP
#define SKDV_FFT_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace skdv {

// Iterative radix-2 complex FFT. Grid sizes in this project are powers of
// two by construction, so no other radices are needed. Twiddle tables are
// immutable once built and shared behind a mutex-guarded cache, which makes
// concurrent transforms from ensemble workers safe.
namespace fft_detail {

struct Tables {
  std::vector<std::size_t> bitrev;
  std::vector<std::complex<double>> w; // forward twiddles, size n/2
};

inline const Tables& tables_for(std::size_t n) {
  static std::mutex mtx;
  static std::map<std::size_t, std::unique_ptr<Tables>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  auto t = std::make_unique<Tables>();
  t->bitrev.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
    t->bitrev[i] = r;
  }
  t->w.resize(n / 2);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -two_pi * static_cast<double>(k) / static_cast<double>(n);
    t->w[k] = {std::cos(ang), std::sin(ang)};
  }
  auto& ref = *t;
  cache.emplace(n, std::move(t));
  return ref;
}

} // namespace fft_detail

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place transform. forward: X_k = sum_j x_j e^{-2pi i jk/n}.
// inverse: x_j = (1/n) sum_k X_k e^{+2pi i jk/n}.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 1) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  const auto& t = fft_detail::tables_for(n);

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = t.bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = t.w[k * stride];
        if (inverse) w = std::conj(w);
        std::complex<double> u = a[start + k];
        std::complex<double> v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= s;
  }
}

} // namespace skdv

#endif
