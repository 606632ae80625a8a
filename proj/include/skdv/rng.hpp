#ifndef SKDV_RNG_HPP
#define SKDV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "skdv/grid.hpp"

namespace skdv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path_id,
                                 std::uint64_t channel) {
  std::uint64_t s = splitmix64(master ^ splitmix64(path_id + 0x51ULL));
  return splitmix64(s ^ splitmix64(channel + 0xa3ULL));
}

// Seeded Gaussian stream. Box-Muller is implemented by hand so the byte
// stream does not depend on the standard library's normal_distribution.
class RngStream {
 public:
  RngStream() : eng_(0) {}
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t path_id, std::uint64_t channel)
      : eng_(derive_seed(master, path_id, channel)) {}

  double uniform01() {
    // 53-bit mantissa in (0,1]; never returns 0 so log() below is safe.
    std::uint64_t r = eng_();
    return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(2.0 * kPi * u2);
    double s = std::sin(2.0 * kPi * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace skdv

#endif
