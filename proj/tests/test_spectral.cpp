#include <catch2/catch_amalgamated.hpp>

#include "skdv/functionals.hpp"
#include "skdv/quadrature.hpp"
#include "skdv/rng.hpp"
#include "skdv/spectral.hpp"

using namespace skdv;

namespace {

Grid1D box() { return Grid1D(64.0 * kPi, 1024); }

ComplexField random_band_limited(const Grid1D& g, RngStream& rng, int band) {
  std::vector<cplx> spec(g.points, cplx(0.0));
  for (int k = 0; k < g.points; ++k) {
    int m = g.mode(k);
    if (std::abs(m) > band || k == g.nyquist_bin()) continue;
    spec[k] = cplx(rng.normal(), rng.normal()) / (1.0 + std::abs(m));
  }
  return field_from_spectrum(g, std::move(spec));
}

} // namespace

TEST_CASE("grid invariants") {
  Grid1D g = box();
  CHECK(g.dx * g.points == Catch::Approx(g.length).epsilon(0));
  CHECK_THROWS_AS(Grid1D(10.0, 100), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(Grid1D(10.0, 8), std::invalid_argument);    // too small
  CHECK_THROWS_AS(Grid1D(-1.0, 64), std::invalid_argument);
  // wavenumbers symmetric about zero except the single Nyquist mode
  int negatives = 0, positives = 0;
  for (int k = 0; k < g.points; ++k) {
    double xi = g.xi(k);
    if (xi > 0) ++positives;
    if (xi < 0) ++negatives;
  }
  CHECK(negatives == positives + 1);
}

TEST_CASE("transform round trip") {
  RngStream rng(11);
  for (int n : {16, 64, 256, 1024}) {
    Grid1D g(32.0, n);
    ComplexField f(g);
    for (auto& z : f.v) z = cplx(rng.normal(), rng.normal());
    auto back = field_from_spectrum(g, to_spectrum(f));
    CHECK(l2_distance(f, back) / l2_norm(f) < 1e-12);
  }
}

TEST_CASE("schrodinger propagator on a single mode") {
  Grid1D g = box();
  double xi0 = 2.0 * kPi * 4.0 / g.length; // = 8*pi/L
  auto f = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });
  auto prop = schrodinger_propagate(f, 0.3);
  cplx phase = std::polar(1.0, -xi0 * xi0 * 0.3);
  double err = 0.0;
  for (int j = 0; j < g.points; ++j) err = std::max(err, std::abs(prop[j] - phase * f[j]));
  CHECK(err < 1e-12);

  auto same = schrodinger_propagate(f, 0.0);
  CHECK(l2_distance(f, same) == 0.0);
  CHECK_THROWS_AS(schrodinger_propagate(f, std::nan("")), std::invalid_argument);
}

TEST_CASE("airy propagator on a cosine mode") {
  Grid1D g = box();
  double xi0 = 2.0 * kPi * 6.0 / g.length;
  double t = 0.42;
  auto f = sample_real(g, [&](double x) { return std::cos(xi0 * x); });
  auto prop = airy_propagate(f, t);
  double err = 0.0;
  for (int j = 0; j < g.points; ++j)
    err = std::max(err, std::abs(prop[j] - std::cos(xi0 * g.x(j) + xi0 * xi0 * xi0 * t)));
  CHECK(err < 1e-12);

  auto same = airy_propagate(f, 0.0);
  CHECK(l2_distance(f, same) < 1e-15);
  CHECK_THROWS_AS(airy_propagate(f, std::nan("")), std::invalid_argument);
}

TEST_CASE("airy propagation keeps fields real and preserves L2") {
  Grid1D g = box();
  RngStream rng(7);
  auto f = real_part(random_band_limited(g, rng, 40));
  auto via_complex = schrodinger_propagate(to_complex(f), 0.0); // sanity of helpers
  CHECK(max_imag(via_complex) < 1e-12);
  auto prop = airy_propagate(f, 0.7);
  CHECK(std::abs(l2_norm(prop) - l2_norm(f)) / l2_norm(f) < 1e-12);
}

TEST_CASE("unitarity over an ensemble of random fields") {
  Grid1D g(16.0 * kPi, 256);
  RngStream rng(3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto f = random_band_limited(g, rng, 100);
    double n0 = l2_norm(f);
    worst = std::max(worst, std::abs(l2_norm(schrodinger_propagate(f, 0.37)) - n0) / n0);
    auto w = real_part(f);
    double nw = l2_norm(w);
    worst = std::max(worst, std::abs(l2_norm(airy_propagate(w, 0.53)) - nw) / nw);
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("semigroup property") {
  Grid1D g = box();
  RngStream rng(5);
  auto f = random_band_limited(g, rng, 60);
  auto one = schrodinger_propagate(f, 0.3 + 0.4);
  auto two = schrodinger_propagate(schrodinger_propagate(f, 0.3), 0.4);
  CHECK(l2_distance(one, two) / l2_norm(f) < 1e-11);
  auto w = real_part(f);
  auto uone = airy_propagate(w, 0.25 + 0.15);
  auto utwo = airy_propagate(airy_propagate(w, 0.25), 0.15);
  CHECK(l2_distance(uone, utwo) / l2_norm(w) < 1e-11);
}

TEST_CASE("frequency projections") {
  Grid1D g = box();
  double xi0 = 2.0 * kPi * 12.0 / g.length;
  auto f = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });

  auto kept = project_low(f, xi0 + 0.1);
  CHECK(l2_distance(kept, f) / l2_norm(f) < 1e-13);
  auto removed = project_low(f, xi0 - 0.1);
  CHECK(l2_norm(removed) < 1e-13);
  CHECK_THROWS_AS(project_low(f, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(project_high(f, -1.0), std::invalid_argument);

  RngStream rng(23);
  auto h = random_band_limited(g, rng, 200);
  double m = 2.0 * kPi * 37.0 / g.length;
  auto lo = project_low(h, m);
  auto hi = project_high(h, m);
  // complementary and orthogonal
  ComplexField sum = lo;
  for (int j = 0; j < g.points; ++j) sum[j] += hi[j];
  CHECK(l2_distance(sum, h) / l2_norm(h) < 1e-13);
  CHECK(std::abs(inner(lo, hi)) / (l2_norm(lo) * l2_norm(hi)) < 1e-12);
  // idempotence
  CHECK(l2_distance(project_low(lo, m), lo) / l2_norm(lo) < 1e-14);
}

TEST_CASE("bessel potential weights") {
  Grid1D g = box();
  auto ones = sample_complex(g, [](double) { return cplx(1.0, 0.0); });
  CHECK(l2_distance(bessel_potential(ones, 2.5), ones) / l2_norm(ones) < 1e-13);

  double xi0 = 2.0 * kPi * 9.0 / g.length;
  auto f = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });
  auto jf = bessel_potential(f, 1.5);
  double scale = std::pow(1.0 + xi0, 1.5);
  double err = 0.0;
  for (int j = 0; j < g.points; ++j) err = std::max(err, std::abs(jf[j] - scale * f[j]));
  CHECK(err < 1e-11);

  RngStream rng(29);
  auto h = random_band_limited(g, rng, 80);
  CHECK(l2_distance(bessel_potential(h, 0.0), h) < 1e-13);
  auto ab = bessel_potential(bessel_potential(h, 0.7), -0.3);
  auto apb = bessel_potential(h, 0.4);
  CHECK(l2_distance(ab, apb) / l2_norm(h) < 1e-12);
  CHECK_THROWS_AS(bessel_potential(h, std::nan("")), std::invalid_argument);
}

TEST_CASE("sobolev norm basics and quadrature oracle") {
  Grid1D g = box();
  CHECK(sobolev_norm(ComplexField(g), 1.0) == 0.0);

  double xi0 = 2.0 * kPi * 5.0 / g.length;
  auto f = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });
  CHECK(sobolev_norm(f, 1.0) ==
        Catch::Approx((1.0 + xi0) * l2_norm(f)).epsilon(1e-12));

  // L2-normalized Gaussian against direct quadrature of the analytic
  // transform: f = A exp(-x^2/(2 s^2)), f-hat = A s exp(-s^2 xi^2 / 2).
  // The |xi| kink in the weight limits the lattice sum to O(dxi^2) accuracy,
  // so a long box is used to reach the 1e-6 comparison.
  Grid1D gbig(1024.0 * kPi, 16384);
  double s = 1.3;
  double A = 1.0 / std::sqrt(s * std::sqrt(kPi));
  auto gauss = sample_complex(gbig, [&](double x) {
    return cplx(A * std::exp(-x * x / (2.0 * s * s)), 0.0);
  });
  CHECK(mass(gauss) == Catch::Approx(1.0).epsilon(1e-10));
  double oracle_sq = 2.0 * adaptive_simpson(
                               [&](double xi) {
                                 double ahat = A * s * std::exp(-s * s * xi * xi / 2.0);
                                 return std::pow(1.0 + std::abs(xi), 2.0) * ahat * ahat;
                               },
                               0.0, 60.0 / s, 1e-13);
  CHECK(sobolev_norm(gauss, 1.0) == Catch::Approx(std::sqrt(oracle_sq)).epsilon(1e-6));

  CHECK_THROWS_AS(sobolev_norm(f, 1.0, -0.5), std::invalid_argument);
  CHECK(sobolev_norm(f, 0.0, -0.375) > 0.0);
}

TEST_CASE("mass equals squared L2 norm through the spectrum") {
  Grid1D g = box();
  RngStream rng(31);
  auto f = random_band_limited(g, rng, 90);
  double viaspec = sobolev_norm(f, 0.0);
  CHECK(viaspec * viaspec == Catch::Approx(mass(f)).epsilon(1e-12));
}

TEST_CASE("dealiasing removes the top third and the Nyquist mode") {
  Grid1D g(16.0 * kPi, 256);
  RngStream rng(37);
  auto f = random_band_limited(g, rng, 127);
  auto d = dealias(f);
  auto spec = to_spectrum(d);
  for (int k = 0; k < g.points; ++k) {
    int m = std::abs(g.mode(k));
    if (m > g.points / 3 || k == g.nyquist_bin()) CHECK(std::abs(spec[k]) < 1e-13);
  }
}
