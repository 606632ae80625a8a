#include <catch2/catch_amalgamated.hpp>

#include "skdv/functionals.hpp"
#include "skdv/noise.hpp"
#include "skdv/rng.hpp"

using namespace skdv;

namespace {

Grid1D box() { return Grid1D(64.0 * kPi, 1024); }

// 8th-order central difference on the periodic grid
RealField fd_derivative(const RealField& f) {
  static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  RealField out(f.grid);
  int n = f.size();
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 1; k <= 4; ++k)
      acc += c[k - 1] * (f[(j + k) % n] - f[(j - k + 8 * n) % n]);
    out[j] = acc / f.grid.dx;
  }
  return out;
}

ComplexField smooth_complex(const Grid1D& g, unsigned seed) {
  RngStream rng(seed);
  double a = 0.6 + 0.4 * rng.uniform01();
  double b = 0.5 * rng.normal();
  double c = rng.normal();
  return sample_complex(g, [=](double x) {
    return a * std::exp(-x * x / 6.0) * std::polar(1.0, b * x + 0.2 * c * std::sin(0.25 * x));
  });
}

RealField smooth_real(const Grid1D& g, unsigned seed) {
  RngStream rng(seed + 1000);
  double a = 0.5 + 0.5 * rng.uniform01();
  double c = rng.normal();
  return sample_real(g, [=](double x) {
    return a * std::exp(-x * x / 8.0) * (1.0 + 0.3 * c * std::sin(0.5 * x));
  });
}

} // namespace

TEST_CASE("mass basics") {
  Grid1D g = box();
  CHECK(mass(ComplexField(g)) == 0.0);
  double xi0 = 2.0 * kPi * 3.0 / g.length;
  auto mode = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });
  CHECK(mass(mode) == Catch::Approx(g.length).epsilon(1e-12));
  auto gauss = sample_complex(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  CHECK(mass(gauss) == Catch::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-8));
}

TEST_CASE("momentum basics and finite-difference oracle") {
  Grid1D g = box();
  auto wr = smooth_real(g, 5);
  auto ureal = sample_complex(g, [](double x) { return cplx(std::exp(-x * x / 4.0), 0.0); });
  double half_w2 = 0.0;
  for (int j = 0; j < g.points; ++j) half_w2 += 0.5 * wr[j] * wr[j];
  half_w2 *= g.dx;
  CHECK(momentum(ureal, wr) == Catch::Approx(half_w2).margin(1e-12));

  double xi0 = 2.0 * kPi * 7.0 / g.length;
  auto mode = sample_complex(g, [&](double x) { return std::polar(1.0, xi0 * x); });
  CHECK(momentum(mode, RealField(g)) == Catch::Approx(-xi0 * g.length).epsilon(1e-10));

  auto u = smooth_complex(g, 9);
  auto w = smooth_real(g, 9);
  RealField re(g), im(g);
  for (int j = 0; j < g.points; ++j) {
    re[j] = u[j].real();
    im[j] = u[j].imag();
  }
  auto rex = fd_derivative(re);
  auto imx = fd_derivative(im);
  double oracle = 0.0;
  for (int j = 0; j < g.points; ++j) {
    // Im(u conj(u_x)) = im*rex - re*imx
    oracle += im[j] * rex[j] - re[j] * imx[j];
    oracle += 0.5 * w[j] * w[j];
  }
  oracle *= g.dx;
  CHECK(momentum(u, w) == Catch::Approx(oracle).margin(1e-7));
}

TEST_CASE("energy reduces to the untruncated form below the cutoff") {
  Grid1D g = box();
  auto u = smooth_complex(g, 21);
  auto w = smooth_real(g, 21);
  TruncationFamily fam(16.0); // far above the field amplitudes
  CHECK(energy(ComplexField(g), RealField(g), fam) == 0.0);
  double ecut = energy(u, w, fam);
  // independent evaluation of the K = infinity integrand with
  // finite-difference derivatives
  RealField re(g), im(g);
  for (int j = 0; j < g.points; ++j) {
    re[j] = u[j].real();
    im[j] = u[j].imag();
  }
  auto rex = fd_derivative(re);
  auto imx = fd_derivative(im);
  auto wx = fd_derivative(w);
  double oracle = 0.0;
  for (int j = 0; j < g.points; ++j) {
    double a2 = std::norm(u[j]);
    oracle += rex[j] * rex[j] + imx[j] * imx[j];
    oracle += 0.5 * wx[j] * wx[j] - w[j] * w[j] * w[j] / 6.0;
    oracle += a2 * w[j] + 0.5 * a2 * a2;
  }
  oracle *= g.dx;
  CHECK(ecut == Catch::Approx(oracle).margin(1e-8));
  CHECK(ecut == Catch::Approx(energy_uncut(u, w)).margin(1e-12));
}

TEST_CASE("lyapunov functional lower bound is empirically positive") {
  Grid1D g(32.0 * kPi, 256);
  RngStream rng(31);
  for (double K : {4.0, 16.0, 64.0}) {
    TruncationFamily fam(K);
    double cmin = std::numeric_limits<double>::infinity();
    int trials = K == 4.0 ? 500 : 100;
    for (int t = 0; t < trials; ++t) {
      ComplexField u(g);
      RealField w(g);
      // random H^1-type fields from a few low modes
      for (int m = 0; m < 6; ++m) {
        double xi = 2.0 * kPi * (1 + static_cast<int>(rng.uniform01() * 10)) / g.length;
        double au = rng.normal(), bu = rng.normal(), aw = rng.normal();
        for (int j = 0; j < g.points; ++j) {
          double x = g.x(j);
          double env = std::exp(-x * x / 60.0);
          u[j] += env * cplx(au * std::cos(xi * x), bu * std::sin(xi * x));
          w[j] += env * aw * std::cos(xi * x);
        }
      }
      double Q = lyapunov_Q(u, w, fam);
      double rhs = std::pow(sobolev_norm(u, 1.0), 2) + std::pow(sobolev_norm(w, 1.0), 2) +
                   std::pow(lp_norm(u, 4.0), 4) + std::pow(lp_norm(w, 3.0), 3) +
                   std::pow(l2_norm(w), 10.0 / 3.0);
      if (rhs > 0.0) cmin = std::min(cmin, Q / rhs);
    }
    INFO("K = " << K << " empirical c = " << cmin);
    CHECK(cmin > 0.0);
  }
}

TEST_CASE("lyapunov functional scaling is dominated by the tenth power") {
  Grid1D g(32.0 * kPi, 256);
  auto u = sample_complex(g, [](double x) { return cplx(std::exp(-x * x / 4.0), 0.0); });
  TruncationFamily fam(1e9);
  CHECK(lyapunov_Q(ComplexField(g), RealField(g), fam) == 0.0);
  double lam = 40.0;
  ComplexField lu = u;
  for (auto& z : lu.v) z *= lam;
  double q = lyapunov_Q(lu, RealField(g), fam);
  double m = mass(u);
  CHECK(q / (std::pow(lam, 10.0) * std::pow(m, 5.0)) == Catch::Approx(1.0).epsilon(0.01));
}

TEST_CASE("mixed norms") {
  Grid1D g(16.0, 64);
  int n_t = 32;
  double dt = 0.005;
  SpaceTimeField F(g, n_t, dt);
  SECTION("constant field") {
    for (auto& z : F.values) z = cplx(-1.7, 0.0);
    double T = n_t * dt; // Riemann cell convention
    for (auto [q, r] : {std::pair{2.0, 4.0}, std::pair{3.0, 3.0}}) {
      double expect = 1.7 * std::pow(g.length, 1.0 / r) * std::pow(T, 1.0 / q);
      CHECK(mixed_norm(F, q, r, Nesting::space_outer) == Catch::Approx(expect).epsilon(1e-12));
      CHECK(mixed_norm(F, q, r, Nesting::time_outer) == Catch::Approx(expect).epsilon(1e-12));
    }
    double inf = std::numeric_limits<double>::infinity();
    CHECK(mixed_norm(F, inf, 2.0, Nesting::space_outer) ==
          Catch::Approx(1.7 * std::sqrt(g.length)).epsilon(1e-12));
    CHECK_THROWS_AS(mixed_norm(F, 0.0, 2.0, Nesting::space_outer), std::invalid_argument);
  }
  SECTION("single-timestep support is dt independent under the time sup") {
    SpaceTimeField G(g, n_t, dt);
    SpaceTimeField H(g, n_t, dt / 2.0);
    for (int j = 0; j < g.points; ++j) {
      G.at(5, j) = cplx(std::exp(-g.x(j) * g.x(j)), 0.0);
      H.at(5, j) = G.at(5, j);
    }
    double inf = std::numeric_limits<double>::infinity();
    CHECK(mixed_norm(G, inf, 2.0, Nesting::space_outer) ==
          Catch::Approx(mixed_norm(H, inf, 2.0, Nesting::space_outer)).epsilon(1e-14));
  }
  SECTION("tensor products separate") {
    auto f = sample_real(g, [](double x) { return std::exp(-x * x / 3.0); });
    std::vector<double> gt(n_t);
    for (int i = 0; i < n_t; ++i) gt[i] = 1.0 + std::sin(0.4 * i);
    SpaceTimeField G(g, n_t, dt);
    for (int i = 0; i < n_t; ++i)
      for (int j = 0; j < g.points; ++j) G.at(i, j) = f[j] * gt[i];
    double q = 5.0, r = 2.0;
    double nf = lp_norm(f, r);
    double ng = 0.0;
    for (double v : gt) ng += std::pow(std::abs(v), q) * dt;
    ng = std::pow(ng, 1.0 / q);
    CHECK(mixed_norm(G, q, r, Nesting::space_outer) == Catch::Approx(nf * ng).epsilon(1e-10));
  }
  SECTION("equal exponents agree between nestings on random data") {
    RngStream rng(77);
    for (auto& z : F.values) z = cplx(rng.normal(), rng.normal());
    double a = mixed_norm(F, 3.5, 3.5, Nesting::space_outer);
    double b = mixed_norm(F, 3.5, 3.5, Nesting::time_outer);
    CHECK(a == Catch::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("mass drift oracle") {
  Grid1D g(32.0 * kPi, 256);
  RealField flat(g);
  std::vector<double> times{0.0, 0.5, 1.0};
  auto zero_curve = mass_drift_oracle(2.0, flat, times);
  for (double v : zero_curve) CHECK(v == 2.0);

  for (auto& x : flat.v) x = 0.25;
  auto curve = mass_drift_oracle(2.0, flat, times);
  CHECK(curve[0] == Catch::Approx(2.0));
  CHECK(curve[2] == Catch::Approx(2.0 * std::exp(0.25)).epsilon(1e-12));

  RealField bumpy = flat;
  bumpy[10] = 0.5;
  CHECK_THROWS_AS(mass_drift_oracle(2.0, bumpy, times), std::invalid_argument);
}
