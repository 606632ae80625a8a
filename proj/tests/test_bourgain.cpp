#include <catch2/catch_amalgamated.hpp>

#include "skdv/bourgain.hpp"
#include "skdv/probes.hpp"
#include "skdv/quadrature.hpp"
#include "skdv/rng.hpp"

using namespace skdv;

namespace {

SpaceTimeField free_wave(const Grid1D& g, int n_t, double span, double amp, double width,
                         bool windowed) {
  auto f0 = sample_complex(g, [&](double x) {
    return cplx(amp * std::exp(-x * x / (2.0 * width * width)), 0.0);
  });
  SpaceTimeField F(g, n_t, span / (n_t - 1));
  for (int i = 0; i < n_t; ++i) F.set_slice(i, schrodinger_propagate(f0, F.t(i)));
  if (windowed) apply_time_taper(F);
  return F;
}

} // namespace

TEST_CASE("bourgain weight validation") {
  CHECK_THROWS_AS(BourgainWeight(BourgainWeight::Dispersion::schrodinger, 0.4, 1.0, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(BourgainWeight::X(1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(BourgainWeight::X(0.4, -1.0), std::invalid_argument);
  CHECK_NOTHROW(BourgainWeight::Y_hom(0.45, 1.0));
  BourgainWeight w = BourgainWeight::Y_hom(0.45, 1.0);
  CHECK(w.weight(0.0, 3.0) == 0.0); // xi = 0 column dropped
}

TEST_CASE("spacetime norm: zero field, homogeneity, window precondition") {
  Grid1D g(32.0 * kPi, 128);
  SpaceTimeField Z(g, 32, 0.01);
  BourgainWeight wx = BourgainWeight::X(0.45, 1.0);
  CHECK(spacetime_norm(Z, wx) == 0.0);

  RngStream rng(3, 0, 0);
  auto spec = make_probe_spec(rng, g.length, 1.0, 20, ModulationKind::schrodinger_near, false);
  auto F = evaluate_probe(spec, g, 96);
  double base = spacetime_norm(F, wx);
  SpaceTimeField G = F;
  for (auto& z : G.values) z *= cplx(-2.0, 1.0);
  CHECK(spacetime_norm(G, wx) == Catch::Approx(std::abs(cplx(-2.0, 1.0)) * base).epsilon(1e-12));

  auto unwindowed = free_wave(g, 64, 1.0, 1.0, 1.5, false);
  CHECK_THROWS_AS(spacetime_norm(unwindowed, wx), std::invalid_argument);
}

TEST_CASE("windowed free wave matches the separated analytic transform") {
  Grid1D g(32.0 * kPi, 256);
  const int n_t = 128;
  const double span = 1.0, s = 1.5, A = 0.8;
  const double tc = 0.5, sig = 0.07;
  auto f0 = sample_complex(g, [&](double x) {
    return cplx(A * std::exp(-x * x / (2.0 * s * s)), 0.0);
  });
  SpaceTimeField F(g, n_t, span / (n_t - 1));
  for (int i = 0; i < n_t; ++i) {
    double t = F.t(i);
    auto slice = schrodinger_propagate(f0, t);
    double env = std::exp(-(t - tc) * (t - tc) / (2.0 * sig * sig));
    for (int j = 0; j < g.points; ++j) F.at(i, j) = env * slice[j];
  }
  for (double b : {0.45, 0.3}) {
    BourgainWeight wx = BourgainWeight::X(b, 1.0);
    double discrete = spacetime_norm(F, wx);
    double xi_part = 2.0 * adaptive_simpson(
                               [&](double xi) {
                                 double fh = A * s * std::exp(-s * s * xi * xi / 2.0);
                                 return std::pow(1.0 + xi, 2.0) * fh * fh;
                               },
                               0.0, 50.0 / s, 1e-13);
    double mu_part = 2.0 * adaptive_simpson(
                               [&](double mu) {
                                 double eh = sig * std::exp(-sig * sig * mu * mu / 2.0);
                                 return std::pow(1.0 + mu, 2.0 * b) * eh * eh;
                               },
                               0.0, 60.0 / sig, 1e-13);
    double oracle = std::sqrt(xi_part * mu_part);
    CHECK(discrete == Catch::Approx(oracle).epsilon(0.10));
  }
}

TEST_CASE("restricted norm: endpoints and monotonicity along a trajectory") {
  Grid1D g(32.0 * kPi, 128);
  auto F = free_wave(g, 96, 1.0, 1.0, 1.5, true);
  BourgainWeight wx = BourgainWeight::X(0.45, 1.0);
  CHECK(restricted_norm(F, 0.0, wx) == 0.0);
  CHECK(restricted_norm(F, F.span() + 1.0, wx) ==
        Catch::Approx(spacetime_norm(F, wx)).epsilon(1e-10));
  CHECK_THROWS_AS(restricted_norm(F, 0.5, BourgainWeight::X(0.5, 1.0)), std::invalid_argument);

  // raw sharp-cut values sampled along a sustained-amplitude trajectory
  auto traj = free_wave(g, 96, 1.0, 1.0, 1.5, false);
  double prev = 0.0;
  bool monotone = true;
  for (int i = 0; i < 96; i += 4) {
    double v = restricted_norm(traj, traj.t(i), wx);
    if (v < prev * (1.0 - 1e-10)) monotone = false;
    prev = std::max(prev, v);
  }
  CHECK(monotone);
}

TEST_CASE("spacetime norm satisfies the norm axioms empirically") {
  Grid1D g(16.0 * kPi, 64);
  RngStream rng(17, 0, 0);
  BourgainWeight ws[3] = {BourgainWeight::X(0.45, 1.0), BourgainWeight::Y(0.45, 1.0),
                          BourgainWeight::Y_hom(0.45, 1.0)};
  for (int trial = 0; trial < 100; ++trial) {
    auto sa = make_probe_spec(rng, g.length, 1.0, 8, ModulationKind::broadband, false, 4);
    auto sb = make_probe_spec(rng, g.length, 1.0, 8, ModulationKind::broadband, false, 4);
    auto A = evaluate_probe(sa, g, 48);
    auto B = evaluate_probe(sb, g, 48);
    SpaceTimeField S = A;
    for (std::size_t i = 0; i < S.values.size(); ++i) S.values[i] += B.values[i];
    for (const auto& w : ws) {
      double na = spacetime_norm(A, w), nb = spacetime_norm(B, w), nab = spacetime_norm(S, w);
      CHECK(nab <= na + nb + 1e-9 * (na + nb));
    }
  }
}

TEST_CASE("sup-H1 is controlled by the high-modulation norm") {
  Grid1D g(16.0 * kPi, 64);
  BourgainWeight wb = BourgainWeight::X(0.55, 1.0);
  double cmax_coarse = 0.0, cmax_fine = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    RngStream rng(400 + trial, 0, 0);
    auto spec = make_probe_spec(rng, g.length, 1.0, 8, ModulationKind::schrodinger_near, false, 6);
    auto F = evaluate_probe(spec, g, 48);
    double r = sup_h1(F) / spacetime_norm(F, wb);
    cmax_coarse = std::max(cmax_coarse, r);
    Grid1D g2(g.length, 128);
    auto F2 = evaluate_probe(spec, g2, 96);
    double r2 = sup_h1(F2) / spacetime_norm(F2, wb);
    cmax_fine = std::max(cmax_fine, r2);
  }
  INFO("embedding constants " << cmax_coarse << " vs refined " << cmax_fine);
  CHECK(cmax_fine <= 2.0 * cmax_coarse);
  CHECK(std::isfinite(cmax_coarse));
}

TEST_CASE("tilde-Y intersection norm combines both weights") {
  Grid1D g(16.0 * kPi, 64);
  RngStream rng(23, 0, 0);
  auto spec = make_probe_spec(rng, g.length, 1.0, 8, ModulationKind::kdv_near, true, 5);
  auto F = evaluate_probe(spec, g, 48);
  double T = F.span();
  double ny = restricted_norm(F, T, BourgainWeight::Y(0.45, 1.0));
  double nh = restricted_norm(F, T, BourgainWeight::Y_hom(0.45, 1.0));
  CHECK(tilde_y_norm(F, T, 0.45, 1.0) == Catch::Approx(std::hypot(ny, nh)).epsilon(1e-12));
  CHECK(tilde_y_norm(F, T, 0.45, 1.0) >= std::max(ny, nh));
}
