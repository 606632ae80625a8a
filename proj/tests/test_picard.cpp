#include <catch2/catch_amalgamated.hpp>

#include "skdv/experiments.hpp"
#include "skdv/picard.hpp"
#include "skdv/stats.hpp"

using namespace skdv;

namespace {

Grid1D box() { return Grid1D(32.0 * kPi, 128); }

ComplexField data_u(const Grid1D& g) {
  return sample_complex(g, [](double x) { return cplx(0.8 * std::exp(-x * x / 4.0), 0.0); });
}

RealField data_w(const Grid1D& g) {
  return sample_real(g, [](double x) { return 0.7 * std::exp(-x * x / 4.0); });
}

} // namespace

TEST_CASE("picard map on trivial inputs") {
  Grid1D g = box();
  int n_t = 33;
  double T = 0.1;
  PicardPair zero{SpaceTimeField(g, n_t, T / (n_t - 1)), SpaceTimeField(g, n_t, T / (n_t - 1))};

  SECTION("all data zero gives the zero pair") {
    PicardContext ctx{ComplexField(g), RealField(g), 1.0, SystemParams{}, nullptr, nullptr, 0.45};
    auto out = picard_apply(zero, ctx, nullptr);
    CHECK(out.u.peak() == 0.0);
    CHECK(out.v.peak() == 0.0);
  }

  SECTION("zero input pair with w0 = 0 returns the free wave") {
    PicardContext ctx{data_u(g), RealField(g), 1.0, SystemParams{}, nullptr, nullptr, 0.45};
    auto out = picard_apply(zero, ctx, nullptr);
    double err = 0.0;
    for (int i = 0; i < n_t; ++i) {
      auto expect = schrodinger_propagate(ctx.u0, out.u.t(i));
      err = std::max(err, l2_distance(out.u.slice(i), expect));
    }
    CHECK(err < 1e-12);
    CHECK(out.v.peak() < 1e-14);
  }
}

TEST_CASE("contraction factor: preconditions, contraction, scaling in T") {
  Grid1D g = box();
  auto u0 = data_u(g);
  auto w0 = data_w(g);
  auto k1 = gaussian_kernel(g, 0.3);
  auto k2 = gaussian_kernel(g, 0.2);
  auto phi = std::make_shared<const NoiseOperator>(k1, 33, "phi");
  auto psi = std::make_shared<const NoiseOperator>(k2, 33, "psi");
  const double R = 2.0, b = 0.45;

  SECTION("identical pairs are rejected") {
    int n_t = 17;
    RngStream rng(1, 0, 9);
    auto p = exp_detail::contraction_pair(rng, g, 0.05, n_t, 1.0, b);
    PicardContext ctx{u0, w0, R, SystemParams{}, nullptr, nullptr, b};
    CHECK_THROWS_AS(contraction_factor(p, p, ctx, nullptr), std::invalid_argument);
  }

  SECTION("small horizons contract and the factor decays at least at the predicted rate") {
    std::vector<double> Ts{0.16, 0.08, 0.04, 0.02};
    const double dt = 0.16 / 128.0;
    const int trials = 5;
    std::vector<double> mean_factor(Ts.size(), 0.0);
    for (int trial = 0; trial < trials; ++trial) {
      for (std::size_t ti = 0; ti < Ts.size(); ++ti) {
        double T = Ts[ti];
        int n_t = static_cast<int>(std::llround(T / dt)) + 1;
        RngStream ra(321, trial, 9);
        auto p1 = exp_detail::contraction_pair(ra, g, T, n_t, 1.0 + 1.2 * ra.uniform01(), b);
        RngStream rb(654, trial, 9);
        auto p2 = exp_detail::contraction_pair(rb, g, T, n_t, 1.0 + 1.2 * rb.uniform01(), b);
        PicardContext ctx{u0, w0, R, SystemParams{}, phi, psi, b, true, 4};
        auto path = make_noise_path(99, trial, n_t - 1, dt, 33);
        double f = contraction_factor(p1, p2, ctx, &path);
        CHECK(f < 1.0);
        mean_factor[ti] += f / trials;
      }
    }
    for (std::size_t ti = 0; ti + 1 < Ts.size(); ++ti)
      CHECK(mean_factor[ti + 1] <= mean_factor[ti]);
    // the localization gain bounds the factor by C T^{1-(a+b)}; the observed
    // decay must be at least that fast (it is typically much faster)
    double slope = loglog_slope(Ts, mean_factor);
    INFO("contraction factor slope " << slope);
    CHECK(slope >= 1.0 - 0.45 - 0.45 - 0.25);
  }
}

TEST_CASE("quadrature guard trips on under-resolved integrands") {
  Grid1D g = box();
  int n_t = 9; // very coarse
  double T = 0.4;
  SpaceTimeField u(g, n_t, T / (n_t - 1)), v(g, n_t, T / (n_t - 1));
  // a fast carrier the trapezoid cannot resolve at this resolution
  for (int i = 0; i < n_t; ++i) {
    double t = u.t(i);
    for (int j = 0; j < g.points; ++j)
      u.at(i, j) = std::polar(1.5, 150.0 * t) * std::exp(-g.x(j) * g.x(j) / 4.0);
  }
  PicardPair p{u, v};
  PicardContext ctx{data_u(g), data_w(g), 1e9, SystemParams{}, nullptr, nullptr, 0.45, true, 2};
  CHECK_THROWS_AS(picard_apply(p, ctx, nullptr), accuracy_error);
}

TEST_CASE("localized inputs keep a norm bounded by the radius") {
  // ||u~_R||_{X^T} <= C R with C stable under refinement: evaluate the
  // localization on oversized inputs at two resolutions.
  const double b = 0.45, R = 1.0;
  double cmax_coarse = 0.0, cmax_fine = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    for (int pass = 0; pass < 2; ++pass) {
      Grid1D g(32.0 * kPi, pass ? 128 : 64);
      int n_t = pass ? 65 : 33;
      RngStream rng(71, trial, 3);
      auto spec =
          make_probe_spec(rng, g.length, 0.4, g.points / 6, ModulationKind::schrodinger_near,
                          false, 6);
      auto F = evaluate_probe(spec, g, n_t);
      // scale so the running norm crosses R inside the window
      BourgainWeight wx = BourgainWeight::X(b, 1.0);
      double full = restricted_norm(F, F.span(), wx);
      if (full == 0.0) continue;
      for (auto& z : F.values) z *= 3.0 * R / full;

      double run = 0.0;
      SpaceTimeField loc = F;
      for (int i = 0; i < n_t; ++i) {
        run = std::max(run, restricted_norm(F, F.t(i), wx));
        double th = theta_R(run, R);
        for (int j = 0; j < g.points; ++j) loc.at(i, j) *= th;
      }
      double ratio = restricted_norm(loc, loc.span(), wx) / R;
      (pass ? cmax_fine : cmax_coarse) = std::max(pass ? cmax_fine : cmax_coarse, ratio);
    }
  }
  INFO("||u~_R||/R coarse " << cmax_coarse << " fine " << cmax_fine);
  CHECK(std::isfinite(cmax_coarse));
  CHECK(cmax_fine <= 2.0 * cmax_coarse);
}

TEST_CASE("localization is lipschitz in the input") {
  const double b = 0.45, R = 1.0;
  Grid1D g(32.0 * kPi, 64);
  int n_t = 33;
  BourgainWeight wx = BourgainWeight::X(b, 1.0);
  double cmax = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    RngStream rng(81, trial, 4);
    auto s1 = make_probe_spec(rng, g.length, 0.4, 10, ModulationKind::schrodinger_near, false, 6);
    auto F1 = evaluate_probe(s1, g, n_t);
    auto F2 = F1;
    // a nearby second input
    RngStream rng2(82, trial, 4);
    auto sp = make_probe_spec(rng2, g.length, 0.4, 10, ModulationKind::schrodinger_near, false, 2);
    auto P = evaluate_probe(sp, g, n_t);
    for (std::size_t i = 0; i < F2.values.size(); ++i) F2.values[i] += 0.15 * P.values[i];

    auto localize = [&](const SpaceTimeField& F) {
      double run = 0.0;
      SpaceTimeField loc = F;
      for (int i = 0; i < n_t; ++i) {
        run = std::max(run, restricted_norm(F, F.t(i), wx));
        double th = theta_R(run, R);
        for (int j = 0; j < g.points; ++j) loc.at(i, j) *= th;
      }
      return loc;
    };
    auto L1 = localize(F1);
    auto L2 = localize(F2);
    SpaceTimeField dL = L1, dF = F1;
    for (std::size_t i = 0; i < dL.values.size(); ++i) {
      dL.values[i] -= L2.values[i];
      dF.values[i] -= F2.values[i];
    }
    double den = restricted_norm(dF, dF.span(), wx);
    if (den < 1e-12) continue;
    cmax = std::max(cmax, restricted_norm(dL, dL.span(), wx) / den);
  }
  INFO("localization lipschitz constant " << cmax);
  CHECK(std::isfinite(cmax));
  CHECK(cmax < 50.0);
}
