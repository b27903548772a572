#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "volterra/hilbert.hpp"
#include "volterra/integrate1d.hpp"
#include "volterra/kernels.hpp"
#include "volterra/paths.hpp"
#include "volterra/sampling.hpp"

using namespace volterra;

namespace {

GridPath linear_driver(const Grid& g) {
  GridPath p(g, 1);
  for (std::size_t i = 0; i <= g.intervals(); ++i) p.coord(i, 0) = g.time(i);
  return p;
}

GridPath wiener2(const Grid& g, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.grid = g;
  HOperator q(2);
  q(0, 0) = 1.0; q(0, 1) = 0.3; q(1, 0) = 0.3; q(1, 1) = 0.7;
  cfg.q0 = q;
  return sample_qwiener(cfg);
}

}  // namespace

TEST_CASE("integrand spec enforces the young condition") {
  Grid g(1.0, 8);
  GridPath w = linear_driver(g);
  CHECK_THROWS_AS(
      IntegrandSpec(fractional_kernel(0.25, HOperator::identity(1)), w, 0.2),
      std::invalid_argument);
  CHECK_THROWS_AS(
      IntegrandSpec(fractional_kernel(0.25, HOperator::identity(2)), w, 0.9),
      std::invalid_argument);  // kernel dim 2 against a scalar driver
  // boundary: gamma == eta is not integrable
  CHECK_THROWS_AS(
      IntegrandSpec(fractional_kernel(0.5, HOperator::identity(1)), w, 0.5),
      std::invalid_argument);
}

TEST_CASE("identity kernel telescopes to the path increment") {
  Grid g(1.0, 128);
  GridPath w = wiener2(g, 0x7E1E);
  IntegrandSpec spec(identity_kernel(2), w, 0.49);
  Volterra1DResult res = volterra_integral(spec, 7, 1e-9);
  CHECK(res.unconverged == 0);

  double worst = 0.0;
  for (std::size_t tau = 0; tau <= 128; ++tau)
    for (std::size_t t = 0; t <= tau; ++t)
      for (std::size_t c = 0; c < 2; ++c) {
        const double want = w.coord(t, c) - w.coord(0, c);
        worst = std::max(worst, std::abs(res.values.coord(tau, t, c) - want));
      }
  CHECK(worst <= 1e-12);
}

TEST_CASE("riemann sum freezes against high-precision reference values") {
  // kernel (1-s)^{-1/4} against dW(s) = ds on the 1024-point grid; the
  // level-10 left sums below were evaluated in 40-digit arithmetic
  Grid g(1.0, 1024);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  CHECK(riemann_sum(spec, 1.0, 1.0, 10)[0] ==
        doctest::Approx(1.3293288238139219).epsilon(1e-13));
  CHECK(riemann_sum(spec, 1.0, 0.5, 10)[0] ==
        doctest::Approx(0.5404362310981861).epsilon(1e-13));
  // and the limit they approach: int_0^t (1-s)^{-1/4} ds
  CHECK(riemann_sum(spec, 1.0, 0.5, 10)[0] ==
        doctest::Approx((1.0 - std::pow(0.5, 0.75)) * 4.0 / 3.0)
            .epsilon(2e-4));
}

TEST_CASE("riemann sum walks coarse partitions with a trailing partial cell") {
  Grid g(1.0, 8);
  GridPath w = linear_driver(g);
  VolterraKernel k = exp_kernel(0.8, 1);
  IntegrandSpec spec(k, w, 1.0);

  // level 2 on [0, t_3]: stride 2 gives cells [t_0,t_2], [t_2,t_3]
  const double tau = g.time(5), t3 = g.time(3);
  const double want = k.at(tau, 0.0)(0, 0) * (w.coord(2, 0) - w.coord(0, 0)) +
                      k.at(tau, g.time(2))(0, 0) * (w.coord(3, 0) - w.coord(2, 0));
  CHECK(riemann_sum(spec, tau, t3, 2)[0] == doctest::Approx(want).epsilon(1e-15));

  CHECK_THROWS_AS(riemann_sum(spec, 0.5, 0.75, 2), std::invalid_argument);
  CHECK_THROWS_AS(riemann_sum(spec, 0.31, 0.31, 2), std::invalid_argument);
  CHECK_THROWS_AS(riemann_sum(spec, 1.0, 1.0, 9), std::invalid_argument);
}

TEST_CASE("integral table at negligible tolerance equals the finest sums") {
  // with tol below representable differences nothing can freeze early, so
  // every entry must be bit-identical to the direct level-6 Riemann sum
  Grid g(1.0, 64);
  GridPath w = wiener2(g, 0xD01);
  IntegrandSpec spec(exp_kernel(0.8, 2), w, 0.49);
  Volterra1DResult res = volterra_integral(spec, 6, 1e-18);
  for (std::size_t tau = 0; tau <= 64; tau += 7)
    for (std::size_t t = 0; t <= tau; ++t) {
      HVector direct = riemann_sum(spec, g.time(tau), g.time(t), 6);
      CHECK(res.values.coord(tau, t, 0) == direct[0]);
      CHECK(res.values.coord(tau, t, 1) == direct[1]);
    }

  CHECK_THROWS_AS(volterra_integral(spec, 6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(volterra_integral(spec, 7, 1e-6), std::invalid_argument);
}

TEST_CASE("early-frozen entries stay near the fully refined values") {
  // entries may stop refining once two consecutive refinements move less
  // than tol; the frozen value must then sit within a few tol of the
  // finest-level value (a frozen partition that had not yet genuinely
  // refined would be off by O(1))
  Grid g(1.0, 64);
  GridPath w(g, 2);
  for (std::size_t i = 0; i <= 64; ++i) {
    w.coord(i, 0) = g.time(i);
    w.coord(i, 1) = 0.5 * g.time(i) * g.time(i);
  }
  IntegrandSpec spec(exp_kernel(0.8, 2), w, 1.0);
  const double tol = 1e-2;
  Volterra1DResult loose = volterra_integral(spec, 6, tol);
  Volterra1DResult tight = volterra_integral(spec, 6, 1e-18);
  double worst = 0.0;
  for (std::size_t tau = 0; tau <= 64; ++tau)
    for (std::size_t t = 0; t <= tau; ++t)
      for (std::size_t c = 0; c < 2; ++c)
        worst = std::max(worst,
                         std::abs(loose.values.coord(tau, t, c) -
                                  tight.values.coord(tau, t, c)));
  CHECK(worst <= 4.0 * tol);
  // and the loose run must actually have frozen something early
  bool frozen_early = false;
  for (std::size_t tau = 0; tau <= 64 && !frozen_early; ++tau)
    for (std::size_t t = 0; t <= tau; ++t)
      if (loose.level_at(tau, t) < 6) { frozen_early = true; break; }
  CHECK(frozen_early);
}

TEST_CASE("rough drivers at tight tolerance are reported unconverged") {
  Grid g(1.0, 32);
  FbmSampler sampler(g, 0.4, HOperator::identity(1));
  GridPath w = sampler.sample(0xF0, 0);
  IntegrandSpec spec(fractional_kernel(0.35, HOperator::identity(1)), w, 0.38);
  Volterra1DResult res = volterra_integral(spec, 5, 1e-12);
  CHECK(res.unconverged > 0);
}

TEST_CASE("sewing defect vanishes for the identity kernel") {
  // the germ K(tau,s)(W(t)-W(s)) integrates exactly when K is constant
  Grid g(1.0, 32);
  GridPath w = wiener2(g, 0x11);
  IntegrandSpec spec(identity_kernel(2), w, 0.49);
  SewingDefect d = sewing_defect(spec, 1.0, 0.75, 0.25, 4, 0.7, 0.2);
  CHECK(d.defect <= 1e-14);
  const double want_w = std::min(std::pow(1.0 - 0.75, -0.2) * std::pow(0.5, 0.7),
                                 std::pow(1.0 - 0.25, 0.5));
  CHECK(d.weight == doctest::Approx(want_w).epsilon(1e-14));

  SewingDefect zero = sewing_defect(spec, 1.0, 0.5, 0.5, 4, 0.7, 0.2);
  CHECK(zero.defect == 0.0);
  CHECK(zero.weight == 0.0);
}

TEST_CASE("sewing defect of a singular kernel shrinks with the window") {
  // the defect measures |I - germ| on [s,t]; a finer level only sharpens the
  // estimate of a NONZERO continuum defect, so the decay to test is in the
  // window size (quadratically here: smooth driver, kernel variation ~ t-s)
  Grid g(1.0, 64);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  const double d1 = sewing_defect(spec, 1.0, 0.75, 0.5, 6, 1.0, 0.25).defect;
  const double d2 = sewing_defect(spec, 1.0, 0.625, 0.5, 6, 1.0, 0.25).defect;
  const double d3 = sewing_defect(spec, 1.0, 0.5625, 0.5, 6, 1.0, 0.25).defect;
  CHECK(d3 > 0.0);
  CHECK(d2 < d1);
  CHECK(d3 < d2);
  CHECK(d3 <= 0.1 * d1);  // measured ratio ~ 0.041, law (t-s)^2 predicts 1/16
}

TEST_CASE("convergence study on a smooth driver fits a positive rate") {
  Grid g(1.0, 512);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  const std::vector<std::pair<double, double>> probes = {
      {1.0, 1.0}, {1.0, 0.5}, {0.5, 0.5}};
  RefinementReport rep =
      convergence_study(spec, probes, {3, 4, 5, 6, 7, 8, 9});
  REQUIRE(rep.diffs.size() == 6);
  for (std::size_t k = 1; k + 1 < rep.diffs.size(); ++k)
    CHECK(rep.diffs[k + 1] < rep.diffs[k]);
  CHECK(rep.fitted_rate > 0.5);
  CHECK(rep.target_rate == doctest::Approx(0.01).epsilon(1e-12));
  REQUIRE(rep.values.size() == 7);
  CHECK(rep.values[6].size() == 3);
}

TEST_CASE("convergence study validates its inputs") {
  Grid g(1.0, 32);
  IntegrandSpec spec(fractional_kernel(0.25, HOperator::identity(1)),
                     linear_driver(g), 1.0);
  CHECK_THROWS_AS(convergence_study(spec, {{1.0, 0.5}}, {3, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(spec, {{1.0, 0.5}}, {4, 4, 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(spec, {}, {3, 4, 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(spec, {{0.5, 0.75}}, {3, 4, 5}),
                  std::invalid_argument);
}
