#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "volterra/covariance.hpp"
#include "volterra/hilbert.hpp"
#include "volterra/paths.hpp"

using namespace volterra;

namespace {

HOperator spd2() {
  HOperator q(2);
  q(0, 0) = 1.0; q(0, 1) = 0.3; q(1, 0) = 0.3; q(1, 1) = 0.7;
  return q;
}

double fbm_r(double h, double s, double t) {
  const double e = 2.0 * h;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

}  // namespace

TEST_CASE("wiener covariance is min(t,t') Q0") {
  CovarianceField q = wiener_cov(spd2());
  CHECK(q.alpha == 0.5);
  CHECK(q.dim == 2);
  HOperator v = q.at(0.75, 0.25);
  CHECK(v(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(v(0, 1) == doctest::Approx(0.25 * 0.3).epsilon(1e-15));
  CHECK(q.at(0.0, 0.9).max_abs() == 0.0);

  // box over [s,t]^2 is the increment variance (t-s) Q0
  HOperator box = cov_rect(q, 0.25, 0.25, 0.75, 0.75);
  CHECK(box(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(box(1, 1) == doctest::Approx(0.35).epsilon(1e-14));
  // disjoint rectangles carry no mass: independent increments
  CHECK(cov_rect(q, 0.0, 0.5, 0.5, 1.0).max_abs() == doctest::Approx(0.0));
}

TEST_CASE("wiener covariance validates Q0") {
  HOperator bad(2);
  bad(0, 0) = 1.0; bad(1, 1) = -1.0;  // indefinite
  CHECK_THROWS_AS(wiener_cov(bad), std::invalid_argument);
  HOperator asym(2);
  asym(0, 1) = 0.4;
  CHECK_THROWS_AS(wiener_cov(asym), std::invalid_argument);
}

TEST_CASE("fbm covariance matches the stationary-increment formula") {
  const double h = 0.4;
  CovarianceField q = fbm_cov(h, spd2());
  CHECK(q.alpha == doctest::Approx(h));
  for (double t : {0.3, 0.8})
    for (double tp : {0.2, 1.0}) {
      CHECK(q.at(t, tp)(0, 1) ==
            doctest::Approx(fbm_r(h, t, tp) * 0.3).epsilon(1e-14));
    }
  // box over [u,v]^2 is the increment variance (v-u)^{2h} Q0
  HOperator box = cov_rect(q, 0.25, 0.25, 0.75, 0.75);
  CHECK(box(0, 0) == doctest::Approx(std::pow(0.5, 2.0 * h)).epsilon(1e-13));

  // declared regularity is capped at 1/2 above the Wiener point
  CHECK(fbm_cov(0.75, spd2()).alpha == 0.5);
  CHECK(fbm_cov(0.5, spd2()).alpha == 0.5);

  CHECK_THROWS_AS(fbm_cov(0.0, spd2()), std::invalid_argument);
  CHECK_THROWS_AS(fbm_cov(1.0, spd2()), std::invalid_argument);
  CHECK_THROWS_AS(fbm_cov(-0.3, spd2()), std::invalid_argument);
}

TEST_CASE("composed covariance is the base at time-changed arguments") {
  Grid g(1.0, 8);
  GridPath z(g, 1);
  for (std::size_t i = 0; i <= 8; ++i) z.coord(i, 0) = 0.5 * g.time(i);

  CovarianceField base = wiener_cov(spd2());
  CovarianceField q = composed_cov(base, z, 1.0);
  CHECK(q.alpha == doctest::Approx(0.5));  // base alpha times z exponent
  CHECK(q.at(0.5, 1.0)(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q.domain_end == doctest::Approx(1.0));

  // z exponent scales the declared regularity
  CHECK(composed_cov(base, z, 0.5).alpha == doctest::Approx(0.25));
  CHECK_THROWS_AS(composed_cov(base, z, 0.0), std::invalid_argument);

  GridPath z2(g, 2);  // time changes must be scalar
  CHECK_THROWS_AS(composed_cov(base, z2, 1.0), std::invalid_argument);
}

TEST_CASE("empirical covariance averages outer products") {
  Grid g(1.0, 4);
  std::vector<GridPath> samples(3, GridPath(g, 2));
  // hand-built coordinates: sample k holds (k+1, 2k) at t_i scaled by i
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i <= 4; ++i) {
      samples[k].coord(i, 0) = static_cast<double>((k + 1) * i);
      samples[k].coord(i, 1) = static_cast<double>(2 * k * i);
    }

  CovarianceField q = empirical_cov(samples);
  CHECK(q.dim == 2);
  CHECK(q.domain_end == doctest::Approx(1.0));

  // direct average at (t_2, t_3): entry (r,c) = mean of X(t')_r X(t)_c,
  // then symmetrized; for these rank-one paths both orientations agree
  double want00 = 0.0, want01 = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    want00 += samples[k].coord(3, 0) * samples[k].coord(2, 0);
    want01 += samples[k].coord(3, 0) * samples[k].coord(2, 1);
  }
  want00 /= 3.0;
  want01 /= 3.0;
  HOperator v = q.at(0.5, 0.75);
  CHECK(v(0, 0) == doctest::Approx(want00).epsilon(1e-14));
  // snapping: off-grid queries land on the nearest grid point
  CHECK(q.at(0.49, 0.76)(0, 0) == doctest::Approx(want00).epsilon(1e-14));

  // symmetry under swap + adjoint holds by construction
  HOperator w = q.at(0.75, 0.5);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(v(r, c) == w(c, r));
  CHECK(v(0, 1) == doctest::Approx(want01).epsilon(1e-14));

  CHECK_THROWS_AS(empirical_cov({samples[0]}), std::invalid_argument);
  std::vector<GridPath> mixed = {samples[0], GridPath(Grid(1.0, 8), 2)};
  CHECK_THROWS_AS(empirical_cov(mixed), std::invalid_argument);
}

TEST_CASE("empirical covariance refuses grids too fine to tabulate") {
  Grid g(1.0, 1024);  // 1025 points > the 513-point dense-table cap
  std::vector<GridPath> samples(2, GridPath(g, 1));
  CHECK_THROWS_AS(empirical_cov(samples), std::invalid_argument);
}

TEST_CASE("scale and difference wrappers act pointwise") {
  CovarianceField q = wiener_cov(spd2());
  CovarianceField s = cov_scale(0.25, q);
  CHECK(s.at(1.0, 1.0)(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.alpha == q.alpha);

  CovarianceField d = cov_difference(q, s);
  CHECK(d.at(1.0, 1.0)(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(cov_difference(q, wiener_cov(HOperator::identity(3))),
                  std::invalid_argument);
}

TEST_CASE("wiener seminorms at alpha half are exactly one") {
  // |min(t,u) - min(s,u)| <= (t-s)^{1/2} on [0,1] with equality at
  // s=0, t=u=1; both directional sups and the rectangular sup are 1.
  CovarianceField q = wiener_cov(HOperator::identity(1));
  CovSeminorms s = cov_seminorms(q, 0.5, Grid(1.0, 64));
  CHECK(s.q10 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.q01 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.q11 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fbm seminorms at alpha h are exactly one") {
  CovarianceField q = fbm_cov(0.4, HOperator::identity(1));
  CovSeminorms s = cov_seminorms(q, 0.4, Grid(1.0, 64));
  CHECK(s.q10 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.q01 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.q11 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.total() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("seminorms from cached samples match the direct call") {
  CovarianceField q = fbm_cov(0.3, spd2());
  Grid g(1.0, 32);
  CovSupSamples samples = cov_sup_samples(q, g);
  for (double alpha : {0.2, 0.3, 0.45}) {
    CovSeminorms direct = cov_seminorms(q, alpha, g);
    CovSeminorms cached = cov_seminorms_from(samples, alpha);
    CHECK(cached.q10 == direct.q10);
    CHECK(cached.q01 == direct.q01);
    CHECK(cached.q11 == direct.q11);
  }
  CHECK_THROWS_AS(cov_seminorms_from(samples, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cov_seminorms_from(samples, 1.0), std::invalid_argument);
}
