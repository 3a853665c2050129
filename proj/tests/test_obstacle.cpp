#include <random>

#include "doctest.h"
#include "isoflow/obstacle.hpp"
#include "isoflow/selfcheck.hpp"

using namespace isoflow;

TEST_CASE("worked examples: obstacle") {
  for (const Check* c : checks_matching("obstacle/")) {
    const CheckResult r = c->fn();
    INFO(c->name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("construction rejects invalid bodies") {
  CHECK_THROWS_AS(ConvexBody::circle(0.0), ConfigError);
  CHECK_THROWS_AS(ConvexBody::circle(-2.0), ConfigError);
  // h + h'' = 1 - 8 * 0.5 cos(3 t) dips negative
  CHECK_THROWS_AS(ConvexBody::fourier({1.0, 0, 0, 0.5}, {}), ConfigError);
  // origin outside
  CHECK_THROWS_AS(ConvexBody::fourier({0.5, 0.8}, {}), ConfigError);
  CHECK_THROWS_AS(ConvexBody::fourier({}, {}), ConfigError);
}

TEST_CASE("support gap separates inside and outside") {
  const ConvexBody body = ConvexBody::ellipse(2, 1);
  CHECK(body.support_gap(Vec2(0, 0)) < 0);
  CHECK(body.support_gap(Vec2(1.9, 0)) < 0);
  CHECK(body.support_gap(Vec2(2.1, 0)) > 0);
  CHECK(body.support_gap(Vec2(0, 1.1)) > 0);
  CHECK(body.support_gap(Vec2(3, 0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rigid transforms preserve intrinsic quantities") {
  const ConvexBody body = ConvexBody::ellipse(2, 1);
  const ConvexBody moved = body.rotated(0.7).translated(Vec2(0.3, -0.4));
  CHECK(moved.kappa_max() == doctest::Approx(body.kappa_max()).epsilon(1e-9));
  CHECK(moved.width() == doctest::Approx(body.width()).epsilon(1e-9));
  CHECK(moved.area() == doctest::Approx(body.area()).epsilon(1e-9));
  CHECK(moved.boundary_length() == doctest::Approx(body.boundary_length()).epsilon(1e-9));
}

TEST_CASE("subarc quantities compose along concatenation") {
  const ConvexBody body = ConvexBody::ellipse(2, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int k = 0; k < 16; ++k) {
    const double a = u(rng), step1 = u(rng), step2 = u(rng);
    const SubarcQuantities q1 = subarc_quantities(body, a, a + step1, true);
    const SubarcQuantities q2 = subarc_quantities(body, a + step1, a + step1 + step2, true);
    const SubarcQuantities q = subarc_quantities(body, a, a + step1 + step2, true);
    CHECK(q.length == doctest::Approx(q1.length + q2.length).epsilon(1e-12));
    CHECK(q.shoelace == doctest::Approx(q1.shoelace + q2.shoelace).epsilon(1e-12));
    CHECK(q.turning_angle ==
          doctest::Approx(q1.turning_angle + q2.turning_angle).epsilon(1e-12));
  }
}

TEST_CASE("full-turn quantities match the global ones") {
  const ConvexBody body = ConvexBody::fourier({1.0, 0, 0, 0.03, 0.01}, {0, 0, 0.02});
  CHECK(body.arclength_to(kTwoPi) == doctest::Approx(body.boundary_length()).epsilon(1e-12));
  CHECK(body.shoelace_to(kTwoPi) == doctest::Approx(body.area()).epsilon(1e-12));
  // arclength is strictly increasing
  double prev = -1;
  for (int i = 0; i <= 64; ++i) {
    const double s = body.arclength_to(kTwoPi * i / 64);
    CHECK(s > prev);
    prev = s;
  }
}
