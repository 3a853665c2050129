#include "doctest.h"
#include "isoflow/arcs.hpp"
#include "isoflow/selfcheck.hpp"

using namespace isoflow;

TEST_CASE("worked examples: arcs") {
  for (const Check* c : checks_matching("arcs/")) {
    const CheckResult r = c->fn();
    INFO(c->name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("arc family error paths") {
  const ConvexBody circle = ConvexBody::circle(1.0);
  // enclosing circle: no intersections
  CHECK(arc_outside(circle, Vec2(0.0, 0.0), 3.0).status == ArcStatus::not_in_family);
  CHECK_THROWS_AS(arc_outside_or_throw(circle, Vec2(3, 0), 1.0), NumericalError);
  // near tangency is not a usable family member
  const ArcResult grazing = arc_outside(circle, Vec2(2.0, 0.0), 1.0 + 1e-13);
  CHECK(grazing.status != ArcStatus::ok);
  // L_eta propagates unreachable areas
  CHECK_THROWS_AS(L_eta(circle, Vec2(std::sqrt(2.0), 0.0), 0.1), NumericalError);
}

TEST_CASE("four-intersection circles are rejected") {
  const ConvexBody ellipse = ConvexBody::ellipse(2, 1);
  // a circle hugging the waist of the ellipse crosses four times
  const ArcResult res = arc_outside(ellipse, Vec2(0.0, 0.0), 1.5);
  CHECK(res.status == ArcStatus::not_in_family);
}

TEST_CASE("orientation flips cached signs") {
  const ConvexBody circle = ConvexBody::circle(1.0);
  const CircArc pos = arc_outside_or_throw(circle, Vec2(std::sqrt(2.0), 0.0), 1.0, true);
  const CircArc neg = arc_outside_or_throw(circle, Vec2(std::sqrt(2.0), 0.0), 1.0, false);
  CHECK(pos.sweep == doctest::Approx(-neg.sweep).epsilon(1e-14));
  CHECK(pos.area == doctest::Approx(-neg.area).epsilon(1e-14));
  CHECK(pos.length == doctest::Approx(neg.length).epsilon(1e-14));
  CHECK((pos.x1 - neg.x2).norm() == doctest::Approx(0.0));
}

TEST_CASE("critical search fails cleanly when no seed converges") {
  const ConvexBody circle = ConvexBody::circle(1.0);
  // the seed is so far out that the target area is unreachable from it
  CHECK_THROWS_WITH_AS(find_critical_from(circle, 1.0 + 0.5 * kPi, {Vec2(5.0, 5.0)}),
                       "no critical point found", NumericalError);
}
