#include "doctest.h"
#include "isoflow/arcs.hpp"
#include "isoflow/flow.hpp"
#include "isoflow/selfcheck.hpp"

using namespace isoflow;

TEST_CASE("worked examples: curve") {
  for (const Check* c : checks_matching("curve/")) {
    const CheckResult r = c->fn();
    INFO(c->name, ": ", r.detail);
    CHECK(r.pass);
  }
}

namespace {

const ConvexBody& circle() {
  static const ConvexBody b = ConvexBody::circle(1.0);
  return b;
}

OpenCurve lune(int n) {
  return arc_to_curve(circle(),
                      arc_outside_or_throw(circle(), Vec2(std::sqrt(2.0), 0.0), 1.0), n);
}

}  // namespace

TEST_CASE("curve validation errors") {
  // too few nodes
  CHECK_THROWS_AS(lune(6), ConfigError);
  CHECK_THROWS_AS(make_open_curve(circle(), Polyline{{1, 0}, {1.5, 0}, {1.3, 0.2}}),
                  ConfigError);
  // endpoint off the boundary
  Polyline off = lune(32).nodes;
  off.front() += Vec2(0.05, 0.0);
  CHECK_THROWS_AS(make_open_curve(circle(), off), ConfigError);
  // interior node inside the body
  Polyline inside = lune(32).nodes;
  inside[16] = Vec2(0.5, 0.0);
  CHECK_THROWS_AS(make_open_curve(circle(), inside), ConfigError);
  // coincident consecutive nodes
  Polyline dup = lune(32).nodes;
  dup[7] = dup[8];
  CHECK_THROWS_AS(make_open_curve(circle(), dup), ConfigError);
}

TEST_CASE("resample rejects tiny node counts") {
  CHECK_THROWS_AS(resample_constant_speed(lune(64), 4, circle()), ConfigError);
}

TEST_CASE("multi-wrap curves are rejected by the closing rule") {
  // a curve winding once around the body before returning to Sigma
  Polyline nodes;
  const int n = 256;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double ang = 2.2 * kPi * t;
    const double rho = 1.0 + 0.8 * std::sin(kPi * t);
    nodes.push_back(rho * unit_dir(ang));
  }
  const OpenCurve curve = make_open_curve(circle(), nodes);
  CHECK_THROWS_WITH_AS(closing_arc(curve, circle()), "multi-wrap unsupported",
                       NumericalError);
}

TEST_CASE("region polygon area agrees with the signed area") {
  const OpenCurve curve = lune(2048);
  const Polygon region = region_polygon(curve, circle());
  CHECK(polygon_area(region) ==
        doctest::Approx(enclosed_area(curve, circle())).epsilon(1e-5));
  CHECK_FALSE(polygon_self_intersects(region));
}

TEST_CASE("c1 distance scales with rigid translation") {
  const OpenCurve a = lune(128);
  for (double t : {1e-3, 0.2, 5.0}) {
    Polyline moved = a.nodes;
    for (Vec2& p : moved) p += Vec2(0.0, t);
    CHECK(c1_distance_polylines(a.nodes, moved) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("report is parametrization independent") {
  const OpenCurve uniform = lune(512);
  // strongly nonuniform sampling of the same arc
  const CircArc arc = arc_outside_or_throw(circle(), Vec2(std::sqrt(2.0), 0.0), 1.0);
  Polyline skewed;
  for (int i = 0; i <= 512; ++i) {
    const double f = std::pow(static_cast<double>(i) / 512, 1.35);
    skewed.push_back(arc.point_at(f));
  }
  skewed.front() = arc.x1;
  skewed.back() = arc.x2;
  const CurveReport a = report(uniform, circle());
  const CurveReport b = report(make_open_curve(circle(), skewed), circle());
  CHECK(a.length == doctest::Approx(b.length).epsilon(1e-4));
  CHECK(a.turning_angle == doctest::Approx(b.turning_angle).epsilon(1e-4));
  CHECK(a.area == doctest::Approx(b.area).epsilon(1e-4));
}
