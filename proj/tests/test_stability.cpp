#include "doctest.h"
#include "isoflow/selfcheck.hpp"
#include "isoflow/stability.hpp"

using namespace isoflow;

namespace {

const ConvexBody& body100() {
  static const ConvexBody b = ConvexBody::circle(100.0);
  return b;
}

const CriticalSet& crit() {
  static const CriticalSet cs = find_critical(body100(), 1.0);
  return cs;
}

}  // namespace

TEST_CASE("worked examples: stability (fast subset)") {
  for (const char* name :
       {"stability/deficit_far_disk", "stability/select_identity",
        "stability/select_drops_speck", "stability/select_fills_hole",
        "stability/area_correct_identity", "stability/smallness_margin",
        "stability/profile_partition_halves"}) {
    const auto matches = checks_matching(name);
    REQUIRE(matches.size() == 1);
    const CheckResult r = matches[0]->fn();
    INFO(name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("deficit validates the area precondition") {
  PolygonSet e = make_perturbed_set(body100(), 1.0, crit(), PerturbationFamily::radial_bump,
                                    0.0);
  CHECK_THROWS_AS(deficit(e, body100(), 2.0, crit().ell0), NumericalError);
}

TEST_CASE("select rejects malformed sets") {
  CHECK_THROWS_AS(select_component_fill_holes(PolygonSet{}, body100()), ConfigError);
  PolygonSet only_hole;
  only_hole.target_area = 1;
  only_hole.polys.push_back({{{0, 0}, {1, 0}, {1, 1}}, -1});
  CHECK_THROWS_AS(select_component_fill_holes(only_hole, body100()), ConfigError);
}

TEST_CASE("clip_and_hull requires boundary contact") {
  PolygonSet floating;
  floating.target_area = 1.0;
  SignedPolygon sq;
  sq.sign = +1;
  sq.vertices = {{150, 0}, {151, 0}, {151, 1}, {150, 1}};
  floating.polys.push_back(sq);
  CHECK_THROWS_WITH_AS(clip_and_hull(floating, body100()), "no boundary contact",
                       NumericalError);
}

TEST_CASE("region bookkeeping is consistent") {
  const PolygonSet e =
      make_perturbed_set(body100(), 1.0, crit(), PerturbationFamily::radial_bump, 0.02);
  const ClipHullResult ch = clip_and_hull(e, body100());
  const Polygon poly = region_to_polygon(ch.region, body100());
  CHECK(std::abs(polygon_area(poly)) ==
        doctest::Approx(region_area(ch.region, body100())).epsilon(1e-5));
  CHECK(region_rel_perimeter(ch.region) == doctest::Approx(ch.rel_perimeter_out));
}

TEST_CASE("line fitting is exact on lines") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.3 * i);
    y.push_back(2.5 - 1.7 * 0.3 * i);
  }
  const LogLogFit fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-1.7).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("family parser") {
  CHECK(family_from_string("radial-bump") == PerturbationFamily::radial_bump);
  CHECK(family_from_string("speck") == PerturbationFamily::speck);
  CHECK_THROWS_AS(family_from_string("wobble"), ConfigError);
}
