#include <random>

#include "doctest.h"
#include "isoflow/polygon.hpp"

using namespace isoflow;

namespace {

Polygon regular_polygon(const Vec2& c, double r, int n, double phase = 0.0) {
  Polygon p;
  for (int i = 0; i < n; ++i) p.push_back(c + r * unit_dir(phase + kTwoPi * i / n));
  return p;
}

}  // namespace

TEST_CASE("signed areas and orientation") {
  const Polygon sq = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  CHECK(polygon_area(sq) == doctest::Approx(2.0));
  Polygon rev(sq.rbegin(), sq.rend());
  CHECK(polygon_area(rev) == doctest::Approx(-2.0));
}

TEST_CASE("point in polygon") {
  const Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(point_in_polygon(sq, Vec2(0.5, 0.5)));
  CHECK_FALSE(point_in_polygon(sq, Vec2(1.5, 0.5)));
  CHECK_FALSE(point_in_polygon(sq, Vec2(-0.1, 0.99)));
}

TEST_CASE("triangulation preserves area") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.4, 1.0);
  for (int k = 0; k < 12; ++k) {
    Polygon star;
    const int n = 7 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) star.push_back(u(rng) * unit_dir(kTwoPi * i / n));
    const double area = std::abs(polygon_area(star));
    double sum = 0;
    for (const auto& t : triangulate(star))
      sum += 0.5 * std::abs(cross2(t[1] - t[0], t[2] - t[0]));
    CHECK(sum == doctest::Approx(area).epsilon(1e-12));
  }
}

TEST_CASE("intersection areas") {
  const Polygon a = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Polygon b = {{1, 1}, {3, 1}, {3, 3}, {1, 3}};
  CHECK(intersection_area(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(intersection_area(b, a) == doctest::Approx(1.0).epsilon(1e-12));
  const Polygon far = {{10, 10}, {11, 10}, {11, 11}, {10, 11}};
  CHECK(intersection_area(a, far) == doctest::Approx(0.0));
  // containment
  const Polygon inner = {{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  CHECK(intersection_area(a, inner) == doctest::Approx(1.0).epsilon(1e-12));
  // nonconvex subject
  const Polygon lshape = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  CHECK(intersection_area(lshape, a) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("signed polygon sets subtract holes") {
  std::vector<SignedPolygon> annulus = {
      {regular_polygon(Vec2(0, 0), 2.0, 256), +1},
      {regular_polygon(Vec2(0, 0), 1.0, 256), -1},
  };
  const double area = signed_set_area(annulus);
  CHECK(area == doctest::Approx(3.0 * kPi).epsilon(1e-3));
  std::vector<SignedPolygon> disk = {{regular_polygon(Vec2(0, 0), 1.0, 256), +1}};
  // annulus and inner disk are disjoint up to discretization
  CHECK(intersection_area(annulus, disk) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(symmetric_difference_area(annulus, disk) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-3));
}

TEST_CASE("convex hull contains its points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(u(rng), 0.5 * u(rng));
  const Polygon hull = convex_hull(pts);
  CHECK(polygon_area(hull) > 0);
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    const Vec2& c = hull[(i + 2) % hull.size()];
    CHECK(cross2(b - a, c - b) > 0);  // strictly convex corners
  }
  for (const Vec2& p : pts) {
    bool inside_or_on = point_in_polygon(hull, p);
    if (!inside_or_on) {
      Polyline closed(hull.begin(), hull.end());
      closed.push_back(hull.front());
      inside_or_on = point_polyline_distance(p, closed) < 1e-12;
    }
    CHECK(inside_or_on);
  }
}

TEST_CASE("self intersection detection") {
  const Polygon eight = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK(polygon_self_intersects(eight));
  const Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_FALSE(polygon_self_intersects(sq));
  const Polyline zigzag = {{0, 0}, {2, 0}, {2, 1}, {0.5, -0.5}};
  CHECK(polyline_self_intersects(zigzag));
}

TEST_CASE("half-plane clipping") {
  const Polygon sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Polygon clipped = clip_half_plane(sq, Vec2(1, 0), 1.0);  // x <= 1
  CHECK(polygon_area(clipped) == doctest::Approx(2.0).epsilon(1e-12));
  const Polygon all = clip_half_plane(sq, Vec2(1, 0), 5.0);
  CHECK(polygon_area(all) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(clip_half_plane(sq, Vec2(1, 0), -1.0).empty());
}

TEST_CASE("hausdorff properties") {
  Polyline a = {{0, 0}, {1, 0}, {2, 0}};
  CHECK(hausdorff_distance(a, a, 0.01) == doctest::Approx(0.0));
  Polyline arc = {{-1, 0}, {0, -1}, {1, 0}};
  Polyline chord = {{-1, 0}, {1, 0}};
  // farthest point of the chain from the chord lies mid-segment
  CHECK(hausdorff_distance(arc, chord, 1e-3) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("densify keeps the path") {
  const Polyline line = {{0, 0}, {1, 0}, {1, 3}};
  const Polyline fine = densify(line, 0.05);
  CHECK(polyline_length(fine) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fine.size() > 70);
}

TEST_CASE("winding numbers") {
  Polygon circle = regular_polygon(Vec2(0, 0), 1.0, 64);
  CHECK(winding_number(circle, Vec2(0, 0)) == 1);
  CHECK(winding_number(circle, Vec2(2, 0)) == 0);
  std::reverse(circle.begin(), circle.end());
  CHECK(winding_number(circle, Vec2(0, 0)) == -1);
}

TEST_CASE("self-intersecting regions are rejected by the boolean") {
  const Polygon eight = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  const Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK_THROWS_AS(symmetric_difference_area(eight, sq), NumericalError);
}
