#pragma once

#include <optional>
#include <vector>

#include "isoflow/geom.hpp"

namespace isoflow {

using Polyline = std::vector<Vec2>;  // open chain of vertices
using Polygon = std::vector<Vec2>;   // closed, last edge implicit

/// Signed area, positive for counterclockwise orientation.
double polygon_area(const Polygon& poly);

/// Signed shoelace integral 1/2 int (x dy - y dx) of an open polyline.
double polyline_shoelace(const Polyline& line);

double polyline_length(const Polyline& line);

/// Winding number of a closed polyline around q (q off the curve).
int winding_number(const Polyline& closed, const Vec2& q);

bool point_in_polygon(const Polygon& poly, const Vec2& q);

/// True if any two non-adjacent edges intersect.
bool polygon_self_intersects(const Polygon& poly);
bool polyline_self_intersects(const Polyline& line);

/// Fan-out of a simple polygon into triangles by ear clipping. The input may
/// have either orientation; triangles come out counterclockwise.
std::vector<std::array<Vec2, 3>> triangulate(const Polygon& poly);

/// Sutherland-Hodgman clip of a polygon against the half-plane n.x <= c.
Polygon clip_half_plane(const Polygon& poly, const Vec2& n, double c);

/// Area of the intersection of two simple polygons (orientation-insensitive).
double intersection_area(const Polygon& a, const Polygon& b);

/// |A ^ B| for simple polygons.
double symmetric_difference_area(const Polygon& a, const Polygon& b);

/// Weighted polygons: +1 outer components, -1 holes. Represents finite unions
/// of components with holes; the signed indicators must sum to 0/1 a.e.
struct SignedPolygon {
  Polygon vertices;
  int sign = +1;
};

double signed_set_area(const std::vector<SignedPolygon>& set);
double intersection_area(const std::vector<SignedPolygon>& a, const std::vector<SignedPolygon>& b);
double symmetric_difference_area(const std::vector<SignedPolygon>& a,
                                 const std::vector<SignedPolygon>& b);

/// Convex hull (Andrew monotone chain), counterclockwise, no duplicate last point.
Polygon convex_hull(std::vector<Vec2> points);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double point_polyline_distance(const Vec2& p, const Polyline& line);

/// Symmetric Hausdorff distance between two polylines; both are densified to
/// edge length <= resolution before the vertex-to-chain sweep, so the result
/// is accurate to about resolution/2.
double hausdorff_distance(const Polyline& a, const Polyline& b, double resolution = -1.0);

/// Intersection of segments [a0,a1], [b0,b1]; returns the parameter on the
/// first segment when they cross properly.
std::optional<double> segment_intersection_param(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                 const Vec2& b1);

/// Subdivides edges longer than max_edge.
Polyline densify(const Polyline& line, double max_edge);

}  // namespace isoflow
