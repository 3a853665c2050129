#pragma once

#include <vector>

#include "isoflow/obstacle.hpp"
#include "isoflow/polygon.hpp"

namespace isoflow {

/// Discrete oriented curve outside the obstacle with both endpoints on Sigma.
/// Orientation is the node order; endpoint boundary data is cached.
struct OpenCurve {
  Polyline nodes;
  BoundaryPoint start_bp, end_bp;

  const Vec2& front() const { return nodes.front(); }
  const Vec2& back() const { return nodes.back(); }
  int segment_count() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Validates the class-B invariants (endpoints on Sigma to 1e-10, interior
/// nodes outside the body, >= 8 nodes, consecutive nodes distinct) and caches
/// the endpoint boundary frames. Throws ConfigError on violation.
OpenCurve make_open_curve(const ConvexBody& body, Polyline nodes);

struct CurveReport {
  double length = 0.0;
  double turning_angle = 0.0;   // phi_turn, signed
  double mean_curvature = 0.0;  // phi_turn / length
  double alpha1 = 0.0, alpha2 = 0.0;
  double area = 0.0;            // A_Sigma, signed
  double eps_kappa = 0.0;       // ||kappa - kappa_bar||_{L2(ds)}
  double eps_alpha = 0.0;       // |alpha1 - pi/2| + |alpha2 - pi/2|
  double eps = 0.0;             // eps_kappa + eps_alpha
};

CurveReport report(const OpenCurve& curve, const ConvexBody& body);

/// Inner-loop variants that take the endpoint frames and closing direction as
/// given, skipping validation and the winding test.
double enclosed_area_given(const ConvexBody& body, const Polyline& nodes,
                           const BoundaryPoint& start_bp, const BoundaryPoint& end_bp,
                           bool sigma_ccw);
CurveReport report_given(const ConvexBody& body, const Polyline& nodes,
                         const BoundaryPoint& start_bp, const BoundaryPoint& end_bp,
                         bool sigma_ccw);

/// Closing subarc of Sigma, traversed from the curve's end parameter back to
/// its start parameter.
struct SigmaArc {
  double theta_from = 0.0;  // at x2 = curve end
  double theta_to = 0.0;    // at x1 = curve start
  bool ccw = true;
  bool degenerate = false;  // coincident endpoints
};

/// The unique single-wrap closing arc making curve + sigma wind zero times
/// around the body interior. Throws NumericalError("multi-wrap unsupported")
/// when no single-wrap candidate closes up contractibly.
SigmaArc closing_arc(const OpenCurve& curve, const ConvexBody& body);

/// Signed enclosed area A_Sigma(curve) = shoelace of the closed concatenation
/// curve + closing arc; positive for positively oriented configurations.
double enclosed_area(const OpenCurve& curve, const ConvexBody& body);

/// N+1 nodes at equal chordal arclength spacing along the input polyline,
/// endpoints re-projected onto Sigma. N >= 8 required.
OpenCurve resample_constant_speed(const OpenCurve& curve, int n, const ConvexBody& body);

/// C1 distance with both curves at constant speed over [0, L(a)]; endpoint
/// derivatives are one-sided.
double c1_distance(const OpenCurve& a, const OpenCurve& b);
double c1_distance_polylines(const Polyline& a, const Polyline& b);

/// Discrete geometry helpers shared with the flow and arc modules.
std::vector<double> edge_lengths(const Polyline& nodes);
/// One-sided tangent at the first (front) or last node from a 4-point
/// Lagrange fit in chord-length parameter; unit length, oriented along the curve.
Vec2 endpoint_tangent(const Polyline& nodes, bool front);
/// Interior node turning angles psi_i (size nodes-2), signed.
std::vector<double> turning_angles(const Polyline& nodes);

/// Closure of the curve as a simple polygon: curve nodes followed by the
/// closing subarc of Sigma sampled at roughly the curve's own resolution.
Polygon region_polygon(const OpenCurve& curve, const ConvexBody& body);

/// Samples a subarc of Sigma from theta_from to theta_to (ccw flag as in
/// SigmaArc) with max spacing <= max_edge; includes both ends.
Polyline sample_subarc(const ConvexBody& body, double theta_from, double theta_to, bool ccw,
                       double max_edge);

/// Direction (ccw or cw) of the Sigma subarc from theta_from to theta_to that
/// closes the given chain into a loop winding zero times around the body
/// interior. Throws NumericalError("multi-wrap unsupported") if neither works.
bool contractible_subarc_ccw(const ConvexBody& body, const Polyline& chain, double theta_from,
                             double theta_to);

}  // namespace isoflow
