#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "isoflow/curve.hpp"
#include "isoflow/obstacle.hpp"

namespace isoflow {

/// A circular arc of the family c_r(z): the component of the circle around z
/// outside the body, meeting Sigma transversally at both endpoints.
struct CircArc {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double theta1 = 0.0, theta2 = 0.0;  // support parameters of x1, x2
  bool positive = true;               // ccw traversal around the center
  Vec2 x1 = Vec2::Zero(), x2 = Vec2::Zero();
  double phi1 = 0.0;                  // circle angle of x1 around the center
  double sweep = 0.0;                 // signed turning angle; x2 at phi1+sweep
  double alpha1 = 0.0, alpha2 = 0.0;
  double length = 0.0;
  double area = 0.0;                  // A_Sigma, signed

  Vec2 point_at(double fraction) const {
    return center + radius * unit_dir(phi1 + sweep * fraction);
  }
  Vec2 tangent_at(double fraction) const {
    return (positive ? 1.0 : -1.0) * rot90(unit_dir(phi1 + sweep * fraction));
  }
  /// Inner unit normal nu_c = J tau; points at the center for positive arcs.
  Vec2 inner_normal_at(double fraction) const {
    return (positive ? -1.0 : 1.0) * unit_dir(phi1 + sweep * fraction);
  }
  Polyline sample(int segments) const {
    Polyline out(segments + 1);
    for (int i = 0; i <= segments; ++i) out[i] = point_at(static_cast<double>(i) / segments);
    out.front() = x1;
    out.back() = x2;
    return out;
  }
};

enum class ArcStatus { ok, not_in_family, transversality_failure };

struct ArcResult {
  ArcStatus status = ArcStatus::not_in_family;
  CircArc arc;
  bool ok() const { return status == ArcStatus::ok; }
};

/// Intersects the circle (z, r) with Sigma. Requires exactly two transversal
/// roots; returns the outside component with the requested orientation.
/// theta_hints, when given, warm-starts the two root searches.
ArcResult arc_outside(const ConvexBody& body, const Vec2& z, double r, bool positive = true,
                      const double* theta_hints = nullptr);

CircArc arc_outside_or_throw(const ConvexBody& body, const Vec2& z, double r,
                             bool positive = true);

/// Newton on r |-> A_Sigma(c_r(z)) = eta (derivative = arc length). Solves the
/// positively oriented area; |A - eta| <= 1e-10 * eta on success.
struct RadiusSolve {
  bool ok = false;
  CircArc arc;
  std::string error;
};
RadiusSolve solve_radius_for_area(const ConvexBody& body, const Vec2& z, double eta,
                                  double r_hint = -1.0, double rel_tol = 1e-10);

/// Length of the unique area-eta arc centered at z (the reduced functional).
double L_eta(const ConvexBody& body, const Vec2& z, double eta);

/// Analytic gradient of L_eta from the endpoint-angle formula
/// dL = -sum_i cot(alpha_i) <dz, Y_i>, Y_i = nu_c(x_i) - J(x2-x1)/L.
Vec2 grad_L_eta(const ConvexBody& body, const Vec2& z, double eta);

struct Spectrum {
  double lambda1 = 0.0, lambda2 = 0.0;  // ascending
  Mat2 hessian = Mat2::Zero();
  bool degenerate = false;              // an eigenvalue within tolerance of 0
  double fd_step = 0.0;
  double asymmetry = 0.0;
};

/// Central finite differences of the analytic gradient, step tuned by
/// Richardson extrapolation, then symmetrized and eigen-decomposed.
Spectrum hessian_L_eta(const ConvexBody& body, const Vec2& z, double eta);

struct CriticalPoint {
  CircArc arc;
  Spectrum spectrum;
};

struct CriticalSet {
  std::vector<CriticalPoint> points;  // sorted by (length, center lex order)
  std::vector<double> levels;         // distinct critical lengths, ascending
  double ell0 = 0.0;                  // I_Omega(eta) estimate
  bool rotation_orbit = false;        // circle body: points are orbit representatives
};

/// Damped Newton on grad L_eta = 0 from a polar seed grid; deduplicates (for
/// circle bodies modulo rotation). Throws NumericalError when no seed lands.
CriticalSet find_critical(const ConvexBody& body, double eta, int angular_seeds = 12,
                          int radial_seeds = 5);

/// Same search from caller-supplied center seeds.
CriticalSet find_critical_from(const ConvexBody& body, double eta,
                               const std::vector<Vec2>& seeds);

/// Circular arc with radius 1/|kappa_bar| emanating from the curve start with
/// matched initial tangent, run to its next hit of Sigma. The companion need
/// not enclose area eta; c1_dist is || curve - arc ||_{C1(ds_curve)}.
struct CompanionArc {
  CircArc arc;
  double c1_dist = 0.0;
};
CompanionArc companion_arc(const OpenCurve& curve, const ConvexBody& body);

/// Fixes the companion center and restores the enclosed area to eta.
CircArc corrected_arc(const OpenCurve& curve, const ConvexBody& body, double eta);

/// One-parameter arc family for first-variation checks.
struct ArcParams {
  double r = 0.0;
  Vec2 z = Vec2::Zero();
};
using ArcFamily = std::function<ArcParams(double)>;

struct VariationCheck {
  double rel_err_area = 0.0;      // dA formula vs finite differences
  double rel_err_endpoint = 0.0;  // endpoint speeds mu_i
  double rel_err_length = 0.0;    // dL formula
};

/// Compares the analytic first-variation formulas against central finite
/// differences of A_Sigma, x_i and L at eps = 0.
VariationCheck variation_check(const ConvexBody& body, const ArcFamily& family,
                               double fd_step = 1e-5);

}  // namespace isoflow
