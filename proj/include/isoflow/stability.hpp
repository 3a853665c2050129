#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isoflow/flow.hpp"

namespace isoflow {

/// Polygonal stand-in for a set of finite perimeter outside the body:
/// outer components carry sign +1, holes -1.
struct PolygonSet {
  std::vector<SignedPolygon> polys;
  double target_area = 0;
};

/// Region bounded by one off-Sigma polyline (from x(theta_start) to
/// x(theta_end)) and a subarc of Sigma closing it up.
struct RelativeRegion {
  Polyline arc;
  double theta_start = 0, theta_end = 0;
  bool sigma_ccw = false;  // closing subarc direction from theta_end to theta_start
};

double region_area(const RelativeRegion& region, const ConvexBody& body);
double region_rel_perimeter(const RelativeRegion& region);
Polygon region_to_polygon(const RelativeRegion& region, const ConvexBody& body,
                          double max_edge = -1.0);

double set_area(const PolygonSet& set);
/// Boundary length excluding edges lying on Sigma (both endpoints and the
/// midpoint within on_tol of the boundary).
double relative_perimeter(const PolygonSet& set, const ConvexBody& body, double on_tol = -1.0);

/// Isoperimetric deficit P(E; R^2 \ Omega) - ell0. Requires |E| = eta_ref
/// within 1e-6 relative.
double deficit(const PolygonSet& region, const ConvexBody& body, double eta_ref, double ell0);

struct SelectResult {
  PolygonSet set;
  double dropped_area = 0;  // discarded components
  double filled_area = 0;   // filled holes
  double ball_area = 0, ball_perimeter = 0;
};

/// Keeps the largest component, fills its holes, attaches a far ball when the
/// kept area falls short of the target.
SelectResult select_component_fill_holes(const PolygonSet& e, const ConvexBody& body);

struct ClipHullResult {
  RelativeRegion region;
  double rel_perimeter_in = 0, rel_perimeter_out = 0;
  double tail_chord_worst = 0;  // max over tails of d_H^2 / (Lbar (L - |chord|))
  double contact_angle1 = 0, contact_angle2 = 0;
};

/// Normal-ray clip of the boundary tails followed by the planar convex hull;
/// output contact angles are at most pi/2 (up to tolerance).
ClipHullResult clip_and_hull(const PolygonSet& f1, const ConvexBody& body);

struct AreaCorrectResult {
  RelativeRegion region;
  double removed_area = 0;
  double hausdorff_to_input = 0;
  double rel_perimeter_out = 0;
};

/// Normal-ray cut sweep shrinking the region area down to eta (bisection on
/// the cut parameter; perimeter never increases).
AreaCorrectResult area_correct_down(const RelativeRegion& f, const ConvexBody& body, double eta);

struct MollifyResult {
  OpenCurve curve;
  double rho = 0;
  double perimeter_change = 0;
  double hausdorff_to_input = 0;
  double corner_kappa_max = 0;    // |curvature| at the smoothing-patch endpoints
  double corner_tangent_gap = 0;  // tangent mismatch across patch junctions
};

/// Polygonal resample, cubic-Bezier corner smoothing with vanishing endpoint
/// curvature, then an outward normal offset restoring the area to eta exactly.
/// Output meets Sigma orthogonally (projection endpoint rule).
MollifyResult mollify(const RelativeRegion& f2, const ConvexBody& body, double eta,
                      int nodes = 512);

struct StageBudget {
  std::string name;
  double rel_perimeter = 0;
  double area = 0;
};

struct ReductionReport {
  double deficit_in = 0, deficit_out = 0;
  double sym_diff = 0;   // |E ^ F|
  double hausdorff = 0;  // d_H(dE, dF)
  double contact_angle1 = 0, contact_angle2 = 0;
  double area_out = 0;
  std::vector<StageBudget> stages;
  double c1_candidate = 0;   // (deficit_out + sym_diff^2) / deficit_in
  double c1_hausdorff = 0;   // hausdorff^2 / deficit_in
  bool trivial_regime = false;
  double delta1 = 0;
  double tail_chord_worst = 0;
  double mollify_perimeter_increase = 0;
};

struct ReduceResult {
  OpenCurve curve;
  ReductionReport report;
};

/// Full reduction pipeline: select/fill -> clip and hull -> area correction ->
/// mollify. The output region is relatively convex with orthogonal contact and
/// area eta to 1e-10 relative.
ReduceResult reduce(const PolygonSet& e, const ConvexBody& body, double eta,
                    const CriticalSet& critical, int mollify_nodes = 512);

enum class PerturbationFamily { radial_bump, dent, speck, tilt };
PerturbationFamily family_from_string(const std::string& name);

/// Test-set generator: perturbations of the area-eta minimizer.
PolygonSet make_perturbed_set(const ConvexBody& body, double eta, const CriticalSet& critical,
                              PerturbationFamily family, double amplitude, int resolution = 4096);

struct StabilityRow {
  double amplitude = 0;
  double deficit_e = 0;
  double sym_diff_direct = 0;  // |E ^ E*| by polygon booleans
  double sym_diff_flow = 0;    // displacement quadrature along the flow
  double hausdorff = 0;        // d_H(dE, dE*)
  double deficit_f = 0;
  bool converged = false;
};

struct StabilityResult {
  std::vector<StabilityRow> rows;
  double slope_deficit_symdiff = 0;  // log-log slope, expected about 2
  double r2_deficit_symdiff = 0;
  double slope_p2_dh2 = 0;           // expected about 1
  double r2_p2_dh2 = 0;
  int excluded = 0;
  double ell0 = 0;
};

StabilityResult stability_experiment(const ConvexBody& body, double eta,
                                     PerturbationFamily family,
                                     const std::vector<double>& amplitudes,
                                     const FlowConfig& flow_config);

struct ProfilePoint {
  double eta = 0, ell0 = 0;
  double lower = 0, upper = 0, improved = 0;
  bool bounds_ok = false;
};

struct ProfileReport {
  std::vector<ProfilePoint> points;
  bool lipschitz_ok = true;
  double worst_lipschitz_margin = 0;
  int partitions_checked = 0;
  bool sublinearity_ok = true;
  double worst_sublinearity_margin = 0;
  double c0 = 0;
};

/// Profile values with the two-sided bounds, the Lipschitz sandwich between
/// consecutive grid etas, and the quantitative sub-additivity check on random
/// partitions.
ProfileReport profile_and_sublinearity(const ConvexBody& body, std::vector<double> eta_list,
                                       int n_partitions, std::uint64_t seed);

/// Largest delta with I + delta < (4 / (5 kappa_max)) asin(eta/(I+delta)^2);
/// zero when the condition already fails at delta = 0.
double smallness_margin(const ConvexBody& body, double eta, double ell0);

/// Hausdorff distance between unions of closed boundary chains.
double hausdorff_multi(const std::vector<Polyline>& a, const std::vector<Polyline>& b,
                       double resolution = -1.0);

/// Boundary chains of a polygon set (each polygon closed).
std::vector<Polyline> boundary_chains(const PolygonSet& set);

/// Least-squares slope and r^2 of y against x.
struct LogLogFit {
  double slope = 0, intercept = 0, r2 = 0;
};
LogLogFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct LojRow {
  double amplitude = 0;
  double eps = 0;          // deficit eps(gamma)
  double c1_dist = 0;      // ||gamma - c*||_{C1(ds_gamma)}
  double length_gap = 0;   // |L(gamma) - L(c*)|, both discrete
};

struct LojResult {
  std::vector<LojRow> rows;
  double slope_distance = 0;     // log c1 vs log eps, expected about 1
  double r2_distance = 0;
  double slope_length = 0;       // log gap vs log eps, expected about 2
  double r2_length = 0;
  double slope_length_vs_eps2 = 0;  // same fit against eps^2, expected about 1
  double ell0 = 0;
};

/// Perturbation sweep around the minimizer measuring the two Lojasiewicz
/// quotients against the deficit.
LojResult loj_scan(const ConvexBody& body, double eta, const std::vector<double>& amplitudes,
                   int segments = 512, int mode = 1);

}  // namespace isoflow
