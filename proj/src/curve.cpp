#include "isoflow/curve.hpp"

#include <algorithm>
#include <cmath>

namespace isoflow {

namespace {

double on_sigma_tolerance(const ConvexBody& body) {
  return std::max(1e-10, 1e-14 * body.width());
}

}  // namespace

OpenCurve make_open_curve(const ConvexBody& body, Polyline nodes) {
  if (nodes.size() < 8) throw ConfigError("curve needs at least 8 nodes");
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    if ((nodes[i + 1] - nodes[i]).norm() == 0.0)
      throw ConfigError("consecutive curve nodes coincide");
  const double tol = on_sigma_tolerance(body);
  OpenCurve c;
  c.start_bp = project_to_boundary(body, nodes.front());
  c.end_bp = project_to_boundary(body, nodes.back());
  if ((nodes.front() - c.start_bp.position).norm() > tol ||
      (nodes.back() - c.end_bp.position).norm() > tol)
    throw ConfigError("curve endpoints must lie on Sigma");
  for (size_t i = 1; i + 1 < nodes.size(); ++i)
    if (body.support_gap(nodes[i]) <= -1e-12 * body.width())
      throw ConfigError("interior curve node inside the body");
  c.nodes = std::move(nodes);
  return c;
}

std::vector<double> edge_lengths(const Polyline& nodes) {
  std::vector<double> h(nodes.size() - 1);
  for (size_t i = 0; i + 1 < nodes.size(); ++i) h[i] = (nodes[i + 1] - nodes[i]).norm();
  return h;
}

Vec2 endpoint_tangent(const Polyline& nodes, bool front) {
  const size_t n = nodes.size();
  Vec2 p[4];
  if (front)
    for (int j = 0; j < 4; ++j) p[j] = nodes[j];
  else
    for (int j = 0; j < 4; ++j) p[j] = nodes[n - 1 - j];
  double t[4] = {0, 0, 0, 0};
  for (int j = 1; j < 4; ++j) t[j] = t[j - 1] + (p[j] - p[j - 1]).norm();
  // d/dt at t=0 of the cubic Lagrange interpolant.
  Vec2 d = Vec2::Zero();
  for (int j = 0; j < 4; ++j) {
    double w;
    if (j == 0) {
      w = 0.0;
      for (int m = 1; m < 4; ++m) w += 1.0 / (t[0] - t[m]);
    } else {
      double num = 1.0, den = 1.0;
      for (int m = 0; m < 4; ++m) {
        if (m == j) continue;
        if (m != 0) num *= (t[0] - t[m]);
        den *= (t[j] - t[m]);
      }
      w = num / den;
    }
    d += w * p[j];
  }
  d.normalize();
  return front ? d : -d;  // oriented along increasing arclength
}

std::vector<double> turning_angles(const Polyline& nodes) {
  std::vector<double> psi(nodes.size() - 2);
  for (size_t i = 1; i + 1 < nodes.size(); ++i) {
    const Vec2 a = nodes[i] - nodes[i - 1];
    const Vec2 b = nodes[i + 1] - nodes[i];
    psi[i - 1] = std::atan2(cross2(a, b), a.dot(b));
  }
  return psi;
}

bool contractible_subarc_ccw(const ConvexBody& body, const Polyline& chain, double theta_from,
                             double theta_to) {
  const double max_edge =
      std::max(polyline_length(chain) / static_cast<double>(chain.size()),
               body.boundary_length() / 256.0);
  for (bool ccw : {true, false}) {
    Polyline loop = chain;
    Polyline sub = sample_subarc(body, theta_from, theta_to, ccw, max_edge);
    loop.insert(loop.end(), sub.begin() + 1, sub.end() - 1);
    if (winding_number(loop, Vec2::Zero()) == 0) return ccw;
  }
  throw NumericalError("multi-wrap unsupported");
}

SigmaArc closing_arc(const OpenCurve& curve, const ConvexBody& body) {
  SigmaArc arc;
  arc.theta_from = curve.end_bp.theta;
  arc.theta_to = curve.start_bp.theta;
  const double gap = wrap_pi(arc.theta_to - arc.theta_from);
  if (std::abs(gap) < 1e-13) {
    arc.degenerate = true;
    arc.ccw = true;
    Polyline loop = curve.nodes;
    if (winding_number(loop, Vec2::Zero()) != 0)
      throw NumericalError("multi-wrap unsupported");
    return arc;
  }
  arc.ccw = contractible_subarc_ccw(body, curve.nodes, arc.theta_from, arc.theta_to);
  return arc;
}

double enclosed_area_given(const ConvexBody& body, const Polyline& nodes,
                           const BoundaryPoint& start_bp, const BoundaryPoint& end_bp,
                           bool sigma_ccw) {
  // Shoelace of the closed concatenation, recentered at the curve's first
  // node so the node-level cross products stay at the region scale.
  const Vec2 c = nodes.front();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    acc += 0.5 * cross2(nodes[i] - c, nodes[i + 1] - c);
  if (std::abs(wrap_pi(start_bp.theta - end_bp.theta)) < 1e-13) {
    acc += 0.5 * cross2(nodes.back() - c, nodes.front() - c);
    return acc;
  }
  const Vec2 sig_from = end_bp.position;
  const Vec2 sig_to = start_bp.position;
  const SubarcQuantities q =
      subarc_quantities(body, end_bp.theta, start_bp.theta, sigma_ccw);
  acc += 0.5 * cross2(nodes.back() - c, sig_from - c);
  // subarc shoelace about the origin, shifted to the center c
  acc += q.shoelace - 0.5 * cross2(c, sig_to - sig_from);
  acc += 0.5 * cross2(sig_to - c, nodes.front() - c);
  return acc;
}

double enclosed_area(const OpenCurve& curve, const ConvexBody& body) {
  const SigmaArc arc = closing_arc(curve, body);
  return enclosed_area_given(body, curve.nodes, curve.start_bp, curve.end_bp, arc.ccw);
}

CurveReport report_given(const ConvexBody& body, const Polyline& x,
                         const BoundaryPoint& start_bp, const BoundaryPoint& end_bp,
                         bool sigma_ccw) {
  CurveReport r;
  const std::vector<double> h = edge_lengths(x);
  r.length = 0.0;
  for (double e : h) r.length += e;

  const std::vector<double> psi = turning_angles(x);
  const Vec2 tau1 = endpoint_tangent(x, true);
  const Vec2 tau2 = endpoint_tangent(x, false);
  const Vec2 d_first = (x[1] - x[0]).normalized();
  const Vec2 d_last = (x[x.size() - 1] - x[x.size() - 2]).normalized();
  const double psi_start = std::atan2(cross2(tau1, d_first), tau1.dot(d_first));
  const double psi_end = std::atan2(cross2(d_last, tau2), d_last.dot(tau2));

  r.turning_angle = psi_start + psi_end;
  for (double p : psi) r.turning_angle += p;
  r.mean_curvature = r.turning_angle / r.length;

  double acc = 0.0;
  for (size_t i = 0; i < psi.size(); ++i) {
    const double w = 0.5 * (h[i] + h[i + 1]);
    const double kappa = psi[i] / w;
    acc += (kappa - r.mean_curvature) * (kappa - r.mean_curvature) * w;
  }
  r.eps_kappa = std::sqrt(acc);

  r.alpha1 = wrap_pi(angle_of(start_bp.tangent) - angle_of(tau1));
  r.alpha2 = wrap_pi(angle_of(tau2) - angle_of(end_bp.tangent));
  if (r.alpha1 < 0) r.alpha1 += (r.alpha1 > -1e-6) ? 0.0 : kTwoPi;
  if (r.alpha2 < 0) r.alpha2 += (r.alpha2 > -1e-6) ? 0.0 : kTwoPi;
  r.alpha1 = std::clamp(r.alpha1, 0.0, kPi);
  r.alpha2 = std::clamp(r.alpha2, 0.0, kPi);
  r.eps_alpha = std::abs(r.alpha1 - 0.5 * kPi) + std::abs(r.alpha2 - 0.5 * kPi);
  r.eps = r.eps_kappa + r.eps_alpha;
  r.area = enclosed_area_given(body, x, start_bp, end_bp, sigma_ccw);
  return r;
}

CurveReport report(const OpenCurve& curve, const ConvexBody& body) {
  const SigmaArc arc = closing_arc(curve, body);
  return report_given(body, curve.nodes, curve.start_bp, curve.end_bp, arc.ccw);
}

OpenCurve resample_constant_speed(const OpenCurve& curve, int n, const ConvexBody& body) {
  if (n < 8) throw ConfigError("resample target must be at least 8 segments");
  const Polyline& x = curve.nodes;
  std::vector<double> cum(x.size(), 0.0);
  for (size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + (x[i] - x[i - 1]).norm();
  const double total = cum.back();
  Polyline out(n + 1);
  size_t seg = 0;
  for (int k = 0; k <= n; ++k) {
    const double s = total * k / n;
    while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
    const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out[k] = x[seg] + t * (x[seg + 1] - x[seg]);
  }
  out.front() = project_to_boundary(body, out.front()).position;
  out.back() = project_to_boundary(body, out.back()).position;
  return make_open_curve(body, std::move(out));
}

namespace {

// Position and velocity of a polyline reparametrized with constant speed over
// [0, span]. Velocities interpolate per-node tangents (central inside,
// one-sided cubic fits at the ends) so that two discretizations of the same
// smooth curve agree to O(h^2) rather than the O(h) of raw segment directions.
struct ConstantSpeedEval {
  const Polyline& x;
  std::vector<double> cum;
  std::vector<Vec2> node_tangent;
  double total, span;

  ConstantSpeedEval(const Polyline& line, double span_) : x(line), span(span_) {
    cum.assign(x.size(), 0.0);
    for (size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + (x[i] - x[i - 1]).norm();
    total = cum.back();
    const size_t m = x.size();
    node_tangent.resize(m);
    for (size_t i = 1; i + 1 < m; ++i)
      node_tangent[i] = ((x[i + 1] - x[i - 1]) / (cum[i + 1] - cum[i - 1])).normalized();
    node_tangent[0] = endpoint_tangent(x, true);
    node_tangent[m - 1] = endpoint_tangent(x, false);
  }
  size_t segment(double p) const {
    const double s = p / span * total;
    size_t lo = 0, hi = x.size() - 2;
    while (lo < hi) {
      const size_t mid = (lo + hi + 1) / 2;
      if (cum[mid] <= s) lo = mid; else hi = mid - 1;
    }
    return lo;
  }
  Vec2 position(double p) const {
    const double s = std::clamp(p / span * total, 0.0, total);
    const size_t i = segment(p);
    const double t = (s - cum[i]) / (cum[i + 1] - cum[i]);
    return x[i] + t * (x[i + 1] - x[i]);
  }
  Vec2 velocity(double p) const {
    const double s = std::clamp(p / span * total, 0.0, total);
    const size_t i = segment(p);
    const double t = (s - cum[i]) / (cum[i + 1] - cum[i]);
    const Vec2 tan = ((1 - t) * node_tangent[i] + t * node_tangent[i + 1]).normalized();
    return tan * (total / span);
  }
};

}  // namespace

double c1_distance_polylines(const Polyline& a, const Polyline& b) {
  const double la = polyline_length(a);
  ConstantSpeedEval ea(a, la), eb(b, la);
  const int m = 2 * static_cast<int>(std::max(a.size(), b.size()));
  double best = 0.0;
  for (int j = 0; j <= 2 * m; ++j) {
    const double p = la * j / (2 * m);  // nodes and midpoints
    const double d = (ea.position(p) - eb.position(p)).norm() +
                     (ea.velocity(p) - eb.velocity(p)).norm();
    best = std::max(best, d);
  }
  return best;
}

double c1_distance(const OpenCurve& a, const OpenCurve& b) {
  return c1_distance_polylines(a.nodes, b.nodes);
}

Polyline sample_subarc(const ConvexBody& body, double theta_from, double theta_to, bool ccw,
                       double max_edge) {
  double delta = ccw ? wrap_two_pi(theta_to - theta_from) : -wrap_two_pi(theta_from - theta_to);
  if (std::abs(wrap_pi(theta_to - theta_from)) < 1e-13) delta = 0.0;
  const double approx_len = std::abs(body.arclength_to(theta_from + delta) -
                                     body.arclength_to(theta_from));
  const int k = std::max(2, static_cast<int>(std::ceil(approx_len / std::max(max_edge, 1e-12))));
  Polyline out(k + 1);
  for (int i = 0; i <= k; ++i)
    out[i] = boundary_at(body, theta_from + delta * i / k).position;
  return out;
}

Polygon region_polygon(const OpenCurve& curve, const ConvexBody& body) {
  const SigmaArc arc = closing_arc(curve, body);
  Polygon poly = curve.nodes;
  if (!arc.degenerate) {
    const double max_edge = polyline_length(curve.nodes) / curve.segment_count();
    Polyline sub = sample_subarc(body, arc.theta_from, arc.theta_to, arc.ccw, max_edge);
    poly.insert(poly.end(), sub.begin() + 1, sub.end() - 1);
  }
  return poly;
}

}  // namespace isoflow
