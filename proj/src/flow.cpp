#include "isoflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace isoflow {

namespace {

struct InteriorFields {
  std::vector<double> edge;    // h_i, size N
  std::vector<double> weight;  // w_i for interior nodes, size N-1
  std::vector<double> kappa;   // discrete curvature at interior nodes
  std::vector<Vec2> normal;    // node normals at interior nodes
  double h_min = 0;
  double length = 0;
};

InteriorFields interior_fields(const Polyline& x) {
  InteriorFields f;
  const size_t n = x.size() - 1;
  f.edge = edge_lengths(x);
  f.h_min = *std::min_element(f.edge.begin(), f.edge.end());
  for (double e : f.edge) f.length += e;
  f.weight.resize(n - 1);
  f.kappa.resize(n - 1);
  f.normal.resize(n - 1);
  const std::vector<double> psi = turning_angles(x);
  for (size_t i = 1; i < n; ++i) {
    f.weight[i - 1] = 0.5 * (f.edge[i - 1] + f.edge[i]);
    f.kappa[i - 1] = psi[i - 1] / f.weight[i - 1];
    f.normal[i - 1] = rot90((x[i + 1] - x[i - 1]).normalized());
  }
  return f;
}

// Cubic Hermite resampling at uniform chordal arclength with fourth-order
// tangents on the (near-uniform) chord parameter. The interpolation error
// O(h^4) keeps the curvature noise injected per step well below the stopping
// deficit and the length/area bookkeeping below the monotonicity tolerance.
Polyline resample_smooth(const Polyline& x, int n) {
  const size_t m = x.size();
  std::vector<double> t(m, 0.0);
  for (size_t i = 1; i < m; ++i) t[i] = t[i - 1] + (x[i] - x[i - 1]).norm();
  const double total = t.back();
  std::vector<Vec2> tan(m);
  for (size_t i = 1; i + 1 < m; ++i) tan[i] = (x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]);
  for (size_t i = 2; i + 2 < m; ++i) {
    const double h_loc = 0.25 * (t[i + 2] - t[i - 2]);
    tan[i] = (-x[i + 2] + 8.0 * x[i + 1] - 8.0 * x[i - 1] + x[i - 2]) / (12.0 * h_loc);
  }
  {
    const double d1 = t[1] - t[0], d2 = t[2] - t[1];
    tan[0] = -(2 * d1 + d2) / (d1 * (d1 + d2)) * x[0] + (d1 + d2) / (d1 * d2) * x[1] -
             d1 / (d2 * (d1 + d2)) * x[2];
    const double e1 = t[m - 1] - t[m - 2], e2 = t[m - 2] - t[m - 3];
    tan[m - 1] = (2 * e1 + e2) / (e1 * (e1 + e2)) * x[m - 1] - (e1 + e2) / (e1 * e2) * x[m - 2] +
                 e1 / (e2 * (e1 + e2)) * x[m - 3];
  }
  Polyline out(n + 1);
  out[0] = x.front();
  out[n] = x.back();
  size_t seg = 0;
  for (int k = 1; k < n; ++k) {
    const double s = total * k / n;
    while (seg + 2 < m && t[seg + 1] < s) ++seg;
    const double d = t[seg + 1] - t[seg];
    const double u = (s - t[seg]) / d;
    const double u2 = u * u, u3 = u2 * u;
    out[k] = (2 * u3 - 3 * u2 + 1) * x[seg] + (u3 - 2 * u2 + u) * d * tan[seg] +
             (-2 * u3 + 3 * u2) * x[seg + 1] + (u3 - u2) * d * tan[seg + 1];
  }
  return out;
}

Polyline uniform_resample_linear(const Polyline& x, int n) {
  std::vector<double> cum(x.size(), 0.0);
  for (size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + (x[i] - x[i - 1]).norm();
  Polyline out(n + 1);
  size_t seg = 0;
  for (int k = 0; k <= n; ++k) {
    const double s = cum.back() * k / n;
    while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
    const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out[k] = x[seg] + t * (x[seg + 1] - x[seg]);
  }
  return out;
}

}  // namespace

// Endpoint attachment: the nearest-point projection of the neighbor node is
// only first-order orthogonal (the chord tilts by kappa h / 2 against the
// underlying curve tangent), which leaves the discrete equilibrium with an
// O(h) angle defect. Instead, solve on Sigma for the foot at which the
// one-sided cubic-fit tangent of [x0, x1, x2, x3] is exactly orthogonal;
// falls back to the plain projection if the secant iteration strays.
BoundaryPoint attach_endpoint(const ConvexBody& body, const Polyline& x, bool front) {
  const size_t n = x.size() - 1;
  const Vec2 neighbor = front ? x[1] : x[n - 1];
  const BoundaryPoint foot = project_to_boundary(body, neighbor);
  const double h = front ? (x[2] - x[1]).norm() : (x[n - 1] - x[n - 2]).norm();

  auto tangency = [&](double theta) {
    const BoundaryPoint bp = boundary_at(body, theta);
    Polyline probe(4);
    if (front) {
      probe[0] = bp.position;
      for (int j = 1; j < 4; ++j) probe[j] = x[j];
    } else {
      for (int j = 0; j < 3; ++j) probe[j] = x[n - 3 + j];
      probe[3] = bp.position;
    }
    return endpoint_tangent(probe, front).dot(bp.tangent);
  };

  const double theta_span = 5.0 * h * foot.curvature + 1e-12;
  double t0 = foot.theta;
  double t1 = foot.theta + 0.02 * theta_span;
  double s0 = tangency(t0), s1 = tangency(t1);
  for (int it = 0; it < 30; ++it) {
    if (s1 == s0) break;
    const double t2 = t1 - s1 * (t1 - t0) / (s1 - s0);
    if (std::abs(t2 - foot.theta) > theta_span) return foot;  // strayed; keep the projection
    t0 = t1;
    s0 = s1;
    t1 = t2;
    s1 = tangency(t1);
    if (std::abs(t1 - t0) < 1e-15 * (1.0 + std::abs(t1))) break;
  }
  return boundary_at(body, t1);
}

namespace {

bool nodes_outside(const ConvexBody& body, const Polyline& x) {
  const double tol = -1e-12 * body.width();
  for (size_t i = 1; i + 1 < x.size(); ++i) {
    const Vec2& p = x[i];
    const double th = angle_of(p);
    const double quick = p.dot(unit_dir(th)) - body.support(th);
    if (quick > 0) continue;
    if (body.support_gap(p) < tol) return false;
  }
  return true;
}

// Uniform normal offset Newton so |A - eta_signed| <= tol; endpoints follow
// through the attachment rule. The offset derivative of the area is -L.
bool renormalize_given(const ConvexBody& body, Polyline& x, BoundaryPoint& bp_start,
                       BoundaryPoint& bp_end, bool sigma_ccw, double eta_signed,
                       double tol_abs) {
  const size_t n = x.size() - 1;
  for (int it = 0; it < 12; ++it) {
    const double area = enclosed_area_given(body, x, bp_start, bp_end, sigma_ccw);
    const double defect = area - eta_signed;
    if (std::abs(defect) <= tol_abs) return true;
    const double length = polyline_length(x);
    const double offset = defect / length;
    Polyline moved = x;
    for (size_t i = 1; i < n; ++i) {
      const Vec2 nu = rot90((x[i + 1] - x[i - 1]).normalized());
      moved[i] += offset * nu;
    }
    moved.front() = x.front();
    moved.back() = x.back();
    bp_start = attach_endpoint(body, moved, true);
    bp_end = attach_endpoint(body, moved, false);
    moved.front() = bp_start.position;
    moved.back() = bp_end.position;
    x = std::move(moved);
  }
  return std::abs(enclosed_area_given(body, x, bp_start, bp_end, sigma_ccw) - eta_signed) <=
         tol_abs;
}

bool renormalize_area(Polyline& x, const ConvexBody& body, double eta_signed, double tol_abs) {
  OpenCurve probe = make_open_curve(body, x);
  const SigmaArc arc = closing_arc(probe, body);
  BoundaryPoint bs = probe.start_bp, be = probe.end_bp;
  const bool ok = renormalize_given(body, x, bs, be, arc.ccw, eta_signed, tol_abs);
  return ok;
}

void solve_tridiagonal(std::vector<double>& diag, std::vector<double>& rhs_x,
                       std::vector<double>& rhs_y, double off) {
  const size_t n = diag.size();
  std::vector<double> c(n, off);
  for (size_t i = 1; i < n; ++i) {
    const double m = off / diag[i - 1];
    diag[i] -= m * c[i - 1];
    rhs_x[i] -= m * rhs_x[i - 1];
    rhs_y[i] -= m * rhs_y[i - 1];
  }
  rhs_x[n - 1] /= diag[n - 1];
  rhs_y[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) {
    rhs_x[i] = (rhs_x[i] - c[i] * rhs_x[i + 1]) / diag[i];
    rhs_y[i] = (rhs_y[i] - c[i] * rhs_y[i + 1]) / diag[i];
  }
}

}  // namespace

PreconditionReport check_preconditions(const ConvexBody& body, const OpenCurve& curve,
                                       double eta, const CriticalSet* critical) {
  PreconditionReport rep;
  rep.cbar_printed = 4.0 / (25.0 * kPi) * std::pow(std::asin(1.0 / (4.0 * kPi)), 2);
  rep.cbar_stated = 0.0415;
  const double kmax = body.kappa_max();
  rep.area_threshold = rep.cbar_printed / (kmax * kmax);
  if (!(eta > 0)) {
    rep.vacuous = true;
    rep.message = "eta must be positive; preconditions are vacuous";
    return rep;
  }
  rep.eta_small_enough = eta < rep.area_threshold;
  rep.initial_length = polyline_length(curve.nodes);
  const double arg0 = eta / (rep.initial_length * rep.initial_length);
  rep.flow_rhs = (arg0 <= 1.0) ? 4.0 / (5.0 * kmax) * std::asin(arg0)
                               : std::numeric_limits<double>::quiet_NaN();
  rep.initial_length_ok = std::isfinite(rep.flow_rhs) && rep.initial_length < rep.flow_rhs;
  double ell0;
  if (critical) {
    ell0 = critical->ell0;
  } else {
    ell0 = find_critical(body, eta).ell0;
  }
  rep.profile_value = ell0;
  const double arg1 = eta / (ell0 * ell0);
  rep.profile_rhs = (arg1 <= 1.0) ? 4.0 / (5.0 * kmax) * std::asin(arg1)
                                  : std::numeric_limits<double>::quiet_NaN();
  rep.profile_condition_ok = std::isfinite(rep.profile_rhs) && ell0 < rep.profile_rhs;
  return rep;
}

FlowState make_flow_state(const ConvexBody& body, OpenCurve curve, double eta) {
  FlowState st;
  const SigmaArc arc = closing_arc(curve, body);
  st.sigma_ccw = arc.ccw;
  const double area =
      enclosed_area_given(body, curve.nodes, curve.start_bp, curve.end_bp, arc.ccw);
  st.eta_signed = std::copysign(eta, area);
  st.curve = std::move(curve);
  return st;
}

StepOutcome step(FlowState& st, const FlowConfig& config, const ConvexBody& body) {
  StepOutcome out;
  Polyline& x = st.curve.nodes;
  const size_t n = x.size() - 1;
  const CurveReport rep =
      report_given(body, x, st.curve.start_bp, st.curve.end_bp, st.sigma_ccw);
  const InteriorFields f = interior_fields(x);

  // Velocity field kappa - kappa_bar, projected onto the discrete
  // area-preserving constraint (weighted mean removed).
  std::vector<double> v(n - 1);
  double vw = 0, wsum = 0;
  for (size_t i = 0; i < n - 1; ++i) {
    v[i] = f.kappa[i] - rep.mean_curvature;
    vw += v[i] * f.weight[i];
    wsum += f.weight[i];
  }
  const double mean = vw / wsum;
  for (double& vi : v) vi -= mean;

  double v_l2 = 0, v_l1 = 0, kv_l1 = 0;
  for (size_t i = 0; i < n - 1; ++i) {
    v_l2 += v[i] * v[i] * f.weight[i];
    v_l1 += std::abs(v[i]) * f.weight[i];
    kv_l1 += std::abs(f.kappa[i]) * std::abs(v[i]) * f.weight[i];
  }
  v_l2 = std::sqrt(v_l2);

  const double dt = (config.scheme == FlowConfig::Scheme::explicit_euler)
                        ? config.cfl_explicit * f.h_min * f.h_min
                        : config.cfl_semi_implicit * f.h_min;

  const Polyline before = x;  // constant-speed from the previous step
  Polyline moved = x;
  if (config.scheme == FlowConfig::Scheme::explicit_euler) {
    for (size_t i = 1; i < n; ++i) moved[i] += dt * v[i - 1] * f.normal[i - 1];
  } else {
    // Defect-corrected IMEX step (I - dt D_ss)(X - x) = dt V nu: the implicit
    // arclength Laplacian stabilizes the stiff modes while the fixed point is
    // exactly V = 0 in the turning-angle curvature.
    const double h_bar = f.length / static_cast<double>(n);
    const double mu = dt / (h_bar * h_bar);
    std::vector<double> diag(n - 1, 1.0 + 2.0 * mu), rx(n - 1), ry(n - 1);
    for (size_t i = 1; i < n; ++i) {
      const Vec2 lap = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h_bar * h_bar);
      Vec2 rhs = x[i] + dt * v[i - 1] * f.normal[i - 1] - dt * lap;
      if (i == 1) rhs += mu * x[0];
      if (i == n - 1) rhs += mu * x[n];
      rx[i - 1] = rhs.x();
      ry[i - 1] = rhs.y();
    }
    solve_tridiagonal(diag, rx, ry, -mu);
    for (size_t i = 1; i < n; ++i) moved[i] = Vec2(rx[i - 1], ry[i - 1]);
  }
  BoundaryPoint bp_start = attach_endpoint(body, moved, true);
  BoundaryPoint bp_end = attach_endpoint(body, moved, false);
  moved.front() = bp_start.position;
  moved.back() = bp_end.position;

  const double length_after_move = polyline_length(moved);
  out.row.dissipation_lhs = (length_after_move - rep.length) / dt;

  if (!nodes_outside(body, moved)) {
    out.ok = false;
    out.halt_reason = "exterior violated";
    out.row.exterior = false;
    return out;
  }
  ++st.step_index;
  if (config.embed_check_every > 0 && st.step_index % config.embed_check_every == 0 &&
      polyline_self_intersects(moved)) {
    out.ok = false;
    out.halt_reason = "embeddedness lost";
    out.row.embedded = false;
    return out;
  }

  // resample only when the spacing has actually drifted; each resample
  // injects O(h^4) interpolation noise, so skipping it when unnecessary keeps
  // the terminal deficit floor low
  Polyline resampled;
  {
    const std::vector<double> he = edge_lengths(moved);
    const double h_bar = length_after_move / static_cast<double>(n);
    double spread = 0;
    for (double e : he) spread = std::max(spread, std::abs(e - h_bar));
    if (spread > 0.02 * h_bar) {
      resampled = resample_smooth(moved, static_cast<int>(n));
      bp_start = attach_endpoint(body, resampled, true);
      bp_end = attach_endpoint(body, resampled, false);
      resampled.front() = bp_start.position;
      resampled.back() = bp_end.position;
    } else {
      resampled = std::move(moved);
    }
  }
  out.row.area_drift =
      enclosed_area_given(body, resampled, bp_start, bp_end, st.sigma_ccw) - st.eta_signed;
  if (!renormalize_given(body, resampled, bp_start, bp_end, st.sigma_ccw, st.eta_signed,
                         config.area_tolerance_rel * std::abs(st.eta_signed))) {
    out.ok = false;
    out.halt_reason = "area renormalization stalled";
    return out;
  }

  x = std::move(resampled);
  st.curve.start_bp = bp_start;
  st.curve.end_bp = bp_end;
  st.t += dt;
  const StepKinematics kin = step_kinematics(before, x, dt);
  const CurveReport rep_after =
      report_given(body, x, st.curve.start_bp, st.curve.end_bp, st.sigma_ccw);

  out.row.t = st.t;
  out.row.length = rep_after.length;
  out.row.area = rep_after.area;
  out.row.eps = rep_after.eps;
  out.row.turning_angle = rep_after.turning_angle;
  out.row.v_l2 = v_l2;
  out.row.v_l1 = v_l1;
  out.row.kappa_v_l1 = kv_l1;
  out.row.vtilde_l2 = kin.vtilde_l2;
  out.row.embedded = true;
  out.row.exterior = true;
  return out;
}

FlowTrace run(FlowState st, const FlowConfig& config, const ConvexBody& body) {
  if (config.node_count < 32) throw ConfigError("flow needs at least 32 segments");
  if (!(config.stop_eps > 0) || !(config.area_tolerance_rel > 0) ||
      !(config.cfl_explicit > 0) || !(config.cfl_semi_implicit > 0))
    throw ConfigError("flow steps and tolerances must be positive");
  FlowTrace trace;
  trace.eta = std::abs(st.eta_signed);

  st.curve = resample_constant_speed(st.curve, config.node_count, body);
  renormalize_given(body, st.curve.nodes, st.curve.start_bp, st.curve.end_bp, st.sigma_ccw,
                    st.eta_signed, config.area_tolerance_rel * std::abs(st.eta_signed));
  {
    const CurveReport rep0 =
        report_given(body, st.curve.nodes, st.curve.start_bp, st.curve.end_bp, st.sigma_ccw);
    TraceRow row0;
    row0.t = 0;
    row0.length = rep0.length;
    row0.area = rep0.area;
    row0.eps = rep0.eps;
    row0.turning_angle = rep0.turning_angle;
    trace.rows.push_back(row0);
    trace.length_start = rep0.length;
    trace.snapshots.push_back({0.0, st.curve.nodes});
    if (rep0.eps < config.stop_eps) trace.converged = true;  // stationary start
  }

  long k = 0;
  while (!trace.converged) {
    const StepOutcome oc = step(st, config, body);
    ++k;
    if (!oc.ok) {
      trace.halted = true;
      trace.halt_reason = oc.halt_reason;
      break;
    }
    const double dt_row = oc.row.t - (trace.rows.empty() ? 0.0 : trace.rows.back().t);
    trace.displacement_l2 += dt_row * oc.row.v_l2;
    trace.displacement_tilde_l2 += dt_row * oc.row.vtilde_l2;
    trace.displacement_l1 += dt_row * oc.row.v_l1;
    if (config.record_every > 0 && k % config.record_every == 0) trace.rows.push_back(oc.row);
    if (config.snapshot_every > 0 && k % config.snapshot_every == 0)
      trace.snapshots.push_back({st.t, st.curve.nodes});
    if (std::abs(oc.row.turning_angle) > config.turning_angle_bound)
      trace.turning_bound_exceeded = true;
    if (oc.row.eps < config.stop_eps) {
      trace.converged = true;
      if (trace.rows.back().t != oc.row.t) trace.rows.push_back(oc.row);
      break;
    }
    if (st.t >= config.t_max) break;
  }
  trace.t_end = st.t;
  trace.length_end = trace.rows.back().length;
  trace.terminal_nodes = st.curve.nodes;
  trace.snapshots.push_back({st.t, st.curve.nodes});

  if (trace.converged) {
    try {
      const CompanionArc comp = companion_arc(st.curve, body);
      const CriticalSet cs =
          find_critical_from(body, trace.eta, {comp.arc.center});
      double best = std::numeric_limits<double>::max();
      for (const CriticalPoint& cp : cs.points) {
        const double d = (cp.arc.center - comp.arc.center).norm();
        if (d < best) {
          best = d;
          trace.limit_arc = cp.arc;
        }
      }
      trace.snapped = best < std::numeric_limits<double>::max();
      trace.limit_level = trace.limit_arc.length;
    } catch (const NumericalError&) {
      trace.snapped = false;
    }
  }
  return trace;
}

RateFit fit_rate(const FlowTrace& trace) {
  if (!trace.snapped) throw ConfigError("rate fit needs a converged, snapped trace");
  RateFit fit;
  fit.l_infinity = trace.limit_arc.length;
  const double floor =
      std::max(1e-13 * (1.0 + fit.l_infinity),
               2.5 * std::abs(trace.length_end - fit.l_infinity));
  std::vector<std::pair<double, double>> pts;
  for (const TraceRow& r : trace.rows) {
    const double y = r.length - fit.l_infinity;
    if (y > floor) pts.emplace_back(r.t, std::log(y));
  }
  if (pts.size() < 100) throw ConfigError("trace tail too short for rate fit");
  pts.erase(pts.begin(), pts.begin() + static_cast<long>(pts.size() / 2));
  fit.samples_used = static_cast<int>(pts.size());

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(pts.size());
  for (auto [t, y] : pts) {
    sx += t; sy += y; sxx += t * t; sxy += t * y; syy += y * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.rate = -slope;
  const double r_num = (m * sxy - sx * sy);
  const double r_den = std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
  fit.r2 = r_den > 0 ? (r_num / r_den) * (r_num / r_den) : 0.0;
  return fit;
}

DisplacementReport displacement_bounds(const FlowTrace& trace, const ConvexBody& body,
                                       int pair_samples) {
  DisplacementReport rep;
  rep.total_l2 = trace.displacement_l2;
  rep.total_tilde_l2 = trace.displacement_tilde_l2;
  rep.drop_sqrt = std::sqrt(std::max(trace.length_start - trace.length_end, 0.0));
  rep.ratio = rep.drop_sqrt > 0 ? (rep.total_l2 + rep.total_tilde_l2) / rep.drop_sqrt : 0.0;

  const size_t ns = trace.snapshots.size();
  if (ns < 2 || pair_samples <= 0) return rep;
  rep.worst_pair_margin = std::numeric_limits<double>::max();
  auto v_integral = [&](double t1, double t2) {
    double acc = 0;
    for (size_t i = 1; i < trace.rows.size(); ++i) {
      const double ta = trace.rows[i - 1].t, tb = trace.rows[i].t;
      if (tb <= t1 || ta >= t2) continue;
      acc += (std::min(tb, t2) - std::max(ta, t1)) * trace.rows[i].v_l2;
    }
    return acc;
  };
  for (int s = 0; s < pair_samples; ++s) {
    const size_t off = (static_cast<size_t>(s) * (ns - 1)) / (2 * pair_samples);
    const size_t i = off;
    const size_t j = ns - 1 - off;
    if (j <= i) continue;
    const OpenCurve ci = make_open_curve(body, trace.snapshots[i].nodes);
    const OpenCurve cj = make_open_curve(body, trace.snapshots[j].nodes);
    const double sym = symmetric_difference_area(region_polygon(ci, body),
                                                 region_polygon(cj, body));
    double lbar = 0;
    for (const TraceRow& r : trace.rows)
      if (r.t >= trace.snapshots[i].t && r.t <= trace.snapshots[j].t)
        lbar = std::max(lbar, r.length);
    const double bound =
        std::sqrt(lbar) * v_integral(trace.snapshots[i].t, trace.snapshots[j].t);
    const double margin = bound - sym + 1e-9 + 1e-6 * bound;
    rep.worst_pair_margin = std::min(rep.worst_pair_margin, margin);
    if (margin < 0) rep.pairs_ok = false;
    ++rep.pairs_checked;
  }
  if (rep.pairs_checked == 0) rep.worst_pair_margin = 0;
  return rep;
}

L2EquivalenceReport l2_equivalence_check(const FlowTrace& trace, double tolerance_rel) {
  L2EquivalenceReport rep;
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const double lhs = std::abs(r.length * r.vtilde_l2 * r.vtilde_l2 - r.v_l2 * r.v_l2);
    const double rhs = 4.0 * r.length * r.kappa_v_l1 * r.kappa_v_l1;
    const double allowed =
        tolerance_rel * (r.v_l2 * r.v_l2 + r.length * r.vtilde_l2 * r.vtilde_l2) + 1e-14;
    const double violation = lhs - rhs;
    rep.max_violation = std::max(rep.max_violation, violation);
    if (violation > allowed) rep.ok = false;
    rep.max_slack = std::max(rep.max_slack, rhs + allowed - lhs);
    ++rep.rows_checked;
  }
  return rep;
}

H1UpgradeReport h1_upgrade_check(const OpenCurve& curve, const CircArc& critical_arc) {
  const int m = curve.segment_count();
  Polyline a = uniform_resample_linear(curve.nodes, m);
  Polyline b = critical_arc.sample(m);
  if ((a.front() - b.front()).norm() > (a.front() - b.back()).norm())
    std::reverse(b.begin(), b.end());
  b = uniform_resample_linear(b, m);

  H1UpgradeReport rep;
  rep.length_term = polyline_length(a) - polyline_length(b);
  for (int j = 0; j < m; ++j) {
    const Vec2 dva = (a[j + 1] - a[j]) * m;
    const Vec2 dvb = (b[j + 1] - b[j]) * m;
    rep.lhs += (dva - dvb).squaredNorm() / m;
  }
  for (int j = 0; j <= m; ++j) {
    const double w = (j == 0 || j == m) ? 0.5 / m : 1.0 / m;
    rep.l2_term += (a[j] - b[j]).squaredNorm() * w;
  }
  rep.constant = rep.lhs / std::max(std::max(rep.length_term, 0.0) + rep.l2_term, 1e-300);
  return rep;
}

OpenCurve perturb_normal_bump(const OpenCurve& curve, const ConvexBody& body, double amplitude,
                              int mode, double restore_area_to) {
  const Polyline& base = curve.nodes;
  Polyline x = base;
  const size_t n = x.size() - 1;
  std::vector<double> cum(x.size(), 0.0);
  for (size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + (base[i] - base[i - 1]).norm();
  const double total = cum.back();
  for (size_t i = 1; i < n; ++i) {
    const double s = cum[i] / total;
    // cubically flat at both endpoints: no endpoint velocity kick
    const double w = std::sin(mode * kPi * s) * std::pow(std::sin(kPi * s), 2);
    const Vec2 nu = rot90((base[i + 1] - base[i - 1]).normalized());
    x[i] += amplitude * w * nu;
  }
  if (restore_area_to != 0.0) {
    if (!renormalize_area(x, body, restore_area_to, 1e-12 * std::abs(restore_area_to)))
      throw NumericalError("bump area restoration failed");
  }
  return make_open_curve(body, std::move(x));
}

OpenCurve arc_to_curve(const ConvexBody& body, const CircArc& arc, int segments) {
  return make_open_curve(body, arc.sample(segments));
}

StepKinematics step_kinematics(const Polyline& before, const Polyline& after, double dt) {
  StepKinematics kin;
  const size_t n = before.size() - 1;
  const std::vector<double> h = edge_lengths(before);
  const std::vector<double> psi = turning_angles(before);
  for (size_t i = 0; i <= n; ++i) {
    const double w_ds = (i == 0) ? 0.5 * h[0] : (i == n ? 0.5 * h[n - 1] : 0.5 * (h[i - 1] + h[i]));
    const Vec2 vel = (after[i] - before[i]) / dt;
    kin.v_l2 += vel.squaredNorm() * w_ds;
    kin.v_l1 += vel.norm() * w_ds;
    if (i >= 1 && i < n) {
      const double kappa = psi[i - 1] / (0.5 * (h[i - 1] + h[i]));
      kin.kappa_v_l1 += std::abs(kappa) * vel.norm() * w_ds;
    }
  }
  kin.v_l2 = std::sqrt(kin.v_l2);
  // the reparametrized velocity compares both curves at the constant-speed
  // parameter, not at node indices
  const Polyline a = uniform_resample_linear(before, static_cast<int>(n));
  const Polyline b = uniform_resample_linear(after, static_cast<int>(n));
  for (size_t i = 0; i <= n; ++i) {
    const double w_unit = (i == 0 || i == n) ? 0.5 / n : 1.0 / n;
    kin.vtilde_l2 += ((b[i] - a[i]) / dt).squaredNorm() * w_unit;
  }
  kin.vtilde_l2 = std::sqrt(kin.vtilde_l2);
  return kin;
}

}  // namespace isoflow
