#include "isoflow/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace isoflow {

namespace {

double circle_gap(const ConvexBody& body, const Vec2& z, double r, double theta) {
  const double h = body.support(theta), h1 = body.support_d1(theta);
  const Vec2 x = h * unit_dir(theta) + h1 * rot90(unit_dir(theta));
  return (x - z).squaredNorm() - r * r;
}

double circle_gap_d1(const ConvexBody& body, const Vec2& z, double r, double theta) {
  (void)r;
  const double h = body.support(theta), h1 = body.support_d1(theta),
               h2 = body.support_d2(theta);
  const Vec2 u = unit_dir(theta), up = rot90(u);
  const Vec2 x = h * u + h1 * up;
  const Vec2 xp = (h + h2) * up;
  return 2.0 * (x - z).dot(xp);
}

double refine_root(const ConvexBody& body, const Vec2& z, double r, double lo, double hi) {
  double glo = circle_gap(body, z, r, lo);
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    const double g = circle_gap(body, z, r, t);
    const double d = circle_gap_d1(body, z, r, t);
    double tn = (d != 0.0) ? t - g / d : t;
    if (!(tn > lo && tn < hi)) {
      // bisection fallback
      if ((g > 0) == (glo > 0)) {
        lo = t;
        glo = g;
      } else {
        hi = t;
      }
      tn = 0.5 * (lo + hi);
    }
    if (std::abs(tn - t) < 1e-15 * (1.0 + std::abs(t))) return tn;
    t = tn;
  }
  return t;
}

std::optional<double> polish_root(const ConvexBody& body, const Vec2& z, double r, double hint) {
  double t = hint;
  for (int it = 0; it < 40; ++it) {
    const double g = circle_gap(body, z, r, t);
    const double d = circle_gap_d1(body, z, r, t);
    if (d == 0.0) return std::nullopt;
    const double step = -g / d;
    t += step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(t))) {
      if (std::abs(circle_gap(body, z, r, t)) < 1e-10 * r * r + 1e-14 * z.squaredNorm())
        return wrap_two_pi(t);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<double> circle_roots(const ConvexBody& body, const Vec2& z, double r,
                                 const double* hints) {
  if (hints) {
    auto r0 = polish_root(body, z, r, hints[0]);
    auto r1 = polish_root(body, z, r, hints[1]);
    if (r0 && r1 && std::abs(wrap_pi(*r0 - *r1)) > 1e-9) return {*r0, *r1};
  }
  auto scan = [&](double lo, double hi, int n) {
    std::vector<double> roots;
    double prev = circle_gap(body, z, r, lo);
    for (int i = 1; i <= n; ++i) {
      const double t = lo + (hi - lo) * i / n;
      const double g = circle_gap(body, z, r, t);
      if ((prev < 0) != (g < 0))
        roots.push_back(wrap_two_pi(refine_root(body, z, r, lo + (hi - lo) * (i - 1) / n, t)));
      prev = g;
    }
    return roots;
  };
  // The intersection window can be far below the full-turn scan resolution on
  // large bodies, so scan a neighborhood of the projection foot first: all
  // roots lie within arclength ~ pi/2 (r + gap) of it.
  double theta_foot = 0.0;
  const double gap = body.support_gap(z, &theta_foot);
  if (gap > 0.0 && gap < r) {
    const double half =
        std::min(kPi, 2.0 * (r + gap) * body.kappa_max() + 8.0 * kTwoPi / 1024.0);
    std::vector<double> roots = scan(theta_foot - half, theta_foot + half, 512);
    if (roots.size() == 2) return roots;
  }
  return scan(0.0, kTwoPi, 2048);
}

double alpha_from(const Vec2& tau_first, const Vec2& tau_second) {
  double a = wrap_pi(angle_of(tau_second) - angle_of(tau_first));
  if (a < 0 && a > -1e-9) a = 0.0;
  if (a < 0) a += kTwoPi;
  return std::min(a, kPi);
}

// Assembles the arc from x(theta1) to x(theta2) traversed with the given
// orientation around z; picks the closing subarc by the winding-zero rule.
CircArc assemble_arc(const ConvexBody& body, const Vec2& z, double r, double theta1,
                     double theta2, bool positive) {
  CircArc arc;
  arc.center = z;
  arc.radius = r;
  arc.theta1 = theta1;
  arc.theta2 = theta2;
  arc.positive = positive;
  arc.x1 = boundary_at(body, theta1).position;
  arc.x2 = boundary_at(body, theta2).position;
  arc.phi1 = angle_of(arc.x1 - z);
  const double phi2 = angle_of(arc.x2 - z);
  arc.sweep = positive ? wrap_two_pi(phi2 - arc.phi1) : -wrap_two_pi(arc.phi1 - phi2);
  arc.length = r * std::abs(arc.sweep);

  const Vec2 tau_sigma1 = boundary_at(body, theta1).tangent;
  const Vec2 tau_sigma2 = boundary_at(body, theta2).tangent;
  arc.alpha1 = alpha_from(arc.tangent_at(0.0), tau_sigma1);
  arc.alpha2 = alpha_from(tau_sigma2, arc.tangent_at(1.0));

  // Winding-zero closing arc, then the exact shoelace of arc + subarc.
  bool sigma_ccw = true;
  bool found = false;
  for (bool ccw : {true, false}) {
    Polyline loop;
    const int m = 48;
    for (int i = 0; i < m; ++i) loop.push_back(arc.point_at(static_cast<double>(i) / m));
    Polyline sub = sample_subarc(body, theta2, theta1, ccw, body.boundary_length() / m);
    loop.push_back(arc.x2);
    loop.insert(loop.end(), sub.begin() + 1, sub.end() - 1);
    loop.push_back(arc.x1);
    if (winding_number(loop, Vec2::Zero()) == 0) {
      sigma_ccw = ccw;
      found = true;
      break;
    }
  }
  if (!found) throw NumericalError("no contractible closing arc for circular arc");
  const SubarcQuantities q = subarc_quantities(body, theta2, theta1, sigma_ccw);
  arc.area = 0.5 * cross2(z, arc.x2 - arc.x1) + 0.5 * r * r * arc.sweep + q.shoelace;
  return arc;
}

double max_boundary_distance(const ConvexBody& body, const Vec2& z) {
  auto f = [&](double t) {
    const Vec2 x = body.support(t) * unit_dir(t) + body.support_d1(t) * rot90(unit_dir(t));
    return (x - z).squaredNorm();
  };
  const int n = 256;
  int besti = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double v = f(kTwoPi * i / n);
    if (v > best) {
      best = v;
      besti = i;
    }
  }
  double lo = kTwoPi * (besti - 1) / n, hi = kTwoPi * (besti + 1) / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 > f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo); f2 = f(x2);
    }
  }
  return std::sqrt(std::max(best, std::max(f1, f2)));
}

}  // namespace

ArcResult arc_outside(const ConvexBody& body, const Vec2& z, double r, bool positive,
                      const double* theta_hints) {
  ArcResult res;
  const std::vector<double> roots = circle_roots(body, z, r, theta_hints);
  if (roots.size() != 2) {
    res.status = ArcStatus::not_in_family;
    return res;
  }
  // Of the two sweeps, exactly one stays outside the body.
  const Vec2 xa = boundary_at(body, roots[0]).position;
  const Vec2 xb = boundary_at(body, roots[1]).position;
  const double pa = angle_of(xa - z), pb = angle_of(xb - z);
  const Vec2 mid_ab = z + r * unit_dir(pa + 0.5 * wrap_two_pi(pb - pa));
  const bool ab_outside = body.support_gap(mid_ab) > 0;
  double t_start = ab_outside ? roots[0] : roots[1];
  double t_end = ab_outside ? roots[1] : roots[0];
  if (!positive) std::swap(t_start, t_end);
  CircArc arc = assemble_arc(body, z, r, t_start, t_end, positive);
  if (std::min(std::abs(std::sin(arc.alpha1)), std::abs(std::sin(arc.alpha2))) < 1e-6) {
    res.status = ArcStatus::transversality_failure;
    res.arc = arc;
    return res;
  }
  for (int i = 1; i < 32; ++i) {
    if (body.support_gap(arc.point_at(i / 32.0)) < -1e-12 * body.width()) {
      res.status = ArcStatus::not_in_family;
      return res;
    }
  }
  res.status = ArcStatus::ok;
  res.arc = arc;
  return res;
}

CircArc arc_outside_or_throw(const ConvexBody& body, const Vec2& z, double r, bool positive) {
  const ArcResult res = arc_outside(body, z, r, positive);
  if (res.status == ArcStatus::not_in_family) throw NumericalError("not in family");
  if (res.status == ArcStatus::transversality_failure)
    throw NumericalError("transversality failure");
  return res.arc;
}

RadiusSolve solve_radius_for_area(const ConvexBody& body, const Vec2& z, double eta,
                                  double r_hint, double rel_tol) {
  RadiusSolve out;
  const double gap = body.support_gap(z);
  if (gap <= 0) {
    out.error = "area unreachable from this center";
    return out;
  }
  const double r_min = gap * (1.0 + 1e-12);
  const double r_max = max_boundary_distance(body, z) * (1.0 - 1e-12);

  double hints[2];
  bool have_hints = false;
  auto eval = [&](double r) -> std::optional<CircArc> {
    const ArcResult res = arc_outside(body, z, r, true, have_hints ? hints : nullptr);
    if (!res.ok()) {
      // a hint gone stale can mask a valid arc; retry with a full scan
      if (have_hints) {
        const ArcResult res2 = arc_outside(body, z, r, true, nullptr);
        if (res2.ok()) {
          hints[0] = res2.arc.theta1;
          hints[1] = res2.arc.theta2;
          return res2.arc;
        }
      }
      return std::nullopt;
    }
    hints[0] = res.arc.theta1;
    hints[1] = res.arc.theta2;
    have_hints = true;
    return res.arc;
  };

  // Bracket eta between valid radii; A(r) increases with r.
  double lo = -1, hi = -1, alo = 0, ahi = 0;
  double r0 = (r_hint > 0) ? r_hint : std::sqrt(2.0 * eta / kPi) + 0.3 * gap;
  r0 = std::clamp(r0, r_min * 1.0000001, r_max * 0.9999999);
  std::optional<CircArc> arc0 = eval(r0);
  for (int probe = 0; !arc0 && probe < 40; ++probe) {
    r0 = r_min + (r0 - r_min) * 0.5;  // slide toward the tangency radius
    arc0 = eval(r0);
  }
  if (!arc0) {
    out.error = "area unreachable from this center";
    return out;
  }
  if (arc0->area < eta) {
    lo = r0; alo = arc0->area;
    double step = std::max(0.5 * (r_max - r0), 0.05 * r0);
    double r = r0;
    while (true) {
      r = std::min(r + step, 0.5 * (r + r_max));
      const std::optional<CircArc> a = eval(r);
      if (a) {
        if (a->area >= eta) { hi = r; ahi = a->area; break; }
        lo = r; alo = a->area;
      } else {
        step *= 0.5;
      }
      if (r_max - r < 1e-13 * r_max || step < 1e-13 * r_max) {
        out.error = "area unreachable from this center";
        return out;
      }
    }
  } else {
    hi = r0; ahi = arc0->area;
    double r = r0;
    while (true) {
      r = 0.5 * (r + r_min);
      const std::optional<CircArc> a = eval(r);
      if (a) {
        if (a->area <= eta) { lo = r; alo = a->area; break; }
        hi = r; ahi = a->area;
      }
      if (r - r_min < 1e-13 * std::max(1.0, r_min)) {
        out.error = "area unreachable from this center";
        return out;
      }
    }
  }
  (void)alo;
  (void)ahi;

  // Safeguarded Newton r <- r - (A - eta)/L inside [lo, hi]. The tolerance is
  // floored at the level where the area evaluation itself rounds off.
  const double tol_abs =
      std::max(rel_tol * std::abs(eta),
               2e-14 * (1.0 + std::abs(z.x()) + std::abs(z.y()) + hi));
  CircArc arc = *eval(0.5 * (lo + hi));
  for (int it = 0; it < 100; ++it) {
    if (std::abs(arc.area - eta) <= tol_abs) {
      out.ok = true;
      out.arc = arc;
      return out;
    }
    double r_next = arc.radius - (arc.area - eta) / arc.length;
    if (!(r_next > lo && r_next < hi)) r_next = 0.5 * (lo + hi);
    const std::optional<CircArc> a = eval(r_next);
    if (!a) {
      r_next = 0.5 * (lo + hi);
      arc = *eval(r_next);
    } else {
      arc = *a;
    }
    if (arc.area > eta) hi = arc.radius; else lo = arc.radius;
    if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
  }
  if (std::abs(arc.area - eta) <= std::max(10.0 * tol_abs, 1e-9 * std::abs(eta))) {
    out.ok = true;
    out.arc = arc;
    return out;
  }
  out.error = "radius iteration stalled";
  return out;
}

double L_eta(const ConvexBody& body, const Vec2& z, double eta) {
  const RadiusSolve s = solve_radius_for_area(body, z, eta);
  if (!s.ok) throw NumericalError(s.error);
  return s.arc.length;
}

namespace {

Vec2 grad_from_arc(const CircArc& arc) {
  const Vec2 chord_term = rot90(arc.x2 - arc.x1) / arc.length;
  const Vec2 y1 = arc.inner_normal_at(0.0) - chord_term;
  const Vec2 y2 = arc.inner_normal_at(1.0) - chord_term;
  return -(y1 / std::tan(arc.alpha1) + y2 / std::tan(arc.alpha2));
}

}  // namespace

Vec2 grad_L_eta(const ConvexBody& body, const Vec2& z, double eta) {
  const RadiusSolve s = solve_radius_for_area(body, z, eta);
  if (!s.ok) throw NumericalError(s.error);
  return grad_from_arc(s.arc);
}

namespace {

Mat2 fd_grad_jacobian(const ConvexBody& body, const Vec2& z, double eta, double h,
                      double r_hint) {
  Mat2 m;
  for (int i = 0; i < 2; ++i) {
    Vec2 dzp = z, dzm = z;
    dzp[i] += h;
    dzm[i] -= h;
    const RadiusSolve sp = solve_radius_for_area(body, dzp, eta, r_hint);
    const RadiusSolve sm = solve_radius_for_area(body, dzm, eta, r_hint);
    if (!sp.ok || !sm.ok) throw NumericalError("hessian stencil left the arc family");
    const Vec2 col = (grad_from_arc(sp.arc) - grad_from_arc(sm.arc)) / (2.0 * h);
    m(0, i) = col.x();
    m(1, i) = col.y();
  }
  return m;
}

}  // namespace

Spectrum hessian_L_eta(const ConvexBody& body, const Vec2& z, double eta) {
  const RadiusSolve s0 = solve_radius_for_area(body, z, eta);
  if (!s0.ok) throw NumericalError(s0.error);
  const double scale = s0.arc.radius;

  // stencil must stay outside the body: centers of small arcs sit very close
  double h = std::min(1e-3 * scale, 0.2 * body.support_gap(z));
  Mat2 mh = fd_grad_jacobian(body, z, eta, h, s0.arc.radius);
  Mat2 best = mh;
  for (int it = 0; it < 6; ++it) {
    const Mat2 mh2 = fd_grad_jacobian(body, z, eta, 0.5 * h, s0.arc.radius);
    const Mat2 extrap = (4.0 * mh2 - mh) / 3.0;
    const double err = (mh2 - mh).norm() / 3.0;
    best = extrap;
    if (err <= 1e-5 * std::max(extrap.norm(), 1e-12)) break;
    h *= 0.5;
    mh = mh2;
  }

  Spectrum sp;
  sp.fd_step = h;
  sp.asymmetry = std::abs(best(0, 1) - best(1, 0));
  sp.hessian = 0.5 * (best + best.transpose());
  Eigen::SelfAdjointEigenSolver<Mat2> es(sp.hessian);
  sp.lambda1 = es.eigenvalues()(0);
  sp.lambda2 = es.eigenvalues()(1);
  const double lmax = std::max(std::abs(sp.lambda1), std::abs(sp.lambda2));
  sp.degenerate = std::min(std::abs(sp.lambda1), std::abs(sp.lambda2)) < 1e-4 * lmax;
  return sp;
}

namespace {

double eps_alpha_of(const CircArc& arc) {
  return std::abs(arc.alpha1 - 0.5 * kPi) + std::abs(arc.alpha2 - 0.5 * kPi);
}

}  // namespace

CriticalSet find_critical(const ConvexBody& body, double eta, int angular_seeds,
                          int radial_seeds) {
  const double r_scale = std::sqrt(2.0 * eta / kPi);
  const bool circle = body.is_circle();
  std::vector<Vec2> seeds;
  const int n_ang = circle ? 1 : angular_seeds;
  for (int ia = 0; ia < n_ang; ++ia) {
    const double th = kTwoPi * ia / n_ang;
    const BoundaryPoint bp = boundary_at(body, th);
    for (int ir = 0; ir < radial_seeds; ++ir) {
      const double d = r_scale * (0.25 + 1.5 * ir / std::max(1, radial_seeds - 1));
      seeds.push_back(bp.position - d * bp.inner_normal);
    }
  }
  return find_critical_from(body, eta, seeds);
}

CriticalSet find_critical_from(const ConvexBody& body, double eta,
                               const std::vector<Vec2>& seeds) {
  const bool circle = body.is_circle();
  std::vector<CircArc> found;
  for (const Vec2& seed : seeds) {
    Vec2 zc = seed;
    double mu = 0.0;
    RadiusSolve s = solve_radius_for_area(body, zc, eta);
    if (!s.ok) continue;
    bool converged = false;
    int weak_steps = 0;
    for (int it = 0; it < 40; ++it) {
      if (eps_alpha_of(s.arc) < 1e-11) {
        converged = true;
        break;
      }
      const Vec2 g = grad_from_arc(s.arc);
      Mat2 hess;
      try {
        const double step =
            std::min(1e-4 * s.arc.radius, 0.2 * body.support_gap(zc));
        hess = fd_grad_jacobian(body, zc, eta, step, s.arc.radius);
      } catch (const NumericalError&) {
        break;
      }
      hess = 0.5 * (hess + hess.transpose());
      bool accepted = false;
      double g_new = g.norm();
      for (int inner = 0; inner < 4; ++inner) {
        const Mat2 damped = hess + mu * Mat2::Identity();
        const Vec2 dz = damped.fullPivLu().solve(-g);
        if (!dz.allFinite()) {
          mu = std::max(4.0 * mu, 1e-6 * hess.norm() + 1e-12);
          continue;
        }
        const Vec2 z_try = zc + dz;
        const RadiusSolve s_try = solve_radius_for_area(body, z_try, eta, s.arc.radius);
        if (s_try.ok && (grad_from_arc(s_try.arc).norm() < g.norm() ||
                         eps_alpha_of(s_try.arc) < 1e-11)) {
          zc = z_try;
          s = s_try;
          g_new = grad_from_arc(s_try.arc).norm();
          mu *= 0.25;
          accepted = true;
          break;
        }
        mu = std::max(4.0 * mu, 1e-6 * hess.norm() + 1e-12);
      }
      if (!accepted) break;
      weak_steps = (g_new > 0.7 * g.norm()) ? weak_steps + 1 : 0;
      if (weak_steps >= 3) break;  // stagnating seed
    }
    if (!converged) continue;
    CircArc arc = s.arc;
    if (circle) {
      // collapse the rotation orbit: move the center to the positive x-axis
      const double d = arc.center.norm();
      const RadiusSolve sc = solve_radius_for_area(body, Vec2(d, 0.0), eta, arc.radius);
      if (sc.ok) arc = sc.arc;
    }
    bool duplicate = false;
    for (const CircArc& other : found)
      if ((other.center - arc.center).norm() < 1e-6 * body.width()) duplicate = true;
    if (!duplicate) found.push_back(arc);
  }
  if (found.empty()) throw NumericalError("no critical point found");

  CriticalSet set;
  set.rotation_orbit = circle;
  // ties in length are broken by center lexicographic order
  std::sort(found.begin(), found.end(), [](const CircArc& a, const CircArc& b) {
    return std::make_tuple(a.length, a.center.x(), a.center.y()) <
           std::make_tuple(b.length, b.center.x(), b.center.y());
  });
  for (const CircArc& arc : found) {
    CriticalPoint cp;
    cp.arc = arc;
    cp.spectrum = hessian_L_eta(body, arc.center, eta);
    set.points.push_back(cp);
    const double len = arc.length;
    bool new_level = true;
    for (double l : set.levels)
      if (std::abs(l - len) < 1e-7 * (1.0 + std::abs(l))) new_level = false;
    if (new_level) set.levels.push_back(len);
  }
  std::sort(set.levels.begin(), set.levels.end());
  set.ell0 = set.levels.front();
  return set;
}

CompanionArc companion_arc(const OpenCurve& curve, const ConvexBody& body) {
  const CurveReport rep = report(curve, body);
  if (std::abs(rep.mean_curvature) < 1e-12)
    throw NumericalError("companion arc undefined: vanishing mean curvature");
  const double rbar = 1.0 / std::abs(rep.mean_curvature);
  const double sgn = rep.mean_curvature > 0 ? 1.0 : -1.0;
  const Vec2 start = curve.start_bp.position;
  const Vec2 tau = endpoint_tangent(curve.nodes, true);
  const Vec2 center = start + sgn * rbar * rot90(tau);

  const std::vector<double> roots = circle_roots(body, center, rbar, nullptr);
  if (roots.size() < 2) throw NumericalError("companion arc does not return to Sigma");
  const double phi_start = angle_of(start - center);
  double best_s = std::numeric_limits<double>::max();
  double best_theta = 0.0;
  for (double th : roots) {
    const double phi = angle_of(boundary_at(body, th).position - center);
    const double s = rbar * wrap_two_pi(sgn * (phi - phi_start));
    if (s > 1e-6 * rbar && s < best_s) {
      best_s = s;
      best_theta = th;
    }
  }
  if (best_s == std::numeric_limits<double>::max())
    throw NumericalError("companion arc does not return to Sigma");

  CompanionArc out;
  out.arc = assemble_arc(body, center, rbar, curve.start_bp.theta, best_theta, sgn > 0);
  out.c1_dist = c1_distance_polylines(curve.nodes, out.arc.sample(curve.segment_count()));
  return out;
}

CircArc corrected_arc(const OpenCurve& curve, const ConvexBody& body, double eta) {
  const CompanionArc comp = companion_arc(curve, body);
  const RadiusSolve s =
      solve_radius_for_area(body, comp.arc.center, std::abs(eta), comp.arc.radius);
  if (!s.ok) throw NumericalError(s.error);
  if (comp.arc.positive) return s.arc;
  return assemble_arc(body, s.arc.center, s.arc.radius, s.arc.theta2, s.arc.theta1, false);
}

VariationCheck variation_check(const ConvexBody& body, const ArcFamily& family, double fd_step) {
  const ArcParams p0 = family(0.0);
  const CircArc arc = arc_outside_or_throw(body, p0.z, p0.r, true);

  // family derivative by Richardson-extrapolated central differences
  auto d_params = [&](double h) {
    const ArcParams pp = family(h), pm = family(-h);
    return std::make_pair((pp.r - pm.r) / (2 * h), Vec2((pp.z - pm.z) / (2 * h)));
  };
  const auto [dr_a, dz_a] = d_params(1e-4);
  const auto [dr_b, dz_b] = d_params(5e-5);
  const double dr = (4.0 * dr_b - dr_a) / 3.0;
  const Vec2 dz = (4.0 * dz_b - dz_a) / 3.0;

  const double eps = fd_step;
  double hints[2] = {arc.theta1, arc.theta2};
  const ArcParams pp = family(eps), pm = family(-eps);
  const ArcResult rp = arc_outside(body, pp.z, pp.r, true, hints);
  const ArcResult rm = arc_outside(body, pm.z, pm.r, true, hints);
  if (!rp.ok() || !rm.ok()) throw NumericalError("variation family left the arc class");

  const double dA_fd = (rp.arc.area - rm.arc.area) / (2 * eps);
  const double dL_fd = (rp.arc.length - rm.arc.length) / (2 * eps);
  const Vec2 dx1_fd = (rp.arc.x1 - rm.arc.x1) / (2 * eps);
  const Vec2 dx2_fd = (rp.arc.x2 - rm.arc.x2) / (2 * eps);

  const double dA = dr * arc.length + dz.dot(-rot90(arc.x2 - arc.x1));
  const double mu1 = (-dr + arc.inner_normal_at(0.0).dot(dz)) / std::sin(arc.alpha1);
  const double mu2 = (-dr + arc.inner_normal_at(1.0).dot(dz)) / std::sin(arc.alpha2);
  const Vec2 dx1 = mu1 * boundary_at(body, arc.theta1).tangent;
  const Vec2 dx2 = -mu2 * boundary_at(body, arc.theta2).tangent;
  const double kappa = (arc.positive ? 1.0 : -1.0) / arc.radius;
  const double dL = -mu1 * std::cos(arc.alpha1) - mu2 * std::cos(arc.alpha2) + kappa * dA;

  const double scale = arc.radius + dz.norm() + std::abs(dr);
  auto rel = [&](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9 * scale});
  };
  VariationCheck out;
  out.rel_err_area = rel(dA, dA_fd);
  out.rel_err_endpoint = std::max((dx1 - dx1_fd).norm(), (dx2 - dx2_fd).norm()) /
                         std::max({dx1.norm(), dx2.norm(), 1e-9 * scale});
  out.rel_err_length = rel(dL, dL_fd);
  return out;
}

}  // namespace isoflow
