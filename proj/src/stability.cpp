#include "isoflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "isoflow/parallel.hpp"

namespace isoflow {

namespace {

double default_on_tol(const ConvexBody& body) { return 1e-6 * body.width(); }

bool edge_on_sigma(const ConvexBody& body, const Vec2& a, const Vec2& b, double tol) {
  if (std::abs(body.support_gap(a)) > tol) return false;
  if (std::abs(body.support_gap(b)) > tol) return false;
  return std::abs(body.support_gap(0.5 * (a + b))) <= tol;
}

}  // namespace

double region_area(const RelativeRegion& region, const ConvexBody& body) {
  const Vec2 c = region.arc.front();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < region.arc.size(); ++i)
    acc += 0.5 * cross2(region.arc[i] - c, region.arc[i + 1] - c);
  const Vec2 sig_from = boundary_at(body, region.theta_end).position;
  const Vec2 sig_to = boundary_at(body, region.theta_start).position;
  const SubarcQuantities q =
      subarc_quantities(body, region.theta_end, region.theta_start, region.sigma_ccw);
  acc += 0.5 * cross2(region.arc.back() - c, sig_from - c);
  acc += q.shoelace - 0.5 * cross2(c, sig_to - sig_from);
  acc += 0.5 * cross2(sig_to - c, region.arc.front() - c);
  return acc;
}

double region_rel_perimeter(const RelativeRegion& region) { return polyline_length(region.arc); }

Polygon region_to_polygon(const RelativeRegion& region, const ConvexBody& body,
                          double max_edge) {
  if (max_edge <= 0)
    max_edge = polyline_length(region.arc) / std::max<size_t>(region.arc.size(), 2);
  Polygon poly = region.arc;
  Polyline sub =
      sample_subarc(body, region.theta_end, region.theta_start, region.sigma_ccw, max_edge);
  poly.insert(poly.end(), sub.begin() + 1, sub.end() - 1);
  return poly;
}

double set_area(const PolygonSet& set) { return signed_set_area(set.polys); }

double relative_perimeter(const PolygonSet& set, const ConvexBody& body, double on_tol) {
  if (on_tol <= 0) on_tol = default_on_tol(body);
  double acc = 0;
  for (const SignedPolygon& poly : set.polys) {
    const size_t n = poly.vertices.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& a = poly.vertices[i];
      const Vec2& b = poly.vertices[(i + 1) % n];
      if (!edge_on_sigma(body, a, b, on_tol)) acc += (b - a).norm();
    }
  }
  return acc;
}

double deficit(const PolygonSet& region, const ConvexBody& body, double eta_ref, double ell0) {
  const double area = set_area(region);
  if (std::abs(area - eta_ref) > 1e-6 * std::abs(eta_ref))
    throw NumericalError("deficit: region area does not match the reference");
  return relative_perimeter(region, body) - ell0;
}

SelectResult select_component_fill_holes(const PolygonSet& e, const ConvexBody& body) {
  if (e.polys.empty()) throw ConfigError("empty polygon set");
  SelectResult out;
  out.set.target_area = e.target_area;

  struct Component {
    const SignedPolygon* outer;
    std::vector<const SignedPolygon*> holes;
    double net = 0;
  };
  std::vector<Component> comps;
  for (const auto& p : e.polys)
    if (p.sign > 0) comps.push_back({&p, {}, std::abs(polygon_area(p.vertices))});
  if (comps.empty()) throw ConfigError("polygon set has no outer component");
  for (const auto& p : e.polys) {
    if (p.sign > 0) continue;
    bool placed = false;
    for (auto& c : comps) {
      if (point_in_polygon(c.outer->vertices, p.vertices.front())) {
        c.holes.push_back(&p);
        c.net -= std::abs(polygon_area(p.vertices));
        placed = true;
        break;
      }
    }
    if (!placed) throw ConfigError("hole not contained in any outer component");
  }
  size_t best = 0;
  for (size_t i = 1; i < comps.size(); ++i)
    if (comps[i].net > comps[best].net) best = i;

  for (size_t i = 0; i < comps.size(); ++i) {
    if (i == best) {
      for (const auto* h : comps[i].holes)
        out.filled_area += std::abs(polygon_area(h->vertices));
    } else {
      out.dropped_area += comps[i].net;
    }
  }
  SignedPolygon kept = *comps[best].outer;
  if (polygon_area(kept.vertices) < 0)
    std::reverse(kept.vertices.begin(), kept.vertices.end());
  kept.sign = +1;
  const double kept_area = polygon_area(kept.vertices);
  out.set.polys.push_back(std::move(kept));

  const double shortfall = e.target_area - kept_area;
  if (shortfall > 1e-12 * std::abs(e.target_area)) {
    // far ball of the missing area, tangent to the component on its outer side
    const Polygon& main = out.set.polys[0].vertices;
    size_t far_idx = 0;
    double far_gap = -1;
    for (size_t i = 0; i < main.size(); ++i) {
      const double g = body.support_gap(main[i]);
      if (g > far_gap) {
        far_gap = g;
        far_idx = i;
      }
    }
    const Vec2 anchor = main[far_idx];
    const Vec2 dir = (anchor - project_to_boundary(body, anchor).position).normalized();
    const int m = 128;
    const double r = std::sqrt(2.0 * shortfall / (m * std::sin(kTwoPi / m)));
    SignedPolygon ball;
    ball.sign = +1;
    const Vec2 center = anchor + (r + 1e-9 * body.width()) * dir;
    for (int i = 0; i < m; ++i) ball.vertices.push_back(center + r * unit_dir(kTwoPi * i / m));
    out.ball_area = shortfall;
    out.ball_perimeter = m * 2.0 * r * std::sin(kPi / m);
    out.set.polys.push_back(std::move(ball));
  }
  return out;
}

namespace {

struct TailInfo {
  double hausdorff2 = 0;
  double length_drop = 0;
};

TailInfo tail_chord_info(const Polyline& tail) {
  TailInfo info;
  if (tail.size() < 2) return info;
  const Vec2 a = tail.front(), b = tail.back();
  double h = 0;
  for (const Vec2& p : tail) h = std::max(h, point_segment_distance(p, a, b));
  info.hausdorff2 = h * h;
  info.length_drop = polyline_length(tail) - (b - a).norm();
  return info;
}

// Last (sup = true) or first crossing parameter of a chain with the outward
// normal ray at theta; parameters count fractional segment indices.
std::optional<std::pair<double, Vec2>> ray_chain_crossing(const ConvexBody& body,
                                                          const Polyline& chain, double theta,
                                                          bool sup) {
  const Vec2 origin = boundary_at(body, theta).position;
  const Vec2 dir = unit_dir(theta);  // outward normal
  const double reach = 10.0 * (body.width() + polyline_length(chain));
  const Vec2 tip = origin + reach * dir;
  std::optional<std::pair<double, Vec2>> hit;
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    const auto t = segment_intersection_param(chain[i], chain[i + 1], origin, tip);
    if (!t) continue;
    const double param = static_cast<double>(i) + *t;
    const Vec2 point = chain[i] + *t * (chain[i + 1] - chain[i]);
    if (!hit || (sup ? param > hit->first : param < hit->first)) hit = {{param, point}};
  }
  return hit;
}

Polyline chain_slice(const Polyline& chain, double from_param, double to_param) {
  Polyline out;
  const auto at = [&](double p) {
    const size_t i = std::min(static_cast<size_t>(p), chain.size() - 2);
    return Vec2(chain[i] + (p - static_cast<double>(i)) * (chain[i + 1] - chain[i]));
  };
  out.push_back(at(from_param));
  for (size_t i = static_cast<size_t>(std::ceil(from_param)); i < chain.size(); ++i) {
    if (static_cast<double>(i) >= to_param) break;
    if ((out.back() - chain[i]).norm() > 0) out.push_back(chain[i]);
  }
  const Vec2 last = at(to_param);
  if ((out.back() - last).norm() > 0) out.push_back(last);
  return out;
}

}  // namespace

ClipHullResult clip_and_hull(const PolygonSet& f1, const ConvexBody& body) {
  ClipHullResult out;
  out.rel_perimeter_in = relative_perimeter(f1, body);
  const double on_tol = default_on_tol(body);

  // main component and its off-Sigma chain
  size_t main_idx = 0;
  double main_area = -1;
  for (size_t i = 0; i < f1.polys.size(); ++i) {
    if (f1.polys[i].sign < 0) continue;
    const double a = std::abs(polygon_area(f1.polys[i].vertices));
    if (a > main_area) {
      main_area = a;
      main_idx = i;
    }
  }
  Polygon main = f1.polys[main_idx].vertices;
  if (polygon_area(main) < 0) std::reverse(main.begin(), main.end());
  const size_t n = main.size();
  std::vector<bool> on_sigma(n);
  size_t on_count = 0;
  for (size_t i = 0; i < n; ++i) {
    on_sigma[i] = std::abs(body.support_gap(main[i])) <= on_tol;
    if (on_sigma[i]) ++on_count;
  }
  if (on_count == 0) throw NumericalError("no boundary contact");
  if (on_count == n) throw NumericalError("region has no off-boundary part");

  // longest cyclic run of on-Sigma vertices; gamma is its complement
  size_t best_start = 0, best_len = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!on_sigma[i] || on_sigma[(i + n - 1) % n]) continue;
    size_t len = 0;
    while (on_sigma[(i + len) % n] && len < n) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = i;
    }
  }
  Polyline gamma;
  const size_t gamma_start = (best_start + best_len - 1) % n;  // last on-Sigma vertex
  for (size_t k = 0; k <= n - best_len + 1; ++k) gamma.push_back(main[(gamma_start + k) % n]);

  // normal-ray interval: projections of the chain, unwrapped about the front
  const double theta_ref = project_to_boundary(body, gamma.front()).theta;
  double dmin = 0, dmax = 0;
  for (const Vec2& p : gamma) {
    double th;
    body.support_gap(p, &th);
    const double d = wrap_pi(th - theta_ref);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax - dmin > kPi) throw NumericalError("normal interval exceeds a half turn");
  const double j0 = theta_ref + dmin, j1 = theta_ref + dmax;

  // tails: between the extreme normal rays and the chain
  const double theta_front = theta_ref;
  const bool front_is_j0 = std::abs(wrap_pi(theta_front - j0)) < std::abs(wrap_pi(theta_front - j1));
  const double j_front = front_is_j0 ? j0 : j1;
  const double j_back = front_is_j0 ? j1 : j0;

  const auto front_hit = ray_chain_crossing(body, gamma, j_front, true);
  const auto back_hit = ray_chain_crossing(body, gamma, j_back, false);
  const Vec2 x_front = boundary_at(body, j_front).position;
  const Vec2 x_back = boundary_at(body, j_back).position;

  double p_from = 0, p_to = static_cast<double>(gamma.size() - 1);
  if (front_hit) p_from = front_hit->first;
  if (back_hit) p_to = std::max(back_hit->first, p_from);
  const Polyline tail_front = chain_slice(gamma, 0, p_from);
  const Polyline tail_back = chain_slice(gamma, p_to, static_cast<double>(gamma.size() - 1));
  const Polyline mid = chain_slice(gamma, p_from, p_to);

  double lbar = polyline_length(gamma) + 1e-300;
  for (const Polyline& tail : {tail_front, tail_back}) {
    const TailInfo info = tail_chord_info(tail);
    if (info.length_drop > 1e-14 * lbar)
      out.tail_chord_worst = std::max(out.tail_chord_worst,
                                      info.hausdorff2 / (lbar * info.length_drop));
  }

  // hull of the clipped chain (plus any secondary components, e.g. a far ball)
  std::vector<Vec2> pts;
  pts.push_back(x_front);
  pts.insert(pts.end(), mid.begin(), mid.end());
  pts.push_back(x_back);
  for (size_t i = 0; i < f1.polys.size(); ++i)
    if (i != main_idx)
      pts.insert(pts.end(), f1.polys[i].vertices.begin(), f1.polys[i].vertices.end());
  Polygon hull = convex_hull(pts);

  // split the hull at the two contact points; keep the path outside the body
  auto locate = [&](const Vec2& p) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::max();
    for (size_t i = 0; i < hull.size(); ++i) {
      const double d = (hull[i] - p).norm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (bd > 1e-7 * body.width()) throw NumericalError("contact point lost by the hull");
    return best;
  };
  const size_t ia = locate(x_front), ib = locate(x_back);
  auto path_of = [&](size_t from, size_t to) {
    Polyline path;
    for (size_t k = from;; k = (k + 1) % hull.size()) {
      path.push_back(hull[k]);
      if (k == to) break;
    }
    return path;
  };
  Polyline path1 = path_of(ia, ib), path2 = path_of(ib, ia);
  std::reverse(path2.begin(), path2.end());
  auto mid_gap = [&](const Polyline& path) {
    double g = std::numeric_limits<double>::max();
    for (size_t i = 0; i + 1 < path.size(); ++i)
      g = std::min(g, body.support_gap(0.5 * (path[i] + path[i + 1])));
    return g;
  };
  Polyline rel = (mid_gap(path1) >= mid_gap(path2)) ? path1 : path2;

  RelativeRegion region;
  region.arc = rel;
  region.theta_start = project_to_boundary(body, rel.front()).theta;
  region.theta_end = project_to_boundary(body, rel.back()).theta;
  region.sigma_ccw = contractible_subarc_ccw(body, rel, region.theta_end, region.theta_start);
  if (region_area(region, body) < 0) {
    std::reverse(region.arc.begin(), region.arc.end());
    std::swap(region.theta_start, region.theta_end);
    region.sigma_ccw =
        contractible_subarc_ccw(body, region.arc, region.theta_end, region.theta_start);
  }
  out.region = region;
  out.rel_perimeter_out = region_rel_perimeter(region);

  const Vec2 tau_s = boundary_at(body, region.theta_start).tangent;
  const Vec2 tau_e = boundary_at(body, region.theta_end).tangent;
  const Vec2 d_first = (region.arc[1] - region.arc[0]).normalized();
  const Vec2 d_last =
      (region.arc[region.arc.size() - 1] - region.arc[region.arc.size() - 2]).normalized();
  auto contact = [](const Vec2& tfirst, const Vec2& tsecond) {
    double a = wrap_pi(angle_of(tsecond) - angle_of(tfirst));
    if (a < 0 && a > -1e-9) a = 0;
    if (a < 0) a += kTwoPi;
    return std::min(a, kPi);
  };
  out.contact_angle1 = contact(d_first, tau_s);
  out.contact_angle2 = contact(tau_e, d_last);
  return out;
}

AreaCorrectResult area_correct_down(const RelativeRegion& f, const ConvexBody& body,
                                    double eta) {
  AreaCorrectResult out;
  const double a0 = region_area(f, body);
  if (a0 <= eta * (1.0 + 1e-12)) {
    out.region = f;
    out.rel_perimeter_out = region_rel_perimeter(f);
    return out;
  }
  // Sigma span of the region, from theta_start moving into the region.
  const double span = f.sigma_ccw ? -wrap_two_pi(f.theta_start - f.theta_end)
                                  : wrap_two_pi(f.theta_end - f.theta_start);
  // cut parameter u in [0,1]: j = theta_start + u * span moves the start foot
  auto cut_region = [&](double u) -> RelativeRegion {
    if (u <= 0) return f;
    const double j = f.theta_start + u * span;
    const auto hit = ray_chain_crossing(body, f.arc, j, true);
    RelativeRegion g = f;
    if (!hit) return f;
    Polyline arc;
    arc.push_back(boundary_at(body, j).position);
    Polyline rest = chain_slice(f.arc, hit->first, static_cast<double>(f.arc.size() - 1));
    arc.insert(arc.end(), rest.begin(), rest.end());
    g.arc = std::move(arc);
    g.theta_start = wrap_two_pi(j);
    return g;
  };
  double lo = 0, hi = 1;
  RelativeRegion cut = f;
  for (int it = 0; it < 200; ++it) {
    const double u = 0.5 * (lo + hi);
    cut = cut_region(u);
    const double a = region_area(cut, body);
    if (std::abs(a - eta) <= 1e-10 * std::abs(eta)) break;
    if (a > eta) lo = u; else hi = u;
  }
  out.region = cut;
  out.removed_area = a0 - region_area(cut, body);
  out.rel_perimeter_out = region_rel_perimeter(cut);
  out.hausdorff_to_input = hausdorff_distance(f.arc, cut.arc, 1e-4 * polyline_length(f.arc));
  if (out.rel_perimeter_out > region_rel_perimeter(f) * (1.0 + 1e-9))
    throw NumericalError("area correction increased the relative perimeter");
  return out;
}

MollifyResult mollify(const RelativeRegion& f2, const ConvexBody& body, double eta, int nodes) {
  MollifyResult out;
  const double rel_in = region_rel_perimeter(f2);

  // step 1: polygonal resample with feet projected onto Sigma
  Polyline base;
  {
    std::vector<double> cum(f2.arc.size(), 0.0);
    for (size_t i = 1; i < f2.arc.size(); ++i)
      cum[i] = cum[i - 1] + (f2.arc[i] - f2.arc[i - 1]).norm();
    base.resize(nodes + 1);
    size_t seg = 0;
    for (int k = 0; k <= nodes; ++k) {
      const double s = cum.back() * k / nodes;
      while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
      const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
      base[k] = f2.arc[seg] + t * (f2.arc[seg + 1] - f2.arc[seg]);
    }
    base.front() = attach_endpoint(body, base, true).position;
    base.back() = attach_endpoint(body, base, false).position;
  }

  // step 2: cubic Bezier corner smoothing; both control points at the corner
  // give matching tangents and zero curvature at the patch ends
  const std::vector<double> edges = edge_lengths(base);
  const double s_cut = 0.25 * *std::min_element(edges.begin(), edges.end());
  Polyline smooth;
  smooth.push_back(base.front());
  const int bez_samples = 8;
  for (size_t j = 1; j + 1 < base.size(); ++j) {
    const Vec2 din = (base[j] - base[j - 1]).normalized();
    const Vec2 dout = (base[j + 1] - base[j]).normalized();
    const Vec2 a = base[j] - s_cut * din;
    const Vec2 d = base[j] + s_cut * dout;
    smooth.push_back(a);
    for (int q = 1; q < bez_samples; ++q) {
      const double t = static_cast<double>(q) / bez_samples;
      const double w0 = (1 - t) * (1 - t) * (1 - t);
      const double w1 = 3 * t * (1 - t) * (1 - t) + 3 * t * t * (1 - t);
      const double w3 = t * t * t;
      smooth.push_back(w0 * a + w1 * base[j] + w3 * d);
    }
    smooth.push_back(d);
    // construction diagnostics: the patch-end curvature is
    // (2/3) cross(P1-P0, P2-P1)/|P1-P0|^3 and P1 = P2 = corner
    const Vec2 p01 = base[j] - a, p23 = d - base[j];
    const Vec2 p12 = Vec2::Zero();
    out.corner_kappa_max =
        std::max(out.corner_kappa_max,
                 std::abs(2.0 / 3.0 * cross2(p01, p12) / std::pow(p01.norm(), 3)));
    out.corner_tangent_gap =
        std::max(out.corner_tangent_gap,
                 std::max(std::abs(wrap_pi(angle_of(p01) - angle_of(din))),
                          std::abs(wrap_pi(angle_of(p23) - angle_of(dout)))));
  }
  smooth.push_back(base.back());

  // step 3: outward normal offset restoring the area to eta
  auto build = [&](double rho) -> OpenCurve {
    Polyline x = smooth;
    const size_t m = x.size() - 1;
    for (size_t i = 1; i < m; ++i) {
      const Vec2 nu_out = -rot90((smooth[i + 1] - smooth[i - 1]).normalized());
      x[i] = smooth[i] + rho * nu_out;
    }
    x.front() = attach_endpoint(body, x, true).position;
    x.back() = attach_endpoint(body, x, false).position;
    return make_open_curve(body, std::move(x));
  };
  double kappa_cap = 0;
  {
    const std::vector<double> psi = turning_angles(smooth);
    const std::vector<double> he = edge_lengths(smooth);
    for (size_t i = 0; i < psi.size(); ++i)
      kappa_cap = std::max(kappa_cap, std::abs(psi[i]) / (0.5 * (he[i] + he[i + 1])));
  }
  const double rho_bar = 0.45 / std::max(kappa_cap, 1e-12);

  double rho = 0;
  OpenCurve curve = build(0.0);
  for (int it = 0; it < 60; ++it) {
    const double area = enclosed_area(curve, body);
    if (std::abs(area - eta) <= 1e-10 * std::abs(eta)) break;
    const double length = polyline_length(curve.nodes);
    rho += (eta - area) / length;
    if (rho > rho_bar || rho < -rho_bar)
      throw NumericalError("mollify: offset exceeds the safe bound");
    curve = build(rho);
  }
  if (std::abs(enclosed_area(curve, body) - eta) > 1e-10 * std::abs(eta))
    throw NumericalError("mollify: area iteration stalled");

  out.curve = std::move(curve);
  out.rho = rho;
  out.perimeter_change = polyline_length(out.curve.nodes) - rel_in;
  out.hausdorff_to_input =
      hausdorff_distance(f2.arc, out.curve.nodes, 1e-4 * std::max(rel_in, 1e-12));
  return out;
}

ReduceResult reduce(const PolygonSet& e, const ConvexBody& body, double eta,
                    const CriticalSet& critical, int mollify_nodes) {
  ReduceResult out;
  ReductionReport& rep = out.report;
  rep.deficit_in = deficit(e, body, eta, critical.ell0);
  rep.delta1 = (critical.levels.size() >= 2)
                   ? critical.levels[1] - critical.levels[0]
                   : smallness_margin(body, eta, critical.ell0);
  rep.trivial_regime = rep.deficit_in > rep.delta1;

  const SelectResult sel = select_component_fill_holes(e, body);
  rep.stages.push_back(
      {"select", relative_perimeter(sel.set, body), set_area(sel.set)});

  const ClipHullResult ch = clip_and_hull(sel.set, body);
  rep.tail_chord_worst = ch.tail_chord_worst;
  rep.stages.push_back({"clip_hull", ch.rel_perimeter_out, region_area(ch.region, body)});

  RelativeRegion region = ch.region;
  if (region_area(region, body) > eta * (1.0 + 1e-12)) {
    const AreaCorrectResult ac = area_correct_down(region, body, eta);
    region = ac.region;
    rep.stages.push_back({"area_correct", ac.rel_perimeter_out, region_area(region, body)});
  }

  const MollifyResult mol = mollify(region, body, eta, mollify_nodes);
  rep.mollify_perimeter_increase = std::max(mol.perimeter_change, 0.0);
  out.curve = mol.curve;
  const CurveReport crep = report(out.curve, body);
  rep.stages.push_back({"mollify", crep.length, crep.area});
  rep.area_out = crep.area;
  rep.deficit_out = crep.length - critical.ell0;
  rep.contact_angle1 = crep.alpha1;
  rep.contact_angle2 = crep.alpha2;

  std::vector<SignedPolygon> f_set = {{region_polygon(out.curve, body), +1}};
  rep.sym_diff = symmetric_difference_area(e.polys, f_set);
  rep.hausdorff = hausdorff_multi(boundary_chains(e),
                                  boundary_chains(PolygonSet{f_set, eta}));
  const double floor = 1e-14 * (1.0 + std::abs(critical.ell0));
  rep.c1_candidate =
      (rep.deficit_out + rep.sym_diff * rep.sym_diff) / std::max(rep.deficit_in, floor);
  rep.c1_hausdorff = rep.hausdorff * rep.hausdorff / std::max(rep.deficit_in, floor);
  return out;
}

PerturbationFamily family_from_string(const std::string& name) {
  if (name == "radial-bump") return PerturbationFamily::radial_bump;
  if (name == "dent") return PerturbationFamily::dent;
  if (name == "speck") return PerturbationFamily::speck;
  if (name == "tilt") return PerturbationFamily::tilt;
  throw ConfigError("unknown perturbation family: " + name);
}

PolygonSet make_perturbed_set(const ConvexBody& body, double eta, const CriticalSet& critical,
                              PerturbationFamily family, double amplitude, int resolution) {
  const CircArc& minimizer = critical.points.front().arc;
  PolygonSet set;
  set.target_area = eta;

  switch (family) {
    case PerturbationFamily::radial_bump: {
      OpenCurve base = arc_to_curve(body, minimizer, resolution);
      OpenCurve bumped = perturb_normal_bump(base, body, amplitude, 1, eta);
      set.polys.push_back({region_polygon(bumped, body), +1});
      break;
    }
    case PerturbationFamily::dent: {
      OpenCurve base = arc_to_curve(body, minimizer, resolution);
      const Polyline& b = base.nodes;
      Polyline x = b;
      std::vector<double> cum(x.size(), 0.0);
      for (size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + (b[i] - b[i - 1]).norm();
      for (size_t i = 1; i + 1 < x.size(); ++i) {
        const double t = (cum[i] / cum.back() - 0.5) / 0.15;
        if (std::abs(t) >= 1.0) continue;
        const double w = std::pow(std::cos(0.5 * kPi * t), 2);
        const Vec2 nu = rot90((b[i + 1] - b[i - 1]).normalized());
        x[i] += amplitude * w * nu;  // inward dent (nu points into the region)
      }
      OpenCurve dented = make_open_curve(body, std::move(x));
      OpenCurve restored = perturb_normal_bump(dented, body, 0.0, 1, eta);
      set.polys.push_back({region_polygon(restored, body), +1});
      break;
    }
    case PerturbationFamily::speck: {
      const double speck_area = amplitude * amplitude;
      const RadiusSolve rs = solve_radius_for_area(body, minimizer.center,
                                                   eta - speck_area, minimizer.radius);
      if (!rs.ok) throw NumericalError(rs.error);
      OpenCurve main = arc_to_curve(body, rs.arc, resolution);
      Polygon main_poly = region_polygon(main, body);
      set.polys.push_back({main_poly, +1});
      double max_x = -std::numeric_limits<double>::max();
      for (const Vec2& p : main_poly) max_x = std::max(max_x, p.x());
      const double side = amplitude;
      Polygon speck = {Vec2(max_x + 3 * side, -side / 2), Vec2(max_x + 4 * side, -side / 2),
                       Vec2(max_x + 4 * side, side / 2), Vec2(max_x + 3 * side, side / 2)};
      set.polys.push_back({speck, +1});
      break;
    }
    case PerturbationFamily::tilt: {
      const Vec2 z = minimizer.center + amplitude * minimizer.center.normalized();
      const RadiusSolve rs = solve_radius_for_area(body, z, eta, minimizer.radius);
      if (!rs.ok) throw NumericalError(rs.error);
      OpenCurve tilted = arc_to_curve(body, rs.arc, resolution);
      set.polys.push_back({region_polygon(tilted, body), +1});
      break;
    }
  }
  return set;
}

std::vector<Polyline> boundary_chains(const PolygonSet& set) {
  std::vector<Polyline> chains;
  for (const SignedPolygon& p : set.polys) {
    Polyline c = p.vertices;
    c.push_back(p.vertices.front());
    chains.push_back(std::move(c));
  }
  return chains;
}

double hausdorff_multi(const std::vector<Polyline>& a, const std::vector<Polyline>& b,
                       double resolution) {
  double total_len = 0;
  for (const auto& c : a) total_len += polyline_length(c);
  for (const auto& c : b) total_len += polyline_length(c);
  if (resolution <= 0) resolution = 1e-4 * (total_len + 1e-300);
  auto dist_to_set = [&](const Vec2& p, const std::vector<Polyline>& set) {
    double best = std::numeric_limits<double>::max();
    for (const auto& c : set) best = std::min(best, point_polyline_distance(p, c));
    return best;
  };
  double h = 0;
  for (const auto& c : a)
    for (const Vec2& p : densify(c, resolution)) h = std::max(h, dist_to_set(p, b));
  for (const auto& c : b)
    for (const Vec2& p : densify(c, resolution)) h = std::max(h, dist_to_set(p, a));
  return h;
}

LogLogFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit fit;
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double m = static_cast<double>(n);
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  const double num = m * sxy - sx * sy;
  const double den = std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
  fit.r2 = den > 0 ? (num / den) * (num / den) : 1.0;
  return fit;
}

StabilityResult stability_experiment(const ConvexBody& body, double eta,
                                     PerturbationFamily family,
                                     const std::vector<double>& amplitudes,
                                     const FlowConfig& flow_config) {
  StabilityResult out;
  const CriticalSet critical = find_critical(body, eta);
  out.ell0 = critical.ell0;

  std::vector<StabilityRow> rows(amplitudes.size());
  parallel_for(static_cast<int>(amplitudes.size()), [&](int i) {
    StabilityRow row;
    row.amplitude = amplitudes[i];
    const PolygonSet e = make_perturbed_set(body, eta, critical, family, amplitudes[i]);
    ReduceResult red = reduce(e, body, eta, critical);
    row.deficit_e = red.report.deficit_in;
    row.deficit_f = red.report.deficit_out;

    FlowState st = make_flow_state(body, red.curve, eta);
    FlowTrace trace = run(std::move(st), flow_config, body);
    if (trace.converged && trace.snapped) {
      row.converged = true;
      const OpenCurve limit_curve = arc_to_curve(body, trace.limit_arc, 2048);
      std::vector<SignedPolygon> star = {{region_polygon(limit_curve, body), +1}};
      row.sym_diff_direct = symmetric_difference_area(e.polys, star);
      row.sym_diff_flow = trace.displacement_l1;
      row.hausdorff =
          hausdorff_multi(boundary_chains(e), boundary_chains(PolygonSet{star, eta}));
    }
    rows[i] = row;
  });
  out.rows = std::move(rows);
  for (const StabilityRow& r : out.rows)
    if (!r.converged) ++out.excluded;

  std::vector<double> lx1, ly1, lx2, ly2;
  for (const StabilityRow& r : out.rows) {
    if (!r.converged || r.deficit_e <= 0 || r.sym_diff_direct <= 0 || r.hausdorff <= 0)
      continue;
    lx1.push_back(std::log(r.sym_diff_direct));
    ly1.push_back(std::log(r.deficit_e));
    const double p = r.deficit_e + out.ell0;
    lx2.push_back(std::log(r.hausdorff * r.hausdorff));
    ly2.push_back(std::log(p * p - out.ell0 * out.ell0));
  }
  if (lx1.size() >= 2) {
    const LogLogFit f1 = fit_line(lx1, ly1);
    out.slope_deficit_symdiff = f1.slope;
    out.r2_deficit_symdiff = f1.r2;
    const LogLogFit f2 = fit_line(lx2, ly2);
    out.slope_p2_dh2 = f2.slope;
    out.r2_p2_dh2 = f2.r2;
  }
  return out;
}

LojResult loj_scan(const ConvexBody& body, double eta, const std::vector<double>& amplitudes,
                   int segments, int mode) {
  LojResult out;
  const CriticalSet critical = find_critical(body, eta);
  out.ell0 = critical.ell0;
  const OpenCurve base = arc_to_curve(body, critical.points.front().arc, segments);

  std::vector<LojRow> rows(amplitudes.size());
  parallel_for(static_cast<int>(amplitudes.size()), [&](int i) {
    LojRow row;
    row.amplitude = amplitudes[i];
    const OpenCurve curve = perturb_normal_bump(base, body, amplitudes[i], mode, eta);
    const CurveReport rep = report(curve, body);
    row.eps = rep.eps;

    const CompanionArc comp = companion_arc(curve, body);
    const CriticalSet near = find_critical_from(body, eta, {comp.arc.center});
    double best = std::numeric_limits<double>::max();
    CircArc star = near.points.front().arc;
    for (const CriticalPoint& cp : near.points) {
      const double d = (cp.arc.center - comp.arc.center).norm();
      if (d < best) {
        best = d;
        star = cp.arc;
      }
    }
    // reference gets the identical discretization and area renormalization,
    // so the inscribed-polygon offsets cancel in the comparison
    const OpenCurve star_curve =
        perturb_normal_bump(arc_to_curve(body, star, segments), body, 0.0, 1, eta);
    row.c1_dist = c1_distance(curve, star_curve);
    row.length_gap =
        std::abs(polyline_length(curve.nodes) - polyline_length(star_curve.nodes));
    rows[i] = row;
  });
  out.rows = std::move(rows);

  std::vector<double> le, lc, lg;
  for (const LojRow& r : out.rows) {
    if (r.eps <= 0 || r.c1_dist <= 0 || r.length_gap <= 0) continue;
    le.push_back(std::log(r.eps));
    lc.push_back(std::log(r.c1_dist));
    lg.push_back(std::log(r.length_gap));
  }
  if (le.size() >= 2) {
    const LogLogFit fd = fit_line(le, lc);
    out.slope_distance = fd.slope;
    out.r2_distance = fd.r2;
    const LogLogFit fl = fit_line(le, lg);
    out.slope_length = fl.slope;
    out.r2_length = fl.r2;
    out.slope_length_vs_eps2 = fl.slope / 2.0;
  }
  return out;
}

double smallness_margin(const ConvexBody& body, double eta, double ell0) {
  const double kmax = body.kappa_max();
  auto slack = [&](double delta) {
    const double l = ell0 + delta;
    const double arg = eta / (l * l);
    if (arg > 1) return -1.0;
    return 4.0 / (5.0 * kmax) * std::asin(arg) - l;
  };
  if (slack(0) <= 0) return 0.0;
  double hi = std::max(ell0, 1.0 / kmax);
  while (slack(hi) > 0 && hi < 1e6 * ell0) hi *= 2;
  double lo = 0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slack(mid) > 0) lo = mid; else hi = mid;
  }
  return lo * (1.0 - 1e-9);
}

ProfileReport profile_and_sublinearity(const ConvexBody& body, std::vector<double> eta_list,
                                       int n_partitions, std::uint64_t seed) {
  ProfileReport rep;
  std::sort(eta_list.begin(), eta_list.end());
  std::map<double, double> memo;
  auto profile = [&](double eta) {
    auto it = memo.find(eta);
    if (it != memo.end()) return it->second;
    const double v = find_critical(body, eta).ell0;
    memo.emplace(eta, v);
    return v;
  };
  const double kmax = body.kappa_max();
  for (double eta : eta_list) {
    ProfilePoint pt;
    pt.eta = eta;
    pt.ell0 = profile(eta);
    pt.lower = std::sqrt(2.0 * kPi * eta);
    pt.upper = 2.0 * std::sqrt(kPi * eta);
    pt.improved = pt.upper * std::sqrt(1.0 - std::atan(std::sqrt(0.5 * kPi / eta) / kmax) / kPi);
    pt.bounds_ok = pt.ell0 >= pt.lower * (1.0 - 1e-9) && pt.ell0 <= pt.improved * (1.0 + 1e-9);
    rep.points.push_back(pt);
  }
  rep.worst_lipschitz_margin = std::numeric_limits<double>::max();
  for (size_t i = 1; i < rep.points.size(); ++i) {
    const ProfilePoint& a = rep.points[i - 1];
    const ProfilePoint& b = rep.points[i];
    const double diff = b.ell0 - a.ell0;
    const double lo = std::sqrt(0.5 * kPi / b.eta) * (b.eta - a.eta);
    const double hi = std::sqrt(kPi / a.eta) * (b.eta - a.eta);
    const double margin = std::min(diff - lo * (1 - 1e-9), hi * (1 + 1e-9) - diff);
    rep.worst_lipschitz_margin = std::min(rep.worst_lipschitz_margin, margin);
    if (margin < 0) rep.lipschitz_ok = false;
  }
  if (rep.points.size() < 2) rep.worst_lipschitz_margin = 0;

  std::mt19937_64 rng(seed);
  rep.worst_sublinearity_margin = std::numeric_limits<double>::max();
  for (int p = 0; p < n_partitions; ++p) {
    const double eta = eta_list[rng() % eta_list.size()];
    const double c0 = std::sqrt(2.0 / kPi) * std::atan(std::sqrt(0.5 * kPi / eta) / kmax);
    rep.c0 = c0;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    const int k = 2 + static_cast<int>(rng() % 4);
    std::vector<double> parts(k);
    double sum = 0;
    for (double& w : parts) {
      w = u(rng);
      sum += w;
    }
    for (double& w : parts) w *= eta / sum;
    std::sort(parts.rbegin(), parts.rend());
    double lhs = -profile(eta);
    double rhs = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
      lhs += profile(parts[i]);
      if (i >= 1) rhs += c0 * std::sqrt(parts[i]);
    }
    const double margin = lhs - rhs;
    rep.worst_sublinearity_margin = std::min(rep.worst_sublinearity_margin, margin);
    if (margin < -1e-9 * (1 + std::abs(lhs))) rep.sublinearity_ok = false;
    ++rep.partitions_checked;
  }
  if (rep.partitions_checked == 0) rep.worst_sublinearity_margin = 0;
  return rep;
}

}  // namespace isoflow
