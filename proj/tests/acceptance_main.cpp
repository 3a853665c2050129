// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Every tolerance is pinned in code next to the quantity it gates.

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "isoflow/stability.hpp"

using namespace isoflow;

namespace {

int failures = 0;

struct Criterion {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void require_near(const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) {
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%s = %.10g (want %.10g +- %.2g)", what.c_str(), got,
                    want, tol);
      require(false, buf);
    }
  }
  void require_below(const std::string& what, double got, double bound) {
    if (!(got <= bound)) {
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%s = %.10g (bound %.10g)", what.c_str(), got, bound);
      require(false, buf);
    }
  }
};

void report(int number, const std::string& title, const Criterion& c) {
  std::printf("[%s] criterion %2d: %s%s%s\n", c.pass ? "PASS" : "FAIL", number, title.c_str(),
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::fflush(stdout);
  if (!c.pass) ++failures;
}

double lune_length(double R, double r) { return r * (kTwoPi - 2.0 * std::atan(R / r)); }
double hessian_radial_chain(double rho0, double r_star) {
  const double L = lune_length(rho0, r_star);
  const double beta = std::atan(r_star / rho0);
  const double d_alpha =
      (1.0 / rho0) * (1.0 + 2.0 * rho0 / L) * std::sin(beta) + std::cos(beta) / r_star;
  return (2.0 + 4.0 * rho0 / L) * std::sin(beta) * d_alpha;
}

const ConvexBody& unit_circle() {
  static const ConvexBody b = ConvexBody::circle(1.0);
  return b;
}
const ConvexBody& circle100() {
  static const ConvexBody b = ConvexBody::circle(100.0);
  return b;
}
const ConvexBody& ellipse21() {
  static const ConvexBody b = ConvexBody::ellipse(2.0, 1.0);
  return b;
}
const CriticalSet& crit100() {
  static const CriticalSet cs = find_critical(circle100(), 1.0);
  return cs;
}

FlowTrace run_r100(int n, double bump) {
  OpenCurve init = arc_to_curve(circle100(), crit100().points.front().arc, n);
  if (bump != 0.0) init = perturb_normal_bump(init, circle100(), bump, 1, 1.0);
  FlowConfig fc;
  fc.node_count = n;
  return run(make_flow_state(circle100(), init, 1.0), fc, circle100());
}

// shared heavyweight runs
const FlowTrace& run512() {
  static const FlowTrace tr = run_r100(512, 0.05);
  return tr;
}
const FlowTrace& run256() {
  static const FlowTrace tr = run_r100(256, 0.05);
  return tr;
}

// --------------------------------------------------------------------------

void criterion_1() {
  Criterion c;
  const double eta = 1.0 + 0.5 * kPi;
  const CriticalSet cs = find_critical(unit_circle(), eta);
  c.require_near("r", cs.points.front().arc.radius, 1.0, 1e-6);
  c.require_near("|z|", cs.points.front().arc.center.norm(), std::sqrt(2.0), 1e-6);
  c.require_near("length", cs.ell0, 1.5 * kPi, 1e-6);
  const OpenCurve dense = arc_to_curve(unit_circle(), cs.points.front().arc, 100000);
  c.require_near("polyline area (1e5 nodes)", enclosed_area(dense, unit_circle()), eta, 1e-8);
  report(1, "closed-form critical arc on the unit circle", c);
}

void criterion_2() {
  Criterion c;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_area = 0, worst_endpoint = 0, worst_length = 0;
  int used = 0;
  for (int k = 0; used < 20 && k < 40; ++k) {
    const bool ell = k % 2;
    const ConvexBody& body = ell ? ellipse21() : unit_circle();
    const double th = kTwoPi * (k * 0.37 + 0.1 * u(rng));
    const BoundaryPoint bp = boundary_at(body, th);
    const double d = (ell ? 0.08 : 0.5) * (1.0 + 0.4 * u(rng));
    const Vec2 z0 = bp.position - d * bp.inner_normal;
    const double r0 = d * (1.6 + 0.5 * u(rng));
    const ArcResult probe = arc_outside(body, z0, r0);
    if (!probe.ok()) continue;
    ++used;
    const double eta_fam = probe.arc.area;
    const Vec2 dz(u(rng), u(rng));
    const double dr = 0.3 * u(rng);
    const VariationCheck generic = variation_check(
        body, [&](double e) { return ArcParams{r0 + e * dr, z0 + e * dz}; });
    const VariationCheck preserving = variation_check(body, [&](double e) {
      const Vec2 z = z0 + e * dz;
      const RadiusSolve s = solve_radius_for_area(body, z, eta_fam, r0, 1e-14);
      return ArcParams{s.ok ? s.arc.radius : r0, z};
    });
    worst_area = std::max(worst_area, generic.rel_err_area);
    worst_endpoint = std::max(worst_endpoint, generic.rel_err_endpoint);
    worst_length = std::max(worst_length, preserving.rel_err_length);
  }
  c.require(used == 20, "twenty valid families");
  c.require_below("area formula rel. error", worst_area, 1e-6);
  c.require_below("endpoint speed rel. error", worst_endpoint, 1e-6);
  c.require_below("length formula rel. error", worst_length, 1e-6);
  report(2, "first-variation formulas vs central differences (20 random families)", c);
}

void criterion_3() {
  Criterion c;
  const double eta = 1.0 + 0.5 * kPi;
  const Spectrum sp = hessian_L_eta(unit_circle(), Vec2(std::sqrt(2.0), 0.0), eta);
  c.require_below("|tangential eigenvalue|", std::abs(sp.lambda1), 1e-5);
  c.require_near("radial eigenvalue", sp.lambda2, hessian_radial_chain(1.0, 1.0), 1e-3);
  report(3, "finite-difference Hessian vs the closed-form radial value (~3.4535)", c);
}

void criterion_4() {
  Criterion c;
  std::uint64_t seed = 20240811;
  for (double R : {1.0, 10.0, 100.0}) {
    const ConvexBody body = ConvexBody::circle(R);
    const ProfileReport rep =
        profile_and_sublinearity(body, {0.4, 1.0, 2.0}, 17, seed++);
    for (const ProfilePoint& p : rep.points) {
      char what[96];
      std::snprintf(what, sizeof(what), "bounds at R=%g eta=%g", R, p.eta);
      c.require(p.bounds_ok, what);
    }
    char what[96];
    std::snprintf(what, sizeof(what), "Lipschitz sandwich at R=%g", R);
    c.require(rep.lipschitz_ok, what);
    std::snprintf(what, sizeof(what), "sublinearity at R=%g", R);
    c.require(rep.sublinearity_ok, what);
  }
  report(4, "profile bounds, Lipschitz sandwich, sublinearity (radii 1/10/100, 51 partitions)",
         c);
}

void criterion_5() {
  Criterion c;
  // conservation and monotonicity over every recorded run in this suite
  int run_idx = 0;
  for (const FlowTrace* tr : {&run512(), &run256()}) {
    ++run_idx;
    double worst_area = 0, worst_inc = -1e300;
    for (size_t i = 1; i < tr->rows.size(); ++i) {
      worst_area = std::max(worst_area, std::abs(tr->rows[i].area - tr->eta));
      worst_inc = std::max(worst_inc, tr->rows[i].length - tr->rows[i - 1].length);
    }
    char what[96];
    std::snprintf(what, sizeof(what), "area conservation, run %d", run_idx);
    c.require_below(what, worst_area, 1e-10 * tr->eta);
    std::snprintf(what, sizeof(what), "length monotone, run %d", run_idx);
    c.require_below(what, worst_inc, 1e-10);
  }
  // explicit dissipation identity at dt and dt/2
  for (double cfl : {0.2, 0.1}) {
    OpenCurve init = arc_to_curve(circle100(), crit100().points.front().arc, 512);
    init = perturb_normal_bump(init, circle100(), 0.05, 1, 1.0);
    FlowConfig fc;
    fc.node_count = 512;
    fc.scheme = FlowConfig::Scheme::explicit_euler;
    fc.cfl_explicit = cfl;
    FlowState st = make_flow_state(circle100(), init, 1.0);
    st.curve = resample_constant_speed(st.curve, fc.node_count, circle100());
    step(st, fc, circle100());  // settle the endpoint attachment
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const StepOutcome oc = step(st, fc, circle100());
      worst = std::max(worst, std::abs(oc.row.dissipation_lhs + oc.row.v_l2 * oc.row.v_l2) /
                                  (oc.row.v_l2 * oc.row.v_l2));
    }
    char what[64];
    std::snprintf(what, sizeof(what), "dissipation identity at cfl=%.2f", cfl);
    c.require_below(what, worst, cfl > 0.15 ? 0.05 : 0.025);
  }
  report(5, "flow conservation, per-step monotonicity, discrete dissipation identity", c);
}

void criterion_6() {
  Criterion c;
  c.require(run512().converged, "flow reaches eps < 1e-6 at N=512");
  c.require(run512().snapped, "limit arc identified");
  const RateFit f512 = fit_rate(run512());
  const RateFit f256 = fit_rate(run256());
  c.require(f512.rate > 0, "positive rate");
  c.require_below("1 - r^2", 1.0 - f512.r2, 0.01);
  c.require_near("rate stability N=256 vs N=512", f256.rate / f512.rate, 1.0, 0.10);
  report(6, "exponential convergence: fit quality and resolution stability", c);
}

void criterion_7() {
  Criterion c;
  double lo = 1e300, hi = 0;
  for (double a : {1e-3, 1e-2, 1e-1}) {
    const FlowTrace tr = run_r100(256, a);
    char what[64];
    std::snprintf(what, sizeof(what), "converged at amplitude %g", a);
    c.require(tr.converged, what);
    const DisplacementReport dr = displacement_bounds(tr, circle100(), 10);
    lo = std::min(lo, dr.ratio);
    hi = std::max(hi, dr.ratio);
    std::snprintf(what, sizeof(what), "region displacement pairs at %g", a);
    c.require(dr.pairs_ok, what);
    const L2EquivalenceReport l2 = l2_equivalence_check(tr);
    std::snprintf(what, sizeof(what), "reparametrization inequality at %g", a);
    c.require(l2.ok, what);
  }
  c.require_below("displacement ratio spread", hi / lo, 3.0);
  c.require(l2_equivalence_check(run512()).ok, "reparametrization inequality, N=512 run");
  report(7, "displacement bound, reparametrization inequality, region displacement pairs", c);
}

void criterion_8() {
  Criterion c;
  std::vector<double> amps;
  for (int i = 0; i < 9; ++i) amps.push_back(1e-3 * std::pow(100.0, i / 8.0));
  const LojResult lr = loj_scan(circle100(), 1.0, amps, 512);
  c.require_near("C1-distance exponent vs eps", lr.slope_distance, 1.0, 0.1);
  c.require_near("length-gap exponent vs eps^2", lr.slope_length_vs_eps2, 1.0, 0.1);
  report(8, "Lojasiewicz exponents over amplitudes 1e-3..1e-1", c);
}

void criterion_9() {
  Criterion c;
  const std::vector<double> amps = {0.01, 0.02, 0.04, 0.08};
  // reduction contracts on each level of the sweep
  for (double a : amps) {
    const PolygonSet e =
        make_perturbed_set(circle100(), 1.0, crit100(), PerturbationFamily::radial_bump, a);
    const ReduceResult red = reduce(e, circle100(), 1.0, crit100());
    char what[96];
    std::snprintf(what, sizeof(what), "contact angles at a=%g", a);
    c.require(red.report.contact_angle1 <= 0.5 * kPi + 1e-6 &&
                  red.report.contact_angle2 <= 0.5 * kPi + 1e-6,
              what);
    std::snprintf(what, sizeof(what), "area contract at a=%g", a);
    c.require(std::abs(red.report.area_out - 1.0) <= 1e-10, what);
    // stagewise relative perimeter never increases except for the mollifier
    double prev = red.report.deficit_in + crit100().ell0;
    for (const StageBudget& s : red.report.stages) {
      const double allowance =
          (s.name == "mollify") ? red.report.mollify_perimeter_increase + 1e-9 : 1e-9;
      std::snprintf(what, sizeof(what), "stage %s perimeter at a=%g", s.name.c_str(), a);
      c.require(s.rel_perimeter <= prev + allowance, what);
      prev = s.rel_perimeter;
    }
  }
  FlowConfig fc;
  fc.node_count = 256;
  const StabilityResult sr =
      stability_experiment(circle100(), 1.0, PerturbationFamily::radial_bump, amps, fc);
  c.require(sr.excluded == 0, "all flow runs converged");
  c.require_near("log-log slope deficit vs |F^E*|", sr.slope_deficit_symdiff, 2.0, 0.15);
  c.require_near("log-log slope P^2-I^2 vs d_H^2", sr.slope_p2_dh2, 1.0, 0.15);
  report(9, "end-to-end stability exponents (reduce -> flow -> measure)", c);
}

void criterion_10() {
  Criterion c;
  // battery of twenty polygon inputs: bumps, dents, specks, holes, obtuse arcs
  struct Input {
    const ConvexBody* body;
    double eta;
    PolygonSet set;
    std::string name;
  };
  std::vector<Input> battery;
  for (double a : {0.01, 0.03, 0.05, 0.08}) {
    battery.push_back({&circle100(), 1.0,
                       make_perturbed_set(circle100(), 1.0, crit100(),
                                          PerturbationFamily::radial_bump, a),
                       "bump"});
    battery.push_back({&circle100(), 1.0,
                       make_perturbed_set(circle100(), 1.0, crit100(),
                                          PerturbationFamily::dent, a),
                       "dent"});
  }
  for (double a : {0.02, 0.05, 0.08}) {
    PolygonSet e =
        make_perturbed_set(circle100(), 1.0, crit100(), PerturbationFamily::speck, a);
    e.target_area = set_area(e);
    battery.push_back({&circle100(), e.target_area, e, "speck"});
  }
  for (double hole_area : {0.002, 0.01, 0.03}) {
    PolygonSet e =
        make_perturbed_set(circle100(), 1.0, crit100(), PerturbationFamily::radial_bump, 0.0);
    const double s = std::sqrt(hole_area);
    const Vec2 apex = crit100().points.front().arc.point_at(0.5);
    const Vec2 mid = 0.5 * (apex + project_to_boundary(circle100(), apex).position);
    SignedPolygon hole;
    hole.sign = -1;
    hole.vertices = {mid + Vec2(-s / 2, -s / 2), mid + Vec2(s / 2, -s / 2),
                     mid + Vec2(s / 2, s / 2), mid + Vec2(-s / 2, s / 2)};
    e.polys.push_back(hole);
    e.target_area = set_area(e);
    battery.push_back({&circle100(), e.target_area, e, "hole"});
  }
  // obtuse-contact arcs on the unit circle
  for (double r : {0.8, 0.9, 1.0}) {
    const CircArc arc = arc_outside_or_throw(unit_circle(), Vec2(1.6, 0.0), r);
    const OpenCurve curve = arc_to_curve(unit_circle(), arc, 3000);
    PolygonSet e;
    e.target_area = arc.area;
    e.polys.push_back({region_polygon(curve, unit_circle()), +1});
    battery.push_back({&unit_circle(), arc.area, e, "obtuse"});
  }
  // three tilted members of the arc family
  for (double a : {0.05, 0.12, 0.2}) {
    battery.push_back({&circle100(), 1.0,
                       make_perturbed_set(circle100(), 1.0, crit100(),
                                          PerturbationFamily::tilt, a),
                       "tilt"});
  }
  c.require(battery.size() == 20, "twenty battery inputs");

  int idx = 0;
  for (const Input& input : battery) {
    ++idx;
    const CriticalSet cs = (input.body == &circle100() && input.eta == 1.0)
                               ? crit100()
                               : find_critical(*input.body, input.eta);
    const ReduceResult red = reduce(input.set, *input.body, input.eta, cs);
    char what[120];
    std::snprintf(what, sizeof(what), "#%d (%s): contact angles", idx, input.name.c_str());
    c.require(red.report.contact_angle1 <= 0.5 * kPi + 1e-6 &&
                  red.report.contact_angle2 <= 0.5 * kPi + 1e-6,
              what);
    std::snprintf(what, sizeof(what), "#%d (%s): area to 1e-10 eta", idx, input.name.c_str());
    c.require(std::abs(red.report.area_out - input.eta) <= 1e-10 * input.eta, what);
    std::snprintf(what, sizeof(what), "#%d (%s): relative convexity", idx, input.name.c_str());
    const std::vector<double> psi = turning_angles(red.curve.nodes);
    double min_psi = 1e300;
    for (double p : psi) min_psi = std::min(min_psi, p);
    c.require(min_psi >= -1e-9, what);
    std::snprintf(what, sizeof(what), "#%d (%s): tail chord bound", idx, input.name.c_str());
    c.require(red.report.tail_chord_worst <= 1.0 + 1e-9, what);
  }
  report(10, "reduction battery: 20 polygon inputs, contracts and chord bounds", c);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
