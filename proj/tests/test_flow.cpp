#include "doctest.h"
#include "isoflow/flow.hpp"
#include "isoflow/selfcheck.hpp"

using namespace isoflow;

namespace {

const ConvexBody& body100() {
  static const ConvexBody b = ConvexBody::circle(100.0);
  return b;
}

const CriticalSet& crit() {
  static const CriticalSet cs = find_critical(body100(), 1.0);
  return cs;
}

}  // namespace

TEST_CASE("worked examples: flow preconditions and synthetic pieces") {
  for (const char* name :
       {"flow/preconditions_r100", "flow/preconditions_r1_fail", "flow/preconditions_eta_zero",
        "flow/step_stationary", "flow/fit_rate_synthetic",
        "flow/l2_equivalence_translating_segment", "flow/h1_upgrade_identity"}) {
    const auto matches = checks_matching(name);
    REQUIRE(matches.size() == 1);
    const CheckResult r = matches[0]->fn();
    INFO(name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("run respects t_max without halting flags") {
  OpenCurve init = arc_to_curve(body100(), crit().points[0].arc, 64);
  init = perturb_normal_bump(init, body100(), 0.05, 1, 1.0);
  FlowConfig fc;
  fc.node_count = 64;
  fc.stop_eps = 1e-15;  // unreachable
  fc.t_max = 0.02;
  const FlowTrace tr = run(make_flow_state(body100(), init, 1.0), fc, body100());
  CHECK_FALSE(tr.converged);
  CHECK_FALSE(tr.halted);
  CHECK(tr.t_end >= 0.02);
  CHECK(tr.rows.size() > 3);
  for (size_t i = 1; i < tr.rows.size(); ++i) {
    CHECK(tr.rows[i].t > tr.rows[i - 1].t);
    CHECK(tr.rows[i].length <= tr.rows[i - 1].length + 1e-10);
    CHECK(std::abs(tr.rows[i].area - 1.0) <= 1e-10);
  }
}

TEST_CASE("explicit scheme also dissipates") {
  OpenCurve init = arc_to_curve(body100(), crit().points[0].arc, 96);
  init = perturb_normal_bump(init, body100(), 0.03, 1, 1.0);
  FlowConfig fc;
  fc.node_count = 96;
  fc.scheme = FlowConfig::Scheme::explicit_euler;
  FlowState st = make_flow_state(body100(), init, 1.0);
  st.curve = resample_constant_speed(st.curve, fc.node_count, body100());
  step(st, fc, body100());  // settle the endpoint attachment
  double prev = polyline_length(st.curve.nodes);
  for (int k = 0; k < 20; ++k) {
    const StepOutcome oc = step(st, fc, body100());
    REQUIRE(oc.ok);
    CHECK(oc.row.length <= prev + 1e-10);
    prev = oc.row.length;
  }
}

TEST_CASE("bump restores the requested area") {
  OpenCurve init = arc_to_curve(body100(), crit().points[0].arc, 256);
  const OpenCurve bumped = perturb_normal_bump(init, body100(), 0.07, 2, 1.0);
  CHECK(std::abs(enclosed_area(bumped, body100()) - 1.0) <= 1e-12);
  // without restoration the area moves
  const OpenCurve raw = perturb_normal_bump(init, body100(), 0.07, 1, 0.0);
  CHECK(std::abs(enclosed_area(raw, body100()) - 1.0) > 1e-4);
}

TEST_CASE("fit_rate refuses unconverged traces") {
  FlowTrace tr;
  tr.snapped = false;
  CHECK_THROWS_AS(fit_rate(tr), ConfigError);
}
