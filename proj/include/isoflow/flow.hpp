#pragma once

#include <string>
#include <vector>

#include "isoflow/arcs.hpp"
#include "isoflow/curve.hpp"

namespace isoflow {

struct FlowConfig {
  enum class Scheme { explicit_euler, semi_implicit };
  int node_count = 256;              // segments N
  Scheme scheme = Scheme::semi_implicit;
  double cfl_explicit = 0.2;         // dt = cfl * h_min^2
  double cfl_semi_implicit = 0.25;   // dt = c * h_min
  double area_tolerance_rel = 1e-10; // |A - eta| <= rel * eta after renormalization
  double stop_eps = 1e-6;            // stop when eps(gamma) drops below
  double t_max = 50.0;
  double turning_angle_bound = kTwoPi;
  int record_every = 1;              // trace row cadence (steps)
  int snapshot_every = 250;          // stored curve snapshots (steps)
  int embed_check_every = 10;        // self-intersection test cadence
};

struct TraceRow {
  double t = 0;
  double length = 0;
  double area = 0;
  double eps = 0;
  double turning_angle = 0;
  double v_l2 = 0;             // ||kappa - kappa_bar||_{L2(ds)}
  double vtilde_l2 = 0;        // || d/dt of the constant-speed curve ||_{L2([0,1])}
  double v_l1 = 0;             // int |V| ds
  double kappa_v_l1 = 0;       // int |kappa| |V| ds
  double dissipation_lhs = 0;  // (L_after_move - L_before)/dt
  double area_drift = 0;       // area defect entering the renormalization
  bool embedded = true;
  bool exterior = true;
};

struct FlowSnapshot {
  double t = 0;
  Polyline nodes;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
  std::vector<FlowSnapshot> snapshots;
  double displacement_l2 = 0;        // int ||dt gamma||_{L2(ds)} dt
  double displacement_tilde_l2 = 0;  // int ||dt gamma~||_{L2([0,1])} dt
  double displacement_l1 = 0;        // int ||V||_{L1(ds)} dt
  bool converged = false;
  bool halted = false;
  std::string halt_reason;
  bool turning_bound_exceeded = false;
  double t_end = 0;
  double length_start = 0, length_end = 0;
  double eta = 0;
  Polyline terminal_nodes;
  bool snapped = false;
  CircArc limit_arc;       // nearest critical arc after convergence
  double limit_level = 0;  // its length
};

struct PreconditionReport {
  double cbar_printed = 0;   // 4/(25 pi) asin^2(1/(4 pi))
  double cbar_stated = 0;    // 0.0415, recorded for comparison
  double area_threshold = 0; // cbar_printed / kappa_max^2 (conservative gate)
  bool eta_small_enough = false;
  double flow_rhs = 0;       // (4 / (5 kappa_max)) asin(eta / L0^2)
  double initial_length = 0;
  bool initial_length_ok = false;
  double profile_rhs = 0;    // same expression at L = I_Omega(eta)
  double profile_value = 0;  // I_Omega(eta) from the critical-point solver
  bool profile_condition_ok = false;
  bool vacuous = false;
  std::string message;
};

/// Evaluates the global-existence preconditions. Reports, never blocks.
PreconditionReport check_preconditions(const ConvexBody& body, const OpenCurve& curve,
                                       double eta, const CriticalSet* critical = nullptr);

struct FlowState {
  OpenCurve curve;
  double t = 0;
  double eta_signed = 0;  // target enclosed area with the curve's orientation sign
  long step_index = 0;
  bool sigma_ccw = false;  // closing-arc direction, fixed along the run
};

struct StepOutcome {
  bool ok = true;
  std::string halt_reason;
  TraceRow row;
};

/// One step: advance interior nodes by (kappa - kappa_bar) nu (explicit or
/// semi-implicit), re-attach endpoints by nearest-point projection, resample
/// to constant speed, renormalize the enclosed area by a uniform normal offset.
StepOutcome step(FlowState& state, const FlowConfig& config, const ConvexBody& body);

FlowState make_flow_state(const ConvexBody& body, OpenCurve curve, double eta);

FlowTrace run(FlowState state, const FlowConfig& config, const ConvexBody& body);

struct RateFit {
  double rate = 0;        // positive decay rate of L(t) - L_inf
  double l_infinity = 0;
  double r2 = 0;
  int samples_used = 0;
};

/// Least-squares fit of log(L(t) - L_inf) over the tail of a converged run;
/// L_inf comes from the snapped critical arc and the tail is truncated at the
/// numeric floor set by the terminal length offset.
RateFit fit_rate(const FlowTrace& trace);

struct DisplacementReport {
  double total_l2 = 0, total_tilde_l2 = 0;
  double drop_sqrt = 0;  // (L0 - L_end)^{1/2}
  double ratio = 0;      // (total_l2 + total_tilde_l2) / drop_sqrt
  int pairs_checked = 0;
  double worst_pair_margin = 0;  // min over pairs of bound - |E2 ^ E1| (>= 0 ok)
  bool pairs_ok = true;
};

/// Total displacement integrals and the region-displacement bound
/// |E_t2 ^ E_t1| <= Lbar^{1/2} int ||V|| dt on sampled snapshot pairs.
DisplacementReport displacement_bounds(const FlowTrace& trace, const ConvexBody& body,
                                       int pair_samples = 10);

struct L2EquivalenceReport {
  int rows_checked = 0;
  double max_violation = 0;   // worst |L vtilde^2 - v^2| - 4 L (int|k||V|)^2 excess
  double max_slack = 0;       // largest satisfied margin, for reporting
  bool ok = true;
};

/// Checks |L ||dt gamma~||^2 - ||dt gamma||^2| <= 4 L (int |kappa||dt gamma| ds)^2
/// on every recorded row, up to discretization tolerance.
L2EquivalenceReport l2_equivalence_check(const FlowTrace& trace, double tolerance_rel = 0.05);

struct H1UpgradeReport {
  double lhs = 0;          // int |gamma' - arc'|^2 dp on [0,1]
  double length_term = 0;  // L(gamma) - L(arc)
  double l2_term = 0;      // int |gamma - arc|^2 dp
  double constant = 0;     // lhs / (max(length_term,0) + l2_term)
};

/// Both curves constant-speed on [0,1] with matching orientation and aligned
/// starting ends.
H1UpgradeReport h1_upgrade_check(const OpenCurve& curve, const CircArc& critical_arc);

/// Normal-field bump used by the perturbation experiments: adds
/// amplitude * sin(mode pi s/L) sin^2(pi s/L) along the node normals (cubically
/// flat at the endpoints) and optionally restores the enclosed area to eta by
/// a uniform offset.
OpenCurve perturb_normal_bump(const OpenCurve& curve, const ConvexBody& body, double amplitude,
                              int mode = 1, double restore_area_to = 0.0);

/// Discretizes a circular arc as an OpenCurve with n segments.
OpenCurve arc_to_curve(const ConvexBody& body, const CircArc& arc, int segments);

/// Endpoint attachment rule of the flow: the foot on Sigma at which the
/// one-sided cubic-fit tangent of the adjacent nodes is exactly orthogonal.
/// The polyline's own end value is ignored; its three neighbors are used.
BoundaryPoint attach_endpoint(const ConvexBody& body, const Polyline& nodes, bool front);

/// Kinematics of one step between two constant-speed node sets: the L2 norms
/// entering the reparametrization inequality. Exposed for synthetic tests.
struct StepKinematics {
  double v_l2 = 0, vtilde_l2 = 0, v_l1 = 0, kappa_v_l1 = 0;
};
StepKinematics step_kinematics(const Polyline& before, const Polyline& after, double dt);

}  // namespace isoflow
