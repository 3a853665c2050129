#include "isoflow/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "isoflow/io.hpp"
#include "isoflow/selfcheck.hpp"

namespace isoflow {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFlowHalted = 4;

std::string flag(bool b) { return b ? "1" : "0"; }

struct FlowOptions {
  std::string body, init = "critical", out_trace, out_svg, scheme = "semiimplicit";
  double eta = 1.0, bump = 0.0, tmax = 50.0, tol = 1e-6;
  int n = 256, bump_mode = 1, snapshot_every = 250, record_every = 1;
};

int do_flow(const FlowOptions& opt) {
  const ConvexBody body = body_from_spec(opt.body);
  const std::string config = "flow|body=" + opt.body + "|eta=" + format_double(opt.eta) +
                             "|init=" + opt.init + "|bump=" + format_double(opt.bump) +
                             "|mode=" + std::to_string(opt.bump_mode) +
                             "|n=" + std::to_string(opt.n) + "|scheme=" + opt.scheme +
                             "|tmax=" + format_double(opt.tmax) +
                             "|tol=" + format_double(opt.tol);
  const std::string config_hash = hash_hex(fnv1a(config));

  OpenCurve init = [&] {
    if (opt.init == "critical") {
      const CriticalSet cs = find_critical(body, opt.eta);
      return arc_to_curve(body, cs.points.front().arc, opt.n);
    }
    if (opt.init.rfind("arc:", 0) == 0) {
      const std::vector<double> v = parse_amplitudes(opt.init.substr(4));
      if (v.size() != 3) throw ConfigError("arc init needs zx,zy,r");
      return arc_to_curve(body, arc_outside_or_throw(body, Vec2(v[0], v[1]), v[2]), opt.n);
    }
    if (opt.init.size() > 5 && opt.init.substr(opt.init.size() - 5) == ".json")
      return make_open_curve(body, read_curve_json(opt.init));
    return make_open_curve(body, read_curve_csv(opt.init));
  }();
  if (opt.bump != 0.0) init = perturb_normal_bump(init, body, opt.bump, opt.bump_mode, opt.eta);

  FlowConfig fc;
  fc.node_count = opt.n;
  fc.scheme = (opt.scheme == "explicit") ? FlowConfig::Scheme::explicit_euler
                                         : FlowConfig::Scheme::semi_implicit;
  fc.t_max = opt.tmax;
  fc.stop_eps = opt.tol;
  fc.snapshot_every = opt.snapshot_every;
  fc.record_every = opt.record_every;

  const PreconditionReport pre = check_preconditions(body, init, opt.eta);
  FlowTrace trace = run(make_flow_state(body, std::move(init), opt.eta), fc, body);

  if (!opt.out_trace.empty()) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(trace.rows.size());
    for (const TraceRow& r : trace.rows)
      rows.push_back({format_double(r.t), format_double(r.length), format_double(r.area),
                      format_double(r.eps), format_double(r.turning_angle),
                      format_double(r.v_l2), format_double(r.vtilde_l2), flag(r.embedded),
                      flag(r.exterior)});
    write_csv(opt.out_trace, {"config_hash=" + config_hash, "seed=0"},
              {"t", "L", "A", "eps", "phi_turn", "v_l2", "vtilde_l2", "embedded", "exterior"},
              rows);
  }
  if (!opt.out_svg.empty()) {
    std::filesystem::create_directories(opt.out_svg);
    char name[64];
    for (size_t i = 0; i < trace.snapshots.size(); ++i) {
      std::vector<SvgCurve> layers = {{trace.snapshots[i].nodes, "#1f6fb2", 0.004}};
      try {
        const OpenCurve snap = make_open_curve(body, trace.snapshots[i].nodes);
        const SigmaArc sigma = closing_arc(snap, body);
        if (!sigma.degenerate)
          layers.push_back({sample_subarc(body, sigma.theta_from, sigma.theta_to, sigma.ccw,
                                          body.boundary_length() / 512),
                            "#7a7a7a", 0.002});
      } catch (const std::exception&) {
        // halted snapshots may be invalid curves; draw the polyline alone
      }
      if (trace.snapped) layers.push_back({trace.limit_arc.sample(256), "#c0392b", 0.002});
      std::snprintf(name, sizeof(name), "flow_%06zu.svg", i);
      render_svg(opt.out_svg + "/" + name, body, layers,
                 "config_hash=" + config_hash + " seed=0");
    }
  }

  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["preconditions"] = {{"eta_small_enough", pre.eta_small_enough},
                        {"initial_length_ok", pre.initial_length_ok},
                        {"profile_condition_ok", pre.profile_condition_ok},
                        {"cbar_printed", pre.cbar_printed},
                        {"cbar_stated", pre.cbar_stated}};
  j["converged"] = trace.converged;
  j["halted"] = trace.halted;
  j["halt_reason"] = trace.halt_reason;
  j["t_end"] = trace.t_end;
  j["length_end"] = trace.length_end;
  if (trace.snapped) j["limit_level"] = trace.limit_level;
  std::cout << j.dump(2) << "\n";
  return trace.halted ? kExitFlowHalted : kExitOk;
}

int do_critical(const std::string& body_spec, double eta, const std::string& out) {
  const ConvexBody body = body_from_spec(body_spec);
  const CriticalSet cs = find_critical(body, eta);
  const std::string config = "critical|body=" + body_spec + "|eta=" + format_double(eta);
  std::vector<std::vector<std::string>> rows;
  for (const CriticalPoint& cp : cs.points)
    rows.push_back({format_double(cp.arc.center.x()), format_double(cp.arc.center.y()),
                    format_double(cp.arc.radius), format_double(cp.arc.length),
                    format_double(cp.spectrum.lambda1), format_double(cp.spectrum.lambda2),
                    flag(cp.spectrum.degenerate)});
  const std::vector<std::string> cols = {"z_x", "z_y", "r", "L", "lambda1", "lambda2",
                                         "degenerate_flag"};
  if (!out.empty()) {
    write_csv(out, {"config_hash=" + hash_hex(fnv1a(config)), "seed=0"}, cols, rows);
  } else {
    for (size_t c = 0; c < cols.size(); ++c) std::cout << (c ? "," : "") << cols[c];
    std::cout << "\n";
    for (const auto& r : rows) {
      for (size_t c = 0; c < r.size(); ++c) std::cout << (c ? "," : "") << r[c];
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int do_profile(const std::string& body_spec, const std::string& etas_text, int partitions,
               std::uint64_t seed, const std::string& out) {
  const ConvexBody body = body_from_spec(body_spec);
  const std::vector<double> etas = parse_amplitudes(etas_text);
  const ProfileReport rep = profile_and_sublinearity(body, etas, partitions, seed);
  const std::string config = "profile|body=" + body_spec + "|etas=" + etas_text +
                             "|partitions=" + std::to_string(partitions) +
                             "|seed=" + std::to_string(seed);
  if (!out.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const ProfilePoint& p : rep.points)
      rows.push_back({format_double(p.eta), format_double(p.ell0), format_double(p.lower),
                      format_double(p.upper), format_double(p.improved), flag(p.bounds_ok)});
    write_csv(out,
              {"config_hash=" + hash_hex(fnv1a(config)), "seed=" + std::to_string(seed),
               "lipschitz_ok=" + flag(rep.lipschitz_ok),
               "sublinearity_ok=" + flag(rep.sublinearity_ok)},
              {"eta", "ell0", "lower", "upper", "improved", "bounds_ok"}, rows);
  }
  nlohmann::json j;
  j["config_hash"] = hash_hex(fnv1a(config));
  j["lipschitz_ok"] = rep.lipschitz_ok;
  j["sublinearity_ok"] = rep.sublinearity_ok;
  j["partitions_checked"] = rep.partitions_checked;
  j["c0"] = rep.c0;
  bool bounds = true;
  for (const ProfilePoint& p : rep.points) bounds = bounds && p.bounds_ok;
  j["bounds_ok"] = bounds;
  std::cout << j.dump(2) << "\n";
  return (bounds && rep.lipschitz_ok && rep.sublinearity_ok) ? kExitOk : kExitNumerical;
}

int do_loj(const std::string& body_spec, double eta, const std::string& amps_text, int n,
           int mode, const std::string& out) {
  const ConvexBody body = body_from_spec(body_spec);
  const std::vector<double> amps = parse_amplitudes(amps_text);
  const LojResult res = loj_scan(body, eta, amps, n, mode);
  const std::string config = "loj|body=" + body_spec + "|eta=" + format_double(eta) +
                             "|amplitudes=" + amps_text + "|n=" + std::to_string(n) +
                             "|mode=" + std::to_string(mode);
  nlohmann::json j;
  j["config_hash"] = hash_hex(fnv1a(config));
  j["seed"] = 0;
  j["ell0"] = res.ell0;
  j["slopes"] = {{"distance", res.slope_distance},
                 {"length", res.slope_length},
                 {"length_vs_eps2", res.slope_length_vs_eps2}};
  j["r2"] = {{"distance", res.r2_distance}, {"length", res.r2_length}};
  for (const LojRow& r : res.rows)
    j["points"].push_back({{"amplitude", r.amplitude},
                           {"eps", r.eps},
                           {"c1_dist", r.c1_dist},
                           {"length_gap", r.length_gap}});
  const std::string text = j.dump(2);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot open output file: " + out);
    f << text << "\n";
  }
  std::cout << text << "\n";
  return kExitOk;
}

int do_stability(const std::string& body_spec, double eta, const std::string& family_name,
                 const std::string& amps_text, int n, const std::string& out) {
  const ConvexBody body = body_from_spec(body_spec);
  const std::vector<double> amps = parse_amplitudes(amps_text);
  FlowConfig fc;
  fc.node_count = n;
  const StabilityResult res =
      stability_experiment(body, eta, family_from_string(family_name), amps, fc);
  const std::string config = "stability|body=" + body_spec + "|eta=" + format_double(eta) +
                             "|family=" + family_name + "|amplitudes=" + amps_text +
                             "|n=" + std::to_string(n);
  const std::string config_hash = hash_hex(fnv1a(config));
  if (!out.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const StabilityRow& r : res.rows) {
      if (!r.converged) continue;  // non-converged runs are excluded and counted
      rows.push_back({format_double(r.amplitude), format_double(r.deficit_e),
                      format_double(r.sym_diff_direct), format_double(r.hausdorff)});
    }
    write_csv(out, {"config_hash=" + config_hash, "seed=0"},
              {"amplitude", "deficit", "sym_diff", "hausdorff"}, rows);
    nlohmann::json fits;
    fits["config_hash"] = config_hash;
    fits["slope_deficit_vs_symdiff"] = res.slope_deficit_symdiff;
    fits["slope_p2_vs_dh2"] = res.slope_p2_dh2;
    fits["r2"] = {{"deficit_vs_symdiff", res.r2_deficit_symdiff},
                  {"p2_vs_dh2", res.r2_p2_dh2}};
    fits["excluded"] = res.excluded;
    fits["ell0"] = res.ell0;
    std::ofstream f(out + ".fits.json");
    if (!f) throw ConfigError("cannot open output file: " + out + ".fits.json");
    f << fits.dump(2) << "\n";
  }
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["slope_deficit_vs_symdiff"] = res.slope_deficit_symdiff;
  j["slope_p2_vs_dh2"] = res.slope_p2_dh2;
  j["excluded"] = res.excluded;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int do_selftest(const std::string& filter) {
  const std::vector<const Check*> checks = checks_matching(filter);
  if (checks.empty()) {
    std::cout << "no checks match '" << filter << "'\n";
    return kExitConfig;
  }
  int failed = 0;
  for (const Check* c : checks) {
    CheckResult res;
    try {
      res = c->fn();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s%s%s\n", res.pass ? "PASS" : "FAIL", c->name.c_str(),
                res.detail.empty() ? "" : " -- ", res.detail.c_str());
    std::fflush(stdout);
    if (!res.pass) ++failed;
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failed,
              checks.size());
  return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"exterior isoperimetric toolkit"};
  app.require_subcommand(1);

  FlowOptions fopt;
  CLI::App* flow_cmd = app.add_subcommand("flow", "run the area-preserving flow");
  flow_cmd->add_option("--body", fopt.body)->required();
  flow_cmd->add_option("--eta", fopt.eta)->required();
  flow_cmd->add_option("--init", fopt.init);
  flow_cmd->add_option("--bump", fopt.bump);
  flow_cmd->add_option("--bump-mode", fopt.bump_mode);
  flow_cmd->add_option("--n", fopt.n);
  flow_cmd->add_option("--scheme", fopt.scheme)
      ->check(CLI::IsMember({"explicit", "semiimplicit"}));
  flow_cmd->add_option("--tmax", fopt.tmax);
  flow_cmd->add_option("--tol", fopt.tol);
  flow_cmd->add_option("--out-trace", fopt.out_trace);
  flow_cmd->add_option("--out-svg", fopt.out_svg);
  flow_cmd->add_option("--snapshot-every", fopt.snapshot_every);
  flow_cmd->add_option("--record-every", fopt.record_every);

  std::string c_body, c_out;
  double c_eta = 1.0;
  CLI::App* critical_cmd = app.add_subcommand("critical", "find critical arcs");
  critical_cmd->add_option("--body", c_body)->required();
  critical_cmd->add_option("--eta", c_eta)->required();
  critical_cmd->add_option("--out", c_out);

  std::string p_body, p_etas, p_out;
  int p_partitions = 50;
  std::uint64_t p_seed = 12345;
  CLI::App* profile_cmd = app.add_subcommand("profile", "profile bounds and sublinearity");
  profile_cmd->add_option("--body", p_body)->required();
  profile_cmd->add_option("--eta", p_etas)->required();
  profile_cmd->add_option("--partitions", p_partitions);
  profile_cmd->add_option("--seed", p_seed);
  profile_cmd->add_option("--out", p_out);

  std::string l_body, l_amps = "1e-3..1e-1:9", l_out;
  double l_eta = 1.0;
  int l_n = 512, l_mode = 1;
  CLI::App* loj_cmd = app.add_subcommand("loj", "Lojasiewicz exponent scan");
  loj_cmd->add_option("--body", l_body)->required();
  loj_cmd->add_option("--eta", l_eta)->required();
  loj_cmd->add_option("--amplitudes", l_amps);
  loj_cmd->add_option("--n", l_n);
  loj_cmd->add_option("--mode", l_mode);
  loj_cmd->add_option("--out", l_out);

  std::string s_body, s_family = "radial-bump", s_amps = "0.01,0.02,0.04,0.08", s_out;
  double s_eta = 1.0;
  int s_n = 256;
  CLI::App* stability_cmd = app.add_subcommand("stability", "quantitative stability sweep");
  stability_cmd->add_option("--body", s_body)->required();
  stability_cmd->add_option("--eta", s_eta)->required();
  stability_cmd->add_option("--family", s_family)
      ->check(CLI::IsMember({"radial-bump", "dent", "speck", "tilt"}));
  stability_cmd->add_option("--amplitudes", s_amps);
  stability_cmd->add_option("--n", s_n);
  stability_cmd->add_option("--out", s_out);

  std::string t_filter;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the worked-example checks");
  selftest_cmd->add_option("--filter", t_filter);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (flow_cmd->parsed()) return do_flow(fopt);
    if (critical_cmd->parsed()) return do_critical(c_body, c_eta, c_out);
    if (profile_cmd->parsed()) return do_profile(p_body, p_etas, p_partitions, p_seed, p_out);
    if (loj_cmd->parsed()) return do_loj(l_body, l_eta, l_amps, l_n, l_mode, l_out);
    if (stability_cmd->parsed())
      return do_stability(s_body, s_eta, s_family, s_amps, s_n, s_out);
    if (selftest_cmd->parsed()) return do_selftest(t_filter);
  } catch (const ConfigError& e) {
    std::cout << error_json("config", e.what()) << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cout << error_json("numerical", e.what()) << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cout << error_json("internal", e.what()) << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

int run_command(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args);
}

}  // namespace isoflow
