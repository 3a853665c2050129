#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "isoflow/arcs.hpp"
#include "isoflow/cli.hpp"
#include "isoflow/io.hpp"
#include "isoflow/selfcheck.hpp"

using namespace isoflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / "isoflow_test";
    fs::create_directories(dir);
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("worked examples: cli parsing") {
  for (const Check* c : checks_matching("cli/")) {
    const CheckResult r = c->fn();
    INFO(c->name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("critical subcommand emits the expected row") {
  TempDir tmp;
  const std::string out = tmp / "critical.csv";
  const int code =
      run_command({"critical", "--body", "circle:1", "--eta", "2.570796", "--out", out});
  CHECK(code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("z_x,z_y,r,L,lambda1,lambda2,degenerate_flag") != std::string::npos);
  // one row with r = 1, |z| = sqrt(2), L = 3 pi / 2 up to the rounded eta
  std::istringstream lines(text);
  std::string line, data;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'z') data = line;
  REQUIRE(!data.empty());
  double zx, zy, r, L;
  char comma;
  std::istringstream row(data);
  row >> zx >> comma >> zy >> comma >> r >> comma >> L;
  CHECK(std::abs(r - 1.0) < 1e-6);
  CHECK(std::abs(std::hypot(zx, zy) - 1.414214) < 1e-5);
  CHECK(std::abs(L - 4.712389) < 1e-5);
  return;
}

TEST_CASE("flow subcommand writes the pinned trace columns") {
  TempDir tmp;
  const std::string out = tmp / "trace.csv";
  const int code = run_command({"flow", "--body", "circle:100", "--eta", "1", "--init",
                                "critical", "--bump", "0.02", "--n", "64", "--tmax", "0.05",
                                "--out-trace", out});
  CHECK(code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("t,L,A,eps,phi_turn,v_l2,vtilde_l2,embedded,exterior") != std::string::npos);
  CHECK(text.find("config_hash=") != std::string::npos);
  CHECK(text.find("seed=") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_command({"critical", "--body", "hexagon:4", "--eta", "1"}) == 2);
  CHECK(run_command({"unknown-subcommand"}) == 2);
  // numerical failure: unreachable area from every seed
  CHECK(run_command({"flow", "--body", "circle:1", "--eta", "1", "--init", "arc:5,5,0.3",
                     "--tmax", "0.01"}) == 3);
  // flow halt: a self-crossed initial curve loses embeddedness
  TempDir tmp;
  const ConvexBody body = body_from_spec("circle:1");
  const CircArc arc = arc_outside_or_throw(body, Vec2(std::sqrt(2.0), 0.0), 1.0);
  Polyline nodes = arc.sample(64);
  std::swap(nodes[20], nodes[40]);
  const std::string path = tmp / "crossed.csv";
  write_curve_csv(path, nodes, {});
  CHECK(run_command({"flow", "--body", "circle:1", "--eta", "2.570796", "--init", path,
                     "--n", "64", "--tmax", "1.0"}) == 4);
}

TEST_CASE("svg rendering is deterministic") {
  TempDir tmp;
  const ConvexBody body = body_from_spec("circle:1");
  const CircArc arc = arc_outside_or_throw(body, Vec2(std::sqrt(2.0), 0.0), 1.0);
  const std::string p1 = tmp / "a.svg", p2 = tmp / "b.svg";
  render_svg(p1, body, {{arc.sample(64), "#aa3311", 0.004}});
  render_svg(p2, body, {{arc.sample(64), "#aa3311", 0.004}});
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).find("<svg") != std::string::npos);
  // empty curve list still draws the boundary
  const std::string p3 = tmp / "c.svg";
  render_svg(p3, body, {});
  CHECK(slurp(p3).find("path") != std::string::npos);
}

TEST_CASE("curve csv round trip") {
  TempDir tmp;
  const std::string path = tmp / "curve.csv";
  Polyline nodes = {{1, 0}, {1.5, 0.2}, {1.4, 0.9}, {0.3, 1.1}};
  write_curve_csv(path, nodes, {"seed=7"});
  const Polyline back = read_curve_csv(path);
  REQUIRE(back.size() == nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    CHECK((back[i] - nodes[i]).norm() == doctest::Approx(0.0));
}

TEST_CASE("outputs reproduce bit-exactly for identical configs") {
  TempDir tmp;
  const std::string o1 = tmp / "r1.csv", o2 = tmp / "r2.csv";
  for (const std::string& out : {o1, o2}) {
    const int code =
        run_command({"critical", "--body", "ellipse:2,1", "--eta", "0.05", "--out", out});
    REQUIRE(code == 0);
  }
  CHECK(slurp(o1) == slurp(o2));
}
