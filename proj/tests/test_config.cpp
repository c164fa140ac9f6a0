#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/config.hpp"
#include "hop/errors.hpp"
#include "hop/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <string>

using namespace hop;

namespace {

ErrorKind kind_of(const std::string& yaml, std::string* what = nullptr) {
  try {
    parse_config(yaml);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

bool has_check(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return true;
  return false;
}

}  // namespace

TEST_CASE("nested and dotted keys are the same key") {
  const ScenarioConfig a = parse_config("slip:\n  m: 2.0\n  k: 5000\n");
  const ScenarioConfig b = parse_config("slip.m: 2.0\nslip.k: 5000\n");
  CHECK(a.slip.m == 2.0);
  CHECK(b.slip.m == 2.0);
  CHECK(a.slip.k == b.slip.k);
  const ScenarioConfig empty = parse_config("");
  CHECK(empty.kind == ScenarioKind::Hop);
}

TEST_CASE("unknown and duplicate keys are config errors naming the key") {
  std::string what;
  CHECK(kind_of("slip:\n  mass: 2.0\n", &what) == ErrorKind::ConfigError);
  CHECK(what.find("slip.mass") != std::string::npos);
  CHECK(kind_of("slip:\n  m: 2.0\nslip.m: 3.0\n", &what) == ErrorKind::ConfigError);
  CHECK(what.find("slip.m") != std::string::npos);
  CHECK(kind_of("scenario:\n  kind: dance\n", &what) == ErrorKind::ConfigError);
  CHECK(what.find("scenario.kind") != std::string::npos);
  CHECK(kind_of("scenario.hops: 0\n", &what) == ErrorKind::ConfigError);
  CHECK(kind_of("[1, 2]\n") == ErrorKind::ConfigError);
  CHECK(kind_of("a: [\n") == ErrorKind::ConfigError);
}

TEST_CASE("dump and parse round trip") {
  ScenarioConfig c;
  c.kind = ScenarioKind::Push;
  c.model = ModelKind::PlanarRobot;
  c.xdot_des = 0.3;
  c.apex = 0.45;
  c.start_apex = 0.6;
  c.seed = 1234567890123ULL;
  c.slip.k = 4000.0 / 3.0;
  c.design.twr = {0.1, 0.7};
  c.push = PushSpec{};
  c.push->force_x = -10.0;
  c.push->after_apex = 5;
  const ScenarioConfig back = parse_config(dump_config(c));
  CHECK(back.kind == c.kind);
  CHECK(back.model == c.model);
  CHECK(back.xdot_des == c.xdot_des);
  CHECK(back.start_apex == c.start_apex);
  CHECK_FALSE(back.start_xdot.has_value());
  CHECK(back.seed == c.seed);
  CHECK(back.slip.k == c.slip.k);
  CHECK(back.design.twr == c.design.twr);
  REQUIRE(back.push.has_value());
  CHECK(back.push->force_x == -10.0);
  CHECK(back.push->after_apex == 5);
  CHECK(dump_config(back) == dump_config(c));
}

TEST_CASE("push keys enable the push") {
  CHECK(kind_of("scenario.kind: push\n") == ErrorKind::ConfigError);
  CHECK_FALSE(parse_config("scenario.kind: hop\n").push.has_value());
  const ScenarioConfig c = parse_config("push:\n  force: 7\n");
  REQUIRE(c.push.has_value());
  CHECK(c.push->force_x == 7.0);
  CHECK(c.push->duration == 0.1);
}

TEST_CASE("resolved controller") {
  ScenarioConfig c = parse_config("ctrl:\n  Ft_min: 15.25225\n  E_d: 10.2\nslip.m: 2.5\n");
  const HopControllerConfig hc = c.resolved_controller();
  CHECK(hc.energy.mass == 2.5);
  CHECK(hc.energy.g_e == doctest::Approx(9.81 - 15.25225 / 2.5));
  CHECK(hc.energy.E_d == 10.2);
  CHECK(hc.energy.E_d / (hc.energy.mass * hc.energy.g_e) == doctest::Approx(1.1).epsilon(1e-4));

  c = parse_config("scenario.apex: 0.5\n");
  const HopControllerConfig h2 = c.resolved_controller();
  CHECK(h2.energy.E_d / (h2.energy.mass * h2.energy.g_e) == doctest::Approx(0.5));

  c = parse_config("scenario.model: planar_robot\nrobot.twr: 0.5\nctrl.Ft_max: 1000\n");
  CHECK(c.resolved_controller().energy.F_max == doctest::Approx(0.5 * c.model_mass() * 9.81));
}

TEST_CASE("empty result has no report") {
  ScenarioResult r;
  try {
    report_text(r);
    FAIL("expected EmptyRun");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyRun);
  }
}

TEST_CASE("checks json") {
  const std::string j = checks_json({make_check("a", 0.5, "<=", 1.0), make_check("b", 2.0, "<=", 1.0)});
  CHECK(j.find("\"name\": \"a\"") != std::string::npos);
  CHECK(j.find("\"pass\": false") != std::string::npos);
  CHECK(make_check("x", 3.0, ">=", 2.0).pass);
  CHECK_FALSE(make_check("x", std::nan(""), "<=", 2.0).pass);
}

TEST_CASE("hop scenario artifacts") {
  ScenarioConfig c;
  c.hops = 6;
  c.check.window = 3;
  c.check.settle_max = 3;
  const ScenarioResult r = run_scenario(c);
  CHECK(r.apexes.size() == 6);
  CHECK_FALSE(r.failure_kind.has_value());
  CHECK(has_check(r, "stance_grf_min"));
  const std::string traj = trajectory_csv(r), ev = events_csv(r);
  CHECK(traj.rfind("# schema: trajectory v1\n", 0) == 0);
  CHECK(ev.rfind("# schema: events v1\n", 0) == 0);
  CHECK(ev.find("apex") != std::string::npos);
  CHECK(report_text(r).find("apex") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "hop_test_artifacts";
  std::filesystem::remove_all(dir);
  const auto files = write_artifacts(r, dir.string());
  for (const char* f : {"trajectory.csv", "events.csv", "report.txt", "checks.json"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(files.size() >= 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gait file is consumed and checked") {
  ScenarioConfig c;
  c.kind = ScenarioKind::GaitSearch;
  const Gait g = run_gait_search(c);
  const auto path = std::filesystem::temp_directory_path() / "hop_test_scenario_gait.json";
  save_gait(g, path.string());

  ScenarioConfig hop;
  hop.hops = 3;
  hop.check.window = 2;
  hop.check.settle_max = 1;
  hop.gait_file = path.string();
  const ScenarioResult r = run_scenario(hop);
  REQUIRE(r.gait.has_value());
  CHECK(r.gait->u_star == g.u_star);

  hop.slip.k = 3000.0;
  try {
    run_scenario(hop);
    FAIL("expected GaitMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GaitMismatch);
  }
  std::filesystem::remove(path);
}

TEST_CASE("numerical failure is recorded, not thrown") {
  ScenarioConfig c;
  c.apex = 3.0;
  c.hops = 3;
  const ScenarioResult r = run_scenario(c);
  CHECK(r.failure_kind.has_value());
  CHECK_FALSE(r.passed());
  CHECK(has_check(r, "run_completed"));
}

TEST_CASE("3-D diagonal push recovers in both planes") {
  ScenarioConfig c;
  c.kind = ScenarioKind::Push;
  c.model = ModelKind::Slip3D;
  c.hops = 10;
  c.push = PushSpec{};
  c.push->force_x = 7.0;
  c.push->force_y = 7.0;
  c.push->after_apex = 4;
  const ScenarioResult r = run_scenario(c);
  REQUIRE_FALSE(r.failure_kind.has_value());
  int first = -1;
  for (std::size_t k = 0; k < r.apexes.size(); ++k) {
    const ApexRecord& a = r.apexes[k];
    if (a.t <= r.push_end) continue;
    const bool ok = std::abs(a.xdot - c.xdot_des) <= c.check.recovery_tol &&
                    std::abs(a.ydot - c.ydot_des) <= c.check.recovery_tol;
    if (ok && first < 0) first = static_cast<int>(k);
    if (!ok) first = -1;
  }
  int pushed = 0;
  while (r.apexes[pushed].t <= r.push_end) ++pushed;
  REQUIRE(first >= 0);
  CHECK(first - pushed + 1 <= 2);
}
