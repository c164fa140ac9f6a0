#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/errors.hpp"
#include "hop/s2s.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace hop;

namespace {

HopControllerConfig slip_config(const SlipParams& p) {
  HopControllerConfig hc;
  hc.energy.mass = p.m;
  hc.energy.g_e = p.g;
  return hc;
}

const Gait& gait_05() {
  static const Gait g = [] {
    SlipParams p;
    return find_periodic_orbit(0.5, 0.5, p, slip_config(p));
  }();
  return g;
}

}  // namespace

TEST_CASE("deadbeat gain") {
  CHECK(deadbeat_gain(0.8, 0.05) == doctest::Approx(-16.0));
  CHECK(deadbeat_gain(0.0, 0.3) == 0.0);
  try {
    deadbeat_gain(1.0, 1e-9);
    FAIL("expected UncontrollableMap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UncontrollableMap);
  }
}

TEST_CASE("periodic orbit at 0.5 m/s") {
  const Gait& g = gait_05();
  CHECK(g.residual <= 1e-5);
  CHECK(g.B < 0.0);
  CHECK(std::abs(g.A + g.B * g.K) < 1e-12);
  CHECK(std::abs(g.A_estimates[0] - g.A_estimates[1]) <= 1e-4 * std::abs(g.A));
  const GaitContext ctx = context_of(g);
  CHECK(std::abs(return_map(g.xdot_star, g.u_star, ctx) - g.xdot_star) <= 1e-5);
}

TEST_CASE("in-place gait is symmetric") {
  SlipParams p;
  const Gait g = find_periodic_orbit(0.0, 0.5, p, slip_config(p));
  CHECK(std::abs(g.u_star) <= 1e-6);
  CHECK(std::abs(return_map(0.0, 0.0, context_of(g))) <= 1e-6);
}

TEST_CASE("one-step contraction with the deadbeat gain") {
  const Gait& g = gait_05();
  const GaitContext ctx = context_of(g);
  for (double e : {0.1, -0.1}) {
    const double next = return_map(g.xdot_star + e, g.u_star + g.K * e, ctx);
    CHECK(std::abs(next - g.xdot_star) <= 0.05 * std::abs(e));
  }
}

TEST_CASE("stepping controller") {
  const Gait& g = gait_05();
  CHECK(stepping_controller(g.xdot_star, g) == g.u_star);
  const double e = 0.05;
  CHECK(stepping_controller(g.xdot_star + 2 * e, g) - g.u_star ==
        doctest::Approx(2 * (stepping_controller(g.xdot_star + e, g) - g.u_star)));
  bool clamped = false;
  const double u = stepping_controller(g.xdot_star + 100.0 * (g.K > 0 ? 1 : -1), g, &clamped);
  CHECK(clamped);
  CHECK(u == doctest::Approx(g.leg_angle_limit));
}

TEST_CASE("decoupled 3-D stepping") {
  const Gait& sag = gait_05();
  SlipParams p;
  const Gait lat = find_periodic_orbit(0.0, 0.5, p, slip_config(p));
  const auto [pitch, roll] = decoupled_3d_step(sag.xdot_star, 0.0, sag, lat);
  CHECK(pitch == doctest::Approx(sag.u_star));
  CHECK(roll == doctest::Approx(lat.u_star));
  CHECK(std::abs(roll) < 1e-6);
  // Pure lateral motion uses the planar law in the roll plane.
  const auto [p2, r2] = decoupled_3d_step(0.0, 0.5, lat, sag);
  CHECK(std::abs(r2 - stepping_controller(0.5, sag)) < 1e-8);
  CHECK(std::abs(p2 - stepping_controller(0.0, lat)) < 1e-8);
}

TEST_CASE("one hop from the fixed point returns to it") {
  const Gait& g = gait_05();
  SlipParams p;
  HopControllerConfig hc = slip_config(p);
  hc.energy.E_d = g.E_d;
  SlipHopController ctrl(p, hc, g, g.u_star);
  const SlipModel model(p);
  simulate_hops(model, SlipModel::apex_state(0.0, 0.5, g.xdot_star), ctrl.bind(), 1, 5.0);
  REQUIRE(ctrl.apexes().size() == 1);
  CHECK(ctrl.apexes()[0].xdot == doctest::Approx(g.xdot_star).epsilon(1e-4));
  // Height is held by the energy loop, which leaves a small stance-loss residue.
  CHECK(ctrl.apexes()[0].height == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("error invariant estimate") {
  const Gait& g = gait_05();
  const InvariantEstimate zero = error_invariant_estimate(g, 0.0, 0.3, 7);
  CHECK(zero.bound == zero.remainder);
  const InvariantEstimate some = error_invariant_estimate(g, 0.02, 0.3, 7);
  CHECK(some.bound == doctest::Approx(some.remainder + 0.02));
  // Grid-sweep oracle for the remainder.
  const GaitContext ctx = context_of(g);
  double worst = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double e = -0.3 + 0.1 * i;
    bool clamped = false;
    const double u = stepping_controller(g.xdot_star + e, g, &clamped);
    if (clamped) continue;
    worst = std::max(worst, std::abs(return_map(g.xdot_star + e, u, ctx) - g.xdot_star));
  }
  CHECK(zero.remainder == doctest::Approx(worst).epsilon(1e-9));
}

TEST_CASE("apex beyond the leg's travel has no periodic orbit") {
  SlipParams p;
  try {
    find_periodic_orbit(0.5, 3.0, p, slip_config(p));
    FAIL("expected the search to fail");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::NoBracket || e.kind() == ErrorKind::NotConverged));
  }
}

TEST_CASE("gait file round trip and hash check") {
  const Gait& g = gait_05();
  const Gait back = gait_from_json(gait_to_json(g));
  CHECK(back.xdot_star == g.xdot_star);
  CHECK(back.u_star == g.u_star);
  CHECK(back.A == g.A);
  CHECK(back.B == g.B);
  CHECK(back.K == g.K);
  CHECK(back.params_hash == g.params_hash);

  const std::string path = (std::filesystem::temp_directory_path() / "hop_test_gait.json").string();
  save_gait(g, path);
  SlipParams p;
  const Gait loaded = load_gait(path, p, g.ctrl);
  CHECK(loaded.u_star == g.u_star);
  p.k = 5000.0;
  try {
    load_gait(path, p, g.ctrl);
    FAIL("expected GaitMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GaitMismatch);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(gait_from_json("{\"version\": 99}"), Error);
}
