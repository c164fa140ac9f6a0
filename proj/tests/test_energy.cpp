#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/energy_controller.hpp"
#include "hop/errors.hpp"
#include "hop/s2s.hpp"
#include "hop/slip.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace hop;

TEST_CASE("equivalent gravity") {
  CHECK(equivalent_gravity(0.0, 2.5, 9.81) == 9.81);
  CHECK(equivalent_gravity(2.5 * 9.81 / 2, 2.5, 9.81) == doctest::Approx(9.81 / 2));
  // 10.2 J at 1.1 m with 2.5 kg.
  const double g_e = 10.2 / (2.5 * 1.1);
  CHECK(g_e == doctest::Approx(3.7091).epsilon(1e-4));
  const double F_min = 2.5 * (9.81 - g_e);
  CHECK(F_min == doctest::Approx(15.252).epsilon(1e-4));
  CHECK(2.5 * equivalent_gravity(F_min, 2.5, 9.81) * 1.1 == doctest::Approx(10.2));
  CHECK_THROWS_AS(equivalent_gravity(2.5 * 9.81, 2.5, 9.81), Error);
}

TEST_CASE("CLF terms") {
  EnergyControllerConfig cfg;
  const ClfTerms zero = clf_terms(0.0, output_dynamics(1.0, 1.0, cfg), cfg);
  CHECK(zero.A == 0.0);
  CHECK(zero.b == 0.0);
  CHECK(zero.V == 0.0);
  // Excess energy while rising: more thrust would raise V.
  const ClfTerms up = clf_terms(2.0, output_dynamics(1.0, 1.0, cfg), cfg);
  CHECK(up.A > 0.0);
  CHECK(up.Vdot_target == doctest::Approx(-cfg.gamma * up.V));
  CHECK(cfg.P() * 2.0 * cfg.K_p == doctest::Approx(-cfg.Q));
}

TEST_CASE("QP at zero energy error holds the previous thrust") {
  EnergyControllerConfig cfg;
  cfg.F_min = 1.0;
  const ClfTerms clf = clf_terms(0.0, output_dynamics(0.7, 1.0, cfg), cfg);
  const QpSolution s = solve_energy_qp(clf, 7.0, cfg);
  CHECK(s.delta == 0.0);
  CHECK(s.F_t == 7.0);
  CHECK(solve_energy_qp(clf, 50.0, cfg).F_t == cfg.F_max);
}

TEST_CASE("QP clamps at the upper bound and reports the relaxation") {
  EnergyControllerConfig cfg;
  // Large deficit while rising: the CLF row asks for more than F_max.
  const ClfTerms clf = clf_terms(-20.0, output_dynamics(0.5, 1.0, cfg), cfg);
  REQUIRE(clf.b / clf.A > cfg.F_max);
  const QpSolution s = solve_energy_qp(clf, 5.0, cfg);
  CHECK(s.F_t == cfg.F_max);
  CHECK(s.delta != 0.0);
  CHECK(s.active_set == kUpperBound);
}

TEST_CASE("QP optimum matches a dense grid over (F, delta)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (QpVariant variant : {QpVariant::RelaxedEqualityQP, QpVariant::InequalityQP}) {
    for (int i = 0; i < 20; ++i) {
      EnergyControllerConfig cfg;
      cfg.variant = variant;
      cfg.p = 0.05 + U(rng);
      cfg.F_min = 2.0 * U(rng);
      cfg.F_max = cfg.F_min + 5.0 + 15.0 * U(rng);
      const double eta = -3.0 + 6.0 * U(rng), zdot = -2.0 + 4.0 * U(rng), F_prev = cfg.F_min + 3.0;
      const ClfTerms clf = clf_terms(eta, output_dynamics(zdot, 1.0, cfg), cfg);
      const QpSolution s = solve_energy_qp(clf, F_prev, cfg);

      // Box grid; constraint rows A F - b = delta (equality) or <= delta.
      double best = std::numeric_limits<double>::infinity();
      const int n = 1200;
      const double dmax = std::abs(clf.A) * cfg.F_max + std::abs(clf.b) + 1.0;
      for (int a = 0; a <= n; ++a) {
        const double F = cfg.F_min + (cfg.F_max - cfg.F_min) * a / n;
        const double r = clf.A * F - clf.b;
        if (variant == QpVariant::RelaxedEqualityQP) {
          best = std::min(best, qp_objective(F, r, F_prev, cfg));
          continue;
        }
        for (int b = 0; b <= n; ++b) {
          const double delta = dmax * b / n;
          if (r <= delta) {
            best = std::min(best, qp_objective(F, delta, F_prev, cfg));
            break;
          }
        }
      }
      CHECK(s.objective <= best + 1e-12);
      CHECK(best - s.objective <= 1e-2 * std::max(1.0, best));
      CHECK(s.F_t >= cfg.F_min);
      CHECK(s.F_t <= cfg.F_max);
    }
  }
}

TEST_CASE("p = 0 closed form equals the generic solve") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  EnergyControllerConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const ClfTerms clf = clf_terms(4.0 * U(rng), output_dynamics(2.0 * U(rng), 1.0, cfg), cfg);
    const double F_prev = 11.0 + 10.0 * U(rng);
    const QpSolution a = solve_energy_qp(clf, F_prev, cfg);
    const QpSolution b = solve_energy_qp_kkt(clf, F_prev, cfg);
    CHECK(std::abs(a.F_t - b.F_t) <= 1e-10);
  }
}

TEST_CASE("inconsistent bounds are rejected") {
  EnergyControllerConfig cfg;
  cfg.F_min = 30.0;
  try {
    solve_energy_qp(ClfTerms{}, 0.0, cfg);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("controller step at the desired apex") {
  EnergyControllerConfig cfg;
  cfg.F_min = 2.0;
  cfg.g_e = 9.81 - 2.0 / cfg.mass;
  cfg.E_d = energy_for_apex(0.5, cfg);
  const double z = cfg.E_d / (cfg.mass * cfg.g_e);
  const VerticalCommand c = vertical_controller_step(Phase::Aerial, z, 0.0, 1.0, cfg.F_min, cfg);
  CHECK(std::abs(c.eta) < 1e-12);
  CHECK(c.F_t == cfg.F_min);
  CHECK(vertical_controller_step(Phase::Stance, 0.2, -1.0, 1.0, 9.0, cfg).F_t == cfg.F_min);
}

TEST_CASE("excess energy at the thrust floor saturates") {
  EnergyControllerConfig cfg;
  cfg.E_d = energy_for_apex(0.5, cfg);
  const VerticalCommand c = vertical_controller_step(Phase::Aerial, 0.6, 0.5, 1.0, 0.0, cfg);
  CHECK(c.F_t == cfg.F_min);
  CHECK(c.qp.delta > 0.0);
  CHECK(c.qp.active_set == kLowerBound);
}

TEST_CASE("closed loop: V decays at the commanded rate at unconstrained samples") {
  SlipParams p;
  HopControllerConfig hc;
  hc.energy.mass = p.m;
  hc.energy.g_e = p.g;
  hc.energy.E_d = energy_for_apex(0.5, hc.energy);
  const SlipModel model(p);
  SlipHopController ctrl(p, hc, std::nullopt, 0.0);
  std::vector<std::pair<HybridState, ControlSample>> log;
  Controller inner = ctrl.bind();
  Controller rec{[&](const HybridState& s) {
                   log.emplace_back(s, inner.sample(s));
                   return log.back().second;
                 },
                 inner.on_event};
  // 20% energy deficit, starting on the way down.
  HybridState s0 = SlipModel::apex_state(0.0, 0.4, 0.0);
  s0.v[1] = -1e-9;
  simulate_hops(model, s0, rec, 3, 10.0);

  const auto& e = hc.energy;
  int checked = 0;
  for (const auto& [s, cs] : log) {
    if (s.phase != Phase::Aerial || cs.diag.active_set != kNoBound || std::abs(cs.diag.delta) > 1e-12) continue;
    const double c = std::cos(slip_input::leg_angle(cs.input, s.t));
    const ClfTerms clf = clf_terms(cs.diag.eta, output_dynamics(s.v[1], c, e), e);
    const double Vdot = clf.A * cs.input[slip_input::kThrust] + clf.drift;
    CHECK(std::abs(Vdot + e.gamma * clf.V) <= 1e-9 * std::max(1.0, e.gamma * clf.V));
    ++checked;
  }
  CHECK(checked > 5);
  // Energy error shrinks overall.
  CHECK(std::abs(log.back().second.diag.eta) < 0.05 * std::abs(log.front().second.diag.eta));
}
