#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/errors.hpp"
#include "hop/hybrid.hpp"
#include "hop/slip.hpp"

#include <cmath>

using namespace hop;

namespace {

// Vertical point mass under gravity; only the apex guard.
class Ballistic final : public HybridModel {
 public:
  int dof() const override { return 1; }
  Eigen::VectorXd acceleration(const HybridState&, const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Constant(1, -9.81);
  }
  double guard(EventKind, const HybridState& s, const Eigen::VectorXd&) const override { return s.v[0]; }
  std::vector<EventKind> guards(Phase) const override { return {EventKind::Apex}; }
  HybridState reset(EventKind, const HybridState& s, const Eigen::VectorXd&) const override { return s; }
};

Controller constant(Eigen::VectorXd u, std::vector<double>* calls = nullptr) {
  return {[u, calls](const HybridState& s) {
            if (calls) calls->push_back(s.t);
            return ControlSample{u, {}};
          },
          nullptr};
}

HybridState point(double z, double zdot) {
  HybridState s;
  s.q = Eigen::VectorXd::Constant(1, z);
  s.v = Eigen::VectorXd::Constant(1, zdot);
  return s;
}

}  // namespace

TEST_CASE("ballistic apex matches the parabola") {
  const auto [traj, ev] = integrate_until_event(Ballistic{}, point(1.0, 1.0), constant(Eigen::VectorXd::Zero(1)),
                                                {EventKind::Apex}, 5.0);
  REQUIRE(ev);
  CHECK(ev->kind == EventKind::Apex);
  CHECK(ev->t == doctest::Approx(1.0 / 9.81).epsilon(1e-9));
  CHECK(ev->state_after.q[0] == doctest::Approx(1.0 + 1.0 / (2 * 9.81)).epsilon(1e-9));
  CHECK(ev->state_after.q[0] == doctest::Approx(1.0510).epsilon(1e-4));
}

TEST_CASE("samples are strictly increasing and control is held on a 200 Hz grid") {
  std::vector<double> calls;
  const auto [traj, ev] = integrate_until_event(Ballistic{}, point(0.0, 2.0), constant(Eigen::VectorXd::Zero(1), &calls),
                                                {EventKind::Apex}, 5.0);
  REQUIRE(traj.samples.size() > 2);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  REQUIRE(calls.size() > 10);
  for (double t : calls) CHECK(std::abs(t / 0.005 - std::round(t / 0.005)) < 1e-9);
}

TEST_CASE("time limit without an event") {
  const auto [traj, ev] =
      integrate_until_event(Ballistic{}, point(0.0, 5.0), constant(Eigen::VectorXd::Zero(1)), {EventKind::Apex}, 0.1);
  CHECK_FALSE(ev);
  CHECK(traj.samples.back().t == doctest::Approx(0.1));
}

TEST_CASE("foot below the ground at the start is rejected") {
  SlipParams p;
  const SlipModel model(p);
  const HybridState s = SlipModel::apex_state(0.0, 0.5 * p.r0, 0.0);
  const Eigen::VectorXd u = slip_input::make(0.0, 0.0, 0.0, 0.0, 0.0);
  try {
    integrate_until_event(model, s, constant(u), {EventKind::Touchdown}, 1.0);
    FAIL("expected InvalidInitialState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInitialState);
  }
}

TEST_CASE("SLIP drop touches down at the free-fall time") {
  SlipParams p;
  p.r0 = 0.8;
  const SlipModel model(p);
  HybridState s = SlipModel::apex_state(0.0, 1.0, 0.0);
  s.v[1] = -1e-12;  // start just past the apex
  const Eigen::VectorXd u = slip_input::make(0.0, 0.0, 0.0, 0.0, 0.0);
  const auto [traj, ev] = integrate_until_event(model, s, constant(u), {EventKind::Touchdown}, 2.0);
  REQUIRE(ev);
  CHECK(ev->kind == EventKind::Touchdown);
  CHECK(std::abs(ev->t - std::sqrt(2 * 0.2 / 9.81)) < 1e-6);
  CHECK(ev->state_before.q[1] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(ev->state_after.phase == Phase::Stance);
}

TEST_CASE("simulate_hops rejects zero steps") {
  try {
    simulate_hops(Ballistic{}, point(0.0, 1.0), constant(Eigen::VectorXd::Zero(1)), 0, 1.0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("unpowered damped SLIP loses height every hop") {
  SlipParams p;
  const SlipModel model(p);
  const Eigen::VectorXd u = slip_input::make(0.0, 0.0, 0.0, 0.0, 0.0);
  const Trajectory traj = simulate_hops(model, SlipModel::apex_state(0.0, 0.6, 0.0), constant(u), 4, 10.0);
  std::vector<double> apex;
  for (const auto& e : traj.events)
    if (e.kind == EventKind::Apex) apex.push_back(e.state_after.q[1]);
  REQUIRE(apex.size() == 4);
  for (std::size_t i = 1; i < apex.size(); ++i) CHECK(apex[i] < apex[i - 1]);
  CHECK(apex.front() < 0.6);
}

TEST_CASE("touchdown and liftoff alternate with the phase tags") {
  SlipParams p;
  const SlipModel model(p);
  const Eigen::VectorXd u = slip_input::make(0.0, 0.0, 0.0, 0.0, 0.0);
  const Trajectory traj = simulate_hops(model, SlipModel::apex_state(0.0, 0.6, 0.0), constant(u), 3, 10.0);
  Phase phase = Phase::Aerial;
  for (const auto& e : traj.events) {
    if (e.kind == EventKind::Touchdown) {
      CHECK(phase == Phase::Aerial);
      phase = Phase::Stance;
    } else if (e.kind == EventKind::Liftoff) {
      CHECK(phase == Phase::Stance);
      phase = Phase::Aerial;
    }
    CHECK(e.state_after.phase == phase);
  }
  for (const auto& e : traj.events) {
    if (e.kind != EventKind::Liftoff) continue;
    // Liftoff fires where the spring returns to its natural length.
    CHECK(std::abs(model.compression(e.state_before)) < 1e-8);
  }
}
