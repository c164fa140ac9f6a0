#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/errors.hpp"
#include "hop/slip.hpp"

#include <cmath>
#include <random>

using namespace hop;

TEST_CASE("spring force") {
  SlipParams p;
  CHECK(spring_force(0.0, 0.0, p) == 0.0);
  CHECK(spring_force(0.01, 0.0, p) == doctest::Approx(48.485));
  CHECK(spring_force(0.001, -1.0, p) == 0.0);
}

TEST_CASE("aerial derivative") {
  SlipParams p;
  const Eigen::Vector4d s(0.0, 1.0, 0.3, 0.0);
  Eigen::Vector4d d = slip_aerial_derivative<double>(s, 0.0, 0.2, p);
  CHECK(d[0] == 0.3);
  CHECK(d[2] == 0.0);
  CHECK(d[3] == doctest::Approx(-9.81));
  d = slip_aerial_derivative<double>(s, p.m * p.g, 0.0, p);
  CHECK(d[2] == 0.0);
  CHECK(std::abs(d[3]) < 1e-12);
  d = slip_aerial_derivative<double>(s, 10.0, 0.1, p);
  CHECK(d[2] == doctest::Approx(-0.3993).epsilon(1e-4));
  CHECK(d[3] == doctest::Approx(-5.8300).epsilon(1e-4));
}

TEST_CASE("stance static equilibrium") {
  SlipParams p;
  const double r = p.r0 - p.m * p.g / p.k;
  const Eigen::Vector4d d = slip_stance_derivative(Eigen::Vector4d(r, 0.0, 0.0, 0.0), 0.0, p);
  CHECK(d.norm() < 1e-12);
}

TEST_CASE("stance acceleration matches a Cartesian force balance") {
  SlipParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = p.r0 - 0.04 - 0.04 * U(rng), th = 0.4 * U(rng), rd = U(rng), thd = 2.0 * U(rng);
    const double thrust = 10.0 + 10.0 * U(rng);
    const Eigen::Vector4d polar(r, th, rd, thd);
    const Eigen::Vector2d a = polar_acceleration(polar, slip_stance_derivative(polar, thrust, p));

    // Foot at the origin, COM at r*(-sin th, cos th); force along foot->COM.
    const Eigen::Vector2d u(-std::sin(th), std::cos(th));
    const double spring = std::max(0.0, p.k * (p.r0 - r) + p.d * (-rd));
    const Eigen::Vector2d expect = (thrust + spring) / p.m * u - Eigen::Vector2d(0.0, p.g);
    CHECK((a - expect).norm() < 1e-10);
  }
}

TEST_CASE("angular momentum about the foot changes at the gravity moment") {
  SlipParams p;
  p.d = 0.0;
  const Eigen::Vector4d polar(0.28, 0.2, 0.3, -1.1);
  const Eigen::Vector4d cart = to_cartesian(polar, Eigen::Vector2d::Zero());
  const Eigen::Vector2d a = polar_acceleration(polar, slip_stance_derivative(polar, 0.0, p));
  // L = m (x zdot - z xdot); dL/dt = m (x zddot - z xddot).
  const double dL = p.m * (cart[0] * a[1] - cart[1] * a[0]);
  const double moment = -cart[0] * p.m * p.g;
  CHECK(dL == doctest::Approx(moment).epsilon(1e-12));
  CHECK(moment == doctest::Approx(p.m * p.g * 0.28 * std::sin(0.2)));
}

TEST_CASE("polar and Cartesian conversions invert each other") {
  const Eigen::Vector2d foot(0.7, 0.12);
  const Eigen::Vector4d cart(0.65, 0.4, 0.8, -1.5);
  const Eigen::Vector4d back = to_cartesian(to_polar(cart, foot), foot);
  CHECK((back - cart).norm() < 1e-12);
}

TEST_CASE("swing trajectory") {
  const SwingTrajectory s = make_swing(-0.2, 0.1, 0.4);
  CHECK(swing_angle(s, 0.0) == doctest::Approx(-0.2));
  CHECK(swing_angle(s, 0.4) == doctest::Approx(0.1));
  CHECK(swing_rate(s, 0.0) == doctest::Approx(0.0));
  CHECK(swing_rate(s, 0.4) == doctest::Approx(0.0));
  CHECK(swing_angle(s, 1.0) == doctest::Approx(0.1));

  SwingTrajectory linear;
  linear.control_points = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  linear.duration = 2.0;
  CHECK(swing_angle(linear, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("vertical energy") {
  CHECK(vertical_energy(1.1, 0.0, 2.5, 3.7091) == doctest::Approx(10.2).epsilon(1e-3));
  CHECK(vertical_energy(0.0, 0.0, 2.5, 9.81) == 0.0);
  CHECK(vertical_energy(0.0, 2.0, 2.5, 9.81) == doctest::Approx(5.0));
}

TEST_CASE("flight energy is conserved without thrust") {
  SlipParams p;
  const SlipModel model(p);
  HybridState s = SlipModel::apex_state(0.0, 0.6, 0.4);
  const Eigen::VectorXd u = slip_input::make(0.0, 0.1, 0.1, 0.0, 0.0);
  const double e0 = model.mechanical_energy(s);
  s = integrate_free(model, s, u, 0.2);
  CHECK(model.mechanical_energy(s) == doctest::Approx(e0).epsilon(1e-9));
  CHECK(s.q[1] == doctest::Approx(0.6 - 0.5 * 9.81 * 0.04).epsilon(1e-9));
}

TEST_CASE("bottoming out the leg is an error") {
  SlipParams p;
  try {
    slip_stance_derivative(Eigen::Vector4d(p.r_min() - 1e-3, 0.0, -1.0, 0.0), 0.0, p);
    FAIL("expected LegFullyCompressed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LegFullyCompressed);
  }
}

TEST_CASE("3-D leg direction reduces to the planar angle") {
  const Eigen::Vector3d d = Slip3dModel::leg_direction(0.2, 0.0);
  CHECK(d.norm() == doctest::Approx(1.0));
  CHECK(d[1] == 0.0);
  CHECK(std::atan2(d[0], -d[2]) == doctest::Approx(0.2));
}
