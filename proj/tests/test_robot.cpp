#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hop/errors.hpp"
#include "hop/planar_robot.hpp"
#include "hop/slip.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace hop;

namespace {

HybridState robot_state(Phase phase, const Eigen::Vector4d& q, const Eigen::Vector4d& v) {
  HybridState s;
  s.phase = phase;
  s.q = q;
  s.v = v;
  return s;
}

// Lower-leg point mass and its Jacobian, written out for the oracle.
Eigen::Vector2d leg_point(const Eigen::Vector4d& q, const RobotParams& p) {
  const double l = p.attach_offset + p.r0 - p.leg_com_from_foot - q[3];
  return {q[0] + l * std::sin(q[2]), q[1] - l * std::cos(q[2])};
}

Eigen::Matrix<double, 2, 4> leg_jacobian(const Eigen::Vector4d& q, const RobotParams& p) {
  const double l = p.attach_offset + p.r0 - p.leg_com_from_foot - q[3];
  Eigen::Matrix<double, 2, 4> J;
  J << 1, 0, l * std::cos(q[2]), -std::sin(q[2]), 0, 1, l * std::sin(q[2]), std::cos(q[2]);
  return J;
}

double kinetic(const Eigen::Vector4d& q, const Eigen::Vector4d& v, const RobotParams& p) {
  const Eigen::Vector2d vl = leg_jacobian(q, p) * v;
  return 0.5 * p.m_body * (v[0] * v[0] + v[1] * v[1]) + 0.5 * p.I_body * v[2] * v[2] + 0.5 * p.m_leg * vl.squaredNorm();
}

double potential(const Eigen::Vector4d& q, const RobotParams& p) {
  return p.g * (p.m_body * q[1] + p.m_leg * leg_point(q, p)[1]) + 0.5 * p.k_s * q[3] * q[3];
}

Eigen::Vector4d momentum(const Eigen::Vector4d& q, const Eigen::Vector4d& v, const RobotParams& p) {
  const Eigen::Matrix<double, 2, 4> J = leg_jacobian(q, p);
  Eigen::Vector4d out(p.m_body * v[0], p.m_body * v[1], p.I_body * v[2], 0.0);
  return out + p.m_leg * J.transpose() * (J * v);
}

/// Accelerations from Lagrange's equations with every derivative taken numerically.
Eigen::Vector4d lagrange_oracle(const Eigen::Vector4d& q, const Eigen::Vector4d& v, double thrust, double moment,
                                const RobotParams& p) {
  Eigen::Matrix4d M;
  const double hv = 1e-3;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector4d dv = hv * Eigen::Vector4d::Unit(j);
    M.col(j) = (momentum(q, v + dv, p) - momentum(q, v - dv, p)) / (2 * hv);
  }
  const double h = 1e-5;
  const Eigen::Vector4d dp_dt_q = (momentum(q + h * v, v, p) - momentum(q - h * v, v, p)) / (2 * h);
  Eigen::Vector4d dL;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector4d dq = 1e-6 * Eigen::Vector4d::Unit(j);
    dL[j] = (kinetic(q + dq, v, p) - potential(q + dq, p) - kinetic(q - dq, v, p) + potential(q - dq, p)) / 2e-6;
  }
  const Eigen::Vector2d up(-std::sin(q[2]), std::cos(q[2]));
  const Eigen::Vector4d Q(thrust * up[0], thrust * up[1], moment, -p.d_s * v[3]);
  return M.ldlt().solve(Q + dL - dp_dt_q);
}

}  // namespace

TEST_CASE("free fall without thrust") {
  RobotParams p;
  p.tau_min = 0.0;
  const HybridState s = robot_state(Phase::Aerial, Eigen::Vector4d(0, 1, 0, 0), Eigen::Vector4d::Zero());
  const Eigen::Vector4d a = aerial_dynamics(s, {0.0, 0.0}, p);
  CHECK((a - Eigen::Vector4d(0, -p.g, 0, 0)).norm() < 1e-12);
}

TEST_CASE("hover at level attitude") {
  RobotParams p;
  p.twr = 1.0;
  const HybridState s = robot_state(Phase::Aerial, Eigen::Vector4d(0, 1, 0, 0), Eigen::Vector4d::Zero());
  const Eigen::Vector4d a = aerial_dynamics(s, {p.mass() * p.g, 0.0}, p);
  CHECK(std::abs(a[1]) < 1e-9);
  CHECK(std::abs(a[0]) < 1e-12);
}

TEST_CASE("mass matrix is the Hessian of the kinetic energy") {
  RobotParams p;
  p.leg_com_from_foot = 0.03;
  const Eigen::Vector4d q(0.1, 0.8, 0.3, 0.02);
  const Eigen::Matrix4d M = mass_matrix(q, p);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      const double h = 1e-3;
      const Eigen::Vector4d a = h * Eigen::Vector4d::Unit(j), b = h * Eigen::Vector4d::Unit(k);
      const Eigen::Vector4d v = Eigen::Vector4d::Zero();
      const double d2 = (kinetic(q, v + a + b, p) - kinetic(q, v + a - b, p) - kinetic(q, v - a + b, p) +
                         kinetic(q, v - a - b, p)) /
                        (4 * h * h);
      CHECK(M(j, k) == doctest::Approx(d2).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("aerial dynamics agree with a finite-difference Lagrangian") {
  RobotParams p;
  p.leg_com_from_foot = 0.02;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector4d q(U(rng), 1.0 + 0.5 * U(rng), 0.5 * U(rng), 0.03 + 0.02 * U(rng));
    const Eigen::Vector4d v(U(rng), 2.0 * U(rng), 2.0 * U(rng), 0.5 * U(rng));
    const ControlCommand cmd{10.0 + 8.0 * U(rng), 0.3 * U(rng)};
    const HybridState s = robot_state(Phase::Aerial, q, v);
    const double moment = attitude_moment(q[2], v[2], cmd.pitch_des, p);
    const double thrust = realized_thrust(cmd.F_t, moment, p);
    const Eigen::Vector4d a = aerial_dynamics(s, cmd, p);
    const Eigen::Vector4d oracle = lagrange_oracle(q, v, thrust, moment, p);
    CHECK((a - oracle).norm() < 1e-6);
  }
}

namespace {

HybridState stance_state(double pitch, double s, double pitch_rate, double s_rate, const RobotParams& p) {
  const double l = p.leg_length() - s;
  const Eigen::Vector2d e(std::sin(pitch), -std::cos(pitch)), ep(std::cos(pitch), std::sin(pitch));
  const Eigen::Vector2d body = -l * e;  // foot at the origin
  const Eigen::Vector2d vb = s_rate * e - l * ep * pitch_rate;
  HybridState st = robot_state(Phase::Stance, Eigen::Vector4d(body[0], body[1], pitch, s),
                               Eigen::Vector4d(vb[0], vb[1], pitch_rate, s_rate));
  st.contact = Eigen::Vector2d::Zero();
  return st;
}

}  // namespace

TEST_CASE("stance statics") {
  RobotParams p;
  p.tau_min = 0.0;
  // The lower leg sits on the ground, so the spring carries the body alone.
  const HybridState s = stance_state(0.0, p.m_body * p.g / p.k_s, 0.0, 0.0, p);
  const StanceResult r = stance_dynamics(s, {0.0, 0.0}, p);
  CHECK(r.qdd.norm() < 1e-9);
  CHECK(r.grf[1] == doctest::Approx(p.mass() * p.g));
  CHECK(std::abs(r.grf[0]) < 1e-9);
}

TEST_CASE("stance accelerations keep the foot pinned") {
  RobotParams p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const HybridState s = stance_state(0.4 * U(rng), 0.04 + 0.03 * U(rng), 2.0 * U(rng), U(rng), p);
    const StanceResult r = stance_dynamics(s, {10.0 + 5.0 * U(rng), 0.0}, p);
    const RobotKinematics kin = robot_kinematics(s.q, s.v, p);
    CHECK((kin.J_foot * r.qdd + kin.foot_bias).norm() < 1e-8);
  }
}

TEST_CASE("stance COM acceleration approaches the SLIP as leg mass and inertia vanish") {
  RobotParams p;
  p.m_leg = 1e-4;
  p.I_body = 1e-6;
  p.tau_min = 0.0;
  SlipParams sp;
  sp.m = p.mass();
  sp.k = p.k_s;
  sp.d = p.d_s;
  sp.r0 = p.leg_length();
  sp.max_travel = p.max_travel;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const HybridState s = stance_state(0.3 * U(rng), 0.04 + 0.02 * U(rng), 1.5 * U(rng), 0.5 * U(rng), p);
    const double thrust = 8.0 + 4.0 * U(rng);
    const StanceResult r = stance_dynamics(s, {thrust, 0.0}, p);
    const RobotKinematics kin = robot_kinematics(s.q, s.v, p);
    const Eigen::Vector2d a_com =
        (p.m_body * r.qdd.head<2>() + p.m_leg * (kin.J_leg * r.qdd + kin.leg_bias)) / p.mass();

    const Eigen::Vector2d c = com_position(s, p), cv = com_velocity(s, p);
    const Eigen::Vector4d polar = to_polar(Eigen::Vector4d(c[0], c[1], cv[0], cv[1]), Eigen::Vector2d::Zero());
    const Eigen::Vector2d a_slip = polar_acceleration(polar, slip_stance_derivative(polar, thrust, sp));
    CHECK((a_com - a_slip).norm() <= 0.05 * a_slip.norm() + 1e-6);
  }
}

TEST_CASE("impact map") {
  RobotParams p;
  SUBCASE("no impulse when the foot is already at rest") {
    HybridState s = stance_state(0.2, 0.0, 0.5, 0.0, p);
    s.phase = Phase::Aerial;
    const ImpactResult r = impact_map(s, p);
    CHECK((r.post.v - s.v).norm() < 1e-10);
    CHECK(r.impulse.norm() < 1e-10);
  }
  SUBCASE("vertical drop loses kinetic energy") {
    const HybridState s = robot_state(Phase::Aerial, Eigen::Vector4d(0, p.leg_length(), 0, 0),
                                      Eigen::Vector4d(0, -2.0, 0, 0));
    const ImpactResult r = impact_map(s, p);
    CHECK(kinetic_energy(r.post, p) < kinetic_energy(s, p));
    const RobotKinematics kin = robot_kinematics(r.post.q, r.post.v, p);
    CHECK((kin.J_foot * r.post.v.head<4>()).norm() < 1e-10);
    CHECK(r.post.q == s.q);
    CHECK(r.impulse[1] > 0.0);
  }
  SUBCASE("massless foot loses nothing when moving along the leg") {
    // Only the spring travel is massless, so a tangential foot slip is still arrested.
    p.m_leg = 1e-7;
    const Eigen::Vector4d q(0, p.leg_length() * std::cos(0.2), 0.2, 0.01);
    const RobotKinematics kin = robot_kinematics(q, Eigen::Vector4d::Zero(), p);
    const Eigen::Vector2d axis = (kin.foot - q.head<2>()).normalized();
    const HybridState s = robot_state(Phase::Aerial, q, Eigen::Vector4d(2.0 * axis[0], 2.0 * axis[1], 0.0, 0.0));
    const ImpactResult r = impact_map(s, p);
    const double before = kinetic_energy(s, p);
    CHECK((before - kinetic_energy(r.post, p)) / before < 1e-5);
  }
}

TEST_CASE("thrust bounds") {
  RobotParams p;
  p.twr = 1.0;
  const ThrustBounds zero = thrust_bounds(Eigen::Vector3d::Zero(), p);
  CHECK(zero.F_min == doctest::Approx(4 * p.k_t * p.tau_min));

  RobotParams capped;
  capped.twr = 22.0 / (2.5 * 9.81);
  CHECK(thrust_bounds(Eigen::Vector3d::Zero(), capped).F_max == doctest::Approx(22.0));

  CHECK_THROWS_AS(thrust_bounds(Eigen::Vector3d(0, 100.0, 0), p), Error);
}

TEST_CASE("thrust bounds match vertex enumeration") {
  RobotParams p;
  p.twr = 1.0;
  const Eigen::Matrix<double, 3, 4> A = p.mixer();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 300; ++i) {
    const Eigen::Vector3d M(2.0 * U(rng), 2.0 * U(rng), 0.05 * U(rng));
    // Vertices of the 1-D feasible segment have one motor at a bound.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < 4; ++k) {
      for (double bound : {p.tau_min, p.tau_max}) {
        Eigen::Matrix4d K;
        K.topRows<3>() = A;
        K.row(3) = Eigen::RowVector4d::Unit(k);
        const Eigen::Vector4d tau = K.fullPivLu().solve(Eigen::Vector4d(M[0], M[1], M[2], bound));
        if ((tau.array() < p.tau_min - 1e-12).any() || (tau.array() > p.tau_max + 1e-12).any()) continue;
        lo = std::min(lo, p.k_t * tau.sum());
        hi = std::max(hi, p.k_t * tau.sum());
      }
    }
    if (!std::isfinite(lo)) {
      CHECK_THROWS_AS(thrust_bounds(M, p), Error);
      continue;
    }
    const ThrustBounds b = thrust_bounds(M, p);
    CHECK(b.F_min == doctest::Approx(lo).epsilon(1e-9));
    CHECK(b.F_max == doctest::Approx(std::min(hi, p.twr * p.mass() * p.g)).epsilon(1e-9));
    ++tested;
  }
  CHECK(tested > 50);
}

TEST_CASE("aerial state places the system COM") {
  RobotParams p;
  const PlanarRobotModel model(p);
  const HybridState s = model.aerial_state(0.3, 0.7, 0.5, 0.1);
  const Eigen::Vector2d c = com_position(s, p);
  CHECK(c[0] == doctest::Approx(0.3));
  CHECK(c[1] == doctest::Approx(0.7));
  CHECK(com_velocity(s, p)[0] == doctest::Approx(0.5));
}

TEST_CASE("tipping over is an error") {
  RobotParams p;
  const PlanarRobotModel model(p);
  const HybridState s = robot_state(Phase::Aerial, Eigen::Vector4d(0, 1, 1.7, 0), Eigen::Vector4d::Zero());
  try {
    model.validate(s);
    FAIL("expected FellOver");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FellOver);
  }
}
