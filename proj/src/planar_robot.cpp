#include "hop/planar_robot.hpp"

#include "hop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hop {

namespace {

constexpr int kX = 0, kZ = 1, kPitch = 2, kS = 3;

Eigen::Vector4d q_of(const HybridState& s) { return s.q.head<4>(); }
Eigen::Vector4d v_of(const HybridState& s) { return s.v.head<4>(); }

Eigen::Vector2d down_axis(double pitch) { return {std::sin(pitch), -std::cos(pitch)}; }
Eigen::Vector2d down_axis_d(double pitch) { return {std::cos(pitch), std::sin(pitch)}; }

// Point at distance `len` along the down axis: Jacobian and Jdot*qdot.
void point_on_leg(const Eigen::Vector4d& q, const Eigen::Vector4d& qd, double len, Eigen::Vector2d& pos,
                  Eigen::Matrix<double, 2, 4>& J, Eigen::Vector2d& bias) {
  const Eigen::Vector2d e = down_axis(q[kPitch]);
  const Eigen::Vector2d ep = down_axis_d(q[kPitch]);
  pos = Eigen::Vector2d(q[kX], q[kZ]) + len * e;
  J.setZero();
  J(0, 0) = 1.0;
  J(1, 1) = 1.0;
  J.col(kPitch) = len * ep;
  J.col(kS) = -e;
  bias = -2.0 * qd[kS] * qd[kPitch] * ep - len * qd[kPitch] * qd[kPitch] * e;
}

// Generalized forces excluding constraint forces, minus the velocity-product
// terms: returns tau - H(q, qdot).
Eigen::Vector4d generalized_forces(const Eigen::Vector4d& q, const Eigen::Vector4d& qd, double thrust,
                                   double moment, const Eigen::Vector3d& ext, const RobotParams& p) {
  const RobotKinematics kin = robot_kinematics(q, qd, p);
  Eigen::Vector4d tau = Eigen::Vector4d::Zero();
  const Eigen::Vector2d up(-std::sin(q[kPitch]), std::cos(q[kPitch]));
  const Eigen::Vector2d body_force = thrust * up + Eigen::Vector2d(0.0, -p.m_body * p.g) + Eigen::Vector2d(ext[0], ext[2]);
  tau[kX] += body_force[0];
  tau[kZ] += body_force[1];
  tau[kPitch] += moment;
  tau += kin.J_leg.transpose() * Eigen::Vector2d(0.0, -p.m_leg * p.g);
  tau[kS] -= p.k_s * q[kS] + p.d_s * qd[kS];
  tau -= p.m_leg * kin.J_leg.transpose() * kin.leg_bias;
  return tau;
}

Eigen::VectorXd solve_kkt(const Eigen::MatrixXd& K, const Eigen::VectorXd& rhs) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (lu.rank() < K.rows()) throw Error(ErrorKind::RankDeficientKKT, "KKT matrix is singular");
  return lu.solve(rhs);
}

}  // namespace

Eigen::Matrix<double, 3, 4> RobotParams::mixer() const {
  Eigen::Matrix<double, 3, 4> A;
  const double c = arm * k_t;
  A << -c, c, c, -c,   // roll
      c, -c, c, -c,    // pitch
      1, 1, -1, -1;    // yaw (reaction moments)
  return A;
}

void RobotParams::validate() const {
  std::ostringstream os;
  if (!(m_body > 0) || !(m_leg > 0) || !(I_body > 0)) os << "masses and inertia must be positive; ";
  if (!(tau_min < tau_max)) os << "tau_min must be below tau_max; ";
  if (!(twr > 0 && twr <= 1.0)) os << "twr must lie in (0, 1]; ";
  if (!(k_s > 0) || !(d_s >= 0) || !(r0 > 0) || !(max_travel > 0)) os << "spring parameters invalid; ";
  if (!(leg_com_from_foot >= 0) || !(attach_offset >= 0)) os << "leg geometry invalid; ";
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(mixer());
  if (lu.rank() < 3) os << "mixer must have full row rank; ";
  if (!os.str().empty()) throw Error(ErrorKind::InvalidConfig, os.str());
}

ThrustBounds thrust_bounds(const Eigen::Vector3d& M_b, const RobotParams& p) {
  const Eigen::Matrix<double, 3, 4> A = p.mixer();
  const Eigen::Vector4d tau_p = A.transpose() * (A * A.transpose()).ldlt().solve(M_b);
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(A);
  Eigen::Vector4d n = lu.kernel().col(0);
  if (n.sum() < 0) n = -n;

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-12;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(n[i]) < kEps) {
      if (tau_p[i] < p.tau_min - kEps || tau_p[i] > p.tau_max + kEps) lo = 1.0, hi = 0.0;
      continue;
    }
    const double a = (p.tau_min - tau_p[i]) / n[i];
    const double b = (p.tau_max - tau_p[i]) / n[i];
    lo = std::max(lo, std::min(a, b));
    hi = std::min(hi, std::max(a, b));
  }
  if (lo > hi + kEps) {
    std::ostringstream os;
    os << "moment (" << M_b.transpose() << ") is outside the mixer's reachable set";
    throw Error(ErrorKind::InfeasibleMoment, os.str());
  }
  hi = std::max(lo, hi);
  const double base = p.k_t * tau_p.sum();
  const double slope = p.k_t * n.sum();
  ThrustBounds out{base + slope * lo, base + slope * hi};
  out.F_max = std::min(out.F_max, p.twr * p.mass() * p.g);
  return out;
}

double max_pitch_moment(const RobotParams& p) {
  // Feasibility in the pitch moment is an interval symmetric about zero; bisect its edge.
  const auto feasible = [&](double m) {
    try {
      thrust_bounds(Eigen::Vector3d(0.0, m, 0.0), p);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  double lo = 0.0, hi = 4.0 * p.arm * p.k_t * (p.tau_max - p.tau_min) + 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

double attitude_moment(double pitch, double pitch_rate, double pitch_des, const RobotParams& p) {
  const double wn = 2.0 * std::numbers::pi * p.attitude_bandwidth_hz;
  // Pitch inertia about the system COM with the leg at rest length.
  const double lc = p.leg_length() - p.leg_com_from_foot;
  const double inertia = p.I_body + p.m_body * p.m_leg / p.mass() * lc * lc;
  const double m = inertia * (wn * wn * (pitch_des - pitch) - 2.0 * p.attitude_damping * wn * pitch_rate);
  const double lim = max_pitch_moment(p);
  return std::clamp(m, -lim, lim);
}

double realized_thrust(double F_cmd, double moment, const RobotParams& p) {
  const ThrustBounds b = thrust_bounds(Eigen::Vector3d(0.0, moment, 0.0), p);
  return std::clamp(F_cmd, b.F_min, std::max(b.F_min, b.F_max));
}

RobotKinematics robot_kinematics(const Eigen::Vector4d& q, const Eigen::Vector4d& qd, const RobotParams& p) {
  RobotKinematics k;
  const double foot_len = p.leg_length() - q[kS];
  point_on_leg(q, qd, foot_len, k.foot, k.J_foot, k.foot_bias);
  point_on_leg(q, qd, foot_len - p.leg_com_from_foot, k.leg, k.J_leg, k.leg_bias);
  return k;
}

Eigen::Matrix4d mass_matrix(const Eigen::Vector4d& q, const RobotParams& p) {
  const RobotKinematics kin = robot_kinematics(q, Eigen::Vector4d::Zero(), p);
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(kX, kX) = p.m_body;
  M(kZ, kZ) = p.m_body;
  M(kPitch, kPitch) = p.I_body;
  M += p.m_leg * kin.J_leg.transpose() * kin.J_leg;
  return M;
}

Eigen::Vector4d aerial_dynamics(const HybridState& state, const ControlCommand& cmd, const RobotParams& p,
                                const Eigen::Vector3d& external_force) {
  const Eigen::Vector4d q = q_of(state), qd = v_of(state);
  const double moment = attitude_moment(q[kPitch], qd[kPitch], cmd.pitch_des, p);
  const double thrust = realized_thrust(cmd.F_t, moment, p);
  const Eigen::Matrix4d M = mass_matrix(q, p);
  const Eigen::Vector4d tau = generalized_forces(q, qd, thrust, moment, external_force, p);
  Eigen::LDLT<Eigen::Matrix4d> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw Error(ErrorKind::SingularMassMatrix, "mass matrix is not positive definite");
  Eigen::Vector4d qdd = ldlt.solve(tau);

  // Extension stop: hold s = 0 while the free motion would pull the leg out.
  if (q[kS] <= 1e-12 && std::abs(qd[kS]) <= 1e-9 && qdd[kS] < 0.0) {
    Eigen::Matrix<double, 5, 5> K = Eigen::Matrix<double, 5, 5>::Zero();
    K.topLeftCorner<4, 4>() = M;
    K(kS, 4) = -1.0;
    K(4, kS) = 1.0;
    Eigen::Matrix<double, 5, 1> rhs;
    rhs << tau, 0.0;
    qdd = solve_kkt(K, rhs).head<4>();
  }
  return qdd;
}

StanceResult stance_dynamics(const HybridState& state, const ControlCommand& cmd, const RobotParams& p,
                             const Eigen::Vector3d& external_force) {
  const Eigen::Vector4d q = q_of(state), qd = v_of(state);
  const double thrust = realized_thrust(cmd.F_t, 0.0, p);
  const Eigen::Matrix4d M = mass_matrix(q, p);
  const Eigen::Vector4d tau = generalized_forces(q, qd, thrust, 0.0, external_force, p);
  const RobotKinematics kin = robot_kinematics(q, qd, p);

  Eigen::Vector2d stab = Eigen::Vector2d::Zero();
  if (state.contact.size() == 2 && p.baumgarte > 0.0) {
    const double a = p.baumgarte;
    stab = 2.0 * a * (kin.J_foot * qd) + a * a * (kin.foot - Eigen::Vector2d(state.contact[0], state.contact[1]));
  }

  Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
  K.topLeftCorner<4, 4>() = M;
  K.topRightCorner<4, 2>() = -kin.J_foot.transpose();
  K.bottomLeftCorner<2, 4>() = kin.J_foot;
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << tau, -kin.foot_bias - stab;
  const Eigen::VectorXd sol = solve_kkt(K, rhs);
  return {sol.head<4>(), sol.tail<2>()};
}

ImpactResult impact_map(const HybridState& pre, const RobotParams& p) {
  const Eigen::Vector4d q = q_of(pre), qd = v_of(pre);
  const Eigen::Matrix4d M = mass_matrix(q, p);
  const RobotKinematics kin = robot_kinematics(q, qd, p);
  Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
  K.topLeftCorner<4, 4>() = M;
  K.topRightCorner<4, 2>() = -kin.J_foot.transpose();
  K.bottomLeftCorner<2, 4>() = kin.J_foot;
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << M * qd, Eigen::Vector2d::Zero();
  const Eigen::VectorXd sol = solve_kkt(K, rhs);
  ImpactResult out;
  out.post = pre;
  out.post.phase = Phase::Stance;
  out.post.v = sol.head<4>();
  out.post.contact = kin.foot;
  out.impulse = sol.tail<2>();
  return out;
}

double kinetic_energy(const HybridState& s, const RobotParams& p) {
  const Eigen::Vector4d qd = v_of(s);
  return 0.5 * qd.dot(mass_matrix(q_of(s), p) * qd);
}

Eigen::Vector2d com_position(const HybridState& s, const RobotParams& p) {
  const RobotKinematics kin = robot_kinematics(q_of(s), v_of(s), p);
  return (p.m_body * Eigen::Vector2d(s.q[kX], s.q[kZ]) + p.m_leg * kin.leg) / p.mass();
}

Eigen::Vector2d com_velocity(const HybridState& s, const RobotParams& p) {
  const RobotKinematics kin = robot_kinematics(q_of(s), v_of(s), p);
  return (p.m_body * Eigen::Vector2d(s.v[kX], s.v[kZ]) + p.m_leg * kin.J_leg * v_of(s)) / p.mass();
}

// ---------------------------------------------------------------------------

PlanarRobotModel::PlanarRobotModel(RobotParams params, Environment env) : p_(params), env_(std::move(env)) {
  p_.validate();
}

HybridState PlanarRobotModel::aerial_state(double x_com, double z_com, double xdot, double pitch,
                                           double t) const {
  HybridState s;
  s.phase = Phase::Aerial;
  s.t = t;
  const double lc = p_.leg_length() - p_.leg_com_from_foot;
  const Eigen::Vector2d body = Eigen::Vector2d(x_com, z_com) - p_.m_leg / p_.mass() * lc * down_axis(pitch);
  s.q = Eigen::Vector4d(body[0], body[1], pitch, 0.0);
  s.v = Eigen::Vector4d(xdot, 0.0, 0.0, 0.0);
  return s;
}

double PlanarRobotModel::applied_thrust(const HybridState& s, const Eigen::VectorXd& input) const {
  const ControlCommand cmd = command_of(input);
  if (s.phase == Phase::Stance) return realized_thrust(cmd.F_t, 0.0, p_);
  return realized_thrust(cmd.F_t, attitude_moment(s.q[kPitch], s.v[kPitch], cmd.pitch_des, p_), p_);
}

Eigen::VectorXd PlanarRobotModel::acceleration(const HybridState& s, const Eigen::VectorXd& input) const {
  const Eigen::Vector3d ext = env_.external_force(s.t);
  if (s.phase == Phase::Aerial) return aerial_dynamics(s, command_of(input), p_, ext);
  if (s.q[kS] >= p_.max_travel) throw Error(ErrorKind::LegFullyCompressed, "spring reached its travel limit");
  return stance_dynamics(s, command_of(input), p_, ext).qdd;
}

double PlanarRobotModel::guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const {
  switch (kind) {
    case EventKind::Touchdown: {
      const RobotKinematics kin = robot_kinematics(q_of(s), v_of(s), p_);
      return kin.foot[1] - env_.terrain.height(kin.foot[0]);
    }
    case EventKind::Liftoff:
      return stance_dynamics(s, command_of(input), p_, env_.external_force(s.t)).grf[1];
    case EventKind::Apex:
      return com_velocity(s, p_)[1];
    case EventKind::LegStop:
      return s.q[kS];
  }
  return 1.0;
}

std::vector<EventKind> PlanarRobotModel::guards(Phase phase) const {
  if (phase == Phase::Aerial) return {EventKind::Touchdown, EventKind::Apex, EventKind::LegStop};
  return {EventKind::Liftoff};
}

HybridState PlanarRobotModel::reset(EventKind kind, const HybridState& s, const Eigen::VectorXd&) const {
  switch (kind) {
    case EventKind::Touchdown: {
      HybridState out = impact_map(s, p_).post;
      out.contact[1] = env_.terrain.height(out.contact[0]);
      return out;
    }
    case EventKind::Liftoff: {
      HybridState out = s;
      out.phase = Phase::Aerial;
      out.contact.resize(0);
      return out;
    }
    case EventKind::LegStop: {
      // Plastic stop: momentum-consistent velocity with sdot = 0.
      const Eigen::Matrix4d M = mass_matrix(q_of(s), p_);
      Eigen::Matrix<double, 5, 5> K = Eigen::Matrix<double, 5, 5>::Zero();
      K.topLeftCorner<4, 4>() = M;
      K(kS, 4) = -1.0;
      K(4, kS) = 1.0;
      Eigen::Matrix<double, 5, 1> rhs;
      rhs << M * v_of(s), 0.0;
      HybridState out = s;
      out.v = solve_kkt(K, rhs).head<4>();
      out.v[kS] = 0.0;
      out.q[kS] = 0.0;
      return out;
    }
    case EventKind::Apex:
      return s;
  }
  return s;
}

Eigen::VectorXd PlanarRobotModel::ground_reaction(const HybridState& s, const Eigen::VectorXd& input) const {
  if (s.phase != Phase::Stance) return Eigen::Vector2d::Zero();
  return stance_dynamics(s, command_of(input), p_, env_.external_force(s.t)).grf;
}

void PlanarRobotModel::validate(const HybridState& s) const {
  if (std::abs(s.q[kPitch]) > std::numbers::pi / 2) {
    std::ostringstream os;
    os << "pitch " << s.q[kPitch] << " rad exceeds +-pi/2 at t=" << s.t;
    throw Error(ErrorKind::FellOver, os.str());
  }
  if (s.q[kZ] <= env_.terrain.height(s.q[kX])) throw Error(ErrorKind::FellOver, "body reached the ground");
}

}  // namespace hop
