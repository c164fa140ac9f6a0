#include "hop/slip.hpp"

#include "hop/bezier.hpp"
#include "hop/errors.hpp"

#include <cmath>
#include <sstream>

namespace hop {

void SlipParams::validate() const {
  if (!(m > 0) || !(k > 0) || !(d >= 0) || !(r0 > 0) || !(g > 0) || !(max_travel > 0))
    throw Error(ErrorKind::InvalidConfig, "SLIP parameters must satisfy m, k, r0, g, travel > 0 and d >= 0");
}

Eigen::Vector4d slip_stance_derivative(const Eigen::Vector4d& polar, double thrust, const SlipParams& p) {
  const double r = polar[0], th = polar[1], rd = polar[2], thd = polar[3];
  if (r <= p.r_min()) {
    std::ostringstream os;
    os << "leg length " << r << " m reached the compression limit " << p.r_min() << " m";
    throw Error(ErrorKind::LegFullyCompressed, os.str());
  }
  const double fs = spring_force(p.r0 - r, -rd, p);
  Eigen::Vector4d out;
  out << rd, thd, r * thd * thd + (thrust + fs) / p.m - p.g * std::cos(th),
      (p.g * std::sin(th) - 2.0 * rd * thd) / r;
  return out;
}

Eigen::Vector4d to_polar(const Eigen::Vector4d& cart, const Eigen::Vector2d& foot) {
  const double dx = cart[0] - foot[0], dz = cart[1] - foot[1];
  const double r = std::hypot(dx, dz);
  const double th = std::atan2(-dx, dz);
  const double rd = (dx * cart[2] + dz * cart[3]) / r;
  const double thd = (-cart[2] * std::cos(th) - cart[3] * std::sin(th)) / r;
  return {r, th, rd, thd};
}

Eigen::Vector4d to_cartesian(const Eigen::Vector4d& polar, const Eigen::Vector2d& foot) {
  const double r = polar[0], th = polar[1], rd = polar[2], thd = polar[3];
  const Eigen::Vector2d u(-std::sin(th), std::cos(th));
  const Eigen::Vector2d up(-std::cos(th), -std::sin(th));
  const Eigen::Vector2d p = foot + r * u;
  const Eigen::Vector2d v = rd * u + r * thd * up;
  return {p[0], p[1], v[0], v[1]};
}

Eigen::Vector2d polar_acceleration(const Eigen::Vector4d& polar, const Eigen::Vector4d& dpolar) {
  const double r = polar[0], th = polar[1], rd = polar[2], thd = polar[3];
  const double rdd = dpolar[2], thdd = dpolar[3];
  const Eigen::Vector2d u(-std::sin(th), std::cos(th));
  const Eigen::Vector2d up(-std::cos(th), -std::sin(th));
  return (rdd - r * thd * thd) * u + (r * thdd + 2.0 * rd * thd) * up;
}

SwingTrajectory make_swing(double theta_liftoff, double theta_touchdown, double duration) {
  return SwingTrajectory{{theta_liftoff, theta_liftoff, theta_touchdown, theta_touchdown},
                         std::max(duration, 0.0)};
}

double swing_angle(const SwingTrajectory& traj, double t) {
  if (traj.duration <= 0.0 || t >= traj.duration) return traj.theta_touchdown();
  if (t <= 0.0) return traj.theta_liftoff();
  return bezier_eval(traj.control_points, t / traj.duration);
}

double swing_rate(const SwingTrajectory& traj, double t) {
  if (traj.duration <= 0.0 || t <= 0.0 || t >= traj.duration) return 0.0;
  return bezier_derivative(traj.control_points, t / traj.duration) / traj.duration;
}

namespace slip_input {

Eigen::VectorXd make(double thrust, double theta_liftoff, double theta_touchdown, double t_liftoff,
                     double duration) {
  Eigen::VectorXd u(kSize);
  u << thrust, theta_liftoff, theta_touchdown, t_liftoff, duration;
  return u;
}

double leg_angle(const Eigen::VectorXd& input, double t) {
  const auto swing = make_swing(input[kThetaLiftoff], input[kThetaTouchdown], input[kDuration]);
  return swing_angle(swing, t - input[kTLiftoff]);
}

}  // namespace slip_input

// ---------------------------------------------------------------------------
// Planar SLIP

namespace {

Eigen::Vector4d cart(const HybridState& s) { return {s.q[0], s.q[1], s.v[0], s.v[1]}; }

Eigen::Vector2d foot_of(const HybridState& s) { return {s.contact[0], s.contact[1]}; }

}  // namespace

double SlipModel::leg_angle(const HybridState& s, const Eigen::VectorXd& input) const {
  if (s.phase == Phase::Stance) return to_polar(cart(s), foot_of(s))[1];
  return slip_input::leg_angle(input, s.t);
}

double SlipModel::compression(const HybridState& s) const {
  if (s.phase != Phase::Stance) return 0.0;
  return p_.r0 - (Eigen::Vector2d(s.q[0], s.q[1]) - foot_of(s)).norm();
}

double SlipModel::mechanical_energy(const HybridState& s) const {
  const double c = compression(s);
  return 0.5 * p_.m * s.v.squaredNorm() + p_.m * p_.g * s.q[1] + 0.5 * p_.k * c * c;
}

HybridState SlipModel::apex_state(double x, double z, double xdot, double t) {
  HybridState s;
  s.phase = Phase::Aerial;
  s.q = Eigen::Vector2d(x, z);
  s.v = Eigen::Vector2d(xdot, 0.0);
  s.t = t;
  return s;
}

Eigen::VectorXd SlipModel::acceleration(const HybridState& s, const Eigen::VectorXd& input) const {
  const Eigen::Vector3d push = env_.external_force(s.t);
  const Eigen::Vector2d ext(push[0] / p_.m, push[2] / p_.m);
  const double thrust = input[slip_input::kThrust];
  if (s.phase == Phase::Aerial) {
    const double th = slip_input::leg_angle(input, s.t);
    const Eigen::Vector4d d = slip_aerial_derivative<double>(cart(s), thrust, th, p_);
    return Eigen::Vector2d(d[2] + ext[0], d[3] + ext[1]);
  }
  const Eigen::Vector4d polar = to_polar(cart(s), foot_of(s));
  const Eigen::Vector4d dpolar = slip_stance_derivative(polar, thrust, p_);
  return polar_acceleration(polar, dpolar) + ext;
}

double SlipModel::guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const {
  switch (kind) {
    case EventKind::Touchdown: {
      const double th = slip_input::leg_angle(input, s.t);
      const double foot_x = s.q[0] + p_.r0 * std::sin(th);
      return s.q[1] - p_.r0 * std::cos(th) - env_.terrain.height(foot_x);
    }
    case EventKind::Liftoff:
      return compression(s);
    case EventKind::Apex:
      return s.v[1];
    case EventKind::LegStop:
      return 1.0;
  }
  return 1.0;
}

std::vector<EventKind> SlipModel::guards(Phase phase) const {
  if (phase == Phase::Aerial) return {EventKind::Touchdown, EventKind::Apex};
  return {EventKind::Liftoff};
}

HybridState SlipModel::reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const {
  HybridState out = s;
  if (kind == EventKind::Touchdown) {
    const double th = slip_input::leg_angle(input, s.t);
    const double foot_x = s.q[0] + p_.r0 * std::sin(th);
    out.phase = Phase::Stance;
    out.contact = Eigen::Vector2d(foot_x, env_.terrain.height(foot_x));
  } else if (kind == EventKind::Liftoff) {
    out.phase = Phase::Aerial;
    out.contact.resize(0);
  }
  return out;
}

Eigen::VectorXd SlipModel::ground_reaction(const HybridState& s, const Eigen::VectorXd&) const {
  if (s.phase != Phase::Stance) return Eigen::Vector2d::Zero();
  const Eigen::Vector4d polar = to_polar(cart(s), foot_of(s));
  const double fs = spring_force(p_.r0 - polar[0], -polar[2], p_);
  return Eigen::Vector2d(-std::sin(polar[1]), std::cos(polar[1])) * fs;
}

void SlipModel::validate(const HybridState& s) const {
  if (s.phase == Phase::Aerial && s.q[1] <= env_.terrain.height(s.q[0]))
    throw Error(ErrorKind::FellOver, "SLIP mass reached the ground");
}

// ---------------------------------------------------------------------------
// 3-D SLIP

namespace {
namespace in3 {
constexpr int kThrust = 0, kPitchLo = 1, kPitchTd = 2, kRollLo = 3, kRollTd = 4, kTLo = 5, kDur = 6;
}
}  // namespace

Eigen::VectorXd Slip3dModel::make_input(double thrust, double pitch_lo, double pitch_td, double roll_lo,
                                        double roll_td, double t_liftoff, double duration) {
  Eigen::VectorXd u(7);
  u << thrust, pitch_lo, pitch_td, roll_lo, roll_td, t_liftoff, duration;
  return u;
}

Eigen::Vector3d Slip3dModel::leg_direction(double pitch, double roll) {
  return Eigen::Vector3d(std::tan(pitch), std::tan(roll), -1.0).normalized();
}

Eigen::Vector3d Slip3dModel::commanded_direction(const Eigen::VectorXd& input, double t) const {
  const double tau = t - input[in3::kTLo];
  const double pitch = swing_angle(make_swing(input[in3::kPitchLo], input[in3::kPitchTd], input[in3::kDur]), tau);
  const double roll = swing_angle(make_swing(input[in3::kRollLo], input[in3::kRollTd], input[in3::kDur]), tau);
  return leg_direction(pitch, roll);
}

Eigen::Vector2d Slip3dModel::leg_angles(const HybridState& s, const Eigen::VectorXd& input) const {
  Eigen::Vector3d d;
  if (s.phase == Phase::Stance) {
    d = (Eigen::Vector3d(s.contact[0], s.contact[1], s.contact[2]) - Eigen::Vector3d(s.q[0], s.q[1], s.q[2]));
  } else {
    d = commanded_direction(input, s.t);
  }
  return {std::atan2(d[0], -d[2]), std::atan2(d[1], -d[2])};
}

Eigen::VectorXd Slip3dModel::acceleration(const HybridState& s, const Eigen::VectorXd& input) const {
  const Eigen::Vector3d ext = env_.external_force(s.t) / p_.m;
  const double thrust = input[in3::kThrust];
  const Eigen::Vector3d gvec(0.0, 0.0, -p_.g);
  if (s.phase == Phase::Aerial) {
    const Eigen::Vector3d d = commanded_direction(input, s.t);
    return Eigen::Vector3d(-thrust * d / p_.m + gvec + ext);
  }
  const Eigen::Vector3d p(s.q[0], s.q[1], s.q[2]);
  const Eigen::Vector3d f(s.contact[0], s.contact[1], s.contact[2]);
  const Eigen::Vector3d rel = p - f;
  const double r = rel.norm();
  if (r <= p_.r_min()) throw Error(ErrorKind::LegFullyCompressed, "3-D SLIP leg reached the compression limit");
  const Eigen::Vector3d u = rel / r;
  const double rd = u.dot(Eigen::Vector3d(s.v[0], s.v[1], s.v[2]));
  const double fs = spring_force(p_.r0 - r, -rd, p_);
  return Eigen::Vector3d((thrust + fs) * u / p_.m + gvec + ext);
}

double Slip3dModel::guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const {
  switch (kind) {
    case EventKind::Touchdown: {
      const Eigen::Vector3d d = commanded_direction(input, s.t);
      return s.q[2] + p_.r0 * d[2] - env_.terrain.height(s.q[0] + p_.r0 * d[0]);
    }
    case EventKind::Liftoff: {
      const Eigen::Vector3d rel(s.q[0] - s.contact[0], s.q[1] - s.contact[1], s.q[2] - s.contact[2]);
      return p_.r0 - rel.norm();
    }
    case EventKind::Apex:
      return s.v[2];
    case EventKind::LegStop:
      return 1.0;
  }
  return 1.0;
}

std::vector<EventKind> Slip3dModel::guards(Phase phase) const {
  if (phase == Phase::Aerial) return {EventKind::Touchdown, EventKind::Apex};
  return {EventKind::Liftoff};
}

HybridState Slip3dModel::reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const {
  HybridState out = s;
  if (kind == EventKind::Touchdown) {
    const Eigen::Vector3d d = commanded_direction(input, s.t);
    const Eigen::Vector3d foot = Eigen::Vector3d(s.q[0], s.q[1], s.q[2]) + p_.r0 * d;
    out.phase = Phase::Stance;
    out.contact = Eigen::Vector3d(foot[0], foot[1], env_.terrain.height(foot[0]));
  } else if (kind == EventKind::Liftoff) {
    out.phase = Phase::Aerial;
    out.contact.resize(0);
  }
  return out;
}

Eigen::VectorXd Slip3dModel::ground_reaction(const HybridState& s, const Eigen::VectorXd&) const {
  if (s.phase != Phase::Stance) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d rel(s.q[0] - s.contact[0], s.q[1] - s.contact[1], s.q[2] - s.contact[2]);
  const double r = rel.norm();
  const Eigen::Vector3d u = rel / r;
  const double rd = u.dot(Eigen::Vector3d(s.v[0], s.v[1], s.v[2]));
  return Eigen::Vector3d(spring_force(p_.r0 - r, -rd, p_) * u);
}

void Slip3dModel::validate(const HybridState& s) const {
  if (s.phase == Phase::Aerial && s.q[2] <= env_.terrain.height(s.q[0]))
    throw Error(ErrorKind::FellOver, "SLIP mass reached the ground");
}

}  // namespace hop
