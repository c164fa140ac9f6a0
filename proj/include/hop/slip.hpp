#pragma once

#include "hop/environment.hpp"
#include "hop/hybrid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace hop {

/// Energy-controlled spring-loaded inverted pendulum: point mass on a
/// massless spring-damper leg. Thrust acts along the leg axis.
struct SlipParams {
  double m = 2.5;         // kg
  double k = 4848.5;      // N/m
  double d = 15.0;        // N s/m
  double r0 = 0.3;        // natural leg length, m
  double g = 9.81;        // m/s^2
  double max_travel = 0.10;  // spring travel before the leg bottoms out, m

  void validate() const;
  /// Leg length at which stance throws LegFullyCompressed.
  double r_min() const { return std::max(r0 - max_travel, 1e-3 * r0); }
};

/// Unilateral spring-damper force k*s + d*sdot, never pulling.
template <typename Scalar>
Scalar spring_force(Scalar s, Scalar sdot, const SlipParams& p) {
  using std::max;
  return max(Scalar(0), Scalar(p.k) * s + Scalar(p.d) * sdot);
}

/// Vertical energy m*g_e*z + m*zdot^2/2 with an equivalent gravity constant.
template <typename Scalar>
Scalar vertical_energy(Scalar z, Scalar zdot, Scalar m, Scalar g_e) {
  return m * g_e * z + Scalar(0.5) * m * zdot * zdot;
}

/// Flight derivative of (x, z, xdot, zdot). The leg angle is measured from the
/// vertical, positive with the foot ahead of the COM, and thrust points from
/// the foot to the COM: xddot = -F sin(theta)/m, zddot = F cos(theta)/m - g.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> slip_aerial_derivative(const Eigen::Matrix<Scalar, 4, 1>& s, Scalar thrust,
                                                    Scalar theta, const SlipParams& p) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 4, 1> out;
  out << s[2], s[3], -thrust * sin(theta) / Scalar(p.m), thrust * cos(theta) / Scalar(p.m) - Scalar(p.g);
  return out;
}

/// Stance derivative of the polar state (r, theta, rdot, thetadot) about the
/// pinned foot. With u = (-sin theta, cos theta) the unit vector from foot to
/// COM, m*pddot = (F_t + F_s) u + m*g gives
///   rddot     = r*thetadot^2 + (F_t + F_s)/m - g cos(theta)
///   thetaddot = (g sin(theta) - 2 rdot thetadot) / r
/// where F_s = spring_force(r0 - r, -rdot).
/// Throws LegFullyCompressed once r <= r_min.
Eigen::Vector4d slip_stance_derivative(const Eigen::Vector4d& polar, double thrust, const SlipParams& p);

/// Cartesian COM state (x, z, xdot, zdot) to polar stance state about `foot`.
Eigen::Vector4d to_polar(const Eigen::Vector4d& cart, const Eigen::Vector2d& foot);
Eigen::Vector4d to_cartesian(const Eigen::Vector4d& polar, const Eigen::Vector2d& foot);
/// COM acceleration implied by a polar state and its polar derivative.
Eigen::Vector2d polar_acceleration(const Eigen::Vector4d& polar, const Eigen::Vector4d& dpolar);

/// Smooth leg swing theta(t) as a Bezier curve in normalized time.
struct SwingTrajectory {
  std::vector<double> control_points;
  double duration = 0.0;

  double theta_liftoff() const { return control_points.front(); }
  double theta_touchdown() const { return control_points.back(); }
};

/// Cubic swing with zero angular rate at both ends.
SwingTrajectory make_swing(double theta_liftoff, double theta_touchdown, double duration);
/// Leg angle at time t since liftoff; clamps to the endpoints outside [0, duration].
double swing_angle(const SwingTrajectory& traj, double t);
double swing_rate(const SwingTrajectory& traj, double t);

/// Input vector layout shared by the SLIP models:
///   [F_t, theta_liftoff, theta_touchdown, t_liftoff, swing_duration]
/// The flight leg angle is the cubic swing evaluated continuously in time.
namespace slip_input {
inline constexpr int kThrust = 0;
inline constexpr int kThetaLiftoff = 1;
inline constexpr int kThetaTouchdown = 2;
inline constexpr int kTLiftoff = 3;
inline constexpr int kDuration = 4;
inline constexpr int kSize = 5;

Eigen::VectorXd make(double thrust, double theta_liftoff, double theta_touchdown, double t_liftoff,
                     double duration);
/// Leg angle commanded by the input at time t.
double leg_angle(const Eigen::VectorXd& input, double t);
}  // namespace slip_input

/// Planar SLIP as a hybrid model. q = (x, z), v = (xdot, zdot); in stance
/// `contact` holds the foot (x, height).
class SlipModel final : public HybridModel {
 public:
  explicit SlipModel(SlipParams params, Environment env = {}) : p_(params), env_(std::move(env)) {
    p_.validate();
  }

  const SlipParams& params() const { return p_; }
  const Environment& environment() const { return env_; }

  int dof() const override { return 2; }
  Eigen::VectorXd acceleration(const HybridState& s, const Eigen::VectorXd& input) const override;
  double guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  std::vector<EventKind> guards(Phase phase) const override;
  HybridState reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  Eigen::VectorXd ground_reaction(const HybridState& s, const Eigen::VectorXd& input) const override;
  void validate(const HybridState& s) const override;
  std::vector<double> breakpoints(double t0, double t1) const override { return env_.breakpoints(t0, t1); }

  /// Leg angle of a stance state (from the pinned foot) or of the commanded swing in flight.
  double leg_angle(const HybridState& s, const Eigen::VectorXd& input) const;
  /// Spring compression r0 - r in stance, 0 in flight.
  double compression(const HybridState& s) const;
  /// Kinetic + gravitational + spring energy.
  double mechanical_energy(const HybridState& s) const;

  static HybridState apex_state(double x, double z, double xdot, double t = 0.0);

 private:
  SlipParams p_;
  Environment env_;
};

/// 3-D point-mass SLIP used for decoupled sagittal/lateral stepping.
/// q = (x, y, z). Input layout:
///   [F_t, pitch_lo, pitch_td, roll_lo, roll_td, t_liftoff, swing_duration]
/// where pitch angles act in the x-z plane and roll angles in the y-z plane.
/// The foot direction is normalize(tan(pitch), tan(roll), -1).
class Slip3dModel final : public HybridModel {
 public:
  explicit Slip3dModel(SlipParams params, Environment env = {}) : p_(params), env_(std::move(env)) {
    p_.validate();
  }

  static Eigen::VectorXd make_input(double thrust, double pitch_lo, double pitch_td, double roll_lo,
                                    double roll_td, double t_liftoff, double duration);
  /// Unit vector from COM to foot for given plane angles.
  static Eigen::Vector3d leg_direction(double pitch, double roll);

  const SlipParams& params() const { return p_; }

  int dof() const override { return 3; }
  Eigen::VectorXd acceleration(const HybridState& s, const Eigen::VectorXd& input) const override;
  double guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  std::vector<EventKind> guards(Phase phase) const override;
  HybridState reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  Eigen::VectorXd ground_reaction(const HybridState& s, const Eigen::VectorXd& input) const override;
  void validate(const HybridState& s) const override;
  std::vector<double> breakpoints(double t0, double t1) const override { return env_.breakpoints(t0, t1); }

  /// (pitch, roll) plane angles of the leg.
  Eigen::Vector2d leg_angles(const HybridState& s, const Eigen::VectorXd& input) const;

 private:
  Eigen::Vector3d commanded_direction(const Eigen::VectorXd& input, double t) const;

  SlipParams p_;
  Environment env_;
};

}  // namespace hop
