#pragma once

#include "hop/environment.hpp"
#include "hop/hybrid.hpp"

#include <Eigen/Dense>

namespace hop {

/// Sagittal-plane model of a quadrotor body with a prismatic spring leg.
///
/// Generalized coordinates q = (x, z, pitch, s): body COM position, body pitch
/// and spring compression. The leg runs along the body's down axis
/// e(pitch) = (sin pitch, -cos pitch), so a positive pitch puts the foot ahead
/// of the body. The lower leg is a point mass `leg_com_from_foot` above the foot.
struct RobotParams {
  double m_body = 2.3;             // kg
  double m_leg = 0.2;              // kg
  double I_body = 0.02;            // kg m^2
  double attach_offset = 0.22;     // body COM to spring top along the leg axis, m
  double leg_com_from_foot = 0.0;  // m
  double k_s = 4848.5;             // N/m
  double d_s = 15.0;               // N s/m
  double r0 = 0.08;                // spring natural length, m
  double max_travel = 0.10;        // m
  double arm = 0.1167;             // rotor arm projected on the body axes, m
  double k_t = 60.0;               // thrust per unit propeller moment, N/(N m)
  double tau_min = 0.0025;         // N m
  double tau_max = 0.17;           // N m
  double twr = 22.0 / (2.5 * 9.81);
  double g = 9.81;
  // Attitude proxy: PD on pitch, critically damped at `attitude_bandwidth_hz`.
  double attitude_bandwidth_hz = 2.0;
  double attitude_damping = 1.0;
  // Stance constraint stabilization rate (1/s).
  double baumgarte = 100.0;

  double mass() const { return m_body + m_leg; }
  /// Body COM to foot distance at zero compression.
  double leg_length() const { return attach_offset + r0; }
  /// 3x4 moment mixer (roll, pitch, yaw rows) for a quad-X layout.
  Eigen::Matrix<double, 3, 4> mixer() const;
  void validate() const;
};

/// Commanded total thrust and desired body pitch.
struct ControlCommand {
  double F_t = 0.0;
  double pitch_des = 0.0;
};

struct ThrustBounds {
  double F_min = 0.0;
  double F_max = 0.0;
};

/// Thrust range achievable while producing body moment M_b:
///   min/max sum(k_t tau_i)  s.t.  A_m tau = M_b,  tau_min <= tau_i <= tau_max,
/// with the maximum further capped at twr*m*g. The three equality rows leave a
/// one-dimensional segment tau = tau_p + alpha*n, so both optima sit at its ends.
/// Throws InfeasibleMoment when the segment is empty.
ThrustBounds thrust_bounds(const Eigen::Vector3d& M_b, const RobotParams& p);

/// Largest |pitch moment| the mixer can produce with zero roll/yaw moment.
double max_pitch_moment(const RobotParams& p);

/// Pitch moment from the attitude proxy, clamped to the mixer's range.
double attitude_moment(double pitch, double pitch_rate, double pitch_des, const RobotParams& p);

/// Thrust actually realized: the command clamped to thrust_bounds at the moment.
double realized_thrust(double F_cmd, double moment, const RobotParams& p);

struct RobotKinematics {
  Eigen::Vector2d foot;
  Eigen::Matrix<double, 2, 4> J_foot;
  Eigen::Vector2d foot_bias;  // Jdot_f * qdot
  Eigen::Vector2d leg;
  Eigen::Matrix<double, 2, 4> J_leg;
  Eigen::Vector2d leg_bias;
};

RobotKinematics robot_kinematics(const Eigen::Vector4d& q, const Eigen::Vector4d& qd, const RobotParams& p);
Eigen::Matrix4d mass_matrix(const Eigen::Vector4d& q, const RobotParams& p);

/// Aerial accelerations (Euler-Lagrange form). The leg extension stop is
/// treated as a unilateral lock: at s = 0 with sdot = 0 the joint is held
/// whenever the free motion would extend it. Throws SingularMassMatrix.
Eigen::Vector4d aerial_dynamics(const HybridState& state, const ControlCommand& cmd, const RobotParams& p,
                                const Eigen::Vector3d& external_force = Eigen::Vector3d::Zero());

struct StanceResult {
  Eigen::Vector4d qdd;
  Eigen::Vector2d grf;  // force from the ground on the foot (x, z)
};

/// Pinned-foot dynamics from the KKT system
///   [M  -J_f^T; J_f  0] [qdd; F_grf] = [tau - H; -Jdot_f qdot - stabilization].
/// The stabilization term vanishes when `state.contact` matches the foot.
/// Throws RankDeficientKKT.
StanceResult stance_dynamics(const HybridState& state, const ControlCommand& cmd, const RobotParams& p,
                             const Eigen::Vector3d& external_force = Eigen::Vector3d::Zero());

struct ImpactResult {
  HybridState post;
  Eigen::Vector2d impulse;
};

/// Plastic touchdown impact:
///   [M  -J_f^T; J_f  0] [qdot+; F_imp] = [M qdot-; 0].
/// Positions are unchanged and the result is returned in stance with the
/// foot pinned where it is. Throws RankDeficientKKT.
ImpactResult impact_map(const HybridState& pre, const RobotParams& p);

double kinetic_energy(const HybridState& s, const RobotParams& p);
Eigen::Vector2d com_position(const HybridState& s, const RobotParams& p);
Eigen::Vector2d com_velocity(const HybridState& s, const RobotParams& p);

/// Input layout: [F_t command, pitch_des].
class PlanarRobotModel final : public HybridModel {
 public:
  explicit PlanarRobotModel(RobotParams params, Environment env = {});

  const RobotParams& params() const { return p_; }
  const Environment& environment() const { return env_; }

  static Eigen::VectorXd make_input(const ControlCommand& cmd) { return Eigen::Vector2d(cmd.F_t, cmd.pitch_des); }
  static ControlCommand command_of(const Eigen::VectorXd& input) { return {input[0], input[1]}; }
  /// Flight state with the leg at its stop, at rest except for `xdot`.
  HybridState aerial_state(double x_com, double z_com, double xdot, double pitch = 0.0, double t = 0.0) const;

  int dof() const override { return 4; }
  Eigen::VectorXd acceleration(const HybridState& s, const Eigen::VectorXd& input) const override;
  double guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  std::vector<EventKind> guards(Phase phase) const override;
  HybridState reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const override;
  Eigen::VectorXd ground_reaction(const HybridState& s, const Eigen::VectorXd& input) const override;
  void validate(const HybridState& s) const override;
  std::vector<double> breakpoints(double t0, double t1) const override { return env_.breakpoints(t0, t1); }

  /// Thrust the flight stack realizes for this input in this state.
  double applied_thrust(const HybridState& s, const Eigen::VectorXd& input) const;

 private:
  RobotParams p_;
  Environment env_;
};

}  // namespace hop
