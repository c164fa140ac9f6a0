#pragma once

#include "hop/energy_controller.hpp"
#include "hop/hybrid.hpp"
#include "hop/planar_robot.hpp"
#include "hop/slip.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hop {

/// A periodic apex-to-apex orbit of the energy-controlled SLIP together with
/// its linearized step-to-step dynamics
///   xdot_{k+1} - xdot* = A (xdot_k - xdot*) + B (u_k - u*) + delta.
struct Gait {
  static constexpr int kVersion = 1;

  double xdot_star = 0.0;    // m/s
  double u_star = 0.0;       // touchdown angle, rad
  double apex_height = 0.0;  // m
  double E_d = 0.0;          // J
  double A = 0.0;
  double B = 0.0;            // m/s per rad
  double K = 0.0;            // rad per m/s
  double residual = 0.0;     // |P(xdot*, u*) - xdot*|
  double leg_angle_limit = 0.5;
  // Finite-difference diagnostics: the last two estimates and the step used.
  std::array<double, 2> A_estimates{};
  std::array<double, 2> B_estimates{};
  double fd_step = 0.0;

  SlipParams params;
  EnergyControllerConfig ctrl;
  std::string params_hash;
};

/// Stable hash of the physical and controller parameters a gait was built for.
std::string params_hash(const SlipParams& p, const EnergyControllerConfig& ctrl);

std::string gait_to_json(const Gait& g);
/// Throws ConfigError on malformed input.
Gait gait_from_json(const std::string& text);
void save_gait(const Gait& g, const std::string& path);
/// Loads a gait and checks its hash against (p, ctrl); throws GaitMismatch.
Gait load_gait(const std::string& path, const SlipParams& p, const EnergyControllerConfig& ctrl);

/// Apex data recorded by the hop controllers, one per Apex event.
struct ApexRecord {
  int step = 0;
  double t = 0.0;
  double x = 0.0;
  double height = 0.0;
  double xdot = 0.0;
  double ydot = 0.0;
  double energy = 0.0;
  double u_cmd = 0.0;
  double u_cmd_lateral = 0.0;
  double impulse = 0.0;  // cumulative thrust impulse since the start, N s
  bool clamped = false;
};

/// u* + K (xdot - xdot*), clamped to +-leg_angle_limit. `clamped` reports saturation.
double stepping_controller(double xdot, const Gait& gait, bool* clamped = nullptr);

/// Gain nulling A + B K. Throws UncontrollableMap when |B| <= 1e-8.
double deadbeat_gain(double A, double B);

/// Shared hop-controller settings.
struct HopControllerConfig {
  EnergyControllerConfig energy;
  double leg_angle_limit = 0.5;
};

/// Energy regulation, Bezier leg swing and apex stepping for the planar SLIP.
///
/// Flight thrust comes from the CLF-QP, stance thrust is held at F_min. After
/// liftoff the leg swings from its liftoff angle to the current touchdown
/// command over the predicted ascent time; at each apex the command is
/// refreshed from the gait (or kept fixed without one) and the leg is placed
/// at it, so the apex state alone determines the next hop.
class SlipHopController {
 public:
  SlipHopController(const SlipParams& params, HopControllerConfig cfg, std::optional<Gait> gait,
                    double initial_u);

  /// Callbacks bound to this object; it must outlive their use.
  Controller bind();

  ControlSample sample(const HybridState& s);
  void on_event(const Event& ev);

  double command() const { return u_cmd_; }
  const std::vector<ApexRecord>& apexes() const { return apexes_; }
  const std::vector<std::string>& log() const { return log_; }

 private:
  void hold(double t, double F);

  SlipParams p_;
  HopControllerConfig cfg_;
  std::optional<Gait> gait_;
  double u_cmd_;
  double theta_lo_;
  double t_lo_ = 0.0;
  bool swinging_ = false;
  double F_prev_ = 0.0;
  // Thrust integral under the zero-order hold.
  double impulse_ = 0.0;
  double t_hold_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<ApexRecord> apexes_;
  std::vector<std::string> log_;
};

/// Decoupled stepping on the 3-D point-mass SLIP: the sagittal gait drives the
/// pitch-plane angle from xdot and the lateral gait the roll-plane angle from ydot.
std::pair<double, double> decoupled_3d_step(double xdot, double ydot, const Gait& sagittal, const Gait& lateral,
                                            bool* clamped = nullptr);

class Slip3dHopController {
 public:
  Slip3dHopController(const SlipParams& params, HopControllerConfig cfg, Gait sagittal, Gait lateral);

  Controller bind();
  ControlSample sample(const HybridState& s);
  void on_event(const Event& ev);

  const std::vector<ApexRecord>& apexes() const { return apexes_; }

 private:
  SlipParams p_;
  HopControllerConfig cfg_;
  Gait sag_, lat_;
  double pitch_cmd_, roll_cmd_;
  double pitch_lo_, roll_lo_;
  double t_lo_ = 0.0;
  bool swinging_ = false;
  double F_prev_ = 0.0;
  std::vector<ApexRecord> apexes_;
};

/// The SLIP stepping law applied to the full-order planar robot. Body pitch
/// plays the role of the leg angle; energy uses the system COM. During ascent
/// the touchdown target follows the law on the current COM velocity so the
/// attitude loop has the whole flight to reach it; each apex fixes it.
class RobotHopController {
 public:
  RobotHopController(const RobotParams& params, HopControllerConfig cfg, std::optional<Gait> gait,
                     double initial_u);

  Controller bind();
  ControlSample sample(const HybridState& s);
  void on_event(const Event& ev);

  const std::vector<ApexRecord>& apexes() const { return apexes_; }
  const std::vector<std::string>& log() const { return log_; }

 private:
  RobotParams p_;
  HopControllerConfig cfg_;
  std::optional<Gait> gait_;
  double u_cmd_;
  double theta_lo_;
  double t_lo_ = 0.0;
  bool swinging_ = false;
  double F_prev_ = 0.0;
  std::vector<ApexRecord> apexes_;
  std::vector<std::string> log_;
};

/// Everything the return map depends on besides (xdot_k, u_k).
struct GaitContext {
  SlipParams params;
  HopControllerConfig cfg;  // cfg.energy.E_d is the regulated energy
  double apex_height = 0.5; // starting apex height, m
  IntegratorOptions opts;
  double t_max_hop = 5.0;   // s, per hop
};

/// Context with E_d matched to `apex_height`.
GaitContext make_context(const SlipParams& p, HopControllerConfig cfg, double apex_height,
                         const IntegratorOptions& opts = {});

struct ReturnMapResult {
  double xdot = 0.0;
  double height = 0.0;
  double energy = 0.0;
};

/// One hop from apex (0, apex_height, xdot_k) with touchdown angle u_k to the
/// next apex. Throws NoApexReached when the hop fails.
ReturnMapResult return_map_full(double xdot_k, double u_k, const GaitContext& ctx);
double return_map(double xdot_k, double u_k, const GaitContext& ctx);

/// Solves P(xdot_des, u) = xdot_des for u in [-0.5, 0.5] and linearizes the
/// map there. Throws NoBracket or NotConverged. With `coarse_on_noise` a
/// linearization that fails to settle falls back to a single 1e-3 step
/// (both estimates then equal) instead of throwing NumericalNoise.
Gait find_periodic_orbit(double xdot_des, double apex_height, const SlipParams& p, HopControllerConfig cfg,
                         const IntegratorOptions& opts = {}, bool coarse_on_noise = false);

struct Linearization {
  double A = 0.0;
  double B = 0.0;
  std::array<double, 2> A_estimates{};
  std::array<double, 2> B_estimates{};
  double step = 0.0;
};

/// Central differences with step halving from 1e-3 until two consecutive
/// estimates agree within 1e-4 (relative). Throws NumericalNoise.
Linearization linearize_s2s(double xdot_star, double u_star, const GaitContext& ctx);

/// One central-difference estimate at step h.
Linearization linearize_s2s_fixed(double xdot_star, double u_star, const GaitContext& ctx, double h);

struct InvariantEstimate {
  double bound = 0.0;      // delta_max + remainder
  double remainder = 0.0;  // max |P(x*+e, u*+K e) - x*| over the grid
  double box = 0.0;        // half-width of the error grid, m/s
  int clamped_points = 0;  // grid points where the command saturated (excluded)
};

/// One-step error bound of the deadbeat loop with the remainder measured on
/// an `n`-point grid over [-box, box].
InvariantEstimate error_invariant_estimate(const Gait& gait, double delta_max, double box = 0.3, int n = 13,
                                           const IntegratorOptions& opts = {});

/// Context a gait was built in.
GaitContext context_of(const Gait& gait, const IntegratorOptions& opts = {});

}  // namespace hop
