#pragma once

#include "hop/hybrid.hpp"

namespace hop {

enum class QpVariant { InequalityQP, RelaxedEqualityQP };

/// Vertical energy shaping with a control Lyapunov function on
/// eta = E - E_d, E = m*g_e*z + m*zdot^2/2.
///
/// Output dynamics with thrust F along a leg tilted by theta:
///   etadot = f_eta + g_eta * F,   g_eta = zdot*cos(theta),   f_eta = -zdot*F_min
/// f_eta is the always-on thrust floor folded into g_e; it vanishes for F_min = 0.
/// V = P*eta^2 with P = Q / (-2*K_p) solving 2*K_p*P = -Q.
struct EnergyControllerConfig {
  double mass = 2.5;     // kg
  double E_d = 0.0;      // J
  double K_p = -5.0;     // 1/s
  double Q = 1.0;
  double gamma = 50.0;   // 1/s
  double p = 0.0;        // input smoothing weight
  double F_min = 0.0;    // N
  double F_max = 22.0;   // N
  double g_e = 9.81;     // m/s^2
  QpVariant variant = QpVariant::RelaxedEqualityQP;

  double P() const { return Q / (-2.0 * K_p); }
  void validate() const;
};

/// g - F_min/m. Throws NonPositiveEquivalentGravity when F_min >= m*g.
double equivalent_gravity(double F_min, double m, double g);

struct OutputDynamics {
  double f_eta = 0.0;
  double g_eta = 0.0;
};

OutputDynamics output_dynamics(double zdot, double cos_theta, const EnergyControllerConfig& cfg);

struct ClfTerms {
  double A = 0.0;           // A_CLF = 2 P eta g_eta
  double b = 0.0;           // b_CLF = -gamma P eta^2 - 2 P eta f_eta
  double V = 0.0;           // P eta^2
  double Vdot_target = 0.0; // -gamma V
  double drift = 0.0;       // 2 P eta f_eta, so Vdot(F) = A F + drift
};

ClfTerms clf_terms(double eta, const OutputDynamics& dyn, const EnergyControllerConfig& cfg);

enum ActiveBound : int { kNoBound = 0, kLowerBound = 1, kUpperBound = 2 };

struct QpSolution {
  double F_t = 0.0;
  double delta = 0.0;
  int active_set = kNoBound;
  double objective = 0.0;
};

/// Objective of the configured variant at (F, delta).
double qp_objective(double F, double delta, double F_prev, const EnergyControllerConfig& cfg);

/// Solves the two-variable CLF-QP. RelaxedEqualityQP with p = 0 takes the
/// closed form F = clamp(b/A); everything else goes through solve_energy_qp_kkt.
QpSolution solve_energy_qp(const ClfTerms& clf, double F_prev, const EnergyControllerConfig& cfg);

/// Generic path: enumerates the KKT candidates of the convex 2-variable QP
/// (bound patterns x constraint active/inactive) and keeps the best feasible one.
QpSolution solve_energy_qp_kkt(const ClfTerms& clf, double F_prev, const EnergyControllerConfig& cfg);

struct VerticalCommand {
  double F_t = 0.0;
  double eta = 0.0;
  double V = 0.0;
  QpSolution qp;
};

/// One control sample. Flight: QP thrust; stance: thrust held at F_min.
VerticalCommand vertical_controller_step(Phase phase, double z, double zdot, double cos_theta,
                                         double F_prev, const EnergyControllerConfig& cfg);

/// Desired energy for an apex height (zdot = 0).
double energy_for_apex(double apex_height, const EnergyControllerConfig& cfg);

}  // namespace hop
