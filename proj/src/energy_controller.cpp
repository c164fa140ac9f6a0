#include "hop/energy_controller.hpp"

#include "hop/errors.hpp"
#include "hop/slip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hop {

void EnergyControllerConfig::validate() const {
  std::ostringstream os;
  if (!(mass > 0)) os << "mass must be positive; ";
  if (!(K_p < 0)) os << "K_p must be negative; ";
  if (!(Q > 0)) os << "Q must be positive; ";
  if (!(gamma > 0)) os << "gamma must be positive; ";
  if (!(p >= 0)) os << "p must be non-negative; ";
  if (!(F_min < F_max)) os << "F_min must be below F_max; ";
  if (!(F_min >= 0)) os << "F_min must be non-negative; ";
  if (!(g_e > 0)) os << "g_e must be positive; ";
  if (!os.str().empty()) throw Error(ErrorKind::InvalidConfig, os.str());
}

double equivalent_gravity(double F_min, double m, double g) {
  if (!(m > 0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  if (F_min < 0) throw Error(ErrorKind::InvalidArgument, "F_min must be non-negative");
  if (F_min >= m * g) {
    std::ostringstream os;
    os << "F_min=" << F_min << " N is not below the weight " << m * g << " N";
    throw Error(ErrorKind::NonPositiveEquivalentGravity, os.str());
  }
  return g - F_min / m;
}

OutputDynamics output_dynamics(double zdot, double cos_theta, const EnergyControllerConfig& cfg) {
  return {-zdot * cfg.F_min, zdot * cos_theta};
}

ClfTerms clf_terms(double eta, const OutputDynamics& dyn, const EnergyControllerConfig& cfg) {
  const double P = cfg.P();
  ClfTerms t;
  t.V = P * eta * eta;
  t.A = 2.0 * P * eta * dyn.g_eta;
  t.drift = 2.0 * P * eta * dyn.f_eta;
  t.b = -cfg.gamma * t.V - t.drift;
  t.Vdot_target = -cfg.gamma * t.V;
  return t;
}

double qp_objective(double F, double delta, double F_prev, const EnergyControllerConfig& cfg) {
  const double ref = cfg.variant == QpVariant::RelaxedEqualityQP ? F_prev : 0.0;
  return cfg.p * (F - ref) * (F - ref) + delta * delta;
}

namespace {

int active_of(double F, const EnergyControllerConfig& cfg) {
  int a = kNoBound;
  if (F <= cfg.F_min) a |= kLowerBound;
  if (F >= cfg.F_max) a |= kUpperBound;
  return a;
}

QpSolution finish(double F, const ClfTerms& clf, double F_prev, const EnergyControllerConfig& cfg) {
  QpSolution s;
  s.F_t = F;
  const double resid = clf.A * F - clf.b;
  s.delta = cfg.variant == QpVariant::RelaxedEqualityQP ? resid : std::max(0.0, resid);
  s.active_set = active_of(F, cfg);
  s.objective = qp_objective(F, s.delta, F_prev, cfg);
  return s;
}

}  // namespace

QpSolution solve_energy_qp_kkt(const ClfTerms& clf, double F_prev, const EnergyControllerConfig& cfg) {
  cfg.validate();
  const double lo = cfg.F_min, hi = cfg.F_max;
  const double ref = cfg.variant == QpVariant::RelaxedEqualityQP ? F_prev : 0.0;
  const double A = clf.A, b = clf.b, p = cfg.p;

  // Eliminating delta leaves a convex 1-D problem in F on [lo, hi]:
  //   equality:   p (F - ref)^2 + (A F - b)^2
  //   inequality: p (F - ref)^2 + max(0, A F - b)^2
  // Its minimizer is a stationary point of one of the quadratic pieces
  // (constraint active or inactive), a bound, or the breakpoint A F = b.
  std::vector<double> cand;
  cand.push_back(std::clamp(ref, lo, hi));  // constraint inactive, bounds possibly active
  if (p + A * A > 0) cand.push_back(std::clamp((p * ref + A * b) / (p + A * A), lo, hi));
  if (A != 0.0) cand.push_back(std::clamp(b / A, lo, hi));
  cand.push_back(lo);
  cand.push_back(hi);

  QpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  for (double F : cand) {
    const QpSolution s = finish(F, clf, F_prev, cfg);
    if (std::isinf(best.objective) || s.objective < best.objective - 1e-15 * std::max(1.0, std::abs(best.objective)))
      best = s;
  }
  return best;
}

QpSolution solve_energy_qp(const ClfTerms& clf, double F_prev, const EnergyControllerConfig& cfg) {
  cfg.validate();
  if (cfg.variant == QpVariant::RelaxedEqualityQP && cfg.p == 0.0) {
    const double F = clf.A != 0.0 ? std::clamp(clf.b / clf.A, cfg.F_min, cfg.F_max)
                                  : std::clamp(F_prev, cfg.F_min, cfg.F_max);
    return finish(F, clf, F_prev, cfg);
  }
  return solve_energy_qp_kkt(clf, F_prev, cfg);
}

VerticalCommand vertical_controller_step(Phase phase, double z, double zdot, double cos_theta,
                                         double F_prev, const EnergyControllerConfig& cfg) {
  VerticalCommand out;
  out.eta = vertical_energy(z, zdot, cfg.mass, cfg.g_e) - cfg.E_d;
  out.V = cfg.P() * out.eta * out.eta;
  if (phase == Phase::Stance) {
    out.F_t = cfg.F_min;
    out.qp.F_t = cfg.F_min;
    out.qp.active_set = kLowerBound;
    return out;
  }
  const ClfTerms clf = clf_terms(out.eta, output_dynamics(zdot, cos_theta, cfg), cfg);
  out.qp = solve_energy_qp(clf, std::clamp(F_prev, cfg.F_min, cfg.F_max), cfg);
  out.F_t = out.qp.F_t;
  return out;
}

double energy_for_apex(double apex_height, const EnergyControllerConfig& cfg) {
  return vertical_energy(apex_height, 0.0, cfg.mass, cfg.g_e);
}

}  // namespace hop
