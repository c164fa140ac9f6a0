#pragma once

#include "hop/hybrid.hpp"
#include "hop/s2s.hpp"
#include "hop/slip.hpp"

#include <string>
#include <vector>

namespace hop {

/// Vertical hop of a point mass on a linear spring-damper leg under bang-bang
/// thrust: F_min while descending, F_max from the stance velocity reversal
/// until the next apex. The leg is bilateral here (the damper may pull), which
/// keeps every phase linear.
struct BangBangSpec {
  double m = 2.5;       // kg
  double k = 4848.5;    // N/m
  double d = 15.0;      // N s/m
  double F_max = 22.0;  // N
  double F_min = 0.0;   // N
  double apex = 1.0;    // starting apex height, m
  double r0 = 0.3;      // leg length, m
  double g = 9.81;

  void validate() const;
};

struct BangBangResult {
  double apex = 0.0;              // next apex height, m (inf when F_max >= m g)
  double t_descent = 0.0;         // s
  double t_compression = 0.0;
  double t_extension = 0.0;
  double t_ascent = 0.0;
  double peak_compression = 0.0;  // m
  double v_touchdown = 0.0;       // m/s, negative
  double v_liftoff = 0.0;         // m/s
};

/// Piecewise closed-form hop. Throws NoLiftoff when the leg never returns to
/// r0 moving upward.
BangBangResult bang_bang_closed_form(const BangBangSpec& spec);

/// The same hop integrated numerically with event detection.
BangBangResult bang_bang_numeric(const BangBangSpec& spec, const IntegratorOptions& opts = {});

/// Smallest F_max in [F_min, m g) for which the hop from `spec.apex` returns
/// to it. NaN when even F_max -> m g falls short.
double required_thrust(BangBangSpec spec);

/// Largest apex h the hop can sustain, i.e. sup{h : next apex from h >= h}.
/// r0 when none (the unactuated hopper comes to rest), inf when every height
/// up to 1 km is sustainable or twr >= 1.
double achievable_apex(const BangBangSpec& spec);

struct StiffnessRow {
  double weight = 0.0;
  double stiffness = 0.0;
  double F_max_required = 0.0;  // NaN when infeasible
  bool feasible = false;
};

std::vector<StiffnessRow> design_sweep_stiffness(const std::vector<double>& weights,
                                                 const std::vector<double>& stiffness, double apex, double d,
                                                 const BangBangSpec& base = {});

struct TwrRow {
  double twr = 0.0;
  double stiffness = 0.0;
  double apex = 0.0;
  bool feasible = false;
};

std::vector<TwrRow> design_sweep_twr(const std::vector<double>& stiffness, const std::vector<double>& twr,
                                     const BangBangSpec& base = {});

enum class CotMode { Hopping, Flying };

std::string_view to_string(CotMode mode);

struct CotResult {
  CotMode mode = CotMode::Hopping;
  double twr = 0.0;
  double cot = 0.0;  // inf when infeasible
  double mean_velocity = 0.0;
  bool feasible = false;
  std::string note;
};

/// Level flight at constant speed: thrust equals weight, so COT = 1/v; no
/// flight is possible for twr <= 1.
CotResult cot_flying(double m, double twr, double v, double duration, double g = 9.81);

struct CotHoppingOptions {
  double apex = 1.0;     // m
  double xdot = 1.0;     // m/s
  int settle_steps = 10; // hops before measuring; feasibility is judged here
  int n_steps = 10;      // measured hops
  double apex_tol = 0.02;
  HopControllerConfig cfg;
};

/// S2S-controlled SLIP hopping with F_min = 0 and F_max = twr m g.
/// COT = sum |F| dt / (L m g) over the measured hops.
CotResult cot_hopping(const SlipParams& params, double twr, const CotHoppingOptions& opts = {});

/// Smallest twr on a `step` grid below 1 for which hopping stays feasible.
double hopping_feasibility_boundary(const SlipParams& params, const CotHoppingOptions& opts = {},
                                    double step = 0.01, double lowest = 0.3);

std::string fig6a_csv(const std::vector<StiffnessRow>& rows);
std::string fig6b_csv(const std::vector<TwrRow>& rows);
std::string fig6c_csv(const std::vector<CotResult>& rows);

}  // namespace hop
