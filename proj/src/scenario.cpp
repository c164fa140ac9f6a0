#include "hop/scenario.hpp"

#include "hop/planar_robot.hpp"
#include "hop/slip.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace hop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool compare(double measured, const std::string& rel, double threshold) {
  if (rel == "<=") return measured <= threshold;
  if (rel == ">=") return measured >= threshold;
  if (rel == "<") return measured < threshold;
  if (rel == ">") return measured > threshold;
  if (rel == "==") return measured == threshold;
  return false;
}

HopControllerConfig slip_controller(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  c.model = ModelKind::Slip;
  return c.resolved_controller();
}

double target_apex(const ScenarioConfig& cfg) {
  const HopControllerConfig hc = cfg.resolved_controller();
  return hc.energy.E_d / (hc.energy.mass * hc.energy.g_e);
}

Gait gait_for(const ScenarioConfig& cfg, double speed) {
  const HopControllerConfig hc = slip_controller(cfg);
  if (!cfg.gait_file.empty() && speed == cfg.xdot_des) {
    Gait g = load_gait(cfg.gait_file, cfg.slip, hc.energy);
    if (std::abs(g.xdot_star - cfg.xdot_des) > 1e-12)
      throw Error(ErrorKind::ConfigError, "key 'scenario.gait_file': gait speed does not match scenario.xdot_des");
    return g;
  }
  return find_periodic_orbit(speed, target_apex(cfg), cfg.slip, hc, cfg.integrator);
}

Environment base_environment(const ScenarioConfig& cfg) {
  Environment env;
  if (cfg.terrain.step_height != 0.0) env.terrain.steps.push_back({cfg.terrain.step_x, cfg.terrain.step_height});
  return env;
}

Push push_of(const PushSpec& p, double start) {
  return {Eigen::Vector3d(p.force_x, p.force_y, 0.0), start, p.duration};
}

/// Runs the hop sequence, switching the push on at the configured apex.
template <typename MakeModel>
Trajectory run_hops(ScenarioResult& res, const ScenarioConfig& cfg, const Controller& ctrl, const HybridState& s0,
                    MakeModel make_model) {
  const Environment base = base_environment(cfg);
  if (!cfg.push) {
    const auto model = make_model(base);
    return simulate_hops(model, s0, ctrl, cfg.hops, cfg.t_max, cfg.integrator);
  }
  const PushSpec& p = *cfg.push;
  if (p.after_apex == 0) {
    Environment env = base;
    env.pushes.push_back(push_of(p, p.start));
    res.push_start = p.start;
    res.push_end = p.start + p.duration;
    const auto model = make_model(env);
    return simulate_hops(model, s0, ctrl, cfg.hops, cfg.t_max, cfg.integrator);
  }
  const auto calm = make_model(base);
  Trajectory traj = simulate_hops(calm, s0, ctrl, std::min(p.after_apex, cfg.hops), cfg.t_max, cfg.integrator);
  if (traj.termination != Termination::Completed || p.after_apex >= cfg.hops) return traj;
  const Event& apex = traj.events.back();
  Environment env = base;
  env.pushes.push_back(push_of(p, apex.t));
  res.push_start = apex.t;
  res.push_end = apex.t + p.duration;
  const auto pushed = make_model(env);
  traj.append(simulate_hops(pushed, apex.state_after, ctrl, cfg.hops - p.after_apex, cfg.t_max, cfg.integrator));
  return traj;
}

// ---------------------------------------------------------------------------
// Checks

/// Earliest window of `window` hops starting by hop `settle_max` where every
/// apex meets both tolerances; otherwise the best window found.
void steady_state_checks(ScenarioResult& res, double xdot_des, double apex, const std::string& suffix,
                         bool lateral) {
  const CheckSpec& c = res.config.check;
  const auto& ap = res.apexes;
  const int n = static_cast<int>(ap.size());
  double best_v = std::numeric_limits<double>::infinity(), best_h = best_v;
  int best_start = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i0 = 0; i0 < c.settle_max && i0 + c.window <= n; ++i0) {
    double ev = 0.0, eh = 0.0;
    for (int i = i0; i < i0 + c.window; ++i) {
      const double v = lateral ? ap[i].ydot : ap[i].xdot;
      ev = std::max(ev, std::abs(v - xdot_des));
      eh = std::max(eh, std::abs(ap[i].height - apex) / apex);
    }
    const double score = std::max(ev / c.xdot_tol, eh / c.apex_tol);
    if (score <= 1.0) {
      best_v = ev, best_h = eh, best_start = i0;
      break;
    }
    if (score < best_score) best_score = score, best_v = ev, best_h = eh, best_start = i0;
  }
  std::string detail;
  if (best_start < 0) {
    detail = "need " + std::to_string(c.window) + " hops after at most " + std::to_string(c.settle_max - 1) +
             " settling hops, got " + std::to_string(n);
  } else {
    detail = "hops " + std::to_string(best_start + 1) + ".." + std::to_string(best_start + c.window);
  }
  const std::string v_name = lateral ? "ydot" : "xdot";
  res.checks.push_back(make_check(v_name + "_steady_state" + suffix, best_v, "<=", c.xdot_tol, detail));
  if (!lateral) res.checks.push_back(make_check("apex_steady_state" + suffix, best_h, "<=", c.apex_tol, detail));
}

void push_check(ScenarioResult& res) {
  const CheckSpec& c = res.config.check;
  std::vector<const ApexRecord*> after;
  for (const auto& a : res.apexes)
    if (a.t > res.push_end) after.push_back(&a);
  int recovered = -1;
  for (int k = static_cast<int>(after.size()) - 1; k >= 0; --k) {
    if (std::abs(after[k]->xdot - res.config.xdot_des) > c.recovery_tol) break;
    if (res.config.model == ModelKind::Slip3D && std::abs(after[k]->ydot - res.config.ydot_des) > c.recovery_tol)
      break;
    recovered = k + 1;
  }
  std::ostringstream os;
  os << "apex xdot after the push:";
  for (std::size_t k = 0; k < after.size() && k < 6; ++k) os << " " << num(after[k]->xdot);
  const int needed = c.recovery_events + 2;
  if (static_cast<int>(after.size()) < needed) {
    os << " (need at least " << needed << " apexes after the push)";
    res.checks.push_back(make_check("push_recovery_events", kNaN, "<=", c.recovery_events, os.str()));
    return;
  }
  res.checks.push_back(make_check("push_recovery_events", recovered < 0 ? kNaN : recovered, "<=",
                                  c.recovery_events, os.str()));
}

void terrain_check(ScenarioResult& res) {
  const double step = res.config.terrain.step_height;
  double t_on = kNaN;
  for (const auto& e : res.trajectory.events) {
    if (e.kind == EventKind::Touchdown && e.state_after.contact.size() > 0 &&
        std::abs(e.state_after.contact[e.state_after.contact.size() - 1] - step) < 1e-12) {
      t_on = e.t;
      break;
    }
  }
  if (std::isnan(t_on)) {
    res.checks.push_back(make_check("terrain_apex_change", kNaN, "<=", res.config.check.apex_tol,
                                    "the hopper never landed on the step"));
    return;
  }
  double before = kNaN;
  std::vector<double> after;
  for (const auto& a : res.apexes) {
    if (a.t < t_on)
      before = a.height;
    else
      after.push_back(a.height);
  }
  std::ostringstream os;
  os << "apex before the step " << num(before) << " m; after:";
  for (std::size_t k = 0; k < after.size() && k < 6; ++k) os << " " << num(after[k]);
  if (std::isnan(before) || after.size() < 3) {
    os << " (need an apex before and three after the step)";
    res.checks.push_back(make_check("terrain_apex_change", kNaN, "<=", res.config.check.apex_tol, os.str()));
    return;
  }
  double worst = 0.0;
  for (std::size_t k = 1; k < after.size(); ++k) worst = std::max(worst, std::abs(after[k] - before) / before);
  os << " (first apex after the step is the transient)";
  res.checks.push_back(make_check("terrain_apex_change", worst, "<=", res.config.check.apex_tol, os.str()));
}

/// Stance GRF: non-negative strictly before liftoff, and zero within the
/// localization tolerance at the liftoff sample.
template <typename GrfOf>
void grf_check(ScenarioResult& res, double weight, GrfOf vertical) {
  std::vector<double> liftoffs;
  for (const auto& e : res.trajectory.events)
    if (e.kind == EventKind::Liftoff) liftoffs.push_back(e.t);
  double min_inside = std::numeric_limits<double>::infinity();
  double worst_at_liftoff = 0.0;
  int stance_samples = 0;
  for (const auto& s : res.trajectory.samples) {
    if (s.state.phase != Phase::Stance || s.grf.size() == 0) continue;
    ++stance_samples;
    const double fz = vertical(s.grf);
    if (std::binary_search(liftoffs.begin(), liftoffs.end(), s.t))
      worst_at_liftoff = std::max(worst_at_liftoff, std::abs(fz));
    else
      min_inside = std::min(min_inside, fz);
  }
  if (stance_samples == 0) return;
  res.checks.push_back(make_check("stance_grf_min", min_inside, ">=", 0.0,
                                  std::to_string(stance_samples) + " stance samples"));
  res.checks.push_back(make_check("liftoff_grf_abs", worst_at_liftoff, "<=", 1e-6 * weight,
                                  "vertical GRF at the localized liftoff"));
}

template <typename GrfOf>
void friction_warnings(ScenarioResult& res, GrfOf split) {
  const double mu = res.config.check.friction_mu;
  bool warned = false;
  for (const auto& s : res.trajectory.samples) {
    if (s.state.phase != Phase::Stance || s.grf.size() == 0) {
      warned = false;
      continue;
    }
    const auto [ft, fn] = split(s.grf);
    if (!warned && fn > 0.0 && std::abs(ft) > mu * fn) {
      std::ostringstream os;
      os << "t=" << num(s.t) << ": tangential/normal GRF ratio " << num(std::abs(ft) / fn) << " exceeds mu=" << num(mu);
      res.log.push_back(os.str());
      warned = true;
    }
  }
}

void hop_checks(ScenarioResult& res) {
  const ScenarioConfig& cfg = res.config;
  const double apex = target_apex(cfg);
  switch (cfg.kind) {
    case ScenarioKind::Hop:
      steady_state_checks(res, cfg.xdot_des, apex, "", false);
      if (cfg.model == ModelKind::Slip3D) steady_state_checks(res, cfg.ydot_des, apex, "", true);
      break;
    case ScenarioKind::Push:
      push_check(res);
      break;
    case ScenarioKind::TerrainStep:
      terrain_check(res);
      break;
    default:
      break;
  }
  const double weight = cfg.model_mass() * cfg.slip.g;
  if (cfg.model == ModelKind::Slip3D) {
    grf_check(res, weight, [](const Eigen::VectorXd& f) { return f[2]; });
    friction_warnings(res, [](const Eigen::VectorXd& f) { return std::pair{std::hypot(f[0], f[1]), f[2]}; });
  } else {
    grf_check(res, weight, [](const Eigen::VectorXd& f) { return f[1]; });
    friction_warnings(res, [](const Eigen::VectorXd& f) { return std::pair{f[0], f[1]}; });
  }
}

// ---------------------------------------------------------------------------
// Runs

void run_hopping(ScenarioResult& res) {
  const ScenarioConfig& cfg = res.config;
  const double h0 = cfg.start_apex.value_or(target_apex(cfg));
  const double v0 = cfg.start_xdot.value_or(cfg.xdot_des);
  const HopControllerConfig hc = cfg.resolved_controller();
  switch (cfg.model) {
    case ModelKind::Slip: {
      res.gait = gait_for(cfg, cfg.xdot_des);
      SlipHopController ctrl(cfg.slip, hc, res.gait, res.gait->u_star);
      try {
        res.trajectory = run_hops(res, cfg, ctrl.bind(), SlipModel::apex_state(0.0, h0, v0),
                                  [&](const Environment& env) { return SlipModel(cfg.slip, env); });
      } catch (...) {
        res.apexes = ctrl.apexes();
        res.log.insert(res.log.end(), ctrl.log().begin(), ctrl.log().end());
        throw;
      }
      res.apexes = ctrl.apexes();
      res.log.insert(res.log.end(), ctrl.log().begin(), ctrl.log().end());
      break;
    }
    case ModelKind::Slip3D: {
      res.gait = gait_for(cfg, cfg.xdot_des);
      res.lateral_gait = gait_for(cfg, cfg.ydot_des);
      Slip3dHopController ctrl(cfg.slip, hc, *res.gait, *res.lateral_gait);
      HybridState s0;
      s0.q = Eigen::Vector3d(0.0, 0.0, h0);
      s0.v = Eigen::Vector3d(v0, cfg.ydot_des, 0.0);
      try {
        res.trajectory = run_hops(res, cfg, ctrl.bind(), s0,
                                  [&](const Environment& env) { return Slip3dModel(cfg.slip, env); });
      } catch (...) {
        res.apexes = ctrl.apexes();
        throw;
      }
      res.apexes = ctrl.apexes();
      break;
    }
    case ModelKind::PlanarRobot: {
      res.gait = gait_for(cfg, cfg.xdot_des);
      RobotHopController ctrl(cfg.robot, hc, res.gait, res.gait->u_star);
      const PlanarRobotModel shape(cfg.robot);
      const HybridState s0 = shape.aerial_state(0.0, h0, v0, res.gait->u_star);
      try {
        res.trajectory = run_hops(res, cfg, ctrl.bind(), s0,
                                  [&](const Environment& env) { return PlanarRobotModel(cfg.robot, env); });
      } catch (...) {
        res.apexes = ctrl.apexes();
        res.log.insert(res.log.end(), ctrl.log().begin(), ctrl.log().end());
        throw;
      }
      res.apexes = ctrl.apexes();
      res.log.insert(res.log.end(), ctrl.log().begin(), ctrl.log().end());
      break;
    }
  }
  res.log.insert(res.log.end(), res.trajectory.notes.begin(), res.trajectory.notes.end());
  if (res.trajectory.termination != Termination::Completed) {
    std::ostringstream os;
    os << "run stopped at t_max=" << num(cfg.t_max) << " s after " << res.apexes.size() << " of " << cfg.hops
       << " apexes";
    res.log.push_back(os.str());
  }
  res.checks.push_back(make_check("apex_count", static_cast<double>(res.apexes.size()), ">=", cfg.hops));
  hop_checks(res);
}

void run_design(ScenarioResult& res) {
  const ScenarioConfig& cfg = res.config;
  BangBangSpec base;
  base.g = cfg.slip.g;
  base.r0 = cfg.slip.r0;
  base.d = cfg.design.damping;
  res.design_stiffness = design_sweep_stiffness(cfg.design.weights, cfg.design.stiffness, cfg.design.apex,
                                                cfg.design.damping, base);
  BangBangSpec twr_base = base;
  twr_base.m = cfg.slip.m;
  res.design_twr = design_sweep_twr(cfg.design.stiffness, cfg.design.twr, twr_base);

  // Required thrust must not fall as weight grows.
  int violations = 0;
  for (double k : cfg.design.stiffness) {
    double prev = -std::numeric_limits<double>::infinity();
    bool prev_infeasible = false;
    for (const auto& row : res.design_stiffness) {
      if (row.stiffness != k) continue;
      if (prev_infeasible && row.feasible) ++violations;
      if (row.feasible && row.F_max_required < prev) ++violations;
      if (row.feasible) prev = row.F_max_required;
      prev_infeasible = prev_infeasible || !row.feasible;
    }
  }
  res.checks.push_back(make_check("fig6a_monotone_in_weight", violations, "==", 0));
  violations = 0;
  for (double k : cfg.design.stiffness) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& row : res.design_twr) {
      if (row.stiffness != k) continue;
      if (row.apex < prev) ++violations;
      prev = row.apex;
    }
  }
  res.checks.push_back(make_check("fig6b_monotone_in_twr", violations, "==", 0));

  double worst = 0.0;
  int cells = 0;
  for (const auto& row : res.design_stiffness) {
    if (!row.feasible) continue;
    BangBangSpec s = base;
    s.m = row.weight;
    s.k = row.stiffness;
    s.apex = cfg.design.apex;
    s.F_max = row.F_max_required;
    worst = std::max(worst, std::abs(bang_bang_closed_form(s).apex - bang_bang_numeric(s).apex));
    ++cells;
  }
  res.checks.push_back(make_check("closed_form_vs_numeric_apex", worst, "<=", 1e-4,
                                  std::to_string(cells) + " feasible cells"));
}

void run_cot(ScenarioResult& res) {
  const ScenarioConfig& cfg = res.config;
  CotHoppingOptions opts;
  opts.apex = cfg.cot.apex;
  opts.xdot = cfg.cot.xdot;
  opts.settle_steps = cfg.cot.settle_steps;
  opts.n_steps = cfg.cot.n_steps;
  opts.apex_tol = cfg.check.apex_tol;
  opts.cfg = slip_controller(cfg);
  for (double twr : cfg.cot.twr) {
    res.cot.push_back(cot_hopping(cfg.slip, twr, opts));
    res.cot.push_back(cot_flying(cfg.slip.m, twr, cfg.cot.xdot, cfg.cot.flight_duration, cfg.slip.g));
  }
  int wrong = 0;
  for (const auto& r : res.cot) {
    if (r.mode != CotMode::Flying) continue;
    const double expect = r.twr > 1.0 ? 1.0 / cfg.cot.xdot : std::numeric_limits<double>::infinity();
    if (!(r.cot == expect || std::abs(r.cot - expect) <= 1e-12 * expect)) ++wrong;
  }
  res.checks.push_back(make_check("flying_cot_law", wrong, "==", 0, "1/v above twr 1, inf otherwise"));
  for (const auto& r : res.cot) {
    if (r.mode == CotMode::Hopping && r.twr == 0.9)
      res.checks.push_back(make_check("hopping_cot_at_twr_0.9", r.cot, "<", std::numeric_limits<double>::infinity(),
                                      r.note));
  }
}

}  // namespace

CheckResult make_check(std::string name, double measured, std::string relation, double threshold, std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.relation = std::move(relation);
  c.threshold = threshold;
  c.pass = compare(measured, c.relation, threshold);
  c.detail = std::move(detail);
  return c;
}

bool ScenarioResult::passed() const {
  if (failure_kind) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Gait run_gait_search(const ScenarioConfig& cfg) {
  return find_periodic_orbit(cfg.xdot_des, target_apex(cfg), cfg.slip, slip_controller(cfg), cfg.integrator);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult res;
  res.config = cfg;
  try {
    switch (cfg.kind) {
      case ScenarioKind::Hop:
      case ScenarioKind::Push:
      case ScenarioKind::TerrainStep:
        run_hopping(res);
        break;
      case ScenarioKind::GaitSearch: {
        res.gait = run_gait_search(cfg);
        res.checks.push_back(make_check("gait_residual", res.gait->residual, "<=", 1e-5));
        break;
      }
      case ScenarioKind::DesignSweep:
        run_design(res);
        break;
      case ScenarioKind::CotCompare:
        run_cot(res);
        break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::GaitMismatch) throw;
    res.failure_kind = e.kind();
    res.failure = e.what();
    res.checks.push_back(make_check("run_completed", 0, "==", 1, e.what()));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

struct Row {
  double x, z, pitch, deflection, xdot, zdot, thrust, grf_x, grf_z;
};

Row row_of(const ScenarioConfig& cfg, const Sample& s) {
  Row r{};
  const Eigen::VectorXd& u = s.input;
  switch (cfg.model) {
    case ModelKind::Slip: {
      const SlipModel m(cfg.slip);
      r = {s.state.q[0], s.state.q[1], m.leg_angle(s.state, u), m.compression(s.state), s.state.v[0], s.state.v[1],
           u[slip_input::kThrust], s.grf.size() ? s.grf[0] : 0.0, s.grf.size() ? s.grf[1] : 0.0};
      break;
    }
    case ModelKind::Slip3D: {
      const Slip3dModel m(cfg.slip);
      double deflection = 0.0;
      if (s.state.phase == Phase::Stance) {
        const Eigen::Vector3d rel = s.state.q.head<3>() - s.state.contact.head<3>();
        deflection = cfg.slip.r0 - rel.norm();
      }
      r = {s.state.q[0], s.state.q[2], m.leg_angles(s.state, u)[0], deflection, s.state.v[0], s.state.v[2], u[0],
           s.grf.size() ? s.grf[0] : 0.0, s.grf.size() ? s.grf[2] : 0.0};
      break;
    }
    case ModelKind::PlanarRobot: {
      const PlanarRobotModel m(cfg.robot);
      const Eigen::Vector2d c = com_position(s.state, cfg.robot);
      const Eigen::Vector2d cv = com_velocity(s.state, cfg.robot);
      r = {c[0], c[1], s.state.q[2], s.state.q[3], cv[0], cv[1], m.applied_thrust(s.state, u),
           s.grf.size() ? s.grf[0] : 0.0, s.grf.size() ? s.grf[1] : 0.0};
      break;
    }
  }
  return r;
}

std::string table_csv(const ScenarioResult& r) {
  switch (r.config.kind) {
    case ScenarioKind::DesignSweep: return fig6a_csv(r.design_stiffness);
    default: return {};
  }
}

}  // namespace

std::string trajectory_csv(const ScenarioResult& r) {
  std::ostringstream os;
  os << "# schema: trajectory v" << kTrajectorySchemaVersion << "\n";
  os << "t,phase,x,z,pitch,spring_deflection,xdot,zdot,F_t,leg_angle_cmd,GRF_x,GRF_z,eta,V,delta\n";
  for (const auto& s : r.trajectory.samples) {
    const Row row = row_of(r.config, s);
    os << num(s.t) << ',' << to_string(s.state.phase) << ',' << num(row.x) << ',' << num(row.z) << ','
       << num(row.pitch) << ',' << num(row.deflection) << ',' << num(row.xdot) << ',' << num(row.zdot) << ','
       << num(row.thrust) << ',' << num(s.diag.leg_angle_cmd) << ',' << num(row.grf_x) << ',' << num(row.grf_z)
       << ',' << num(s.diag.eta) << ',' << num(s.diag.lyapunov) << ',' << num(s.diag.delta) << '\n';
  }
  return os.str();
}

std::string events_csv(const ScenarioResult& r) {
  std::ostringstream os;
  os << "# schema: events v" << kEventsSchemaVersion << "\n";
  os << "kind,t,x,z,xdot,zdot,apex_step,apex_height,apex_xdot,apex_energy,u_cmd\n";
  std::size_t next_apex = 0;
  for (const auto& e : r.trajectory.events) {
    Row row{};
    if (r.config.model == ModelKind::PlanarRobot) {
      const Eigen::Vector2d c = com_position(e.state_after, r.config.robot);
      const Eigen::Vector2d cv = com_velocity(e.state_after, r.config.robot);
      row.x = c[0], row.z = c[1], row.xdot = cv[0], row.zdot = cv[1];
    } else if (r.config.model == ModelKind::Slip3D) {
      row.x = e.state_after.q[0], row.z = e.state_after.q[2], row.xdot = e.state_after.v[0],
      row.zdot = e.state_after.v[2];
    } else {
      row.x = e.state_after.q[0], row.z = e.state_after.q[1], row.xdot = e.state_after.v[0],
      row.zdot = e.state_after.v[1];
    }
    os << to_string(e.kind) << ',' << num(e.t) << ',' << num(row.x) << ',' << num(row.z) << ',' << num(row.xdot)
       << ',' << num(row.zdot);
    if (e.kind == EventKind::Apex && next_apex < r.apexes.size()) {
      const ApexRecord& a = r.apexes[next_apex++];
      os << ',' << a.step << ',' << num(a.height) << ',' << num(a.xdot) << ',' << num(a.energy) << ','
         << num(a.u_cmd);
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json o;
    o["name"] = c.name;
    o["pass"] = c.pass;
    o["measured"] = num(c.measured);
    o["relation"] = c.relation;
    o["threshold"] = num(c.threshold);
    if (!c.detail.empty()) o["detail"] = c.detail;
    j.push_back(o);
  }
  return j.dump(2) + "\n";
}

std::string report_text(const ScenarioResult& r) {
  const bool has_tables = !r.design_stiffness.empty() || !r.design_twr.empty() || !r.cot.empty() || r.gait;
  if (r.apexes.empty() && !has_tables && !r.failure_kind)
    throw Error(ErrorKind::EmptyRun, "the run produced no apex events and no tables");
  std::ostringstream os;
  os << "scenario " << to_string(r.config.kind) << " (" << to_string(r.config.model) << ")\n";
  if (r.failure_kind) os << "run failed: " << r.failure << "\n";
  if (r.gait) {
    const Gait& g = *r.gait;
    os << "gait: xdot*=" << num(g.xdot_star) << " m/s  u*=" << num(g.u_star) << " rad  A=" << num(g.A)
       << "  B=" << num(g.B) << "  K=" << num(g.K) << "  residual=" << num(g.residual) << "\n";
  }
  if (!r.apexes.empty()) {
    os << "\n step        t   height     xdot   energy    u_cmd\n";
    for (const auto& a : r.apexes) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%5d %8.3f %8.4f %8.4f %8.3f %8.4f%s\n", a.step, a.t, a.height, a.xdot, a.energy,
                    a.u_cmd, a.clamped ? "  clamped" : "");
      os << buf;
    }
  }
  if (!r.trajectory.events.empty()) {
    os << "\nevents: " << r.trajectory.count(EventKind::Touchdown) << " touchdown, "
       << r.trajectory.count(EventKind::Liftoff) << " liftoff, " << r.trajectory.count(EventKind::Apex) << " apex, "
       << r.trajectory.count(EventKind::LegStop) << " leg stop\n";
  }
  if (!r.log.empty()) {
    os << "\nlog:\n";
    for (const auto& l : r.log) os << "  " << l << "\n";
  }
  os << "\nchecks:\n";
  for (const auto& c : r.checks) {
    os << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  measured=" << num(c.measured) << " "
       << c.relation << " " << num(c.threshold);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  os << (r.passed() ? "result: PASS\n" : "result: FAIL\n");
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorKind::ConfigError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto at = [&](const std::string& name) { return (std::filesystem::path(out_dir) / name).string(); };
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& content) {
    write_file_atomic(at(name), content);
    written.push_back(name);
  };
  if (!r.trajectory.samples.empty()) {
    put("trajectory.csv", trajectory_csv(r));
    put("events.csv", events_csv(r));
  }
  if (r.config.kind == ScenarioKind::GaitSearch && r.gait) put("gait.json", gait_to_json(*r.gait));
  if (!r.design_stiffness.empty()) put("design_fig6a.csv", table_csv(r));
  if (!r.design_twr.empty()) put("design_fig6b.csv", fig6b_csv(r.design_twr));
  if (!r.cot.empty()) put("cot_fig6c.csv", fig6c_csv(r.cot));
  put("report.txt", report_text(r));
  put("checks.json", checks_json(r.checks));
  return written;
}

}  // namespace hop
