#include "hop/acceptance.hpp"

#include "hop/design.hpp"
#include "hop/energy_controller.hpp"
#include "hop/errors.hpp"
#include "hop/planar_robot.hpp"
#include "hop/s2s.hpp"
#include "hop/scenario.hpp"
#include "hop/slip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace hop {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const CheckResult* find_check(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string failed_checks(const ScenarioResult& r) {
  std::string out;
  for (const auto& c : r.checks)
    if (!c.pass) out += (out.empty() ? "" : ", ") + c.name + "=" + fmt(c.measured);
  if (r.failure_kind) out += (out.empty() ? "" : ", ") + r.failure;
  return out;
}

/// Scenario runs shared between criteria; kept for the GRF and determinism checks.
class Runs {
 public:
  explicit Runs(const AcceptanceOptions& opts) : opts_(opts) {}

  ScenarioConfig scenario(ScenarioKind kind, ModelKind model) const {
    ScenarioConfig c;
    c.kind = kind;
    c.model = model;
    c.seed = opts_.base.seed;
    c.integrator = opts_.base.integrator;
    c.slip.g = opts_.base.slip.g;
    c.robot.g = opts_.base.slip.g;
    return c;
  }

  const ScenarioResult& run(const std::string& name, const ScenarioConfig& cfg, double* seconds = nullptr) {
    const auto t0 = Clock::now();
    ScenarioResult r = run_scenario(cfg);
    if (seconds) *seconds = seconds_since(t0);
    if (!opts_.out_dir.empty()) write_artifacts(r, (std::filesystem::path(opts_.out_dir) / name).string());
    csv_[name] = trajectory_csv(r) + events_csv(r);
    configs_.emplace_back(name, cfg);
    return results_.emplace(name, std::move(r)).first->second;
  }

  const std::map<std::string, ScenarioResult>& results() const { return results_; }
  const std::vector<std::pair<std::string, ScenarioConfig>>& configs() const { return configs_; }
  const std::string& csv(const std::string& name) const { return csv_.at(name); }

 private:
  const AcceptanceOptions& opts_;
  std::map<std::string, ScenarioResult> results_;
  std::map<std::string, std::string> csv_;
  std::vector<std::pair<std::string, ScenarioConfig>> configs_;
};

// ---------------------------------------------------------------------------

CriterionResult periodic_hopping(Runs& runs) {
  CriterionResult out{1, "periodic hopping at 0.5 m/s, 0.5 m apex", false, {}};
  std::ostringstream os;
  bool ok = true;
  for (ModelKind model : {ModelKind::Slip, ModelKind::PlanarRobot}) {
    ScenarioConfig c = runs.scenario(ScenarioKind::Hop, model);
    c.xdot_des = 0.5;
    c.apex = 0.5;
    c.start_xdot = 0.3;
    c.hops = 30;
    double secs = 0.0;
    const ScenarioResult& r = runs.run("hop_" + std::string(to_string(model)), c, &secs);
    const CheckResult* v = find_check(r, "xdot_steady_state");
    const CheckResult* h = find_check(r, "apex_steady_state");
    const bool pass = r.passed() && v && h && secs <= 30.0;
    ok = ok && pass;
    os << to_string(model) << ": max|xdot-0.5|=" << (v ? fmt(v->measured) : "n/a")
       << " apex err=" << (h ? fmt(h->measured) : "n/a") << " (" << (h ? h->detail : "") << ") " << fmt(secs, 3)
       << " s";
    if (!pass) os << " [" << failed_checks(r) << "]";
    os << "; ";
  }
  out.pass = ok;
  out.measured = os.str();
  return out;
}

CriterionResult push_recovery(Runs& runs) {
  CriterionResult out{2, "push recovery, 10 N for 0.1 s", false, {}};
  std::ostringstream os;
  bool ok = true;
  for (auto [model, allowed] : {std::pair{ModelKind::Slip, 2}, std::pair{ModelKind::PlanarRobot, 3}}) {
    for (double force : {10.0, -10.0}) {
      ScenarioConfig c = runs.scenario(ScenarioKind::Push, model);
      c.xdot_des = 0.5;
      c.apex = 0.5;
      c.hops = 14;
      c.push = PushSpec{force, 0.0, 0.1, 0.0, 5};
      c.check.recovery_events = allowed;
      const std::string name =
          "push_" + std::string(to_string(model)) + (force > 0 ? "_forward" : "_backward");
      const ScenarioResult& r = runs.run(name, c);
      const CheckResult* rec = find_check(r, "push_recovery_events");
      const bool pass = r.passed() && rec;
      ok = ok && pass;
      os << name << ": recovered at apex " << (rec ? fmt(rec->measured) : "n/a") << " (<= " << allowed << ")";
      if (!pass) os << " [" << failed_checks(r) << "]";
      os << "; ";
    }
  }
  out.pass = ok;
  out.measured = os.str();
  return out;
}

CriterionResult terrain_step(Runs& runs) {
  CriterionResult out{3, "terrain step-up of 0.12 m", false, {}};
  ScenarioConfig c = runs.scenario(ScenarioKind::TerrainStep, ModelKind::Slip);
  c.xdot_des = 0.5;
  c.apex = 0.5;
  c.hops = 14;
  c.terrain = {0.12, 2.0};
  const ScenarioResult& r = runs.run("terrain_step", c);
  const CheckResult* t = find_check(r, "terrain_apex_change");
  out.pass = r.passed() && t;
  out.measured = "worst apex change after the transient " + (t ? fmt(t->measured) : "n/a") + " (<= 0.02); " +
                 (t ? t->detail : failed_checks(r));
  return out;
}

CriterionResult energy_level(Runs& runs) {
  CriterionResult out{4, "energy level 10.2 J at a 1.1 m apex", false, {}};
  const double m = 2.5, g = 9.81, g_e = 3.7091, apex = 1.1, E = 10.2;
  const double rel = std::abs(m * g_e * apex - E) / E;
  // The thrust floor that produces this g_e.
  const double F_min = m * (g - g_e);

  ScenarioConfig c = runs.scenario(ScenarioKind::Hop, ModelKind::Slip);
  c.slip.m = m;
  c.slip.k = 4848.5;
  c.slip.g = g;
  c.ctrl.F_min = F_min;
  c.ctrl.F_max = 22.0;
  c.E_d = E;
  c.g_e = g_e;
  c.apex = apex;
  c.xdot_des = 0.0;
  c.start_apex = 0.8;
  c.hops = 15;
  c.check.apex_tol = 0.01;
  c.check.window = 10;
  c.check.settle_max = 5;
  const ScenarioResult& r = runs.run("energy_1p1m", c);

  // First hop from which every later apex stays within 1% of 1.1 m.
  int settled = -1;
  for (int k = static_cast<int>(r.apexes.size()) - 1; k >= 0; --k) {
    if (std::abs(r.apexes[k].height - apex) > 0.01 * apex) break;
    settled = r.apexes[k].step;
  }
  // The run starts at an apex, so apex k is reached after k hops.
  const int hops = settled;
  const bool regulated = settled > 0 && hops <= 5 && static_cast<int>(r.apexes.size()) >= 10;
  out.pass = rel <= 0.005 && regulated && !r.failure_kind;
  std::ostringstream os;
  os << "m*g_e*1.1=" << fmt(m * g_e * apex, 6) << " J (rel err " << fmt(rel, 3) << ", F_min=" << fmt(F_min, 6)
     << " N); apex within 1% after " << (hops < 0 ? std::string("never") : std::to_string(hops)) << " hops;";
  for (std::size_t k = 0; k < r.apexes.size() && k < 6; ++k) os << ' ' << fmt(r.apexes[k].height, 5);
  if (r.failure_kind) os << " [" << r.failure << "]";
  out.measured = os.str();
  return out;
}

/// Convex 1-D objective minimized by grid search with zooming; independent of
/// the solver's KKT enumeration.
double grid_oracle(const std::function<double(double)>& f, double lo, double hi) {
  double a = lo, b = hi, best = std::numeric_limits<double>::infinity(), best_x = lo;
  for (int round = 0; round < 40; ++round) {
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      const double x = a + (b - a) * i / n;
      const double v = f(x);
      if (v < best) best = v, best_x = x;
    }
    const double w = (b - a) / n;
    a = std::max(lo, best_x - w);
    b = std::min(hi, best_x + w);
    if (b - a < 1e-15 * std::max(1.0, std::abs(best_x))) break;
  }
  return best;
}

CriterionResult qp_correctness(const AcceptanceOptions& opts) {
  CriterionResult out{5, "CLF-QP against a grid oracle", false, {}};
  std::mt19937_64 rng(opts.base.seed + 5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto uni = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };

  double worst_obj = 0.0, worst_con = 0.0, worst_closed = 0.0;
  for (int i = 0; i < opts.random_instances; ++i) {
    EnergyControllerConfig cfg;
    cfg.mass = uni(1.0, 4.0);
    cfg.K_p = -uni(1.0, 10.0);
    cfg.Q = uni(0.5, 2.0);
    cfg.gamma = uni(5.0, 60.0);
    cfg.F_min = uni(0.0, 5.0);
    cfg.F_max = cfg.F_min + uni(5.0, 25.0);
    cfg.g_e = 9.81 - cfg.F_min / cfg.mass;
    const double eta = uni(-5.0, 5.0), zdot = uni(-3.0, 3.0), c = std::cos(uni(-0.5, 0.5));
    const double F_prev = uni(cfg.F_min, cfg.F_max);
    const ClfTerms clf = clf_terms(eta, output_dynamics(zdot, c, cfg), cfg);
    // Independent construction of the constraint data.
    const double P = cfg.Q / (-2.0 * cfg.K_p);
    const double A = 2.0 * P * eta * zdot * c;
    const double b = -cfg.gamma * P * eta * eta + 2.0 * P * eta * zdot * cfg.F_min;

    for (QpVariant variant : {QpVariant::RelaxedEqualityQP, QpVariant::InequalityQP}) {
      for (double p : {0.0, uni(0.0, 2.0)}) {
        cfg.variant = variant;
        cfg.p = p;
        const QpSolution s = solve_energy_qp(clf, F_prev, cfg);
        const double ref = variant == QpVariant::RelaxedEqualityQP ? F_prev : 0.0;
        const bool eq = variant == QpVariant::RelaxedEqualityQP;
        const auto objective = [&](double F) {
          const double r = A * F - b;
          const double d = eq ? r : std::max(0.0, r);
          return p * (F - ref) * (F - ref) + d * d;
        };
        const double oracle = grid_oracle(objective, cfg.F_min, cfg.F_max);
        const double own = p * (s.F_t - ref) * (s.F_t - ref) + s.delta * s.delta;
        worst_obj = std::max(worst_obj, std::abs(own - oracle));
        double viol = std::max({cfg.F_min - s.F_t, s.F_t - cfg.F_max, 0.0});
        if (eq)
          viol = std::max(viol, std::abs(A * s.F_t - b - s.delta));
        else
          viol = std::max({viol, A * s.F_t - b - s.delta, -s.delta});
        worst_con = std::max(worst_con, viol);
      }
    }
    cfg.variant = QpVariant::RelaxedEqualityQP;
    cfg.p = 0.0;
    const QpSolution closed = solve_energy_qp(clf, F_prev, cfg);
    const QpSolution generic = solve_energy_qp_kkt(clf, F_prev, cfg);
    worst_closed = std::max({worst_closed, std::abs(closed.F_t - generic.F_t),
                             std::abs(closed.objective - generic.objective)});
  }
  out.pass = worst_obj <= 1e-6 && worst_con <= 1e-9 && worst_closed <= 1e-10;
  std::ostringstream os;
  os << opts.random_instances << " instances: objective gap " << fmt(worst_obj, 3) << " (<= 1e-6), constraint "
     << fmt(worst_con, 3) << " (<= 1e-9), closed form vs generic " << fmt(worst_closed, 3) << " (<= 1e-10)";
  out.measured = os.str();
  return out;
}

CriterionResult clf_contract(Runs& runs) {
  CriterionResult out{6, "CLF decrease rate when unconstrained", false, {}};
  double worst = 0.0;
  int checked = 0;
  std::ostringstream os;
  for (auto [name, start_xdot, start_apex] :
       {std::tuple{"clf_slip_a", 0.5, 0.5}, std::tuple{"clf_slip_b", 0.3, 0.7}, std::tuple{"clf_slip_c", 0.7, 0.35}}) {
    ScenarioConfig c = runs.scenario(ScenarioKind::Hop, ModelKind::Slip);
    c.xdot_des = 0.5;
    c.apex = 0.5;
    c.hops = 6;
    c.start_xdot = start_xdot;
    c.start_apex = start_apex;
    const HopControllerConfig hc = c.resolved_controller();
    const EnergyControllerConfig& e = hc.energy;
    const Gait gait = find_periodic_orbit(c.xdot_des, c.apex, c.slip, hc, c.integrator);
    SlipHopController ctrl(c.slip, hc, gait, gait.u_star);
    const SlipModel model(c.slip);

    // Records every control evaluation with the state it was computed at.
    std::vector<std::pair<HybridState, ControlSample>> log;
    Controller inner = ctrl.bind();
    Controller rec{[&](const HybridState& s) {
                     ControlSample cs = inner.sample(s);
                     log.emplace_back(s, cs);
                     return cs;
                   },
                   inner.on_event};
    simulate_hops(model, SlipModel::apex_state(0.0, start_apex, start_xdot), rec, c.hops, c.t_max, c.integrator);

    const double P = e.Q / (-2.0 * e.K_p);
    for (const auto& [s, cs] : log) {
      if (s.phase != Phase::Aerial || cs.diag.active_set != kNoBound || std::abs(cs.diag.delta) > 1e-12) continue;
      const double z = s.q[1], zd = s.v[1];
      const double eta = e.mass * e.g_e * z + 0.5 * e.mass * zd * zd - e.E_d;
      const double V = P * eta * eta;
      if (V < 1e-8) continue;
      const double zdd = model.acceleration(s, cs.input)[1];
      const double Vdot = 2.0 * P * eta * e.mass * zd * (e.g_e + zdd);
      worst = std::max(worst, std::abs(Vdot + e.gamma * V) / (e.gamma * V));
      ++checked;
    }
  }
  out.pass = checked > 0 && worst <= 0.01;
  os << checked << " unconstrained flight samples, worst |Vdot + gamma V| / (gamma V) = " << fmt(worst, 3)
     << " (<= 0.01)";
  out.measured = os.str();
  return out;
}

CriterionResult deadbeat(const AcceptanceOptions& opts) {
  CriterionResult out{7, "deadbeat step-to-step control", false, {}};
  ScenarioConfig c;
  c.integrator = opts.base.integrator;
  c.slip.g = opts.base.slip.g;
  const HopControllerConfig hc = c.resolved_controller();
  const Gait gait = find_periodic_orbit(0.5, 0.5, c.slip, hc, c.integrator);
  const GaitContext ctx = context_of(gait, c.integrator);
  double worst_ratio = 0.0;
  int n = 0, clamped = 0;
  std::ostringstream os;
  bool ok = true;
  for (int i = -6; i <= 6; ++i) {
    if (i == 0) continue;
    const double e0 = 0.05 * i;
    const double x0 = gait.xdot_star + e0;
    bool sat = false;
    const double u = stepping_controller(x0, gait, &sat);
    clamped += sat;
    double x1 = std::numeric_limits<double>::quiet_NaN();
    try {
      x1 = return_map(x0, u, ctx);
    } catch (const Error& err) {
      os << "e0=" << fmt(e0, 2) << ": " << err.what() << "; ";
    }
    const double e1 = std::abs(x1 - gait.xdot_star);
    const double bound = std::max(0.05 * std::abs(e0), 0.01);
    ok = ok && e1 <= bound;
    worst_ratio = std::max(worst_ratio, std::isnan(e1) ? std::numeric_limits<double>::infinity() : e1 / bound);
    ++n;
  }
  out.pass = ok;
  os << n << " initial errors in [-0.3, 0.3] m/s, worst residual / allowed = " << fmt(worst_ratio, 3) << " (<= 1)";
  if (clamped) os << ", " << clamped << " saturated commands";
  out.measured = os.str();
  return out;
}

CriterionResult impact_physics(const AcceptanceOptions& opts, const Runs& runs) {
  CriterionResult out{8, "plastic impact and stance GRF", false, {}};
  std::mt19937_64 rng(opts.base.seed + 8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto uni = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
  RobotParams p;
  double worst_gain = -std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < opts.random_instances; ++i) {
    HybridState s;
    s.phase = Phase::Aerial;
    const double pitch = uni(-0.6, 0.6), comp = uni(0.0, 0.6 * p.max_travel);
    const double reach = p.attach_offset + p.r0 - comp;
    s.q = Eigen::Vector4d(uni(-1.0, 1.0), reach * std::cos(pitch), pitch, comp);
    s.v = Eigen::Vector4d(uni(-2.0, 2.0), uni(-4.0, -0.1), uni(-3.0, 3.0), uni(-1.0, 1.0));
    try {
      const ImpactResult r = impact_map(s, p);
      const double before = kinetic_energy(s, p), after = kinetic_energy(r.post, p);
      worst_gain = std::max(worst_gain, (after - before) / before);
    } catch (const Error&) {
      ++failures;
    }
  }
  const bool impact_ok = failures == 0 && worst_gain <= 1e-12;

  bool grf_ok = true;
  double min_grf = std::numeric_limits<double>::infinity(), liftoff_grf = 0.0;
  int runs_with_stance = 0;
  for (const auto& [name, r] : runs.results()) {
    const CheckResult* g = find_check(r, "stance_grf_min");
    const CheckResult* l = find_check(r, "liftoff_grf_abs");
    if (!g || !l) continue;
    ++runs_with_stance;
    grf_ok = grf_ok && g->pass && l->pass;
    min_grf = std::min(min_grf, g->measured);
    liftoff_grf = std::max(liftoff_grf, l->measured);
  }
  out.pass = impact_ok && grf_ok && runs_with_stance > 0;
  std::ostringstream os;
  os << opts.random_instances << " random touchdowns: max relative KE change " << fmt(worst_gain, 3) << " (<= 0)";
  if (failures) os << ", " << failures << " impacts failed";
  os << "; " << runs_with_stance << " runs: min stance GRF_z " << fmt(min_grf) << " N, max |GRF_z| at liftoff "
     << fmt(liftoff_grf, 3) << " N";
  out.measured = os.str();
  return out;
}

CriterionResult design_analysis(Runs& runs) {
  CriterionResult out{9, "bang-bang design tables", false, {}};
  ScenarioConfig c = runs.scenario(ScenarioKind::DesignSweep, ModelKind::Slip);
  double secs = 0.0;
  const ScenarioResult& r = runs.run("design_sweep", c, &secs);

  // Monotonicity read straight off the tables.
  bool mono_weight = true, mono_twr = true;
  for (double k : c.design.stiffness) {
    double prev = -std::numeric_limits<double>::infinity();
    bool lost = false;
    for (double w : c.design.weights) {
      for (const auto& row : r.design_stiffness) {
        if (row.stiffness != k || row.weight != w) continue;
        const double need = row.feasible ? row.F_max_required : std::numeric_limits<double>::infinity();
        if (need < prev || (lost && row.feasible)) mono_weight = false;
        prev = need;
        lost = lost || !row.feasible;
      }
    }
    prev = -std::numeric_limits<double>::infinity();
    for (double t : c.design.twr) {
      for (const auto& row : r.design_twr) {
        if (row.stiffness != k || row.twr != t) continue;
        if (row.apex < prev) mono_twr = false;
        prev = row.apex;
      }
    }
  }
  const CheckResult* agree = find_check(r, "closed_form_vs_numeric_apex");
  out.pass = agree && agree->pass && mono_weight && mono_twr && !r.failure_kind && secs <= 60.0;
  std::ostringstream os;
  os << "closed form vs numeric " << (agree ? fmt(agree->measured, 3) : "n/a") << " m (<= 1e-4, "
     << (agree ? agree->detail : "") << "); thrust monotone in weight: " << (mono_weight ? "yes" : "no")
     << "; apex monotone in twr: " << (mono_twr ? "yes" : "no") << "; " << fmt(secs, 3) << " s";
  out.measured = os.str();
  return out;
}

CriterionResult cot_comparison(Runs& runs) {
  CriterionResult out{10, "cost of transport, hopping against flying", false, {}};
  ScenarioConfig c = runs.scenario(ScenarioKind::CotCompare, ModelKind::Slip);
  c.slip.m = 2.5;
  c.slip.k = 4848.5;
  const ScenarioResult& r = runs.run("cot", c);

  bool flying_ok = true;
  for (double twr : c.cot.twr) {
    const CotResult f = cot_flying(c.slip.m, twr, 1.0, 10.0, c.slip.g);
    if (twr > 1.0 ? f.cot != 1.0 : !std::isinf(f.cot)) flying_ok = false;
  }
  double cot_09 = std::numeric_limits<double>::infinity();
  for (const auto& row : r.cot)
    if (row.mode == CotMode::Hopping && row.twr == 0.9) cot_09 = row.cot;

  CotHoppingOptions o;
  o.apex = c.cot.apex;
  o.xdot = c.cot.xdot;
  o.settle_steps = c.cot.settle_steps;
  o.n_steps = c.cot.n_steps;
  o.cfg = c.resolved_controller();
  const double boundary = hopping_feasibility_boundary(c.slip, o);
  const bool boundary_ok = boundary >= 0.7 && boundary <= 0.9;

  out.pass = flying_ok && std::isfinite(cot_09) && boundary_ok && !r.failure_kind;
  std::ostringstream os;
  os << "flying COT law: " << (flying_ok ? "exact" : "violated") << "; hopping COT at twr 0.9 = " << fmt(cot_09)
     << "; feasibility boundary twr = " << fmt(boundary, 3) << " (accepted [0.7, 0.9])";
  out.measured = os.str();
  return out;
}

CriterionResult determinism(const AcceptanceOptions& opts, const Runs& first) {
  CriterionResult out{11, "determinism of the scenario CSVs", false, {}};
  AcceptanceOptions quiet = opts;
  quiet.out_dir.clear();
  Runs second(quiet);
  int same = 0, differ = 0;
  std::string which;
  for (const auto& [name, cfg] : first.configs()) {
    second.run(name, cfg);
    if (second.csv(name) == first.csv(name)) {
      ++same;
    } else {
      ++differ;
      which += " " + name;
    }
  }
  out.pass = differ == 0 && same > 0;
  out.measured = std::to_string(same) + " of " + std::to_string(same + differ) + " scenario CSVs byte-identical" +
                 (differ ? " (differ:" + which + ")" : "");
  return out;
}

template <typename F>
CriterionResult timed(F&& f, int id, const char* name, std::ostream* progress) {
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const Error& e) {
    r = CriterionResult{id, name, false, std::string("error: ") + e.what()};
  }
  r.seconds = seconds_since(t0);
  if (progress) *progress << acceptance_line(r) << std::endl;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  Runs runs(opts);
  std::vector<CriterionResult> out;
  std::ostream* p = opts.progress;
  out.push_back(timed([&] { return periodic_hopping(runs); }, 1, "periodic hopping", p));
  out.push_back(timed([&] { return push_recovery(runs); }, 2, "push recovery", p));
  out.push_back(timed([&] { return terrain_step(runs); }, 3, "terrain step-up", p));
  out.push_back(timed([&] { return energy_level(runs); }, 4, "energy level", p));
  out.push_back(timed([&] { return qp_correctness(opts); }, 5, "QP correctness", p));
  out.push_back(timed([&] { return clf_contract(runs); }, 6, "CLF contract", p));
  out.push_back(timed([&] { return deadbeat(opts); }, 7, "deadbeat", p));
  out.push_back(timed([&] { return impact_physics(opts, runs); }, 8, "impact and GRF", p));
  out.push_back(timed([&] { return design_analysis(runs); }, 9, "design analysis", p));
  out.push_back(timed([&] { return cot_comparison(runs); }, 10, "COT comparison", p));
  out.push_back(timed([&] { return determinism(opts, runs); }, 11, "determinism", p));
  return out;
}

std::string acceptance_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %s: ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
  return head + r.measured;
}

std::string acceptance_text(const std::vector<CriterionResult>& results) {
  std::string s;
  for (const auto& r : results) s += acceptance_line(r) + "\n";
  return s;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return !results.empty() &&
         std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace hop
