#include "hop/s2s.hpp"

#include "hop/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hop {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::Vector4d cart_of(const HybridState& s) { return {s.q[0], s.q[1], s.v[0], s.v[1]}; }

double stance_leg_angle(const HybridState& s) {
  return to_polar(cart_of(s), Eigen::Vector2d(s.contact[0], s.contact[1]))[1];
}

std::string clamp_message(double t, double u, double limit) {
  std::ostringstream os;
  os << "t=" << t << ": touchdown command " << u << " rad clamped to +-" << limit;
  return os.str();
}

ControlDiagnostics diag_of(const VerticalCommand& vc, double leg_cmd) {
  ControlDiagnostics d;
  d.eta = vc.eta;
  d.lyapunov = vc.V;
  d.delta = vc.qp.delta;
  d.active_set = vc.qp.active_set;
  d.leg_angle_cmd = leg_cmd;
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gait records

std::string params_hash(const SlipParams& p, const EnergyControllerConfig& c) {
  std::string key;
  for (double v : {p.m, p.k, p.d, p.r0, p.g, p.max_travel, c.mass, c.K_p, c.Q, c.gamma, c.p, c.F_min, c.F_max, c.g_e})
    key += fmt_double(v) + ";";
  key += c.variant == QpVariant::RelaxedEqualityQP ? "relaxed" : "inequality";
  // 64-bit FNV-1a.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string gait_to_json(const Gait& g) {
  nlohmann::ordered_json j;
  j["version"] = Gait::kVersion;
  j["xdot_star"] = g.xdot_star;
  j["u_star"] = g.u_star;
  j["apex_height"] = g.apex_height;
  j["E_d"] = g.E_d;
  j["A"] = g.A;
  j["B"] = g.B;
  j["K"] = g.K;
  j["residual"] = g.residual;
  j["leg_angle_limit"] = g.leg_angle_limit;
  j["A_estimates"] = g.A_estimates;
  j["B_estimates"] = g.B_estimates;
  j["fd_step"] = g.fd_step;
  j["params"] = {{"m", g.params.m}, {"k", g.params.k}, {"d", g.params.d}, {"r0", g.params.r0},
                 {"g", g.params.g}, {"max_travel", g.params.max_travel}};
  j["controller"] = {{"mass", g.ctrl.mass}, {"E_d", g.ctrl.E_d}, {"Kp", g.ctrl.K_p}, {"Q", g.ctrl.Q},
                     {"gamma", g.ctrl.gamma}, {"p", g.ctrl.p}, {"Ft_min", g.ctrl.F_min},
                     {"Ft_max", g.ctrl.F_max}, {"g_e", g.ctrl.g_e},
                     {"variant", g.ctrl.variant == QpVariant::RelaxedEqualityQP ? "relaxed" : "inequality"}};
  j["params_hash"] = g.params_hash;
  return j.dump(2) + "\n";
}

Gait gait_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != Gait::kVersion)
      throw Error(ErrorKind::ConfigError, "gait: unsupported version");
    Gait g;
    g.xdot_star = j.at("xdot_star");
    g.u_star = j.at("u_star");
    g.apex_height = j.at("apex_height");
    g.E_d = j.at("E_d");
    g.A = j.at("A");
    g.B = j.at("B");
    g.K = j.at("K");
    g.residual = j.value("residual", 0.0);
    g.leg_angle_limit = j.value("leg_angle_limit", 0.5);
    g.A_estimates = j.value("A_estimates", std::array<double, 2>{});
    g.B_estimates = j.value("B_estimates", std::array<double, 2>{});
    g.fd_step = j.value("fd_step", 0.0);
    const auto& p = j.at("params");
    g.params = {p.at("m"), p.at("k"), p.at("d"), p.at("r0"), p.at("g"), p.at("max_travel")};
    const auto& c = j.at("controller");
    g.ctrl.mass = c.at("mass");
    g.ctrl.E_d = c.at("E_d");
    g.ctrl.K_p = c.at("Kp");
    g.ctrl.Q = c.at("Q");
    g.ctrl.gamma = c.at("gamma");
    g.ctrl.p = c.at("p");
    g.ctrl.F_min = c.at("Ft_min");
    g.ctrl.F_max = c.at("Ft_max");
    g.ctrl.g_e = c.at("g_e");
    g.ctrl.variant = c.at("variant").get<std::string>() == "inequality" ? QpVariant::InequalityQP
                                                                        : QpVariant::RelaxedEqualityQP;
    g.params_hash = j.at("params_hash");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("gait: ") + e.what());
  }
}

void save_gait(const Gait& g, const std::string& path) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + tmp.string());
    out << gait_to_json(g);
  }
  std::filesystem::rename(tmp, target);
}

Gait load_gait(const std::string& path, const SlipParams& p, const EnergyControllerConfig& ctrl) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "gait file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Gait g = gait_from_json(ss.str());
  const std::string expect = params_hash(p, ctrl);
  if (g.params_hash != expect)
    throw Error(ErrorKind::GaitMismatch,
                "gait " + path + " was built for params_hash " + g.params_hash + ", loaded parameters hash to " + expect);
  return g;
}

// ---------------------------------------------------------------------------
// Stepping law

double deadbeat_gain(double A, double B) {
  if (!(std::abs(B) > 1e-8)) {
    std::ostringstream os;
    os << "B=" << B << " is too small to place the step-to-step pole";
    throw Error(ErrorKind::UncontrollableMap, os.str());
  }
  return -A / B;
}

double stepping_controller(double xdot, const Gait& gait, bool* clamped) {
  const double u = gait.u_star + gait.K * (xdot - gait.xdot_star);
  const double lim = gait.leg_angle_limit;
  const double out = std::clamp(u, -lim, lim);
  if (clamped) *clamped = out != u;
  return out;
}

std::pair<double, double> decoupled_3d_step(double xdot, double ydot, const Gait& sagittal, const Gait& lateral,
                                            bool* clamped) {
  bool c1 = false, c2 = false;
  const double pitch = stepping_controller(xdot, sagittal, &c1);
  const double roll = stepping_controller(ydot, lateral, &c2);
  if (clamped) *clamped = c1 || c2;
  return {pitch, roll};
}

// ---------------------------------------------------------------------------
// Planar SLIP controller

SlipHopController::SlipHopController(const SlipParams& params, HopControllerConfig cfg, std::optional<Gait> gait,
                                     double initial_u)
    : p_(params), cfg_(cfg), gait_(std::move(gait)), u_cmd_(initial_u), theta_lo_(initial_u) {
  cfg_.energy.validate();
  F_prev_ = cfg_.energy.F_min;
}

Controller SlipHopController::bind() {
  return {[this](const HybridState& s) { return sample(s); }, [this](const Event& ev) { on_event(ev); }};
}

void SlipHopController::hold(double t, double F) {
  if (!std::isnan(t_hold_)) impulse_ += std::abs(F_prev_) * (t - t_hold_);
  t_hold_ = t;
  F_prev_ = F;
}

ControlSample SlipHopController::sample(const HybridState& s) {
  const auto& e = cfg_.energy;
  if (s.phase == Phase::Stance) {
    const VerticalCommand vc = vertical_controller_step(Phase::Stance, s.q[1], s.v[1], 1.0, F_prev_, e);
    hold(s.t, vc.F_t);
    return {slip_input::make(vc.F_t, u_cmd_, u_cmd_, s.t, 0.0), diag_of(vc, u_cmd_)};
  }
  Eigen::VectorXd input = slip_input::make(0.0, u_cmd_, u_cmd_, s.t, 0.0);
  if (swinging_) {
    const double T = (s.t - t_lo_) + std::max(s.v[1], 0.0) / e.g_e;
    input = slip_input::make(0.0, theta_lo_, u_cmd_, t_lo_, T);
  }
  const double theta = slip_input::leg_angle(input, s.t);
  const VerticalCommand vc = vertical_controller_step(Phase::Aerial, s.q[1], s.v[1], std::cos(theta), F_prev_, e);
  hold(s.t, vc.F_t);
  input[slip_input::kThrust] = vc.F_t;
  return {input, diag_of(vc, theta)};
}

void SlipHopController::on_event(const Event& ev) {
  switch (ev.kind) {
    case EventKind::Liftoff:
      theta_lo_ = stance_leg_angle(ev.state_before);
      t_lo_ = ev.t;
      swinging_ = true;
      break;
    case EventKind::Apex: {
      const HybridState& s = ev.state_after;
      ApexRecord r;
      r.step = static_cast<int>(apexes_.size()) + 1;
      r.t = ev.t;
      r.x = s.q[0];
      r.height = s.q[1];
      r.xdot = s.v[0];
      r.energy = vertical_energy(s.q[1], s.v[1], cfg_.energy.mass, cfg_.energy.g_e);
      r.impulse = impulse_ + (std::isnan(t_hold_) ? 0.0 : std::abs(F_prev_) * (ev.t - t_hold_));
      if (gait_) {
        u_cmd_ = stepping_controller(r.xdot, *gait_, &r.clamped);
        if (r.clamped) log_.push_back(clamp_message(ev.t, u_cmd_, gait_->leg_angle_limit));
      }
      r.u_cmd = u_cmd_;
      apexes_.push_back(r);
      theta_lo_ = u_cmd_;
      swinging_ = false;
      break;
    }
    case EventKind::Touchdown:
      swinging_ = false;
      break;
    case EventKind::LegStop:
      break;
  }
}

// ---------------------------------------------------------------------------
// 3-D SLIP controller

Slip3dHopController::Slip3dHopController(const SlipParams& params, HopControllerConfig cfg, Gait sagittal,
                                         Gait lateral)
    : p_(params), cfg_(cfg), sag_(std::move(sagittal)), lat_(std::move(lateral)) {
  cfg_.energy.validate();
  if (std::abs(sag_.E_d - lat_.E_d) > 1e-9 * std::max(1.0, std::abs(sag_.E_d)))
    throw Error(ErrorKind::InvalidArgument, "sagittal and lateral gaits must share E_d");
  pitch_cmd_ = pitch_lo_ = sag_.u_star;
  roll_cmd_ = roll_lo_ = lat_.u_star;
  F_prev_ = cfg_.energy.F_min;
}

Controller Slip3dHopController::bind() {
  return {[this](const HybridState& s) { return sample(s); }, [this](const Event& ev) { on_event(ev); }};
}

ControlSample Slip3dHopController::sample(const HybridState& s) {
  const auto& e = cfg_.energy;
  if (s.phase == Phase::Stance) {
    const VerticalCommand vc = vertical_controller_step(Phase::Stance, s.q[2], s.v[2], 1.0, F_prev_, e);
    F_prev_ = vc.F_t;
    return {Slip3dModel::make_input(vc.F_t, pitch_cmd_, pitch_cmd_, roll_cmd_, roll_cmd_, s.t, 0.0),
            diag_of(vc, pitch_cmd_)};
  }
  Eigen::VectorXd input = Slip3dModel::make_input(0.0, pitch_cmd_, pitch_cmd_, roll_cmd_, roll_cmd_, s.t, 0.0);
  if (swinging_) {
    const double T = (s.t - t_lo_) + std::max(s.v[2], 0.0) / e.g_e;
    input = Slip3dModel::make_input(0.0, pitch_lo_, pitch_cmd_, roll_lo_, roll_cmd_, t_lo_, T);
  }
  const double tau = s.t - input[5];
  const double pitch = swing_angle(make_swing(input[1], input[2], input[6]), tau);
  const double roll = swing_angle(make_swing(input[3], input[4], input[6]), tau);
  const double up = -Slip3dModel::leg_direction(pitch, roll)[2];
  const VerticalCommand vc = vertical_controller_step(Phase::Aerial, s.q[2], s.v[2], up, F_prev_, e);
  F_prev_ = vc.F_t;
  input[0] = vc.F_t;
  return {input, diag_of(vc, pitch)};
}

void Slip3dHopController::on_event(const Event& ev) {
  if (ev.kind == EventKind::Liftoff) {
    const HybridState& s = ev.state_before;
    const Eigen::Vector3d d(s.contact[0] - s.q[0], s.contact[1] - s.q[1], s.contact[2] - s.q[2]);
    pitch_lo_ = std::atan2(d[0], -d[2]);
    roll_lo_ = std::atan2(d[1], -d[2]);
    t_lo_ = ev.t;
    swinging_ = true;
  } else if (ev.kind == EventKind::Apex) {
    const HybridState& s = ev.state_after;
    ApexRecord r;
    r.step = static_cast<int>(apexes_.size()) + 1;
    r.t = ev.t;
    r.x = s.q[0];
    r.height = s.q[2];
    r.xdot = s.v[0];
    r.ydot = s.v[1];
    r.energy = vertical_energy(s.q[2], s.v[2], cfg_.energy.mass, cfg_.energy.g_e);
    std::tie(pitch_cmd_, roll_cmd_) = decoupled_3d_step(r.xdot, r.ydot, sag_, lat_, &r.clamped);
    r.u_cmd = pitch_cmd_;
    r.u_cmd_lateral = roll_cmd_;
    apexes_.push_back(r);
    pitch_lo_ = pitch_cmd_;
    roll_lo_ = roll_cmd_;
    swinging_ = false;
  } else if (ev.kind == EventKind::Touchdown) {
    swinging_ = false;
  }
}

// ---------------------------------------------------------------------------
// Planar robot controller

RobotHopController::RobotHopController(const RobotParams& params, HopControllerConfig cfg, std::optional<Gait> gait,
                                       double initial_u)
    : p_(params), cfg_(cfg), gait_(std::move(gait)), u_cmd_(initial_u), theta_lo_(initial_u) {
  cfg_.energy.validate();
  F_prev_ = cfg_.energy.F_min;
}

Controller RobotHopController::bind() {
  return {[this](const HybridState& s) { return sample(s); }, [this](const Event& ev) { on_event(ev); }};
}

ControlSample RobotHopController::sample(const HybridState& s) {
  const auto& e = cfg_.energy;
  const Eigen::Vector2d c = com_position(s, p_);
  const Eigen::Vector2d cv = com_velocity(s, p_);
  if (s.phase == Phase::Stance) {
    const VerticalCommand vc = vertical_controller_step(Phase::Stance, c[1], cv[1], 1.0, F_prev_, e);
    F_prev_ = vc.F_t;
    return {PlanarRobotModel::make_input({vc.F_t, u_cmd_}), diag_of(vc, u_cmd_)};
  }
  double pitch_des = u_cmd_;
  if (swinging_) {
    // The pitch loop is slow next to the fall time, so the target tracks the
    // stepping law on the current COM velocity during ascent.
    if (gait_) u_cmd_ = stepping_controller(cv[0], *gait_);
    const double T = (s.t - t_lo_) + std::max(cv[1], 0.0) / e.g_e;
    pitch_des = swing_angle(make_swing(theta_lo_, u_cmd_, T), s.t - t_lo_);
  }
  const VerticalCommand vc =
      vertical_controller_step(Phase::Aerial, c[1], cv[1], std::cos(s.q[2]), F_prev_, e);
  F_prev_ = vc.F_t;
  return {PlanarRobotModel::make_input({vc.F_t, pitch_des}), diag_of(vc, pitch_des)};
}

void RobotHopController::on_event(const Event& ev) {
  switch (ev.kind) {
    case EventKind::Liftoff:
      theta_lo_ = ev.state_before.q[2];
      t_lo_ = ev.t;
      swinging_ = true;
      break;
    case EventKind::Apex: {
      const HybridState& s = ev.state_after;
      const Eigen::Vector2d c = com_position(s, p_);
      const Eigen::Vector2d cv = com_velocity(s, p_);
      ApexRecord r;
      r.step = static_cast<int>(apexes_.size()) + 1;
      r.t = ev.t;
      r.x = c[0];
      r.height = c[1];
      r.xdot = cv[0];
      r.energy = vertical_energy(c[1], cv[1], cfg_.energy.mass, cfg_.energy.g_e);
      if (gait_) {
        u_cmd_ = stepping_controller(r.xdot, *gait_, &r.clamped);
        if (r.clamped) log_.push_back(clamp_message(ev.t, u_cmd_, gait_->leg_angle_limit));
      }
      r.u_cmd = u_cmd_;
      apexes_.push_back(r);
      theta_lo_ = u_cmd_;
      swinging_ = false;
      break;
    }
    case EventKind::Touchdown:
      swinging_ = false;
      break;
    case EventKind::LegStop:
      break;
  }
}

// ---------------------------------------------------------------------------
// Return map and gait synthesis

GaitContext make_context(const SlipParams& p, HopControllerConfig cfg, double apex_height,
                         const IntegratorOptions& opts) {
  if (!(apex_height > p.r0)) throw Error(ErrorKind::InvalidArgument, "apex height must exceed the leg length");
  cfg.energy.E_d = energy_for_apex(apex_height, cfg.energy);
  GaitContext ctx{p, cfg, apex_height, opts, 5.0};
  ctx.opts.record_samples = false;
  return ctx;
}

GaitContext context_of(const Gait& gait, const IntegratorOptions& opts) {
  HopControllerConfig cfg{gait.ctrl, gait.leg_angle_limit};
  GaitContext ctx = make_context(gait.params, cfg, gait.apex_height, opts);
  ctx.cfg.energy.E_d = gait.E_d;
  return ctx;
}

ReturnMapResult return_map_full(double xdot_k, double u_k, const GaitContext& ctx) {
  try {
    const SlipModel model(ctx.params);
    SlipHopController ctrl(ctx.params, ctx.cfg, std::nullopt, u_k);
    const HybridState s0 = SlipModel::apex_state(0.0, ctx.apex_height, xdot_k);
    const Trajectory traj = simulate_hops(model, s0, ctrl.bind(), 1, ctx.t_max_hop, ctx.opts);
    if (traj.termination != Termination::Completed || ctrl.apexes().empty())
      throw Error(ErrorKind::NoApexReached, "no apex within the time limit");
    const ApexRecord& r = ctrl.apexes().back();
    return {r.xdot, r.height, r.energy};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoApexReached) throw;
    std::ostringstream os;
    os << "hop from xdot=" << xdot_k << ", u=" << u_k << " failed: " << e.what();
    throw Error(ErrorKind::NoApexReached, os.str());
  }
}

double return_map(double xdot_k, double u_k, const GaitContext& ctx) { return return_map_full(xdot_k, u_k, ctx).xdot; }

namespace {

bool agree(double a, double b) { return std::abs(a - b) <= 1e-4 * std::max(std::abs(a), std::abs(b)) + 1e-9; }

}  // namespace

namespace {

GaitContext fine_context(const GaitContext& ctx) {
  GaitContext fine = ctx;
  fine.opts.abs_tol = ctx.opts.abs_tol * 1e-2;
  fine.opts.rel_tol = ctx.opts.rel_tol * 1e-2;
  fine.opts.event_tol = std::min(ctx.opts.event_tol, 1e-12);
  return fine;
}

std::pair<double, double> central_differences(double xdot_star, double u_star, const GaitContext& fine, double h) {
  const double a = (return_map(xdot_star + h, u_star, fine) - return_map(xdot_star - h, u_star, fine)) / (2.0 * h);
  const double b = (return_map(xdot_star, u_star + h, fine) - return_map(xdot_star, u_star - h, fine)) / (2.0 * h);
  return {a, b};
}

}  // namespace

Linearization linearize_s2s(double xdot_star, double u_star, const GaitContext& ctx) {
  const GaitContext fine = fine_context(ctx);
  double h = 1e-3;
  Linearization lin;
  auto [a_prev, b_prev] = central_differences(xdot_star, u_star, fine, h);
  double jitter_a = 0.0, jitter_b = 0.0;
  for (int i = 0; i < 8; ++i) {
    h *= 0.5;
    const auto [a, b] = central_differences(xdot_star, u_star, fine, h);
    if (agree(a, a_prev) && agree(b, b_prev)) {
      lin.A = a;
      lin.B = b;
      lin.A_estimates = {a_prev, a};
      lin.B_estimates = {b_prev, b};
      lin.step = h;
      return lin;
    }
    jitter_a = std::max(jitter_a, std::abs(a - a_prev));
    jitter_b = std::max(jitter_b, std::abs(b - b_prev));
    a_prev = a;
    b_prev = b;
  }
  std::ostringstream os;
  os << "finite differences did not settle down to step " << h << "; jitter in A " << jitter_a << ", in B "
     << jitter_b;
  throw Error(ErrorKind::NumericalNoise, os.str());
}

Linearization linearize_s2s_fixed(double xdot_star, double u_star, const GaitContext& ctx, double h) {
  const GaitContext fine = fine_context(ctx);
  const auto [a, b] = central_differences(xdot_star, u_star, fine, h);
  Linearization lin;
  lin.A = a;
  lin.B = b;
  lin.A_estimates = {a, a};
  lin.B_estimates = {b, b};
  lin.step = h;
  return lin;
}

Gait find_periodic_orbit(double xdot_des, double apex_height, const SlipParams& p, HopControllerConfig cfg,
                         const IntegratorOptions& opts, bool coarse_on_noise) {
  const GaitContext ctx = make_context(p, cfg, apex_height, opts);
  const auto resid = [&](double u) -> double {
    try {
      return return_map(xdot_des, u, ctx) - xdot_des;
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  // Scan for sign changes and keep the bracket closest to a vertical leg.
  constexpr int kGrid = 40;
  constexpr double kRange = 0.5;
  std::vector<double> us(kGrid + 1), fs(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    us[i] = -kRange + 2.0 * kRange * i / kGrid;
    fs[i] = resid(us[i]);
  }
  double a = 0, b = 0, fa = 0, fb = 0;
  bool found = false;
  for (int i = 0; i < kGrid; ++i) {
    if (std::isnan(fs[i]) || std::isnan(fs[i + 1])) continue;
    if ((fs[i] <= 0.0) == (fs[i + 1] <= 0.0) && fs[i] != 0.0) continue;
    if (found && std::abs(0.5 * (us[i] + us[i + 1])) >= std::abs(0.5 * (a + b))) continue;
    a = us[i], b = us[i + 1], fa = fs[i], fb = fs[i + 1];
    found = true;
  }
  if (!found) {
    std::ostringstream os;
    os << "no touchdown angle in [-0.5, 0.5] rad gives a periodic hop at xdot=" << xdot_des
       << " m/s, apex " << apex_height << " m";
    throw Error(ErrorKind::NoBracket, os.str());
  }

  // Bisection to a tight bracket, then Illinois secant.
  double u = a;
  if (fa == 0.0) {
    b = a;
  } else {
    for (int i = 0; i < 12; ++i) {
      const double c = 0.5 * (a + b), fc = resid(c);
      if (std::isnan(fc)) throw Error(ErrorKind::NotConverged, "hop failed inside the bracket");
      if ((fc <= 0.0) == (fa <= 0.0)) a = c, fa = fc; else b = c, fb = fc;
    }
    int side = 0;
    for (int i = 0; i < 100 && std::abs(b - a) > 1e-13; ++i) {
      double c = (fb - fa) != 0.0 ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
      if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
      const double fc = resid(c);
      if (std::isnan(fc)) throw Error(ErrorKind::NotConverged, "hop failed inside the bracket");
      if (fc == 0.0) { a = b = c; fa = fb = 0.0; break; }
      if ((fc <= 0.0) == (fa <= 0.0)) {
        a = c, fa = fc;
        if (side == -1) fb *= 0.5;
        side = -1;
      } else {
        b = c, fb = fc;
        if (side == 1) fa *= 0.5;
        side = 1;
      }
      if (std::abs(fc) < 1e-12) break;
    }
  }
  u = std::abs(fa) < std::abs(fb) ? a : b;

  const ReturnMapResult fixed = return_map_full(xdot_des, u, ctx);
  const double residual = std::abs(fixed.xdot - xdot_des);
  if (!(residual <= 1e-5)) {
    std::ostringstream os;
    os << "fixed-point residual " << residual << " m/s after root solve";
    throw Error(ErrorKind::NotConverged, os.str());
  }
  if (std::abs(fixed.height - apex_height) > 0.02 * apex_height) {
    std::ostringstream os;
    os << "apex height " << apex_height << " m is not sustained (next apex " << fixed.height << " m)";
    throw Error(ErrorKind::NotConverged, os.str());
  }

  Gait g;
  g.xdot_star = xdot_des;
  g.u_star = u;
  g.apex_height = apex_height;
  g.E_d = ctx.cfg.energy.E_d;
  g.residual = residual;
  g.leg_angle_limit = cfg.leg_angle_limit;
  g.params = p;
  g.ctrl = ctx.cfg.energy;
  g.params_hash = params_hash(p, g.ctrl);
  Linearization lin;
  try {
    lin = linearize_s2s(xdot_des, u, ctx);
  } catch (const Error& e) {
    if (!coarse_on_noise || e.kind() != ErrorKind::NumericalNoise) throw;
    lin = linearize_s2s_fixed(xdot_des, u, ctx, 1e-3);
  }
  g.A = lin.A;
  g.B = lin.B;
  g.A_estimates = lin.A_estimates;
  g.B_estimates = lin.B_estimates;
  g.fd_step = lin.step;
  g.K = deadbeat_gain(g.A, g.B);
  return g;
}

InvariantEstimate error_invariant_estimate(const Gait& gait, double delta_max, double box, int n,
                                           const IntegratorOptions& opts) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  const GaitContext ctx = context_of(gait, opts);
  InvariantEstimate est;
  est.box = box;
  for (int i = 0; i < n; ++i) {
    const double e = -box + 2.0 * box * i / (n - 1);
    bool clamped = false;
    const double u = stepping_controller(gait.xdot_star + e, gait, &clamped);
    if (clamped) {
      ++est.clamped_points;
      continue;
    }
    const double next = return_map(gait.xdot_star + e, u, ctx);
    est.remainder = std::max(est.remainder, std::abs(next - gait.xdot_star));
  }
  est.bound = std::abs(delta_max) + est.remainder;
  return est;
}

}  // namespace hop
