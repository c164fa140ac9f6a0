#include "hop/design.hpp"

#include "hop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace hop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// y'' + 2 sigma y' + w^2 y = 0 from (y0, v0).
struct Oscillator {
  double w, sigma;

  bool under() const { return sigma < w * (1.0 - 1e-9); }
  bool over() const { return sigma > w * (1.0 + 1e-9); }
  double wd() const { return std::sqrt(w * w - sigma * sigma); }
  std::pair<double, double> roots() const {
    const double s = std::sqrt(sigma * sigma - w * w);
    return {-sigma + s, -sigma - s};
  }

  std::pair<double, double> at(double y0, double v0, double t) const {
    if (under()) {
      const double wd_ = wd(), e = std::exp(-sigma * t), c = std::cos(wd_ * t), s = std::sin(wd_ * t);
      return {e * (y0 * c + (v0 + sigma * y0) / wd_ * s), e * (v0 * c - (sigma * v0 + w * w * y0) / wd_ * s)};
    }
    if (over()) {
      const auto [l1, l2] = roots();
      const double c1 = (v0 - l2 * y0) / (l1 - l2), c2 = y0 - c1;
      return {c1 * std::exp(l1 * t) + c2 * std::exp(l2 * t), l1 * c1 * std::exp(l1 * t) + l2 * c2 * std::exp(l2 * t)};
    }
    const double e = std::exp(-sigma * t), a = v0 + sigma * y0;
    return {(y0 + a * t) * e, (v0 - sigma * a * t) * e};
  }

  // First t > 0 with y'(t) = 0, or inf.
  double velocity_zero(double y0, double v0) const {
    if (under()) {
      const double wd_ = wd(), c = (sigma * v0 + w * w * y0) / wd_;
      double x = std::atan2(v0, c);
      while (x <= 1e-15) x += std::numbers::pi;
      while (x > std::numbers::pi + 1e-15) x -= std::numbers::pi;
      return x / wd_;
    }
    if (over()) {
      const auto [l1, l2] = roots();
      const double c1 = (v0 - l2 * y0) / (l1 - l2), c2 = y0 - c1;
      if (c1 == 0.0 || c2 == 0.0) return kInf;
      const double ratio = -(l2 * c2) / (l1 * c1);
      if (!(ratio > 0.0)) return kInf;
      const double t = std::log(ratio) / (l1 - l2);
      return t > 0.0 ? t : kInf;
    }
    const double a = v0 + sigma * y0;
    if (a == 0.0) return kInf;
    const double t = v0 / (sigma * a);
    return t > 0.0 ? t : kInf;
  }
};

Oscillator stance_oscillator(const BangBangSpec& s) { return {std::sqrt(s.k / s.m), 0.5 * s.d / s.m}; }

// Stance offset x = z - r0 with thrust F: m x'' = -k x - d x' + F - m g.
double equilibrium(const BangBangSpec& s, double F) { return (F - s.m * s.g) / s.k; }

}  // namespace

void BangBangSpec::validate() const {
  std::ostringstream os;
  if (!(m > 0) || !(k > 0) || !(r0 > 0) || !(g > 0)) os << "m, k, r0, g must be positive; ";
  if (!(d >= 0)) os << "d must be non-negative; ";
  if (!(F_min >= 0) || !(F_max >= F_min)) os << "need 0 <= F_min <= F_max; ";
  if (!(F_min < m * g)) os << "F_min must be below the weight; ";
  if (!(apex > r0)) os << "apex must exceed r0; ";
  if (!os.str().empty()) throw Error(ErrorKind::InvalidArgument, "bang-bang spec: " + os.str());
}

BangBangResult bang_bang_closed_form(const BangBangSpec& s) {
  s.validate();
  BangBangResult out;
  const double g_down = s.g - s.F_min / s.m;
  out.v_touchdown = -std::sqrt(2.0 * g_down * (s.apex - s.r0));
  out.t_descent = -out.v_touchdown / g_down;

  const Oscillator osc = stance_oscillator(s);
  // Compression under F_min until the velocity reverses.
  const double xe1 = equilibrium(s, s.F_min);
  const double t1 = osc.velocity_zero(0.0 - xe1, out.v_touchdown);
  if (!std::isfinite(t1)) throw Error(ErrorKind::NoLiftoff, "stance never reverses: leg settles while compressing");
  const double x_bottom = osc.at(0.0 - xe1, out.v_touchdown, t1).first + xe1;
  out.t_compression = t1;
  out.peak_compression = -x_bottom;

  // Extension under F_max from rest until x returns to 0.
  const double xe2 = equilibrium(s, s.F_max);
  const double y0 = x_bottom - xe2;
  const auto x_at = [&](double t) { return osc.at(y0, 0.0, t).first + xe2; };
  double hi;
  if (osc.under()) {
    hi = std::numbers::pi / osc.wd();  // first turning point
    if (x_at(hi) < 0.0) throw Error(ErrorKind::NoLiftoff, "spring rebound does not reach the leg length");
  } else {
    if (xe2 <= 0.0) throw Error(ErrorKind::NoLiftoff, "overdamped stance settles below the leg length");
    hi = 1.0 / osc.w;
    while (x_at(hi) < 0.0) hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (x_at(mid) < 0.0 ? lo : hi) = mid;
  }
  out.t_extension = hi;
  out.v_liftoff = osc.at(y0, 0.0, hi).second;

  const double decel = s.g - s.F_max / s.m;
  if (decel <= 0.0) {
    out.apex = kInf;
    out.t_ascent = kInf;
    return out;
  }
  out.t_ascent = out.v_liftoff / decel;
  out.apex = s.r0 + out.v_liftoff * out.v_liftoff / (2.0 * decel);
  return out;
}

// ---------------------------------------------------------------------------
// Numerical oracle

namespace {

/// q = (z). Stance guards are liftoff and the velocity reversal, reported as
/// an Apex-kind event in stance.
class VerticalHopper final : public HybridModel {
 public:
  explicit VerticalHopper(const BangBangSpec& s) : s_(s) {}
  int dof() const override { return 1; }
  Eigen::VectorXd acceleration(const HybridState& st, const Eigen::VectorXd& u) const override {
    double f = u[0] - s_.m * s_.g;
    if (st.phase == Phase::Stance) f += -s_.k * (st.q[0] - s_.r0) - s_.d * st.v[0];
    return Eigen::VectorXd::Constant(1, f / s_.m);
  }
  double guard(EventKind kind, const HybridState& st, const Eigen::VectorXd&) const override {
    switch (kind) {
      case EventKind::Touchdown: return st.q[0] - s_.r0;
      case EventKind::Liftoff: return s_.r0 - st.q[0];
      case EventKind::Apex: return st.phase == Phase::Aerial ? st.v[0] : -st.v[0];
      case EventKind::LegStop: return 1.0;
    }
    return 1.0;
  }
  std::vector<EventKind> guards(Phase p) const override {
    if (p == Phase::Aerial) return {EventKind::Touchdown, EventKind::Apex};
    return {EventKind::Liftoff, EventKind::Apex};
  }
  HybridState reset(EventKind kind, const HybridState& st, const Eigen::VectorXd&) const override {
    HybridState out = st;
    if (kind == EventKind::Touchdown) out.phase = Phase::Stance;
    if (kind == EventKind::Liftoff) out.phase = Phase::Aerial;
    return out;
  }

 private:
  BangBangSpec s_;
};

}  // namespace

BangBangResult bang_bang_numeric(const BangBangSpec& s, const IntegratorOptions& opts) {
  s.validate();
  const VerticalHopper model(s);
  double F = s.F_min;
  Controller ctrl{[&](const HybridState&) { return ControlSample{Eigen::VectorXd::Constant(1, F), {}}; }, {}};
  HybridState st;
  st.q = Eigen::VectorXd::Constant(1, s.apex);
  st.v = Eigen::VectorXd::Zero(1);
  IntegratorOptions o = opts;
  o.record_samples = false;

  BangBangResult out;
  double t_prev = 0.0;
  double t_end = 60.0;
  for (int stage = 0; stage < 4; ++stage) {
    auto [traj, ev] = integrate_until_event(model, st, ctrl, model.guards(st.phase), t_end, o);
    if (!ev) throw Error(ErrorKind::NoLiftoff, "numerical hop did not complete");
    const double dt = ev->t - t_prev;
    t_prev = ev->t;
    switch (stage) {
      case 0:
        if (ev->kind != EventKind::Touchdown) throw Error(ErrorKind::NoLiftoff, "expected touchdown");
        out.t_descent = dt;
        out.v_touchdown = ev->state_before.v[0];
        break;
      case 1:
        if (ev->kind != EventKind::Apex) throw Error(ErrorKind::NoLiftoff, "leg lifted off before reversing");
        out.t_compression = dt;
        out.peak_compression = s.r0 - ev->state_before.q[0];
        F = s.F_max;
        break;
      case 2:
        if (ev->kind != EventKind::Liftoff) throw Error(ErrorKind::NoLiftoff, "spring rebound does not reach the leg length");
        out.t_extension = dt;
        out.v_liftoff = ev->state_before.v[0];
        if (F >= s.m * s.g) {
          out.apex = out.t_ascent = kInf;
          return out;
        }
        break;
      case 3:
        out.t_ascent = dt;
        out.apex = ev->state_before.q[0];
        break;
    }
    st = ev->state_after;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

// Next apex, or -inf when the hop fails to lift off.
double next_apex(const BangBangSpec& s) {
  try {
    return bang_bang_closed_form(s).apex;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoLiftoff) return -kInf;
    throw;
  }
}

}  // namespace

double required_thrust(BangBangSpec s) {
  s.validate();
  const double weight = s.m * s.g;
  const auto gap = [&](double F) {
    s.F_max = F;
    return next_apex(s) - s.apex;
  };
  double lo = s.F_min, hi = weight * (1.0 - 1e-9);
  if (gap(lo) >= 0.0) return lo;
  if (gap(hi) < 0.0) return kNaN;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * weight; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double achievable_apex(const BangBangSpec& spec) {
  BangBangSpec s = spec;
  if (s.F_max >= s.m * s.g) return kInf;
  // The hop can hold apex h when f(h) >= h; return the largest such h.
  const auto holds = [&](double h) {
    s.apex = h;
    return next_apex(s) >= h;
  };
  constexpr double kCap = 1e3;
  if (holds(kCap)) return kInf;
  double best = -1.0, above = kCap;
  for (double h = kCap; h > s.r0 * (1.0 + 1e-9); h = s.r0 + (h - s.r0) / 1.25) {
    if (holds(h)) {
      best = h;
      break;
    }
    above = h;
    if (h - s.r0 < 1e-6) break;
  }
  if (best < 0.0) return s.r0;
  for (int i = 0; i < 200 && above - best > 1e-13 * above; ++i) {
    const double mid = 0.5 * (best + above);
    (holds(mid) ? best : above) = mid;
  }
  return best;
}

std::vector<StiffnessRow> design_sweep_stiffness(const std::vector<double>& weights,
                                                 const std::vector<double>& stiffness, double apex, double d,
                                                 const BangBangSpec& base) {
  for (double k : stiffness)
    if (!(k > 0)) throw Error(ErrorKind::InvalidArgument, "stiffness values must be positive");
  std::vector<StiffnessRow> rows;
  for (double w : weights) {
    for (double k : stiffness) {
      BangBangSpec s = base;
      s.m = w;
      s.k = k;
      s.d = d;
      s.apex = apex;
      const double F = required_thrust(s);
      rows.push_back({w, k, F, std::isfinite(F)});
    }
  }
  return rows;
}

std::vector<TwrRow> design_sweep_twr(const std::vector<double>& stiffness, const std::vector<double>& twr,
                                     const BangBangSpec& base) {
  std::vector<TwrRow> rows;
  for (double k : stiffness) {
    if (!(k > 0)) throw Error(ErrorKind::InvalidArgument, "stiffness values must be positive");
    for (double r : twr) {
      BangBangSpec s = base;
      s.k = k;
      s.F_max = std::max(s.F_min, r * s.m * s.g);
      const double h = achievable_apex(s);
      rows.push_back({r, k, h, std::isfinite(h) && h > s.r0});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Cost of transport

std::string_view to_string(CotMode mode) { return mode == CotMode::Hopping ? "hopping" : "flying"; }

CotResult cot_flying(double m, double twr, double v, double duration, double g) {
  if (!(m > 0) || !(v > 0) || !(duration > 0)) throw Error(ErrorKind::InvalidArgument, "m, v, duration must be positive");
  CotResult r;
  r.mode = CotMode::Flying;
  r.twr = twr;
  if (twr <= 1.0) {
    r.cot = kInf;
    r.note = "thrust cannot carry the weight";
    return r;
  }
  // Thrust equals weight over the whole flight; the duration cancels.
  const double weight = m * g;
  const double thrust = weight;
  r.cot = (thrust / weight) / v;
  r.mean_velocity = v;
  r.feasible = true;
  return r;
}

CotResult cot_hopping(const SlipParams& params, double twr, const CotHoppingOptions& opts) {
  CotResult r;
  r.mode = CotMode::Hopping;
  r.twr = twr;
  r.cot = kInf;
  HopControllerConfig cfg = opts.cfg;
  cfg.energy.mass = params.m;
  cfg.energy.F_min = 0.0;
  cfg.energy.F_max = twr * params.m * params.g;
  cfg.energy.g_e = params.g;
  if (!(cfg.energy.F_max > 0.0)) {
    r.note = "no thrust";
    return r;
  }
  Gait gait;
  try {
    gait = find_periodic_orbit(opts.xdot, opts.apex, params, cfg, {}, true);
  } catch (const Error& e) {
    r.note = std::string("no periodic orbit: ") + e.what();
    return r;
  }
  if (gait.A_estimates[0] == gait.A_estimates[1] && gait.B_estimates[0] == gait.B_estimates[1])
    r.note = "coarse linearization";
  cfg.energy.E_d = gait.E_d;
  const SlipModel model(params);
  SlipHopController ctrl(params, cfg, gait, gait.u_star);
  const int total = opts.settle_steps + opts.n_steps;
  IntegratorOptions io;
  io.record_samples = false;
  try {
    simulate_hops(model, SlipModel::apex_state(0.0, opts.apex, opts.xdot), ctrl.bind(), total, 600.0, io);
  } catch (const Error& e) {
    r.note = std::string("hopping failed: ") + e.what();
    return r;
  }
  const auto& ap = ctrl.apexes();
  if (static_cast<int>(ap.size()) < total) {
    r.note = "hopping stopped early";
    return r;
  }
  for (int i = opts.settle_steps - 1; i < total; ++i) {
    if (std::abs(ap[i].height - opts.apex) > opts.apex_tol * opts.apex) {
      std::ostringstream os;
      os << "apex " << ap[i].height << " m at hop " << ap[i].step << " misses the target";
      r.note = os.str();
      return r;
    }
  }
  const ApexRecord& a0 = ap[opts.settle_steps - 1];
  const ApexRecord& a1 = ap[total - 1];
  const double L = a1.x - a0.x;
  if (!(L > 0.0)) {
    r.note = "no forward progress";
    return r;
  }
  r.cot = (a1.impulse - a0.impulse) / (L * params.m * params.g);
  r.mean_velocity = L / (a1.t - a0.t);
  r.feasible = true;
  return r;
}

double hopping_feasibility_boundary(const SlipParams& params, const CotHoppingOptions& opts, double step,
                                    double lowest) {
  double boundary = kNaN;
  for (int i = 0;; ++i) {
    const double twr = std::round((1.0 - i * step) * 1e9) / 1e9;
    if (twr < lowest - 1e-12) break;
    if (!cot_hopping(params, twr, opts).feasible) break;
    boundary = twr;
  }
  return boundary;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string fig6a_csv(const std::vector<StiffnessRow>& rows) {
  std::string out = "weight,stiffness,F_max_required\n";
  for (const auto& r : rows) out += num(r.weight) + "," + num(r.stiffness) + "," + num(r.F_max_required) + "\n";
  return out;
}

std::string fig6b_csv(const std::vector<TwrRow>& rows) {
  std::string out = "twr,stiffness,apex\n";
  for (const auto& r : rows) out += num(r.twr) + "," + num(r.stiffness) + "," + num(r.apex) + "\n";
  return out;
}

std::string fig6c_csv(const std::vector<CotResult>& rows) {
  std::string out = "twr,mode,cot\n";
  for (const auto& r : rows) out += num(r.twr) + "," + std::string(to_string(r.mode)) + "," + num(r.cot) + "\n";
  return out;
}

}  // namespace hop
