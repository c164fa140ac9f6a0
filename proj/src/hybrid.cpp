#include "hop/hybrid.hpp"

#include "hop/dopri.hpp"
#include "hop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hop {

std::string_view to_string(Phase phase) {
  return phase == Phase::Aerial ? "aerial" : "stance";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Touchdown: return "touchdown";
    case EventKind::Liftoff: return "liftoff";
    case EventKind::Apex: return "apex";
    case EventKind::LegStop: return "leg_stop";
  }
  return "unknown";
}

void Trajectory::push(Sample s) {
  if (!samples.empty() && !(s.t > samples.back().t)) {
    samples.back() = std::move(s);
    return;
  }
  samples.push_back(std::move(s));
}

void Trajectory::append(const Trajectory& other) {
  for (const auto& s : other.samples) push(s);
  events.insert(events.end(), other.events.begin(), other.events.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  termination = other.termination;
}

std::size_t Trajectory::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
                                                [kind](const Event& e) { return e.kind == kind; }));
}

namespace {

using Stepper = DormandPrince<double>;

int priority(EventKind k) {
  switch (k) {
    case EventKind::Touchdown: return 0;
    case EventKind::Liftoff: return 1;
    case EventKind::Apex: return 2;
    case EventKind::LegStop: return 3;
  }
  return 4;
}

struct Packed {
  const HybridModel& model;
  Phase phase;
  Eigen::VectorXd contact;
  int n;

  HybridState unpack(double t, const Eigen::VectorXd& y) const {
    HybridState s;
    s.phase = phase;
    s.q = y.head(n);
    s.v = y.tail(n);
    s.t = t;
    s.contact = contact;
    return s;
  }

  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& u) const {
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = y.tail(n);
    dy.tail(n) = model.acceleration(unpack(t, y), u);
    return dy;
  }
};

Eigen::VectorXd pack(const HybridState& s) {
  Eigen::VectorXd y(s.q.size() + s.v.size());
  y << s.q, s.v;
  return y;
}

bool finite(const Eigen::VectorXd& y) { return y.allFinite(); }

double next_step(double h, double err) {
  const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
  return h * std::clamp(fac, 0.2, 5.0);
}

Sample make_sample(const HybridModel& model, const HybridState& s, const ControlSample& cs) {
  Sample out;
  out.t = s.t;
  out.state = s;
  out.input = cs.input;
  out.grf = model.ground_reaction(s, cs.input);
  out.diag = cs.diag;
  return out;
}

}  // namespace

std::pair<Trajectory, std::optional<Event>> integrate_until_event(
    const HybridModel& model, const HybridState& state, const Controller& controller,
    const std::vector<EventKind>& guards, double t_max, const IntegratorOptions& opts) {
  const int n = model.dof();
  if (state.q.size() != n || state.v.size() != n)
    throw Error(ErrorKind::InvalidArgument, "state dimension does not match model");
  if (!(t_max > state.t)) throw Error(ErrorKind::InvalidArgument, "t_max must exceed state.t");
  if (!finite(state.q) || !finite(state.v))
    throw Error(ErrorKind::NonFiniteState, "initial state is not finite");
  if (!controller.sample) throw Error(ErrorKind::InvalidArgument, "controller has no sample callback");
  if (opts.control_rate_hz <= 0) throw Error(ErrorKind::InvalidArgument, "control_rate_hz must be positive");

  const Packed sys{model, state.phase, state.contact, n};
  Trajectory traj;
  ControlSample cs = controller.sample(state);
  traj.push(make_sample(model, state, cs));

  // Guard arming: a guard fires only on a transition from strictly positive.
  std::vector<double> g_prev(guards.size());
  for (std::size_t i = 0; i < guards.size(); ++i) {
    g_prev[i] = model.guard(guards[i], state, cs.input);
    if (guards[i] == EventKind::Touchdown && g_prev[i] < -1e-9) {
      std::ostringstream os;
      os << "foot is below the ground at t=" << state.t << " (height " << g_prev[i] << ")";
      throw Error(ErrorKind::InvalidInitialState, os.str());
    }
    if (guards[i] == EventKind::Liftoff && g_prev[i] < -1e-9) {
      Event ev{EventKind::Liftoff, state.t, state, model.reset(EventKind::Liftoff, state, cs.input)};
      return {std::move(traj), ev};
    }
  }

  const double dt_ctrl = 1.0 / opts.control_rate_hz;
  std::vector<double> breaks = model.breakpoints(state.t, t_max);
  std::sort(breaks.begin(), breaks.end());
  std::size_t next_break = 0;
  long sample_index = 1;

  double t = state.t;
  Eigen::VectorXd y = pack(state);
  double h = std::min(opts.max_step, 1e-3);
  const auto f = [&](double tt, const Eigen::VectorXd& yy) { return sys.rhs(tt, yy, cs.input); };

  while (true) {
    const double t_sample = state.t + static_cast<double>(sample_index) * dt_ctrl;
    while (next_break < breaks.size() && breaks[next_break] <= t + 1e-15) ++next_break;
    double t_end = std::min(t_sample, t_max);
    if (next_break < breaks.size()) t_end = std::min(t_end, breaks[next_break]);

    double h_try = std::min({h, opts.max_step, t_end - t});
    bool hits_end = (t_end - t) <= h_try * (1.0 + 1e-12);
    if (hits_end) h_try = t_end - t;

    const auto step = Stepper::step(f, t, y, h_try);
    const double err = Stepper::error_norm(step.err, y, step.y, opts.abs_tol, opts.rel_tol);
    if (!finite(step.y) || !(err <= 1.0)) {
      if (!finite(step.y) && h_try <= opts.min_step)
        throw Error(ErrorKind::NonFiniteState, "state became non-finite");
      h = finite(step.y) ? next_step(h_try, err) : 0.25 * h_try;
      if (h < opts.min_step) {
        std::ostringstream os;
        os << "step size " << h << " below min_step at t=" << t;
        throw Error(ErrorKind::StepSizeUnderflow, os.str());
      }
      continue;
    }

    const double t_new = hits_end ? t_end : t + h_try;
    const HybridState s_new = sys.unpack(t_new, step.y);
    model.validate(s_new);

    // Guard detection on the accepted step.
    std::vector<Event> crossed;
    for (std::size_t i = 0; i < guards.size(); ++i) {
      const double g_new = model.guard(guards[i], s_new, cs.input);
      if (g_prev[i] > 0.0 && g_new <= 0.0) {
        const auto g_at = [&](double tau) {
          const auto yy = Stepper::step(f, t, y, tau - t).y;
          return model.guard(guards[i], sys.unpack(tau, yy), cs.input);
        };
        // Bracket [a, b] with g(a) > 0 >= g(b): a few bisections, then
        // Illinois-modified secant; the event is reported at b.
        double a = t, b = t_new, ga = g_prev[i], gb = g_new;
        for (int k = 0; k < 6 && (b - a) > opts.event_tol; ++k) {
          const double c = 0.5 * (a + b);
          const double gc = g_at(c);
          if (gc > 0.0) { a = c; ga = gc; } else { b = c; gb = gc; }
        }
        int side = 0;
        for (int k = 0; k < 200 && (b - a) > opts.event_tol && gb != 0.0; ++k) {
          double c = b - gb * (b - a) / (gb - ga);
          const double w = b - a;
          if (!(c > a + 1e-3 * w && c < b - 1e-3 * w)) c = 0.5 * (a + b);
          const double gc = g_at(c);
          if (gc > 0.0) {
            a = c; ga = gc;
            if (side == -1) gb *= 0.5;
            side = -1;
          } else {
            b = c; gb = gc;
            if (side == 1) ga *= 0.5;
            side = 1;
          }
        }
        for (int k = 0; k < 200 && (b - a) > opts.event_tol && gb != 0.0; ++k) {
          const double c = 0.5 * (a + b);
          if (g_at(c) > 0.0) a = c; else b = c;
        }
        Event ev;
        ev.kind = guards[i];
        ev.t = b;
        ev.state_before = sys.unpack(b, Stepper::step(f, t, y, b - t).y);
        crossed.push_back(std::move(ev));
      }
      g_prev[i] = g_new;
    }
    if (!crossed.empty()) {
      std::sort(crossed.begin(), crossed.end(), [](const Event& l, const Event& r) { return l.t < r.t; });
      const double t_first = crossed.front().t;
      auto best = std::min_element(crossed.begin(), crossed.end(), [&](const Event& l, const Event& r) {
        const bool l_in = l.t <= t_first + opts.event_tol;
        const bool r_in = r.t <= t_first + opts.event_tol;
        if (l_in != r_in) return l_in;
        return priority(l.kind) < priority(r.kind);
      });
      for (const auto& other : crossed) {
        if (&other != &*best && other.t <= t_first + opts.event_tol) {
          std::ostringstream os;
          os << "simultaneous " << to_string(best->kind) << " and " << to_string(other.kind)
             << " at t=" << best->t << "; resolved by priority";
          traj.notes.push_back(os.str());
        }
      }
      Event ev = std::move(*best);
      traj.push(make_sample(model, ev.state_before, cs));
      ev.state_after = model.reset(ev.kind, ev.state_before, cs.input);
      model.validate(ev.state_after);
      return {std::move(traj), std::move(ev)};
    }

    t = t_new;
    y = step.y;
    h = next_step(h_try, err);
    if (opts.record_samples) traj.push(make_sample(model, s_new, cs));
    if (hits_end) {
      if (t >= t_max) {
        if (!opts.record_samples) traj.push(make_sample(model, s_new, cs));
        traj.termination = Termination::TimeLimit;
        return {std::move(traj), std::nullopt};
      }
      if (t >= t_sample - 1e-15) {
        cs = controller.sample(s_new);
        ++sample_index;
        if (opts.record_samples) traj.push(make_sample(model, s_new, cs));
        for (std::size_t i = 0; i < guards.size(); ++i) {
          g_prev[i] = model.guard(guards[i], s_new, cs.input);
        }
      }
    }
  }
}

Trajectory simulate_hops(const HybridModel& model, const HybridState& state,
                         const Controller& controller, int n_steps, double t_max,
                         const IntegratorOptions& opts) {
  if (n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be at least 1");
  Trajectory traj;
  HybridState s = state;
  int apexes = 0;
  while (apexes < n_steps) {
    if (!(t_max > s.t)) {
      traj.termination = Termination::TimeLimit;
      return traj;
    }
    auto [seg, ev] = integrate_until_event(model, s, controller, model.guards(s.phase), t_max, opts);
    for (auto& smp : seg.samples) traj.push(std::move(smp));
    traj.notes.insert(traj.notes.end(), seg.notes.begin(), seg.notes.end());
    if (!ev) {
      traj.termination = Termination::TimeLimit;
      return traj;
    }
    traj.events.push_back(*ev);
    if (controller.on_event) controller.on_event(*ev);
    s = ev->state_after;
    if (ev->kind == EventKind::Apex) ++apexes;
  }
  traj.termination = Termination::Completed;
  return traj;
}

HybridState integrate_free(const HybridModel& model, const HybridState& state,
                           const Eigen::VectorXd& input, double t_end,
                           const IntegratorOptions& opts) {
  const int n = model.dof();
  const Packed sys{model, state.phase, state.contact, n};
  const auto f = [&](double tt, const Eigen::VectorXd& yy) { return sys.rhs(tt, yy, input); };
  double t = state.t;
  Eigen::VectorXd y = pack(state);
  const double dir = t_end >= t ? 1.0 : -1.0;
  double h = std::min(opts.max_step, 1e-3);
  while (dir * (t_end - t) > 0.0) {
    double h_try = std::min(h, dir * (t_end - t));
    const bool last = h_try >= dir * (t_end - t);
    const auto step = Stepper::step(f, t, y, dir * h_try);
    const double err = Stepper::error_norm(step.err, y, step.y, opts.abs_tol, opts.rel_tol);
    if (!finite(step.y) || !(err <= 1.0)) {
      h = finite(step.y) ? next_step(h_try, err) : 0.25 * h_try;
      if (h < opts.min_step) throw Error(ErrorKind::StepSizeUnderflow, "integrate_free underflow");
      continue;
    }
    t = last ? t_end : t + dir * h_try;
    y = step.y;
    h = std::min(next_step(h_try, err), opts.max_step);
  }
  return sys.unpack(t, y);
}

}  // namespace hop
