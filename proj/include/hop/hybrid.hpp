#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hop {

enum class Phase { Aerial, Stance };

/// Touchdown, Liftoff and Apex are the gait events. LegStop is a model-internal
/// aerial event (prismatic leg reaching its extension stop) used by the
/// full-order robot.
enum class EventKind { Touchdown, Liftoff, Apex, LegStop };

std::string_view to_string(Phase phase);
std::string_view to_string(EventKind kind);

/// Phase-tagged generalized coordinates. `contact` holds the pinned foot
/// location while in stance (model-dependent size, empty in flight).
struct HybridState {
  Phase phase = Phase::Aerial;
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  double t = 0.0;
  Eigen::VectorXd contact;
};

struct Event {
  EventKind kind = EventKind::Apex;
  double t = 0.0;
  HybridState state_before;
  HybridState state_after;
};

/// Per-sample controller diagnostics; NaN when the controller has none.
struct ControlDiagnostics {
  double eta = std::numeric_limits<double>::quiet_NaN();
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double leg_angle_cmd = std::numeric_limits<double>::quiet_NaN();
  int active_set = 0;
};

struct ControlSample {
  Eigen::VectorXd input;
  ControlDiagnostics diag;
};

struct Sample {
  double t = 0.0;
  HybridState state;
  Eigen::VectorXd input;
  Eigen::VectorXd grf;
  ControlDiagnostics diag;
};

enum class Termination { Completed, TimeLimit, EventLimit };

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Event> events;
  /// Diagnostic messages (degenerate event ties, friction warnings, ...).
  std::vector<std::string> notes;
  Termination termination = Termination::Completed;

  /// Appends keeping sample times strictly increasing; a sample at the same
  /// time as the last one replaces it (post-reset state wins).
  void push(Sample s);
  void append(const Trajectory& other);
  std::size_t count(EventKind kind) const;
};

struct IntegratorOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  double event_tol = 1e-9;
  double control_rate_hz = 200.0;
  double min_step = 1e-12;
  double max_step = 1e-2;
  bool record_samples = true;
};

/// A hybrid model advanced by the integrator. Implementations must be pure:
/// every method is a function of its arguments only.
class HybridModel {
 public:
  virtual ~HybridModel() = default;

  virtual int dof() const = 0;
  /// Generalized accelerations for the state's phase with the input held.
  virtual Eigen::VectorXd acceleration(const HybridState& s, const Eigen::VectorXd& input) const = 0;
  /// Guard value; positive before the event, the event fires when it reaches zero.
  virtual double guard(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const = 0;
  virtual std::vector<EventKind> guards(Phase phase) const = 0;
  /// Reset map applied at the event state (phase switch included).
  virtual HybridState reset(EventKind kind, const HybridState& s, const Eigen::VectorXd& input) const = 0;
  /// Contact force at the foot (empty in flight).
  virtual Eigen::VectorXd ground_reaction(const HybridState&, const Eigen::VectorXd&) const { return {}; }
  /// Throws if the state left the model's valid region (e.g. the robot fell over).
  virtual void validate(const HybridState&) const {}
  /// Times in (t0, t1) where the model's right-hand side is discontinuous.
  virtual std::vector<double> breakpoints(double, double) const { return {}; }
};

struct Controller {
  std::function<ControlSample(const HybridState&)> sample;
  std::function<void(const Event&)> on_event;
};

/// Advances `state` until the first guard in `guards` fires or `t_max` is hit.
/// The controller is evaluated at the start and then zero-order-held on a
/// grid of period 1/control_rate_hz anchored at the start time.
std::pair<Trajectory, std::optional<Event>> integrate_until_event(
    const HybridModel& model, const HybridState& state, const Controller& controller,
    const std::vector<EventKind>& guards, double t_max, const IntegratorOptions& opts = {});

/// Chains integrate_until_event across events until `n_steps` apex events were
/// reported or `t_max` elapsed.
Trajectory simulate_hops(const HybridModel& model, const HybridState& state,
                         const Controller& controller, int n_steps, double t_max,
                         const IntegratorOptions& opts = {});

/// Integrates with a fixed input and no guards to `t_end`, which may lie
/// before `state.t` (backward integration).
HybridState integrate_free(const HybridModel& model, const HybridState& state,
                           const Eigen::VectorXd& input, double t_end,
                           const IntegratorOptions& opts = {});

}  // namespace hop
