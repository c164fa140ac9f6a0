#pragma once

#include "hop/hybrid.hpp"
#include "hop/planar_robot.hpp"
#include "hop/s2s.hpp"
#include "hop/slip.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hop {

enum class ScenarioKind { Hop, Push, TerrainStep, GaitSearch, DesignSweep, CotCompare };
enum class ModelKind { Slip, Slip3D, PlanarRobot };

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(ModelKind kind);

struct PushSpec {
  double force_x = 10.0;  // N
  double force_y = 0.0;   // N
  double duration = 0.1;  // s
  // Start time in s, or the time of the given apex event when after_apex > 0.
  double start = 0.0;
  int after_apex = 0;
};

struct TerrainSpec {
  double step_height = 0.0;  // m, 0 for flat ground
  double step_x = 0.0;       // m
};

/// Pass thresholds for the per-scenario checks.
struct CheckSpec {
  double xdot_tol = 0.05;      // m/s
  double apex_tol = 0.02;      // relative
  int window = 20;             // consecutive hops that must meet both
  int settle_max = 10;         // last hop at which the window may start
  double recovery_tol = 0.1;   // m/s
  int recovery_events = 2;
  double friction_mu = 0.8;    // friction-ratio warning threshold
};

struct DesignSpec {
  std::vector<double> weights{2.0, 2.5, 3.0, 3.5};
  std::vector<double> stiffness{2000, 4000, 6000, 8000, 10000};
  std::vector<double> twr{0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95};
  double apex = 1.3;      // m, target for the required-thrust table
  double damping = 15.0;  // N s/m
};

struct CotSpec {
  std::vector<double> twr{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0};
  double apex = 1.0;
  double xdot = 1.0;
  int settle_steps = 10;
  int n_steps = 10;
  double flight_duration = 10.0;  // s
};

/// One run, fully determined by this record.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Hop;
  ModelKind model = ModelKind::Slip;

  double xdot_des = 0.5;  // m/s
  double ydot_des = 0.0;  // m/s, Slip3D only
  double apex = 0.5;      // m, regulated apex height
  std::optional<double> start_apex;
  std::optional<double> start_xdot;
  int hops = 25;
  double t_max = 60.0;  // s
  std::uint64_t seed = 0;
  std::string gait_file;

  SlipParams slip;
  RobotParams robot;
  EnergyControllerConfig ctrl;  // mass, E_d and g_e are filled in by resolve()
  std::optional<double> E_d;    // J; from `apex` when unset
  std::optional<double> g_e;    // m/s^2; g - F_min/m when unset
  double leg_angle_limit = 0.5;
  IntegratorOptions integrator;

  std::optional<PushSpec> push;
  TerrainSpec terrain;
  CheckSpec check;
  DesignSpec design;
  CotSpec cot;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// Physical mass of the configured model.
  double model_mass() const;
  /// Controller settings with mass, g_e, E_d and the thrust cap resolved.
  HopControllerConfig resolved_controller() const;
};

/// Parses YAML with dotted keys; nested maps are flattened, so `slip: {m: 2}`
/// and `slip.m: 2` are the same key. Unknown keys are errors.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
/// Flat dotted-key YAML; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace hop
