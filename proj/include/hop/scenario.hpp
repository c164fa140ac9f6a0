#pragma once

#include "hop/config.hpp"
#include "hop/design.hpp"
#include "hop/errors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hop {

inline constexpr int kTrajectorySchemaVersion = 1;
inline constexpr int kEventsSchemaVersion = 1;

/// A named pass/fail check with its measured value and threshold.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation = "<=";  // how `measured` must compare with `threshold`
  bool pass = false;
  std::string detail;
};

CheckResult make_check(std::string name, double measured, std::string relation, double threshold,
                       std::string detail = {});

struct ScenarioResult {
  ScenarioConfig config;
  Trajectory trajectory;
  std::vector<ApexRecord> apexes;
  std::vector<std::string> log;
  std::optional<Gait> gait;
  std::optional<Gait> lateral_gait;
  std::vector<StiffnessRow> design_stiffness;
  std::vector<TwrRow> design_twr;
  std::vector<CotResult> cot;
  std::vector<CheckResult> checks;
  // Set when an error stopped the run; the partial results are kept.
  std::optional<ErrorKind> failure_kind;
  std::string failure;
  double push_start = 0.0;
  double push_end = 0.0;

  bool passed() const;
};

/// Runs one configured scenario. Simulation errors are recorded in the result
/// (as a failing check) rather than thrown; ConfigError and GaitMismatch propagate.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Periodic-orbit search for the configured SLIP, speed and apex.
Gait run_gait_search(const ScenarioConfig& cfg);

std::string trajectory_csv(const ScenarioResult& r);
std::string events_csv(const ScenarioResult& r);
/// Human-readable summary: apex table, event log and checks. Throws EmptyRun
/// when the result holds neither apexes nor tables.
std::string report_text(const ScenarioResult& r);
std::string checks_json(const std::vector<CheckResult>& checks);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Writes every artifact of `r` into `out_dir` and returns the file names.
std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& out_dir);

}  // namespace hop
