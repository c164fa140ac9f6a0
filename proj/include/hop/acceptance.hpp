#pragma once

#include "hop/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hop {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;  // one-line summary of the measured values
  double seconds = 0.0;
};

struct AcceptanceOptions {
  // Seed, integrator settings and gravity are taken from here; every criterion
  // builds its own scenario on top of it.
  ScenarioConfig base;
  int random_instances = 1000;
  // Scenario artifacts go to out_dir/<scenario>/ when non-empty.
  std::string out_dir;
  // One line per finished criterion, or nullptr.
  std::ostream* progress = nullptr;
};

/// Runs the eleven acceptance criteria in order. The scenario runs are
/// repeated at the end and their CSVs compared byte for byte.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "PASS|FAIL <id> <name>: <measured>" per criterion.
std::string acceptance_line(const CriterionResult& r);
std::string acceptance_text(const std::vector<CriterionResult>& results);
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace hop
