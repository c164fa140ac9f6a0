// Command-line front end: runs scenarios and the acceptance suite.

#include "hop/acceptance.hpp"
#include "hop/config.hpp"
#include "hop/errors.hpp"
#include "hop/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit : int { kOk = 0, kAcceptance = 1, kConfig = 2, kNumerical = 3 };

struct Options {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int exit_for(hop::ErrorKind kind) {
  switch (kind) {
    case hop::ErrorKind::ConfigError:
    case hop::ErrorKind::GaitMismatch:
    case hop::ErrorKind::InvalidConfig:
      return kConfig;
    case hop::ErrorKind::EmptyRun:
      return kAcceptance;
    default:
      return kNumerical;
  }
}

hop::ScenarioConfig load(const Options& o) {
  hop::ScenarioConfig cfg = hop::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

int emit(const hop::ScenarioResult& r, const Options& o) {
  const auto files = hop::write_artifacts(r, o.out_dir);
  if (!o.quiet) {
    std::cout << hop::report_text(r);
    std::cout << "wrote";
    for (const auto& f : files) std::cout << ' ' << (std::filesystem::path(o.out_dir) / f).string();
    std::cout << '\n';
  }
  if (r.failure_kind) return exit_for(*r.failure_kind);
  return r.passed() ? kOk : kAcceptance;
}

int run_as(const Options& o, std::optional<hop::ScenarioKind> kind) {
  hop::ScenarioConfig cfg = load(o);
  if (kind) cfg.kind = *kind;
  return emit(hop::run_scenario(cfg), o);
}

int check(const Options& o) {
  const hop::ScenarioConfig cfg = load(o);
  hop::AcceptanceOptions opts;
  opts.base = cfg;
  opts.out_dir = o.out_dir;
  opts.progress = o.quiet ? nullptr : &std::cout;
  const auto results = hop::run_acceptance(opts);
  hop::write_file_atomic((std::filesystem::path(o.out_dir) / "acceptance.txt").string(),
                         hop::acceptance_text(results));
  if (!o.quiet) std::cout << hop::acceptance_text(results);
  return hop::all_passed(results) ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hopping simulation, gait search and design analysis"};
  app.require_subcommand(1);
  Options o;

  const auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", o.config, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", o.out_dir, "Directory for the artifacts")->capture_default_str();
    sub->add_option("--seed", o.seed, "Override scenario.seed");
    sub->add_flag("--quiet", o.quiet, "Print nothing on success");
    return sub;
  };
  CLI::App* simulate = add("simulate", "Run the configured scenario");
  CLI::App* gait = add("gait-search", "Find the periodic orbit and write gait.json");
  CLI::App* design = add("design-sweep", "Bang-bang design tables");
  CLI::App* cot = add("cot", "Cost of transport, hopping against flying");
  CLI::App* acceptance = add("check", "Run the acceptance suite twice and compare the outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (simulate->parsed()) return run_as(o, std::nullopt);
    if (gait->parsed()) return run_as(o, hop::ScenarioKind::GaitSearch);
    if (design->parsed()) return run_as(o, hop::ScenarioKind::DesignSweep);
    if (cot->parsed()) return run_as(o, hop::ScenarioKind::CotCompare);
    if (acceptance->parsed()) return check(o);
  } catch (const hop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
