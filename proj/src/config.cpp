#include "hop/config.hpp"

#include "hop/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hop {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Hop: return "hop";
    case ScenarioKind::Push: return "push";
    case ScenarioKind::TerrainStep: return "terrain_step";
    case ScenarioKind::GaitSearch: return "gait_search";
    case ScenarioKind::DesignSweep: return "design_sweep";
    case ScenarioKind::CotCompare: return "cot_compare";
  }
  return "unknown";
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Slip: return "slip";
    case ModelKind::Slip3D: return "slip3d";
    case ModelKind::PlanarRobot: return "planar_robot";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::ConfigError, "key '" + key + "': " + what);
}

double read_double(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad_key(key, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    bad_key(key, "expected a number, got '" + n.Scalar() + "'");
  }
}

long long read_int(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad_key(key, "expected an integer");
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    bad_key(key, "expected an integer, got '" + n.Scalar() + "'");
  }
}

/// One dotted key bound to a member of a config record.
struct Field {
  std::string key;
  std::function<void(const YAML::Node&)> read;
  std::function<void(YAML::Emitter&)> write;
  std::function<bool()> present = [] { return true; };
};

Field number(std::string key, double& v) {
  return {key, [&v, key](const YAML::Node& n) { v = read_double(n, key); },
          [&v](YAML::Emitter& e) { e << v; }};
}

Field optional_number(std::string key, std::optional<double>& v) {
  return {key, [&v, key](const YAML::Node& n) { v = read_double(n, key); },
          [&v](YAML::Emitter& e) { e << *v; }, [&v] { return v.has_value(); }};
}

Field integer(std::string key, int& v) {
  return {key, [&v, key](const YAML::Node& n) {
            const long long x = read_int(n, key);
            if (x < INT32_MIN || x > INT32_MAX) bad_key(key, "out of range");
            v = static_cast<int>(x);
          },
          [&v](YAML::Emitter& e) { e << v; }};
}

Field seed(std::string key, std::uint64_t& v) {
  return {key, [&v, key](const YAML::Node& n) {
            const long long x = read_int(n, key);
            if (x < 0) bad_key(key, "must be non-negative");
            v = static_cast<std::uint64_t>(x);
          },
          [&v](YAML::Emitter& e) { e << static_cast<unsigned long long>(v); }};
}

Field text(std::string key, std::string& v) {
  return {key, [&v, key](const YAML::Node& n) {
            if (!n.IsScalar()) bad_key(key, "expected a string");
            v = n.Scalar();
          },
          [&v](YAML::Emitter& e) { e << YAML::DoubleQuoted << v; }, [&v] { return !v.empty(); }};
}

Field list(std::string key, std::vector<double>& v) {
  return {key, [&v, key](const YAML::Node& n) {
            if (!n.IsSequence()) bad_key(key, "expected a list of numbers");
            v.clear();
            for (std::size_t i = 0; i < n.size(); ++i) v.push_back(read_double(n[i], key + "[" + std::to_string(i) + "]"));
          },
          [&v](YAML::Emitter& e) {
            e << YAML::Flow << YAML::BeginSeq;
            for (double x : v) e << x;
            e << YAML::EndSeq;
          }};
}

template <typename E>
Field choice(std::string key, E& v, std::vector<std::pair<std::string, E>> names) {
  return {key,
          [&v, key, names](const YAML::Node& n) {
            if (!n.IsScalar()) bad_key(key, "expected a name");
            for (const auto& [name, value] : names) {
              if (name == n.Scalar()) {
                v = value;
                return;
              }
            }
            std::string opts;
            for (const auto& [name, value] : names) opts += (opts.empty() ? "" : ", ") + name;
            bad_key(key, "unknown value '" + n.Scalar() + "' (expected one of " + opts + ")");
          },
          [&v, names](YAML::Emitter& e) {
            for (const auto& [name, value] : names)
              if (value == v) e << name;
          }};
}

std::vector<Field> fields(ScenarioConfig& c, PushSpec& push, bool& has_push) {
  std::vector<Field> f;
  f.push_back(choice("scenario.kind", c.kind,
                     {{"hop", ScenarioKind::Hop},
                      {"push", ScenarioKind::Push},
                      {"terrain_step", ScenarioKind::TerrainStep},
                      {"gait_search", ScenarioKind::GaitSearch},
                      {"design_sweep", ScenarioKind::DesignSweep},
                      {"cot_compare", ScenarioKind::CotCompare}}));
  f.push_back(choice("scenario.model", c.model,
                     {{"slip", ModelKind::Slip}, {"slip3d", ModelKind::Slip3D}, {"planar_robot", ModelKind::PlanarRobot}}));
  f.push_back(number("scenario.xdot_des", c.xdot_des));
  f.push_back(number("scenario.ydot_des", c.ydot_des));
  f.push_back(number("scenario.apex", c.apex));
  f.push_back(optional_number("scenario.start_apex", c.start_apex));
  f.push_back(optional_number("scenario.start_xdot", c.start_xdot));
  f.push_back(integer("scenario.hops", c.hops));
  f.push_back(number("scenario.t_max", c.t_max));
  f.push_back(seed("scenario.seed", c.seed));
  f.push_back(text("scenario.gait_file", c.gait_file));

  f.push_back(number("gravity", c.slip.g));
  f.push_back(number("slip.m", c.slip.m));
  f.push_back(number("slip.k", c.slip.k));
  f.push_back(number("slip.d", c.slip.d));
  f.push_back(number("slip.r0", c.slip.r0));
  f.push_back(number("slip.max_travel", c.slip.max_travel));

  RobotParams& r = c.robot;
  f.push_back(number("robot.m_body", r.m_body));
  f.push_back(number("robot.m_leg", r.m_leg));
  f.push_back(number("robot.I_body", r.I_body));
  f.push_back(number("robot.attach_offset", r.attach_offset));
  f.push_back(number("robot.leg_com_from_foot", r.leg_com_from_foot));
  f.push_back(number("robot.k_s", r.k_s));
  f.push_back(number("robot.d_s", r.d_s));
  f.push_back(number("robot.r0", r.r0));
  f.push_back(number("robot.max_travel", r.max_travel));
  f.push_back(number("robot.arm", r.arm));
  f.push_back(number("robot.k_t", r.k_t));
  f.push_back(number("robot.tau_min", r.tau_min));
  f.push_back(number("robot.tau_max", r.tau_max));
  f.push_back(number("robot.twr", r.twr));
  f.push_back(number("robot.attitude_bandwidth_hz", r.attitude_bandwidth_hz));
  f.push_back(number("robot.attitude_damping", r.attitude_damping));
  f.push_back(number("robot.baumgarte", r.baumgarte));

  f.push_back(optional_number("ctrl.E_d", c.E_d));
  f.push_back(number("ctrl.Kp", c.ctrl.K_p));
  f.push_back(number("ctrl.Q", c.ctrl.Q));
  f.push_back(number("ctrl.gamma", c.ctrl.gamma));
  f.push_back(number("ctrl.p", c.ctrl.p));
  f.push_back(choice("ctrl.variant", c.ctrl.variant,
                     {{"relaxed_equality", QpVariant::RelaxedEqualityQP}, {"inequality", QpVariant::InequalityQP}}));
  f.push_back(number("ctrl.Ft_min", c.ctrl.F_min));
  f.push_back(number("ctrl.Ft_max", c.ctrl.F_max));
  f.push_back(optional_number("ctrl.g_e", c.g_e));
  f.push_back(number("ctrl.leg_angle_limit", c.leg_angle_limit));

  IntegratorOptions& o = c.integrator;
  f.push_back(number("abs_tol", o.abs_tol));
  f.push_back(number("rel_tol", o.rel_tol));
  f.push_back(number("event_tol", o.event_tol));
  f.push_back(number("control_rate_hz", o.control_rate_hz));
  f.push_back(number("min_step", o.min_step));
  f.push_back(number("max_step", o.max_step));

  // Any push.* key switches the push on.
  const auto pushed = [&has_push](Field fl) {
    auto read = fl.read;
    fl.read = [read, &has_push](const YAML::Node& n) {
      read(n);
      has_push = true;
    };
    fl.present = [&has_push] { return has_push; };
    return fl;
  };
  f.push_back(pushed(number("push.force", push.force_x)));
  f.push_back(pushed(number("push.force_y", push.force_y)));
  f.push_back(pushed(number("push.duration", push.duration)));
  f.push_back(pushed(number("push.start", push.start)));
  f.push_back(pushed(integer("push.after_apex", push.after_apex)));

  f.push_back(number("terrain.step_height", c.terrain.step_height));
  f.push_back(number("terrain.step_x", c.terrain.step_x));

  f.push_back(number("check.xdot_tol", c.check.xdot_tol));
  f.push_back(number("check.apex_tol", c.check.apex_tol));
  f.push_back(integer("check.window", c.check.window));
  f.push_back(integer("check.settle_max", c.check.settle_max));
  f.push_back(number("check.recovery_tol", c.check.recovery_tol));
  f.push_back(integer("check.recovery_events", c.check.recovery_events));
  f.push_back(number("check.friction_mu", c.check.friction_mu));

  f.push_back(list("design.weights", c.design.weights));
  f.push_back(list("design.stiffness", c.design.stiffness));
  f.push_back(list("design.twr", c.design.twr));
  f.push_back(number("design.apex", c.design.apex));
  f.push_back(number("design.damping", c.design.damping));

  f.push_back(list("cot.twr", c.cot.twr));
  f.push_back(number("cot.apex", c.cot.apex));
  f.push_back(number("cot.xdot", c.cot.xdot));
  f.push_back(integer("cot.settle_steps", c.cot.settle_steps));
  f.push_back(integer("cot.n_steps", c.cot.n_steps));
  f.push_back(number("cot.flight_duration", c.cot.flight_duration));
  return f;
}

void flatten(const YAML::Node& node, const std::string& prefix, std::map<std::string, YAML::Node>& out) {
  for (const auto& kv : node) {
    const std::string key = prefix.empty() ? kv.first.Scalar() : prefix + "." + kv.first.Scalar();
    if (kv.second.IsMap()) {
      flatten(kv.second, key, out);
    } else {
      if (out.count(key)) bad_key(key, "given twice");
      out[key] = kv.second;
    }
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed YAML: ") + e.what());
  }
  ScenarioConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) throw Error(ErrorKind::ConfigError, "top level must be a mapping");
  std::map<std::string, YAML::Node> flat;
  flatten(root, "", flat);

  PushSpec push;
  bool has_push = false;
  std::vector<Field> f = fields(cfg, push, has_push);
  for (const auto& [key, node] : flat) {
    auto it = std::find_if(f.begin(), f.end(), [&](const Field& fl) { return fl.key == key; });
    if (it == f.end()) bad_key(key, "unknown key");
    if (node.IsNull()) continue;
    it->read(node);
  }
  if (has_push) cfg.push = push;
  cfg.robot.g = cfg.slip.g;
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  PushSpec push = cfg.push.value_or(PushSpec{});
  bool has_push = cfg.push.has_value();
  const std::vector<Field> f = fields(c, push, has_push);
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  for (const auto& fl : f) {
    if (!fl.present()) continue;
    e << YAML::Key << fl.key << YAML::Value;
    fl.write(e);
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void ScenarioConfig::validate() const {
  const auto positive = [](const std::string& key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) bad_key(key, "must be positive");
  };
  positive("scenario.apex", apex);
  positive("scenario.t_max", t_max);
  if (hops < 1) bad_key("scenario.hops", "must be at least 1");
  if (start_apex) positive("scenario.start_apex", *start_apex);
  positive("gravity", slip.g);
  positive("slip.m", slip.m);
  positive("slip.k", slip.k);
  positive("slip.r0", slip.r0);
  if (!(slip.d >= 0.0)) bad_key("slip.d", "must be non-negative");
  positive("slip.max_travel", slip.max_travel);
  positive("robot.m_body", robot.m_body);
  positive("robot.m_leg", robot.m_leg);
  positive("robot.I_body", robot.I_body);
  positive("robot.k_s", robot.k_s);
  positive("robot.r0", robot.r0);
  if (!(robot.tau_min < robot.tau_max)) bad_key("robot.tau_max", "must exceed robot.tau_min");
  if (!(robot.twr > 0.0 && robot.twr <= 1.0)) bad_key("robot.twr", "must lie in (0, 1]");
  if (!(ctrl.K_p < 0.0)) bad_key("ctrl.Kp", "must be negative");
  positive("ctrl.Q", ctrl.Q);
  positive("ctrl.gamma", ctrl.gamma);
  if (!(ctrl.p >= 0.0)) bad_key("ctrl.p", "must be non-negative");
  if (!(ctrl.F_min >= 0.0)) bad_key("ctrl.Ft_min", "must be non-negative");
  if (!(ctrl.F_max > ctrl.F_min)) bad_key("ctrl.Ft_max", "must exceed ctrl.Ft_min");
  if (g_e) positive("ctrl.g_e", *g_e);
  if (!(ctrl.F_min < model_mass() * slip.g)) bad_key("ctrl.Ft_min", "must be below the weight");
  positive("ctrl.leg_angle_limit", leg_angle_limit);
  positive("abs_tol", integrator.abs_tol);
  positive("rel_tol", integrator.rel_tol);
  positive("event_tol", integrator.event_tol);
  positive("control_rate_hz", integrator.control_rate_hz);
  positive("min_step", integrator.min_step);
  positive("max_step", integrator.max_step);
  if (push) {
    positive("push.duration", push->duration);
    if (push->after_apex < 0) bad_key("push.after_apex", "must be non-negative");
    if (push->after_apex == 0 && !(push->start >= 0.0)) bad_key("push.start", "must be non-negative");
  }
  if (kind == ScenarioKind::Push && !push) bad_key("push.force", "push scenario needs a push");
  if (kind == ScenarioKind::TerrainStep && terrain.step_height == 0.0)
    bad_key("terrain.step_height", "terrain step scenario needs a step");
  if (check.window < 1) bad_key("check.window", "must be at least 1");
  if (check.settle_max < 1) bad_key("check.settle_max", "must be at least 1");
  if (check.recovery_events < 1) bad_key("check.recovery_events", "must be at least 1");
  positive("design.apex", design.apex);
  if (!(design.damping >= 0.0)) bad_key("design.damping", "must be non-negative");
  for (double k : design.stiffness) positive("design.stiffness", k);
  for (double w : design.weights) positive("design.weights", w);
  for (double t : design.twr)
    if (!(t >= 0.0)) bad_key("design.twr", "must be non-negative");
  positive("cot.apex", cot.apex);
  positive("cot.xdot", cot.xdot);
  positive("cot.flight_duration", cot.flight_duration);
  if (cot.settle_steps < 1) bad_key("cot.settle_steps", "must be at least 1");
  if (cot.n_steps < 1) bad_key("cot.n_steps", "must be at least 1");
  for (double t : cot.twr)
    if (!(t > 0.0)) bad_key("cot.twr", "must be positive");
}

double ScenarioConfig::model_mass() const { return model == ModelKind::PlanarRobot ? robot.mass() : slip.m; }

HopControllerConfig ScenarioConfig::resolved_controller() const {
  HopControllerConfig out;
  out.energy = ctrl;
  out.leg_angle_limit = leg_angle_limit;
  const double m = model_mass();
  out.energy.mass = m;
  out.energy.g_e = g_e ? *g_e : equivalent_gravity(ctrl.F_min, m, slip.g);
  if (model == ModelKind::PlanarRobot) out.energy.F_max = std::min(ctrl.F_max, robot.twr * m * robot.g);
  out.energy.E_d = E_d ? *E_d : energy_for_apex(apex, out.energy);
  return out;
}

}  // namespace hop
