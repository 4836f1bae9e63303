#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "swarmdc/error.hpp"
#include "swarmdc/scenario.hpp"

namespace swarmdc {
namespace {

// Map node wrapper that remembers which keys were read, so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) fail("", "expected a mapping");
    // yaml-cpp keeps the first of repeated keys; a silent override is worse than an error.
    std::set<std::string> keys;
    for (const auto& kv : node_) {
      if (!keys.insert(kv.first.as<std::string>()).second) fail(kv.first.as<std::string>(), "duplicate key");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_[key];
  }

  template <class T>
  T get(const std::string& key) {
    if (!has(key)) fail(key, "missing required key");
    return as<T>(key, node_[key]);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    return has(key) ? as<T>(key, node_[key]) : fallback;
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_ ? node_[key] : YAML::Node();
  }

  Section child(const std::string& key, bool required = false) {
    if (required && !has(key)) fail(key, "missing required section");
    return Section(raw(key), name(key));
  }

  void finish() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(key, "unknown key");
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError((key.empty() ? path_ : name(key)) + ": " + msg);
  }

  template <class T>
  T as(const std::string& key, const YAML::Node& n) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(key, "invalid value");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec2 read_vec2(Section& s, const std::string& key) {
  const auto v = s.get<std::vector<double>>(key);
  if (v.size() != 2) s.fail(key, "expected 2 numbers");
  return {v[0], v[1]};
}

// Accepts a scalar (times identity), a 2-vector (diagonal) or a 2x2 nested list.
Mat2 read_mat2(Section& s, const std::string& key) {
  YAML::Node n = s.raw(key);
  if (!n) s.fail(key, "missing required key");
  try {
    if (n.IsScalar()) return n.as<double>() * Mat2::Identity();
    if (n.IsSequence() && n.size() == 2 && n[0].IsScalar()) {
      return Vec2(n[0].as<double>(), n[1].as<double>()).asDiagonal();
    }
    if (n.IsSequence() && n.size() == 2 && n[0].IsSequence() && n[0].size() == 2 && n[1].size() == 2) {
      Mat2 m;
      m << n[0][0].as<double>(), n[0][1].as<double>(), n[1][0].as<double>(), n[1][1].as<double>();
      return m;
    }
  } catch (const YAML::Exception&) {
  }
  s.fail(key, "expected a number, a 2-vector or a 2x2 matrix");
}

MixtureSpec read_mixture(Section& s) {
  MixtureSpec m;
  m.floor = s.get<double>("floor", 0.0);
  YAML::Node comps = s.raw("components");
  if (!comps || !comps.IsSequence() || comps.size() == 0) s.fail("components", "expected a non-empty list");
  for (std::size_t c = 0; c < comps.size(); ++c) {
    Section cs(comps[c], s.name("components[" + std::to_string(c) + "]"));
    GaussianComponent g;
    g.weight = cs.get<double>("weight");
    g.mean = read_vec2(cs, "mean");
    g.cov = read_mat2(cs, "cov");
    cs.finish();
    if (!(g.weight >= 0.0)) cs.fail("weight", "must be non-negative");
    if (g.cov(0, 1) != g.cov(1, 0) || !(g.cov.determinant() > 0.0) || !(g.cov(0, 0) > 0.0)) {
      cs.fail("cov", "must be symmetric positive definite");
    }
    m.components.push_back(g);
  }
  if (!(m.floor >= 0.0)) s.fail("floor", "must be non-negative");
  return m;
}

ScenarioConfig from_yaml(const YAML::Node& doc) {
  Section root(doc, "");
  ScenarioConfig c;

  const auto model = root.get<std::string>("model");
  if (model == "integrator") c.model = AgentModel::integrator;
  else if (model == "robot") c.model = AgentModel::robot;
  else root.fail("model", "expected 'integrator' or 'robot'");

  c.agents = root.get<long>("agents");
  c.dt = root.get<double>("dt");
  c.t_end = root.get<double>("t_end");
  c.seed = root.get<std::uint64_t>("seed", c.seed);
  c.control_period = root.get<int>("control_period", 1);
  const auto hold = root.get<std::string>("input_hold", "exact");
  if (hold == "exact") c.input_hold = InputHold::exact;
  else if (hold == "euler") c.input_hold = InputHold::euler;
  else root.fail("input_hold", "expected 'exact' or 'euler'");

  {
    Section g = root.child("grid", true);
    c.nx = g.get<int>("nx");
    c.ny = g.get<int>("ny");
    g.finish();
  }
  {
    Section g = root.child("oracle_grid");
    c.oracle_nx = g.get<int>("nx", 64);
    c.oracle_ny = g.get<int>("ny", 64);
    g.finish();
  }
  {
    Section g = root.child("control", true);
    c.alpha = g.get<double>("alpha");
    c.k = g.get<double>("k");
    c.eps1 = g.get<double>("eps1");
    c.eps2 = g.get<double>("eps2");
    g.finish();
  }
  {
    Section g = root.child("kde", true);
    c.kde.bandwidth = g.get<double>("bandwidth");
    c.kde.density_floor = g.get<double>("density_floor", 1e-3);
    const auto b = g.get<std::string>("boundary", "reflect");
    if (b == "reflect") c.kde.boundary = KdeBoundary::reflect;
    else if (b == "truncate") c.kde.boundary = KdeBoundary::truncate;
    else g.fail("boundary", "expected 'reflect' or 'truncate'");
    g.finish();
  }
  {
    Section g = root.child("diffusion", true);
    const bool iso = g.has("sigma0");
    const bool full = g.has("sigma");
    if (iso == full) g.fail("", "give exactly one of sigma0 or sigma");
    c.sigma = iso ? g.get<double>("sigma0") * Mat2::Identity() : read_mat2(g, "sigma");
    g.finish();
  }
  {
    Section g = root.child("heterogeneity");
    if (g.has("g2_base")) c.heterogeneity.g2_base = read_mat2(g, "g2_base");
    c.heterogeneity.spread = g.get<double>("spread", 0.0);
    g.finish();
  }
  {
    Section g = root.child("robot");
    c.robot.d = g.get<double>("offset", c.robot.d);
    if (g.has("inertia")) c.robot.M = read_mat2(g, "inertia");
    if (g.has("coriolis")) c.robot.V_m = read_mat2(g, "coriolis");
    if (g.has("friction")) c.robot.F = read_vec2(g, "friction");
    c.robot.spread = g.get<double>("spread", 0.0);
    g.finish();
  }
  {
    Section g = root.child("target", true);
    c.target = read_mixture(g);
    g.finish();
  }
  {
    Section g = root.child("initial");
    const auto kind = g.get<std::string>("kind", "uniform");
    if (kind == "uniform") c.initial.kind = InitialKind::uniform;
    else if (kind == "target") c.initial.kind = InitialKind::target;
    else if (kind == "mixture") {
      c.initial.kind = InitialKind::mixture;
      c.initial.mixture = read_mixture(g);
    } else g.fail("kind", "expected 'uniform', 'mixture' or 'target'");
    const auto vel = g.get<std::string>("velocity", "zero");
    if (vel == "zero") c.initial.feedback_velocity = false;
    else if (vel == "feedback") c.initial.feedback_velocity = true;
    else g.fail("velocity", "expected 'zero' or 'feedback'");
    g.finish();
  }
  {
    Section g = root.child("output");
    c.output_dir = g.get<std::string>("dir", "");
    c.snapshot_every = g.get<int>("snapshot_every", 0);
    c.trajectory_every = g.get<int>("trajectory_every", 0);
    g.finish();
  }
  {
    Section g = root.child("compare");
    const auto kind = g.get<std::string>("velocity", "zero");
    if (kind == "zero") c.compare_velocity.kind = VelocityFieldKind::zero;
    else if (kind == "swirl") c.compare_velocity.kind = VelocityFieldKind::swirl;
    else if (kind == "uniform") c.compare_velocity.kind = VelocityFieldKind::uniform;
    else g.fail("velocity", "expected 'zero', 'swirl' or 'uniform'");
    c.compare_velocity.amplitude = g.get<double>("amplitude", 0.0);
    if (g.has("drift")) c.compare_velocity.drift = read_vec2(g, "drift");
    c.compare_every = g.get<double>("sample_every", 1.0);
    g.finish();
  }
  root.finish();
  c.validate();
  return c;
}

}  // namespace

ScenarioConfig parse_config_string(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!doc || !doc.IsMap()) throw ConfigError("config must be a mapping of keys");
  return from_yaml(doc);
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& msg) -> void { throw ConfigError(key + ": " + msg); };
  if (agents < 1) bad("agents", "must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt", "must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) bad("t_end", "must be non-negative");
  if (nx < 4 || ny < 4) bad("grid", "needs at least 4 cells per axis");
  if (oracle_nx < 4 || oracle_ny < 4) bad("oracle_grid", "needs at least 4 cells per axis");
  if (!(alpha > 0.0)) bad("control.alpha", "must be positive");
  if (!(k > 0.0)) bad("control.k", "must be positive");
  if (!(eps1 > 0.0)) bad("control.eps1", "must be positive");
  if (!(eps2 > 0.0)) bad("control.eps2", "must be positive");
  if (!(kde.bandwidth > 0.0)) bad("kde.bandwidth", "must be positive");
  if (!(kde.density_floor > 0.0 && kde.density_floor < 1.0)) bad("kde.density_floor", "must lie in (0, 1)");
  if (control_period < 1) bad("control_period", "must be at least 1");
  if (snapshot_every < 0) bad("output.snapshot_every", "must be non-negative");
  if (trajectory_every < 0) bad("output.trajectory_every", "must be non-negative");
  if (!(compare_every > 0.0)) bad("compare.sample_every", "must be positive");
  if (!(heterogeneity.spread >= 0.0 && heterogeneity.spread < 1.0)) bad("heterogeneity.spread", "must lie in [0, 1)");
  if (!(robot.spread >= 0.0 && robot.spread < 1.0)) bad("robot.spread", "must lie in [0, 1)");
  if (!(robot.d != 0.0)) bad("robot.offset", "must be nonzero");
  if (!(robot.M.determinant() > 0.0) || robot.M(0, 1) != robot.M(1, 0)) bad("robot.inertia", "must be symmetric with det > 0");
  try {
    (void)DiffusionMatrix::from_sigma(sigma);
  } catch (const InvalidArgument& e) {
    bad("diffusion", e.what());
  }
  ScalarField p_star;
  try {
    p_star = target.evaluate(grid());
  } catch (const ConfigError& e) {
    bad("target", e.what());
  }
  if (!(p_star.min() > 0.0)) bad("target", "must be positive everywhere; raise target.floor");
  if (initial.kind == InitialKind::mixture) {
    try {
      (void)initial.mixture.evaluate(grid());
    } catch (const ConfigError& e) {
      bad("initial", e.what());
    }
  }
}

long ScenarioConfig::steps() const { return static_cast<long>(std::floor(t_end / dt + 1e-9)); }

ControlParams ScenarioConfig::control_params(const Grid& g) const {
  ControlParams p;
  p.alpha = alpha;
  p.k = k;
  p.eps1 = eps1;
  p.eps2 = eps2;
  p.p_star = target.evaluate(g);
  p.validate();
  return p;
}

}  // namespace swarmdc
