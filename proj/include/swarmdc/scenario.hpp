#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swarmdc/agents.hpp"
#include "swarmdc/controller.hpp"
#include "swarmdc/fields.hpp"
#include "swarmdc/kde.hpp"

namespace swarmdc {

enum class AgentModel { integrator, robot };

/// How the sampled input is held over a step: `exact` integrates the linear
/// velocity-error damping in closed form, `euler` applies u literally.
enum class InputHold { exact, euler };

struct GaussianComponent {
  double weight = 1.0;
  Vec2 mean = {0.5, 0.5};
  Mat2 cov = 0.01 * Mat2::Identity();
};

/// Gaussian mixture evaluated at cell centres, floored, then normalized to unit mass.
struct MixtureSpec {
  std::vector<GaussianComponent> components;
  double floor = 0.0;

  /// Throws ConfigError when the mixture cannot be normalized.
  ScalarField evaluate(const Grid& grid) const;
};

enum class InitialKind { uniform, mixture, target };

struct InitialSpec {
  InitialKind kind = InitialKind::uniform;
  MixtureSpec mixture;
  bool feedback_velocity = false;  // start with v = v_d(x) instead of v = 0
};

struct HeterogeneitySpec {
  Mat2 g2_base = Mat2::Zero();
  double spread = 0.0;  // g2_i = (1 + eta_i) g2_base, eta_i ~ U[-spread, spread]
};

struct RobotSpec {
  double d = 0.05;
  Mat2 M = Mat2::Identity();
  Mat2 V_m = Mat2::Zero();
  Vec2 F = Vec2::Zero();
  double spread = 0.0;  // relative spread applied to M, V_m and F per robot
};

enum class VelocityFieldKind { zero, swirl, uniform };

/// Prescribed velocity for the agent/PDE consistency runs.
struct VelocityFieldSpec {
  VelocityFieldKind kind = VelocityFieldKind::zero;
  double amplitude = 0.0;
  Vec2 drift = Vec2::Zero();

  Vec2 at(const Vec2& x) const;
  VectorField sample(const Grid& grid) const;
};

struct ScenarioConfig {
  AgentModel model = AgentModel::integrator;
  long agents = 600;
  double dt = 0.02;
  double t_end = 60.0;
  std::uint64_t seed = 1;
  int nx = 30, ny = 30;
  int oracle_nx = 64, oracle_ny = 64;
  double alpha = 0.003, k = 0.008, eps1 = 2.0, eps2 = 2.0;
  KdeConfig kde;
  Mat2 sigma = Mat2::Zero();
  HeterogeneitySpec heterogeneity;
  RobotSpec robot;
  MixtureSpec target;
  InitialSpec initial;
  int control_period = 1;
  InputHold input_hold = InputHold::exact;
  std::string output_dir;
  int snapshot_every = 0;    // steps; 0 disables density snapshots
  int trajectory_every = 0;  // steps; 0 disables the trajectory dump
  VelocityFieldSpec compare_velocity;
  double compare_every = 1.0;  // seconds between consistency samples

  void validate() const;
  long steps() const;
  Grid grid() const { return Grid(nx, ny); }
  Grid oracle_grid() const { return Grid(oracle_nx, oracle_ny); }
  DiffusionMatrix diffusion() const { return DiffusionMatrix::from_sigma(sigma); }
  ControlParams control_params(const Grid& grid) const;
};

/// Reads a YAML scenario file. Unknown keys, missing required keys and invalid values
/// raise ConfigError naming the offending key.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_string(const std::string& text);

struct MetricsRecord {
  double t = 0.0;
  double mass_err = 0.0;
  double l2_err = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double max_speed = 0.0;
  double max_u = 0.0;
};

inline constexpr const char* kMetricsHeader = "t,mass_err,l2_err,V1,V2,max_speed,max_u";

std::string metrics_csv(const std::vector<MetricsRecord>& rows);

/// Closed-loop swarm: density estimate, control fields, per-agent inputs, stepping.
class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg);

  /// Estimates the density, refreshes the control fields when due, computes every
  /// agent's input and returns the metrics of the current state.
  MetricsRecord observe();
  /// Moves every agent one step with the inputs of the last observe().
  void advance();

  long step() const noexcept { return step_; }
  double time() const noexcept { return step_ * cfg_.dt; }
  const ScenarioConfig& config() const noexcept { return cfg_; }
  const Grid& grid() const noexcept { return grid_; }
  const ScalarField& density() const noexcept { return density_; }
  const ScalarField& target() const noexcept { return params_.p_star; }
  std::vector<Vec2> positions() const;
  std::vector<Vec2> velocities() const;  // integrator: v; robot: wheel velocities
  std::vector<double> headings() const;  // empty for integrators
  const std::vector<Vec2>& inputs() const noexcept { return inputs_; }

 private:
  void initialize();

  ScenarioConfig cfg_;
  Grid grid_;
  DiffusionMatrix D_;
  ControlParams params_;
  std::vector<AgentState> agents_;
  std::vector<RobotState> robots_;
  ScalarField density_;
  std::optional<VectorField> v_d_prev_;
  ControlFields fields_;
  bool have_fields_ = false;
  std::vector<Vec2> inputs_;
  long step_ = 0;
};

struct ScenarioResult {
  std::vector<MetricsRecord> metrics;
  std::vector<std::filesystem::path> files;
};

/// Runs the closed loop from t = 0 to t_end, one metrics row per step (including t = 0).
/// With an output directory it writes metrics.csv, target.grid, density_<step>.grid and
/// optionally trajectory.csv. Aborts with NumericError on runaway speed or non-finite
/// metrics.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct CompareRecord {
  double t = 0.0;
  double l1 = 0.0;
  double mass_agents = 0.0;
  double mass_fpk = 0.0;
};

/// Uncontrolled agents moving with the prescribed field versus the FPK solution from
/// the same initial density, on the oracle grid.
std::vector<CompareRecord> compare_mc_fpk(const ScenarioConfig& cfg, const VelocityFieldSpec& field);

struct FpkScenarioResult {
  std::vector<double> times;
  std::vector<double> mass_err;
  std::vector<double> l2_err;
  std::vector<std::filesystem::path> files;
};

/// Closed-loop density PDE (v = v_d of the PDE's own density) on the oracle grid.
FpkScenarioResult run_fpk_scenario(const ScenarioConfig& cfg);

/// Samples n positions from a cell-wise constant density on its grid.
std::vector<Vec2> sample_positions(const ScalarField& density, long n, std::uint64_t seed);

}  // namespace swarmdc
