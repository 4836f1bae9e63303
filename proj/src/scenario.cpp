#include "swarmdc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swarmdc/error.hpp"
#include "swarmdc/field_ops.hpp"
#include "swarmdc/fpk.hpp"
#include "swarmdc/grid_io.hpp"

namespace swarmdc {
namespace fs = std::filesystem;

ScalarField MixtureSpec::evaluate(const Grid& grid) const {
  ScalarField p(grid);
  double total_weight = 0.0;
  for (const auto& c : components) {
    total_weight += c.weight;
    if (c.weight == 0.0) continue;
    const Mat2 inv = c.cov.inverse();
    const double norm = c.weight / (2.0 * std::numbers::pi * std::sqrt(c.cov.determinant()));
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        const Vec2 r = grid.node(i, j) - c.mean;
        p(i, j) += norm * std::exp(-0.5 * r.dot(inv * r));
      }
    }
  }
  const double mass = p.integral();
  if (!(total_weight > 0.0) || !(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("mixture cannot be normalized (weights sum to zero or no mass on the grid)");
  }
  p *= 1.0 / mass;
  for (double& v : p.values()) v = std::max(v, floor);
  p *= 1.0 / p.integral();
  return p;
}

Vec2 VelocityFieldSpec::at(const Vec2& x) const {
  switch (kind) {
    case VelocityFieldKind::zero:
      return Vec2::Zero();
    case VelocityFieldKind::uniform:
      return drift;
    case VelocityFieldKind::swirl: {
      // Divergence-free, tangential at the walls.
      const double pi = std::numbers::pi;
      return {amplitude * std::sin(pi * x.x()) * std::cos(pi * x.y()),
              -amplitude * std::cos(pi * x.x()) * std::sin(pi * x.y())};
    }
  }
  return Vec2::Zero();
}

VectorField VelocityFieldSpec::sample(const Grid& grid) const {
  VectorField v(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const Vec2 w = at(grid.node(i, j));
      v.c1(i, j) = w.x();
      v.c2(i, j) = w.y();
    }
  }
  return v;
}

std::string metrics_csv(const std::vector<MetricsRecord>& rows) {
  std::ostringstream os;
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.mass_err) << ',' << format_double(r.l2_err) << ','
       << format_double(r.V1) << ',' << format_double(r.V2) << ',' << format_double(r.max_speed) << ','
       << format_double(r.max_u) << '\n';
  }
  return os.str();
}

std::vector<Vec2> sample_positions(const ScalarField& density, long n, std::uint64_t seed) {
  const Grid& g = density.grid();
  std::vector<double> cdf(g.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(density[k] >= 0.0)) throw InvalidArgument("cannot sample from a negative density");
    acc += density[k];
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw InvalidArgument("cannot sample from a zero density");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long a = 0; a < n; ++a) {
    RngStream rng(seed, static_cast<std::uint64_t>(a), 0, Purpose::initial_position);
    const auto pick = rng.uniform2();
    const auto within = rng.uniform2();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), pick[0] * acc);
    const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    const int i = static_cast<int>(k % g.nx());
    const int j = static_cast<int>(k / g.nx());
    out.emplace_back((i + within[0]) * g.dx(), (j + within[1]) * g.dy());
  }
  return out;
}

namespace {

std::vector<Vec2> uniform_positions(long n, std::uint64_t seed) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long a = 0; a < n; ++a) {
    RngStream rng(seed, static_cast<std::uint64_t>(a), 0, Purpose::initial_position);
    const auto u = rng.uniform2();
    out.emplace_back(u[0], u[1]);
  }
  return out;
}

std::vector<Vec2> initial_positions(const ScenarioConfig& cfg, const Grid& grid) {
  switch (cfg.initial.kind) {
    case InitialKind::uniform:
      return uniform_positions(cfg.agents, cfg.seed);
    case InitialKind::mixture:
      return sample_positions(cfg.initial.mixture.evaluate(grid), cfg.agents, cfg.seed);
    case InitialKind::target:
      return sample_positions(cfg.target.evaluate(grid), cfg.agents, cfg.seed);
  }
  return {};
}

ScalarField initial_density(const ScenarioConfig& cfg, const Grid& grid) {
  switch (cfg.initial.kind) {
    case InitialKind::uniform:
      return ScalarField(grid, 1.0);
    case InitialKind::mixture:
      return cfg.initial.mixture.evaluate(grid);
    case InitialKind::target:
      return cfg.target.evaluate(grid);
  }
  return ScalarField(grid, 1.0);
}

// d T / d theta.
Mat2 robot_T_dtheta(double theta, double d) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 m;
  m << -s, -d * c, c, -d * s;
  return m;
}

std::string step_name(long step) { return "density_" + std::to_string(step) + ".grid"; }

}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  grid_ = cfg_.grid();
  D_ = cfg_.diffusion();
  params_ = cfg_.control_params(grid_);
  initialize();
}

void Simulation::initialize() {
  const auto pos = initial_positions(cfg_, grid_);
  const auto n = pos.size();
  const double pi = std::numbers::pi;

  std::vector<Mat2> g2(n);
  for (std::size_t a = 0; a < n; ++a) {
    RngStream rng(cfg_.seed, a, 0, Purpose::heterogeneity);
    const auto u = rng.uniform2();
    g2[a] = (1.0 + cfg_.heterogeneity.spread * (2.0 * u[0] - 1.0)) * cfg_.heterogeneity.g2_base;
  }

  std::optional<VectorField> v_d0;
  if (cfg_.initial.feedback_velocity) {
    const ScalarField p = kde_estimate(pos, cfg_.kde, grid_);
    v_d0 = density_feedback(p, params_, D_);
  }

  if (cfg_.model == AgentModel::integrator) {
    agents_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      agents_[a].x = pos[a];
      agents_[a].g2 = g2[a];
      if (v_d0) agents_[a].v = sample_bilinear(*v_d0, pos[a]);
    }
  } else {
    robots_.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      RngStream het(cfg_.seed, a, 1, Purpose::heterogeneity);
      const auto u = het.uniform2();
      const double scale_m = 1.0 + cfg_.robot.spread * (2.0 * u[0] - 1.0);
      const double scale_f = 1.0 + cfg_.robot.spread * (2.0 * u[1] - 1.0);
      RobotParams P;
      P.d = cfg_.robot.d;
      P.M = scale_m * cfg_.robot.M;
      P.V_m = scale_m * cfg_.robot.V_m;
      P.F = scale_f * cfg_.robot.F;
      P.f2 = P.M * g2[a];
      P.f1.topRows<2>() = D_.g1();
      P.validate();
      RobotState& r = robots_[a];
      r.params = P;
      r.x = pos[a];
      r.theta = pi * (2.0 * RngStream(cfg_.seed, a, 0, Purpose::initial_heading).uniform2()[0] - 1.0);
      if (v_d0) r.v = robot_velocity_command(sample_bilinear(*v_d0, pos[a]), r.theta, P.d);
    }
  }
  inputs_.assign(n, Vec2::Zero());
}

std::vector<Vec2> Simulation::positions() const {
  std::vector<Vec2> out;
  if (cfg_.model == AgentModel::integrator) {
    for (const auto& a : agents_) out.push_back(a.x);
  } else {
    for (const auto& r : robots_) out.push_back(r.x);
  }
  return out;
}

std::vector<Vec2> Simulation::velocities() const {
  std::vector<Vec2> out;
  if (cfg_.model == AgentModel::integrator) {
    for (const auto& a : agents_) out.push_back(a.v);
  } else {
    for (const auto& r : robots_) out.push_back(r.v);
  }
  return out;
}

std::vector<double> Simulation::headings() const {
  std::vector<double> out;
  for (const auto& r : robots_) out.push_back(r.theta);
  return out;
}

MetricsRecord Simulation::observe() {
  const auto pos = positions();
  density_ = kde_estimate(pos, cfg_.kde, grid_);

  if (!have_fields_ || step_ % cfg_.control_period == 0) {
    const double period = cfg_.control_period * cfg_.dt;
    VectorField v_d = density_feedback(density_, params_, D_);
    fields_ = build_control_fields(v_d, v_d_prev_, period, D_, density_, params_);
    fields_.t = time();
    v_d_prev_ = std::move(v_d);
    have_fields_ = true;
  }

  const double dt = cfg_.dt;
  auto hold = [&](const InputTerms& terms) {
    return cfg_.input_hold == InputHold::exact ? terms.held_input(dt) : terms.input();
  };

  double max_speed = 0.0, max_u = 0.0, mean_v4 = 0.0;
  const std::size_t n = pos.size();
  for (std::size_t a = 0; a < n; ++a) {
    const ControlSample s = sample_control(fields_, pos[a]);
    Vec2 u, v_err;
    double speed;
    if (cfg_.model == AgentModel::integrator) {
      const AgentState& ag = agents_[a];
      const AgentChannel ch{ag.g2, ag.v - s.v_d};
      u = hold(backstepping_terms(s, ag.v, ch, params_, D_));
      v_err = ch.v_tilde;
      speed = ag.v.norm();
    } else {
      const RobotState& r = robots_[a];
      const double d = r.params.d;
      const Mat2 T = robot_T(r.theta, d);
      const Vec2 ve = T * r.v;
      const AgentChannel ch{T * r.params.g2(), ve - s.v_d};
      const Vec2 ue = hold(backstepping_terms(s, ve, ch, params_, D_));
      u = robot_T_inverse(r.theta, d) * (ue - r.v.y() * robot_T_dtheta(r.theta, d) * r.v);
      v_err = r.v - robot_velocity_command(s.v_d, r.theta, d);
      speed = ve.norm();
    }
    inputs_[a] = u;
    max_speed = std::max(max_speed, speed);
    max_u = std::max(max_u, u.norm());
    const double e2 = v_err.squaredNorm();
    mean_v4 += 0.25 * e2 * e2;
  }
  mean_v4 /= static_cast<double>(n);

  MetricsRecord m;
  m.t = time();
  m.mass_err = std::abs(density_.integral() - 1.0);
  m.l2_err = l2_norm(density_ - params_.p_star);
  m.V1 = 0.5 * m.l2_err * m.l2_err;
  m.V2 = m.V1 + mean_v4;  // |Omega| = 1
  m.max_speed = max_speed;
  m.max_u = max_u;
  for (double v : {m.mass_err, m.l2_err, m.V1, m.V2, m.max_speed, m.max_u}) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite metric at t=" << m.t;
      throw NumericError(os.str());
    }
  }
  if (max_speed * dt > 0.5 * std::min(grid_.dx(), grid_.dy())) {
    std::ostringstream os;
    os << "runaway agent speed " << max_speed << " at t=" << m.t << ": one step crosses more than half a cell ("
       << "speed*dt=" << max_speed * dt << ")";
    throw NumericError(os.str());
  }
  return m;
}

void Simulation::advance() {
  const double dt = cfg_.dt;
  if (cfg_.model == AgentModel::integrator) {
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      RngStream rng(cfg_.seed, a, static_cast<std::uint64_t>(step_), Purpose::wiener);
      agents_[a] = em_step_integrator(agents_[a], inputs_[a], D_, dt, rng);
    }
  } else {
    for (std::size_t a = 0; a < robots_.size(); ++a) {
      RngStream rng(cfg_.seed, a, static_cast<std::uint64_t>(step_), Purpose::wiener);
      const Vec2 tau = feedback_linearize(robots_[a], inputs_[a]);
      robots_[a] = em_step_robot(robots_[a], tau, dt, rng);
    }
  }
  ++step_;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  ScenarioResult result;
  const bool write = !cfg.output_dir.empty();
  const fs::path out = cfg.output_dir;
  if (write) {
    fs::create_directories(out);
    write_grid_file(out / "target.grid", sim.target(), 0.0);
    result.files.push_back(out / "target.grid");
  }
  std::ostringstream traj;
  if (cfg.trajectory_every > 0) {
    traj << "t,id,x1,x2,v1,v2" << (cfg.model == AgentModel::robot ? ",theta" : "") << '\n';
  }

  const long steps = cfg.steps();
  result.metrics.reserve(static_cast<std::size_t>(steps + 1));
  for (long s = 0; s <= steps; ++s) {
    result.metrics.push_back(sim.observe());
    if (write && cfg.snapshot_every > 0 && (s % cfg.snapshot_every == 0 || s == steps)) {
      write_grid_file(out / step_name(s), sim.density(), sim.time());
      result.files.push_back(out / step_name(s));
    }
    if (cfg.trajectory_every > 0 && s % cfg.trajectory_every == 0) {
      const auto x = sim.positions();
      const auto v = sim.velocities();
      const auto th = sim.headings();
      for (std::size_t a = 0; a < x.size(); ++a) {
        traj << format_double(sim.time()) << ',' << a << ',' << format_double(x[a].x()) << ','
             << format_double(x[a].y()) << ',' << format_double(v[a].x()) << ',' << format_double(v[a].y());
        if (!th.empty()) traj << ',' << format_double(th[a]);
        traj << '\n';
      }
    }
    if (s < steps) sim.advance();
  }

  if (write) {
    write_file_atomic(out / "metrics.csv", metrics_csv(result.metrics));
    result.files.push_back(out / "metrics.csv");
    if (cfg.trajectory_every > 0) {
      write_file_atomic(out / "trajectory.csv", traj.str());
      result.files.push_back(out / "trajectory.csv");
    }
  }
  return result;
}

std::vector<CompareRecord> compare_mc_fpk(const ScenarioConfig& cfg, const VelocityFieldSpec& field) {
  cfg.validate();
  const Grid og = cfg.oracle_grid();
  const DiffusionMatrix D = cfg.diffusion();
  const ScalarField p0 = initial_density(cfg, og);
  const std::vector<Vec2> start = cfg.initial.kind == InitialKind::uniform
                                      ? uniform_positions(cfg.agents, cfg.seed)
                                      : sample_positions(p0, cfg.agents, cfg.seed);
  std::vector<AgentState> agents(start.size());
  for (std::size_t a = 0; a < start.size(); ++a) agents[a].x = start[a];

  const VectorField v_grid = field.sample(og);
  FpkState pde{p0, 0.0};
  const long steps = cfg.steps();
  const long every = std::max(1L, std::lround(cfg.compare_every / cfg.dt));

  std::vector<CompareRecord> out;
  auto sample = [&](long s) {
    std::vector<Vec2> x(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a) x[a] = agents[a].x;
    const ScalarField est = kde_estimate(x, cfg.kde, og);
    out.push_back({s * cfg.dt, l1_norm(est - pde.p), est.integral(), pde.p.integral()});
  };
  sample(0);
  for (long s = 0; s < steps; ++s) {
    for (std::size_t a = 0; a < agents.size(); ++a) {
      RngStream rng(cfg.seed, a, static_cast<std::uint64_t>(s), Purpose::wiener);
      agents[a].v = field.at(agents[a].x);
      agents[a] = em_step_integrator(agents[a], Vec2::Zero(), D, cfg.dt, rng);
    }
    pde = fpk_step(pde, v_grid, D, cfg.dt);
    if ((s + 1) % every == 0 || s + 1 == steps) sample(s + 1);
  }
  return out;
}

FpkScenarioResult run_fpk_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const Grid og = cfg.oracle_grid();
  const DiffusionMatrix D = cfg.diffusion();
  const ControlParams params = cfg.control_params(og);
  const double floor = cfg.kde.density_floor;
  auto closed_loop = [&](double, const ScalarField& p) {
    ScalarField q = p;
    for (double& v : q.values()) v = std::max(v, floor);
    return density_feedback(q, params, D);
  };
  FpkRunOptions opt;
  opt.target = params.p_star;
  opt.record_every = cfg.snapshot_every;
  const FpkTrajectory traj = run_fpk(initial_density(cfg, og), closed_loop, D, cfg.dt, cfg.t_end, opt);

  FpkScenarioResult res;
  res.times = traj.times;
  res.l2_err = traj.l2_error;
  for (double m : traj.mass) res.mass_err.push_back(std::abs(m - 1.0));
  if (!cfg.output_dir.empty()) {
    const fs::path out = cfg.output_dir;
    fs::create_directories(out);
    write_grid_file(out / "target.grid", params.p_star, 0.0);
    res.files.push_back(out / "target.grid");
    if (cfg.snapshot_every > 0) {
      for (const auto& st : traj.states) {
        const long s = std::lround(st.t / cfg.dt);
        write_grid_file(out / step_name(s), st.p, st.t);
        res.files.push_back(out / step_name(s));
      }
    }
    std::ostringstream os;
    os << "t,mass_err,l2_err\n";
    for (std::size_t n = 0; n < res.times.size(); ++n) {
      os << format_double(res.times[n]) << ',' << format_double(res.mass_err[n]) << ','
         << format_double(res.l2_err[n]) << '\n';
    }
    write_file_atomic(out / "fpk_metrics.csv", os.str());
    res.files.push_back(out / "fpk_metrics.csv");
  }
  return res;
}

}  // namespace swarmdc
