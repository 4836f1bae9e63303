#include "swarmdc/swarmdc.h"

#include <filesystem>
#include <algorithm>
#include <memory>
#include <new>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "swarmdc/error.hpp"
#include "swarmdc/fpk.hpp"
#include "swarmdc/grid_io.hpp"
#include "swarmdc/kde.hpp"
#include "swarmdc/scenario.hpp"
#include "swarmdc/verify.hpp"

struct sdc_config {
  swarmdc::ScenarioConfig cfg;
};

struct sdc_series {
  std::vector<std::string> columns;
  std::vector<double> data;
  std::size_t rows = 0;
};

struct sdc_grid {
  swarmdc::GridSnapshot snap;
};

namespace {

thread_local std::string g_last_error;

sdc_status fail(sdc_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
sdc_status guarded(Fn&& fn) {
  try {
    fn();
    return SDC_OK;
  } catch (const swarmdc::CflViolation& e) {
    return fail(SDC_CFL_VIOLATION, e.what());
  } catch (const swarmdc::ConfigError& e) {
    return fail(SDC_CONFIG_ERROR, e.what());
  } catch (const swarmdc::IoError& e) {
    return fail(SDC_IO_ERROR, e.what());
  } catch (const swarmdc::NumericError& e) {
    return fail(SDC_NUMERIC_ERROR, e.what());
  } catch (const swarmdc::InvalidArgument& e) {
    return fail(SDC_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SDC_IO_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SDC_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(SDC_INTERNAL_ERROR, e.what());
  }
}

#define SDC_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SDC_INVALID_ARGUMENT, msg)

void write_series_csv(const sdc_series& s, const std::filesystem::path& path) {
  std::ostringstream os;
  for (std::size_t c = 0; c < s.columns.size(); ++c) os << (c ? "," : "") << s.columns[c];
  os << '\n';
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      os << (c ? "," : "") << swarmdc::format_double(s.data[r * s.columns.size() + c]);
    }
    os << '\n';
  }
  swarmdc::write_file_atomic(path, os.str());
}

}  // namespace

extern "C" {

const char* sdc_version(void) { return "0.1.0"; }

const char* sdc_last_error(void) { return g_last_error.c_str(); }

const char* sdc_status_name(sdc_status status) {
  switch (status) {
    case SDC_OK: return "ok";
    case SDC_INVALID_ARGUMENT: return "invalid argument";
    case SDC_CONFIG_ERROR: return "config error";
    case SDC_IO_ERROR: return "I/O error";
    case SDC_NUMERIC_ERROR: return "numeric error";
    case SDC_CFL_VIOLATION: return "CFL violation";
    case SDC_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

sdc_status sdc_config_load(const char* path, sdc_config** out) {
  SDC_REQUIRE(path && out, "sdc_config_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new sdc_config{swarmdc::parse_config(path)}; });
}

sdc_status sdc_config_parse(const char* text, sdc_config** out) {
  SDC_REQUIRE(text && out, "sdc_config_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = new sdc_config{swarmdc::parse_config_string(text)}; });
}

void sdc_config_free(sdc_config* cfg) { delete cfg; }

sdc_status sdc_config_set_seed(sdc_config* cfg, uint64_t seed) {
  SDC_REQUIRE(cfg, "sdc_config_set_seed: null config");
  cfg->cfg.seed = seed;
  return SDC_OK;
}

sdc_status sdc_config_set_output_dir(sdc_config* cfg, const char* dir) {
  SDC_REQUIRE(cfg && dir, "sdc_config_set_output_dir: null argument");
  cfg->cfg.output_dir = dir;
  return SDC_OK;
}

sdc_status sdc_config_get_int(const sdc_config* cfg, const char* key, int64_t* out) {
  SDC_REQUIRE(cfg && key && out, "sdc_config_get_int: null argument");
  const auto& c = cfg->cfg;
  const std::string k = key;
  if (k == "agents") *out = c.agents;
  else if (k == "nx") *out = c.nx;
  else if (k == "ny") *out = c.ny;
  else if (k == "oracle_nx") *out = c.oracle_nx;
  else if (k == "oracle_ny") *out = c.oracle_ny;
  else if (k == "steps") *out = c.steps();
  else if (k == "seed") *out = static_cast<int64_t>(c.seed);
  else return fail(SDC_INVALID_ARGUMENT, "unknown integer key '" + k + "'");
  return SDC_OK;
}

sdc_status sdc_config_get_double(const sdc_config* cfg, const char* key, double* out) {
  SDC_REQUIRE(cfg && key && out, "sdc_config_get_double: null argument");
  const auto& c = cfg->cfg;
  const std::string k = key;
  if (k == "dt") *out = c.dt;
  else if (k == "t_end") *out = c.t_end;
  else if (k == "alpha") *out = c.alpha;
  else if (k == "k") *out = c.k;
  else if (k == "eps1") *out = c.eps1;
  else if (k == "eps2") *out = c.eps2;
  else if (k == "bandwidth") *out = c.kde.bandwidth;
  else if (k == "density_floor") *out = c.kde.density_floor;
  else return fail(SDC_INVALID_ARGUMENT, "unknown real key '" + k + "'");
  return SDC_OK;
}

sdc_status sdc_simulate(const sdc_config* cfg, sdc_series** metrics) {
  SDC_REQUIRE(cfg && metrics, "sdc_simulate: null argument");
  *metrics = nullptr;
  return guarded([&] {
    const auto res = swarmdc::run_scenario(cfg->cfg);
    auto s = std::make_unique<sdc_series>();
    s->columns = {"t", "mass_err", "l2_err", "V1", "V2", "max_speed", "max_u"};
    for (const auto& r : res.metrics) {
      s->data.insert(s->data.end(), {r.t, r.mass_err, r.l2_err, r.V1, r.V2, r.max_speed, r.max_u});
    }
    s->rows = res.metrics.size();
    *metrics = s.release();
  });
}

sdc_status sdc_fpk(const sdc_config* cfg, sdc_series** metrics) {
  SDC_REQUIRE(cfg && metrics, "sdc_fpk: null argument");
  *metrics = nullptr;
  return guarded([&] {
    const auto res = swarmdc::run_fpk_scenario(cfg->cfg);
    auto s = std::make_unique<sdc_series>();
    s->columns = {"t", "mass_err", "l2_err"};
    for (std::size_t n = 0; n < res.times.size(); ++n) {
      s->data.insert(s->data.end(), {res.times[n], res.mass_err[n], res.l2_err[n]});
    }
    s->rows = res.times.size();
    *metrics = s.release();
  });
}

sdc_status sdc_compare(const sdc_config* cfg, sdc_series** distances) {
  SDC_REQUIRE(cfg && distances, "sdc_compare: null argument");
  *distances = nullptr;
  return guarded([&] {
    const auto res = swarmdc::compare_mc_fpk(cfg->cfg, cfg->cfg.compare_velocity);
    auto s = std::make_unique<sdc_series>();
    s->columns = {"t", "l1", "mass_agents", "mass_fpk"};
    for (const auto& r : res) s->data.insert(s->data.end(), {r.t, r.l1, r.mass_agents, r.mass_fpk});
    s->rows = res.size();
    if (!cfg->cfg.output_dir.empty()) {
      std::filesystem::create_directories(cfg->cfg.output_dir);
      write_series_csv(*s, std::filesystem::path(cfg->cfg.output_dir) / "compare.csv");
    }
    *distances = s.release();
  });
}

size_t sdc_series_rows(const sdc_series* s) { return s ? s->rows : 0; }
size_t sdc_series_cols(const sdc_series* s) { return s ? s->columns.size() : 0; }

const char* sdc_series_column_name(const sdc_series* s, size_t col) {
  return (s && col < s->columns.size()) ? s->columns[col].c_str() : nullptr;
}

const double* sdc_series_data(const sdc_series* s) { return s ? s->data.data() : nullptr; }

void sdc_series_free(sdc_series* s) { delete s; }

sdc_status sdc_verify(sdc_check_callback cb, void* user, int* failures) {
  return guarded([&] {
    int bad = 0;
    swarmdc::run_verification([&](const swarmdc::CheckResult& r) {
      if (!r.passed) ++bad;
      if (cb) cb(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    });
    if (failures) *failures = bad;
  });
}

sdc_status sdc_grid_read(const char* path, sdc_grid** out) {
  SDC_REQUIRE(path && out, "sdc_grid_read: null argument");
  *out = nullptr;
  return guarded([&] { *out = new sdc_grid{swarmdc::read_grid_file(path)}; });
}

sdc_status sdc_grid_shape(const sdc_grid* g, int* nx, int* ny, double* t) {
  SDC_REQUIRE(g, "sdc_grid_shape: null grid");
  if (nx) *nx = g->snap.field.grid().nx();
  if (ny) *ny = g->snap.field.grid().ny();
  if (t) *t = g->snap.t;
  return SDC_OK;
}

const double* sdc_grid_values(const sdc_grid* g) { return g ? g->snap.field.values().data() : nullptr; }

sdc_status sdc_grid_write(const char* path, int nx, int ny, const double* values, double t) {
  SDC_REQUIRE(path && values, "sdc_grid_write: null argument");
  return guarded([&] {
    const swarmdc::Grid grid(nx, ny);
    swarmdc::write_grid_file(path, swarmdc::ScalarField(grid, std::vector<double>(values, values + grid.size())), t);
  });
}

void sdc_grid_free(sdc_grid* g) { delete g; }

sdc_status sdc_fpk_step(int nx, int ny, const double* p, const double* v1, const double* v2, double sigma11,
                        double sigma12, double sigma22, double dt, double* p_out, double* max_dt) {
  SDC_REQUIRE(p && v1 && v2 && p_out, "sdc_fpk_step: null array");
  return guarded([&] {
    const swarmdc::Grid grid(nx, ny);
    const std::size_t n = grid.size();
    swarmdc::Mat2 sigma;
    sigma << sigma11, sigma12, sigma12, sigma22;
    const auto D = swarmdc::DiffusionMatrix::from_sigma(sigma);
    const swarmdc::VectorField v(swarmdc::ScalarField(grid, std::vector<double>(v1, v1 + n)),
                                 swarmdc::ScalarField(grid, std::vector<double>(v2, v2 + n)));
    try {
      const auto next = swarmdc::fpk_step({swarmdc::ScalarField(grid, std::vector<double>(p, p + n)), 0.0}, v, D, dt);
      std::copy(next.p.values().begin(), next.p.values().end(), p_out);
    } catch (const swarmdc::CflViolation& e) {
      if (max_dt) *max_dt = e.max_dt();
      throw;
    }
  });
}

sdc_status sdc_kde_estimate(const double* positions, size_t n, int nx, int ny, double bandwidth,
                            double density_floor, double* out) {
  SDC_REQUIRE(positions && out, "sdc_kde_estimate: null array");
  return guarded([&] {
    std::vector<swarmdc::Vec2> x(n);
    for (std::size_t a = 0; a < n; ++a) x[a] = {positions[2 * a], positions[2 * a + 1]};
    swarmdc::KdeConfig cfg;
    cfg.bandwidth = bandwidth;
    cfg.density_floor = density_floor;
    const auto p = swarmdc::kde_estimate(x, cfg, swarmdc::Grid(nx, ny));
    std::copy(p.values().begin(), p.values().end(), out);
  });
}

}  // extern "C"
