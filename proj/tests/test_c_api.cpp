#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmdc/swarmdc.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"(model: integrator
agents: 100
dt: 0.02
t_end: 0.4
seed: 5
grid: {nx: 16, ny: 16}
oracle_grid: {nx: 24, ny: 24}
kde: {bandwidth: 0.06}
control: {alpha: 0.003, k: 0.008, eps1: 2, eps2: 2}
diffusion: {sigma0: 0.0001}
target:
  floor: 0.2
  components:
    - {weight: 1, mean: [0.4, 0.6], cov: 0.03}
output: {snapshot_every: 10}
)";

struct Config {
  sdc_config* ptr = nullptr;
  Config() { REQUIRE(sdc_config_parse(kConfig, &ptr) == SDC_OK); }
  ~Config() { sdc_config_free(ptr); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(sdc_version()) == "0.1.0");
  CHECK(std::string(sdc_status_name(SDC_CFL_VIOLATION)) == "CFL violation");
}

TEST_CASE("config handle") {
  Config c;
  int64_t n = 0;
  CHECK(sdc_config_get_int(c.ptr, "agents", &n) == SDC_OK);
  CHECK(n == 100);
  CHECK(sdc_config_get_int(c.ptr, "steps", &n) == SDC_OK);
  CHECK(n == 20);
  double dt = 0.0;
  CHECK(sdc_config_get_double(c.ptr, "dt", &dt) == SDC_OK);
  CHECK(dt == 0.02);
  CHECK(sdc_config_set_seed(c.ptr, 99) == SDC_OK);
  CHECK(sdc_config_get_int(c.ptr, "seed", &n) == SDC_OK);
  CHECK(n == 99);
  CHECK(sdc_config_get_int(c.ptr, "nope", &n) == SDC_INVALID_ARGUMENT);
  CHECK(std::string(sdc_last_error()).find("nope") != std::string::npos);
}

TEST_CASE("errors come back as status codes") {
  sdc_config* cfg = nullptr;
  CHECK(sdc_config_parse("model: integrator\nbogus: 1\n", &cfg) == SDC_CONFIG_ERROR);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(sdc_last_error()) > 0);
  CHECK(sdc_config_load("/nonexistent/x.cfg", &cfg) == SDC_IO_ERROR);
  CHECK(sdc_config_load(nullptr, &cfg) == SDC_INVALID_ARGUMENT);
  sdc_config_free(nullptr);
  sdc_series_free(nullptr);
  sdc_grid_free(nullptr);
  CHECK(sdc_series_rows(nullptr) == 0);
}

TEST_CASE("simulate, read back snapshots") {
  Config c;
  const fs::path out = fs::temp_directory_path() / "swarmdc_c_api_run";
  fs::remove_all(out);
  CHECK(sdc_config_set_output_dir(c.ptr, out.c_str()) == SDC_OK);
  sdc_series* s = nullptr;
  REQUIRE(sdc_simulate(c.ptr, &s) == SDC_OK);
  CHECK(sdc_series_rows(s) == 21);
  CHECK(sdc_series_cols(s) == 7);
  CHECK(std::string(sdc_series_column_name(s, 2)) == "l2_err");
  CHECK(sdc_series_column_name(s, 7) == nullptr);
  const double* d = sdc_series_data(s);
  CHECK(d[20 * 7] == doctest::Approx(0.4));
  sdc_series_free(s);

  sdc_grid* g = nullptr;
  REQUIRE(sdc_grid_read((out / "density_20.grid").c_str(), &g) == SDC_OK);
  int nx = 0, ny = 0;
  double t = 0.0;
  CHECK(sdc_grid_shape(g, &nx, &ny, &t) == SDC_OK);
  CHECK(nx == 16);
  CHECK(ny == 16);
  CHECK(t == doctest::Approx(0.4));
  double mass = 0.0;
  for (int k = 0; k < nx * ny; ++k) mass += sdc_grid_values(g)[k] / (nx * ny);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  sdc_grid_free(g);
  CHECK(sdc_grid_read((out / "missing.grid").c_str(), &g) == SDC_IO_ERROR);
  fs::remove_all(out);
}

TEST_CASE("fpk and compare runs") {
  Config c;
  sdc_series* s = nullptr;
  REQUIRE(sdc_fpk(c.ptr, &s) == SDC_OK);
  CHECK(sdc_series_cols(s) == 3);
  CHECK(sdc_series_rows(s) == 21);
  sdc_series_free(s);

  const fs::path out = fs::temp_directory_path() / "swarmdc_c_api_cmp";
  fs::remove_all(out);
  sdc_config_set_output_dir(c.ptr, out.c_str());
  REQUIRE(sdc_compare(c.ptr, &s) == SDC_OK);
  CHECK(sdc_series_cols(s) == 4);
  CHECK(fs::exists(out / "compare.csv"));
  sdc_series_free(s);
  fs::remove_all(out);
}

TEST_CASE("stateless kernels") {
  const int n = 8;
  std::vector<double> p(n * n, 1.0), v1(n * n, 0.0), v2(n * n, 0.0), out(n * n, 0.0);
  CHECK(sdc_fpk_step(n, n, p.data(), v1.data(), v2.data(), 1e-3, 0.0, 1e-3, 0.01, out.data(), nullptr) == SDC_OK);
  CHECK(out == p);

  std::fill(v1.begin(), v1.end(), 100.0);
  double max_dt = 0.0;
  CHECK(sdc_fpk_step(n, n, p.data(), v1.data(), v2.data(), 0.0, 0.0, 0.0, 0.01, out.data(), &max_dt) ==
        SDC_CFL_VIOLATION);
  CHECK(max_dt == doctest::Approx(0.5 / (100.0 * n)));

  const std::vector<double> xy{0.5, 0.5, 0.2, 0.8};
  CHECK(sdc_kde_estimate(xy.data(), 2, n, n, 0.05, 1e-3, out.data()) == SDC_OK);
  double mass = 0.0;
  for (double x : out) mass += x / (n * n);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sdc_kde_estimate(xy.data(), 0, n, n, 0.05, 1e-3, out.data()) == SDC_INVALID_ARGUMENT);

  const fs::path path = fs::temp_directory_path() / "swarmdc_c_api.grid";
  CHECK(sdc_grid_write(path.c_str(), n, n, out.data(), 2.5) == SDC_OK);
  sdc_grid* g = nullptr;
  REQUIRE(sdc_grid_read(path.c_str(), &g) == SDC_OK);
  CHECK(std::equal(out.begin(), out.end(), sdc_grid_values(g)));
  sdc_grid_free(g);
  fs::remove(path);
}

namespace {
void count(const char*, int passed, const char*, void* user) {
  auto* c = static_cast<std::pair<int, int>*>(user);
  ++c->first;
  if (passed) ++c->second;
}
}  // namespace

TEST_CASE("self-checks through the callback") {
  std::pair<int, int> seen{0, 0};
  int failures = -1;
  CHECK(sdc_verify(count, &seen, &failures) == SDC_OK);
  CHECK(failures == 0);
  CHECK(seen.first == seen.second);
  CHECK(seen.first >= 8);
}
