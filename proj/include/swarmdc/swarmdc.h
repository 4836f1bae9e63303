/* C interface to the swarm density-control library.
 *
 * Every function that can fail returns an sdc_status; on failure a description is
 * available from sdc_last_error() (thread-local, valid until the next failing call
 * on that thread). Objects are opaque handles released with their *_free function;
 * passing NULL to a *_free function is a no-op. */
#ifndef SWARMDC_H
#define SWARMDC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  ifdef SWARMDC_BUILDING
#    define SWARMDC_API __declspec(dllexport)
#  else
#    define SWARMDC_API __declspec(dllimport)
#  endif
#else
#  define SWARMDC_API __attribute__((visibility("default")))
#endif

typedef enum sdc_status {
  SDC_OK = 0,
  SDC_INVALID_ARGUMENT = 1,
  SDC_CONFIG_ERROR = 2,
  SDC_IO_ERROR = 3,
  SDC_NUMERIC_ERROR = 4,
  SDC_CFL_VIOLATION = 5,
  SDC_INTERNAL_ERROR = 99
} sdc_status;

typedef struct sdc_config sdc_config;
typedef struct sdc_series sdc_series;
typedef struct sdc_grid sdc_grid;

SWARMDC_API const char* sdc_version(void);
SWARMDC_API const char* sdc_last_error(void);
SWARMDC_API const char* sdc_status_name(sdc_status status);

/* Scenario configuration (YAML). */
SWARMDC_API sdc_status sdc_config_load(const char* path, sdc_config** out);
SWARMDC_API sdc_status sdc_config_parse(const char* text, sdc_config** out);
SWARMDC_API void sdc_config_free(sdc_config* cfg);
SWARMDC_API sdc_status sdc_config_set_seed(sdc_config* cfg, uint64_t seed);
SWARMDC_API sdc_status sdc_config_set_output_dir(sdc_config* cfg, const char* dir);
/* Integer keys: "agents", "nx", "ny", "oracle_nx", "oracle_ny", "steps", "seed". */
SWARMDC_API sdc_status sdc_config_get_int(const sdc_config* cfg, const char* key, int64_t* out);
/* Real keys: "dt", "t_end", "alpha", "k", "eps1", "eps2", "bandwidth", "density_floor". */
SWARMDC_API sdc_status sdc_config_get_double(const sdc_config* cfg, const char* key, double* out);

/* Runs. With an output directory set, each run writes its artifacts there:
 *   simulate: metrics.csv, target.grid, density_<step>.grid[, trajectory.csv]
 *   fpk:      fpk_metrics.csv, target.grid, density_<step>.grid
 *   compare:  compare.csv
 * The returned series mirrors the CSV table. */
SWARMDC_API sdc_status sdc_simulate(const sdc_config* cfg, sdc_series** metrics);
SWARMDC_API sdc_status sdc_fpk(const sdc_config* cfg, sdc_series** metrics);
SWARMDC_API sdc_status sdc_compare(const sdc_config* cfg, sdc_series** distances);

/* Row-major table of doubles. */
SWARMDC_API size_t sdc_series_rows(const sdc_series* s);
SWARMDC_API size_t sdc_series_cols(const sdc_series* s);
SWARMDC_API const char* sdc_series_column_name(const sdc_series* s, size_t col);
SWARMDC_API const double* sdc_series_data(const sdc_series* s);
SWARMDC_API void sdc_series_free(sdc_series* s);

/* Invariant self-checks; cb (optional) is called once per check. */
typedef void (*sdc_check_callback)(const char* name, int passed, const char* detail, void* user);
SWARMDC_API sdc_status sdc_verify(sdc_check_callback cb, void* user, int* failures);

/* Density snapshot files. */
SWARMDC_API sdc_status sdc_grid_read(const char* path, sdc_grid** out);
SWARMDC_API sdc_status sdc_grid_shape(const sdc_grid* g, int* nx, int* ny, double* t);
SWARMDC_API const double* sdc_grid_values(const sdc_grid* g);
SWARMDC_API sdc_status sdc_grid_write(const char* path, int nx, int ny, const double* values, double t);
SWARMDC_API void sdc_grid_free(sdc_grid* g);

/* Stateless kernels on caller-owned row-major nx*ny arrays.
 * sdc_fpk_step: one no-flux FPK step; on SDC_CFL_VIOLATION *max_dt (if non-NULL)
 * receives the largest admissible step. */
SWARMDC_API sdc_status sdc_fpk_step(int nx, int ny, const double* p, const double* v1, const double* v2,
                                    double sigma11, double sigma12, double sigma22, double dt,
                                    double* p_out, double* max_dt);
/* sdc_kde_estimate: positions is n interleaved (x1, x2) pairs inside the unit square. */
SWARMDC_API sdc_status sdc_kde_estimate(const double* positions, size_t n, int nx, int ny, double bandwidth,
                                        double density_floor, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SWARMDC_H */
