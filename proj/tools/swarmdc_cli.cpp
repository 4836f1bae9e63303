// Command-line front end; talks to the library only through the C interface.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "swarmdc/swarmdc.h"

namespace {

int report(sdc_status st) {
  std::fprintf(stderr, "error (%s): %s\n", sdc_status_name(st), sdc_last_error());
  return st == SDC_CONFIG_ERROR || st == SDC_INVALID_ARGUMENT ? 2 : 1;
}

struct ConfigHandle {
  sdc_config* ptr = nullptr;
  ~ConfigHandle() { sdc_config_free(ptr); }
};

struct SeriesHandle {
  sdc_series* ptr = nullptr;
  ~SeriesHandle() { sdc_series_free(ptr); }
};

using RunFn = sdc_status (*)(const sdc_config*, sdc_series**);

int run(RunFn fn, const char* label, const std::string& config, const std::string& out,
        std::optional<std::uint64_t> seed) {
  ConfigHandle cfg;
  if (auto st = sdc_config_load(config.c_str(), &cfg.ptr); st != SDC_OK) return report(st);
  if (seed) sdc_config_set_seed(cfg.ptr, *seed);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s: %s\n", out.c_str(), ec.message().c_str());
    return 1;
  }
  sdc_config_set_output_dir(cfg.ptr, out.c_str());

  SeriesHandle series;
  if (auto st = fn(cfg.ptr, &series.ptr); st != SDC_OK) return report(st);

  const std::size_t rows = sdc_series_rows(series.ptr), cols = sdc_series_cols(series.ptr);
  if (rows > 0) {
    const double* last = sdc_series_data(series.ptr) + (rows - 1) * cols;
    std::printf("%s: %zu rows written to %s; final", label, rows, out.c_str());
    for (std::size_t c = 0; c < cols; ++c) std::printf(" %s=%.6g", sdc_series_column_name(series.ptr, c), last[c]);
    std::printf("\n");
  }
  return 0;
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%s %s: %s\n", passed ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density control of large swarms"};
  app.set_version_flag("--version", std::string(sdc_version()));
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Run the closed-loop agent simulation");
  sim->add_option("--config", config, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--seed", seed, "Override the scenario seed");

  auto* fpk = app.add_subcommand("fpk", "Run the closed-loop density PDE");
  fpk->add_option("--config", config, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  fpk->add_option("--out", out, "Output directory")->required();

  auto* cmp = app.add_subcommand("compare", "Compare agent histograms with the FPK solution");
  cmp->add_option("--config", config, "Scenario YAML file")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", out, "Output directory")->required();

  auto* ver = app.add_subcommand("verify", "Run the invariant self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help and --version exit 0
  }

  if (*sim) return run(sdc_simulate, "simulate", config, out, seed);
  if (*fpk) return run(sdc_fpk, "fpk", config, out, std::nullopt);
  if (*cmp) return run(sdc_compare, "compare", config, out, std::nullopt);
  if (*ver) {
    int failures = 0;
    if (auto st = sdc_verify(print_check, nullptr, &failures); st != SDC_OK) return report(st);
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
  }
  return 1;
}
