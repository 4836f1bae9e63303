#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "swarmdc/fields.hpp"

namespace swarmdc {

/// Density snapshot text format:
///   # t=<float> nx=<int> ny=<int>
///   ny lines of nx space-separated values; line j holds the row x2 = (j+0.5)dy.
struct GridSnapshot {
  double t = 0.0;
  ScalarField field;
};

void write_grid(std::ostream& os, const ScalarField& f, double t);
GridSnapshot read_grid(std::istream& is);

/// Writes to "<path>.tmp" and renames, so readers never see a partial file.
void write_grid_file(const std::filesystem::path& path, const ScalarField& f, double t);
GridSnapshot read_grid_file(const std::filesystem::path& path);

/// Atomic whole-file write used for every artifact the runner emits.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trippable decimal form.
std::string format_double(double v);

}  // namespace swarmdc
