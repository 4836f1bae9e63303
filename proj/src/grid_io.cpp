#include "swarmdc/grid_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "swarmdc/error.hpp"

namespace swarmdc {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_grid(std::ostream& os, const ScalarField& f, double t) {
  const Grid& g = f.grid();
  os << "# t=" << format_double(t) << " nx=" << g.nx() << " ny=" << g.ny() << '\n';
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) os << ' ';
      os << format_double(f(i, j));
    }
    os << '\n';
  }
}

GridSnapshot read_grid(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw IoError("grid file is empty");
  double t = 0.0;
  int nx = 0, ny = 0;
  {
    std::istringstream hs(header);
    std::string hash, tt, nxs, nys;
    hs >> hash >> tt >> nxs >> nys;
    if (hash != "#" || tt.rfind("t=", 0) != 0 || nxs.rfind("nx=", 0) != 0 || nys.rfind("ny=", 0) != 0) {
      throw IoError("line 1: malformed grid header '" + header + "'");
    }
    try {
      t = std::stod(tt.substr(2));
      nx = std::stoi(nxs.substr(3));
      ny = std::stoi(nys.substr(3));
    } catch (const std::exception&) {
      throw IoError("line 1: malformed grid header '" + header + "'");
    }
  }
  Grid grid(nx, ny);
  ScalarField f(grid);
  std::string line;
  for (int j = 0; j < ny; ++j) {
    const std::string where = "line " + std::to_string(j + 2);
    if (!std::getline(is, line)) throw IoError(where + ": missing grid row");
    const char* p = line.data();
    const char* end = p + line.size();
    for (int i = 0; i < nx; ++i) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw IoError(where + ": expected " + std::to_string(nx) + " values");
      f(i, j) = v;
      p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p != end) throw IoError(where + ": trailing data after " + std::to_string(nx) + " values");
  }
  return {t, std::move(f)};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_grid_file(const std::filesystem::path& path, const ScalarField& f, double t) {
  std::ostringstream os;
  write_grid(os, f, t);
  write_file_atomic(path, os.str());
}

GridSnapshot read_grid_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return read_grid(is);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace swarmdc
