// Binary field snapshots.
//
// Layout, all little-endian:
//   "HYSNAP01"
//   u64 nx, ny, nz
//   f64 dx, dy, dz, dt, time
//   u64 nfields
//   per field: u64 name_len, name bytes, u64 shape[3], f64 data[count]
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hysmax/yee_grid.hpp"

namespace hysmax {

struct Snapshot {
  std::size_t nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0, dt = 0.0, time = 0.0;
  std::vector<std::pair<std::string, Array3>> fields;

  static Snapshot from_grid(const GridSpec& g, double dt, double time);
  void add(std::string name, const Array3& a) { fields.emplace_back(std::move(name), a); }
  const Array3& at(const std::string& name) const;

  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;
  static Snapshot read(std::istream& in);
  static Snapshot read(const std::filesystem::path& path);
};

}  // namespace hysmax
