#include "hysmax/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hysmax {

namespace {

constexpr char kMagic[8] = {'H', 'Y', 'S', 'N', 'A', 'P', '0', '1'};


template <typename T>
void put(std::ostream& out, T v) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("snapshot: truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

}  // namespace

Snapshot Snapshot::from_grid(const GridSpec& g, double dt, double time) {
  Snapshot s;
  s.nx = g.nx;
  s.ny = g.ny;
  s.nz = g.nz;
  s.dx = g.dx();
  s.dy = g.dy();
  s.dz = g.dz();
  s.dt = dt;
  s.time = time;
  return s;
}

const Array3& Snapshot::at(const std::string& name) const {
  for (const auto& [n, a] : fields)
    if (n == name) return a;
  throw std::out_of_range("snapshot has no field " + name);
}

void Snapshot::write(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, nx);
  put<std::uint64_t>(out, ny);
  put<std::uint64_t>(out, nz);
  for (double v : {dx, dy, dz, dt, time}) put(out, v);
  put<std::uint64_t>(out, fields.size());
  for (const auto& [name, a] : fields) {
    put<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint64_t>(out, a.nx());
    put<std::uint64_t>(out, a.ny());
    put<std::uint64_t>(out, a.nz());
    for (double v : a.values()) put(out, v);
  }
  if (!out) throw std::runtime_error("snapshot: write failed");
}

void Snapshot::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  write(f);
}

Snapshot Snapshot::read(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("snapshot: bad magic");
  }
  Snapshot s;
  s.nx = get<std::uint64_t>(in);
  s.ny = get<std::uint64_t>(in);
  s.nz = get<std::uint64_t>(in);
  s.dx = get<double>(in);
  s.dy = get<double>(in);
  s.dz = get<double>(in);
  s.dt = get<double>(in);
  s.time = get<double>(in);
  const auto n = get<std::uint64_t>(in);
  for (std::uint64_t f = 0; f < n; ++f) {
    const auto len = get<std::uint64_t>(in);
    if (len > 4096) throw std::runtime_error("snapshot: implausible field name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(len))) {
      throw std::runtime_error("snapshot: truncated");
    }
    const auto a = get<std::uint64_t>(in);
    const auto b = get<std::uint64_t>(in);
    const auto c = get<std::uint64_t>(in);
    Array3 arr(a, b, c);
    for (double& v : arr.values()) v = get<double>(in);
    s.fields.emplace_back(std::move(name), std::move(arr));
  }
  return s;
}

Snapshot Snapshot::read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return read(f);
}

}  // namespace hysmax
