#include "hysmax/yee_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hysmax/errors.hpp"

namespace hysmax {

namespace {

void require_shape(const Array3& a, const std::array<std::size_t, 3>& s, const char* what) {
  if (a.nx() != s[0] || a.ny() != s[1] || a.nz() != s[2]) {
    throw std::invalid_argument(std::string(what) + ": array shape does not match grid");
  }
}

void require_edge(const EdgeField& E, const GridSpec& g) {
  require_shape(E.x, g.shape(Component::Ex), "Ex");
  require_shape(E.y, g.shape(Component::Ey), "Ey");
  require_shape(E.z, g.shape(Component::Ez), "Ez");
}

void require_face(const FaceField& H, const GridSpec& g) {
  require_shape(H.x, g.shape(Component::Hx), "Hx");
  require_shape(H.y, g.shape(Component::Hy), "Hy");
  require_shape(H.z, g.shape(Component::Hz), "Hz");
}

// Offsets (in cells) of each component's samples from the nodes.
Vec3 stagger(Component c) {
  switch (c) {
    case Component::Ex: return {0.5, 0.0, 0.0};
    case Component::Ey: return {0.0, 0.5, 0.0};
    case Component::Ez: return {0.0, 0.0, 0.5};
    case Component::Hx: return {0.0, 0.5, 0.5};
    case Component::Hy: return {0.5, 0.0, 0.5};
    case Component::Hz: return {0.5, 0.5, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

double dot_sum(const Array3& a, const Array3& b) {
  std::vector<double> prod(a.size());
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = va[n] * vb[n];
  return pairwise_sum(prod);
}

}  // namespace

double Array3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double GridSpec::dt_max(const PhysicalConstants& consts) const {
  const double inv = 1.0 / (dx() * dx()) + 1.0 / (dy() * dy()) + 1.0 / (dz() * dz());
  return 1.0 / (consts.c * std::sqrt(inv));
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2 || nz < 1) throw ConfigError("grid: need nx, ny >= 2 and nz >= 1");
  if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0) || !std::isfinite(lx) ||
      !std::isfinite(ly) || !std::isfinite(lz)) {
    throw ConfigError("grid: cavity dimensions must be positive and finite");
  }
  if (!(cfl_safety > 0.0) || cfl_safety > 1.0) {
    throw ConfigError("grid: cfl_safety must be in (0, 1]");
  }
}

std::array<std::size_t, 3> GridSpec::shape(Component c) const {
  switch (c) {
    case Component::Ex: return {nx, ny + 1, nz + 1};
    case Component::Ey: return {nx + 1, ny, nz + 1};
    case Component::Ez: return {nx + 1, ny + 1, nz};
    case Component::Hx: return {nx + 1, ny, nz};
    case Component::Hy: return {nx, ny + 1, nz};
    case Component::Hz: return {nx, ny, nz + 1};
  }
  throw std::invalid_argument("unknown component");
}

Array3 GridSpec::make(Component c) const {
  const auto s = shape(c);
  return Array3(s[0], s[1], s[2]);
}

Vec3 GridSpec::position(Component c, std::size_t i, std::size_t j, std::size_t k) const {
  const Vec3 off = stagger(c);
  return {origin[0] + (static_cast<double>(i) + off[0]) * dx(),
          origin[1] + (static_cast<double>(j) + off[1]) * dy(),
          origin[2] + (static_cast<double>(k) + off[2]) * dz()};
}

EdgeField EdgeField::zeros(const GridSpec& g) {
  return {g.make(Component::Ex), g.make(Component::Ey), g.make(Component::Ez)};
}

FaceField FaceField::zeros(const GridSpec& g) {
  return {g.make(Component::Hx), g.make(Component::Hy), g.make(Component::Hz)};
}

void curl_E_into(const EdgeField& E, const GridSpec& g, FaceField& out) {
  require_edge(E, g);
  require_face(out, g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy(), idz = 1.0 / g.dz();
  const std::size_t nx = g.nx, ny = g.ny, nz = g.nz;

  for (std::size_t i = 0; i <= nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k < nz; ++k)
        out.x(i, j, k) = (E.z(i, j + 1, k) - E.z(i, j, k)) * idy -
                         (E.y(i, j, k + 1) - E.y(i, j, k)) * idz;

  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j <= ny; ++j)
      for (std::size_t k = 0; k < nz; ++k)
        out.y(i, j, k) = (E.x(i, j, k + 1) - E.x(i, j, k)) * idz -
                         (E.z(i + 1, j, k) - E.z(i, j, k)) * idx;

  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k <= nz; ++k)
        out.z(i, j, k) = (E.y(i + 1, j, k) - E.y(i, j, k)) * idx -
                         (E.x(i, j + 1, k) - E.x(i, j, k)) * idy;
}

FaceField curl_E(const EdgeField& E, const GridSpec& g) {
  FaceField out = FaceField::zeros(g);
  curl_E_into(E, g, out);
  return out;
}

void curl_H_into(const FaceField& H, const GridSpec& g, EdgeField& out) {
  require_face(H, g);
  require_edge(out, g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy(), idz = 1.0 / g.dz();
  const std::size_t nx = g.nx, ny = g.ny, nz = g.nz;
  out.x.fill(0.0);
  out.y.fill(0.0);
  out.z.fill(0.0);

  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 1; j < ny; ++j)
      for (std::size_t k = 1; k < nz; ++k)
        out.x(i, j, k) = (H.z(i, j, k) - H.z(i, j - 1, k)) * idy -
                         (H.y(i, j, k) - H.y(i, j, k - 1)) * idz;

  for (std::size_t i = 1; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 1; k < nz; ++k)
        out.y(i, j, k) = (H.x(i, j, k) - H.x(i, j, k - 1)) * idz -
                         (H.z(i, j, k) - H.z(i - 1, j, k)) * idx;

  for (std::size_t i = 1; i < nx; ++i)
    for (std::size_t j = 1; j < ny; ++j)
      for (std::size_t k = 0; k < nz; ++k)
        out.z(i, j, k) = (H.y(i, j, k) - H.y(i - 1, j, k)) * idx -
                         (H.x(i, j, k) - H.x(i, j - 1, k)) * idy;
}

EdgeField curl_H(const FaceField& H, const GridSpec& g) {
  EdgeField out = EdgeField::zeros(g);
  curl_H_into(H, g, out);
  return out;
}

Array3 div_B(const FaceField& B, const GridSpec& g) {
  require_face(B, g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy(), idz = 1.0 / g.dz();
  Array3 out(g.nx, g.ny, g.nz);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k)
        out(i, j, k) = (B.x(i + 1, j, k) - B.x(i, j, k)) * idx +
                       (B.y(i, j + 1, k) - B.y(i, j, k)) * idy +
                       (B.z(i, j, k + 1) - B.z(i, j, k)) * idz;
  return out;
}

Array3 div_D(const EdgeField& D, const GridSpec& g) {
  require_edge(D, g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy(), idz = 1.0 / g.dz();
  Array3 out(g.nx + 1, g.ny + 1, g.nz + 1);
  for (std::size_t i = 1; i < g.nx; ++i)
    for (std::size_t j = 1; j < g.ny; ++j)
      for (std::size_t k = 1; k < g.nz; ++k)
        out(i, j, k) = (D.x(i, j, k) - D.x(i - 1, j, k)) * idx +
                       (D.y(i, j, k) - D.y(i, j - 1, k)) * idy +
                       (D.z(i, j, k) - D.z(i, j, k - 1)) * idz;
  return out;
}

void apply_pec(EdgeField& E, const GridSpec& g) {
  require_edge(E, g);
  const std::size_t nx = g.nx, ny = g.ny, nz = g.nz;
  // Ex lives on y = const and z = const lines; tangential to y and z walls.
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j <= ny; ++j)
      for (std::size_t k = 0; k <= nz; ++k)
        if (j == 0 || j == ny || k == 0 || k == nz) E.x(i, j, k) = 0.0;
  for (std::size_t i = 0; i <= nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k <= nz; ++k)
        if (i == 0 || i == nx || k == 0 || k == nz) E.y(i, j, k) = 0.0;
  for (std::size_t i = 0; i <= nx; ++i)
    for (std::size_t j = 0; j <= ny; ++j)
      for (std::size_t k = 0; k < nz; ++k)
        if (i == 0 || i == nx || j == 0 || j == ny) E.z(i, j, k) = 0.0;
}

Array3 avg_to_Ez_sites(const Array3& a, FaceAxis axis, const GridSpec& g) {
  Array3 out = g.make(Component::Ez);
  const std::size_t nx = g.nx, ny = g.ny, nz = g.nz;
  if (axis == FaceAxis::x) {
    require_shape(a, g.shape(Component::Hx), "avg_to_Ez_sites(Hx)");
    for (std::size_t i = 0; i <= nx; ++i)
      for (std::size_t k = 0; k < nz; ++k) {
        out(i, 0, k) = 1.5 * a(i, 0, k) - 0.5 * a(i, 1, k);
        out(i, ny, k) = 1.5 * a(i, ny - 1, k) - 0.5 * a(i, ny - 2, k);
        for (std::size_t j = 1; j < ny; ++j) out(i, j, k) = 0.5 * (a(i, j - 1, k) + a(i, j, k));
      }
  } else {
    require_shape(a, g.shape(Component::Hy), "avg_to_Ez_sites(Hy)");
    for (std::size_t j = 0; j <= ny; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        out(0, j, k) = 1.5 * a(0, j, k) - 0.5 * a(1, j, k);
        out(nx, j, k) = 1.5 * a(nx - 1, j, k) - 0.5 * a(nx - 2, j, k);
        for (std::size_t i = 1; i < nx; ++i) out(i, j, k) = 0.5 * (a(i - 1, j, k) + a(i, j, k));
      }
  }
  return out;
}

Array3 avg_Ez_to_face(const Array3& a, FaceAxis axis, const GridSpec& g) {
  require_shape(a, g.shape(Component::Ez), "avg_Ez_to_face");
  if (axis == FaceAxis::x) {
    Array3 out = g.make(Component::Hx);
    for (std::size_t i = 0; i <= g.nx; ++i)
      for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t k = 0; k < g.nz; ++k) out(i, j, k) = 0.5 * (a(i, j, k) + a(i, j + 1, k));
    return out;
  }
  Array3 out = g.make(Component::Hy);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j <= g.ny; ++j)
      for (std::size_t k = 0; k < g.nz; ++k) out(i, j, k) = 0.5 * (a(i, j, k) + a(i + 1, j, k));
  return out;
}

double interpolate(const Array3& a, Component c, const Vec3& p, const GridSpec& g) {
  require_shape(a, g.shape(c), "interpolate");
  const Vec3 off = stagger(c);
  const std::array<double, 3> h{g.dx(), g.dy(), g.dz()};
  const std::array<std::size_t, 3> n{a.nx(), a.ny(), a.nz()};
  std::array<std::size_t, 3> lo{};
  std::array<double, 3> frac{};
  for (int d = 0; d < 3; ++d) {
    double u = (p[d] - g.origin[d]) / h[d] - off[d];
    const double umax = static_cast<double>(n[d] - 1);
    u = std::clamp(u, 0.0, umax);
    if (n[d] == 1) {
      lo[d] = 0;
      frac[d] = 0.0;
      continue;
    }
    auto base = static_cast<std::size_t>(std::floor(u));
    if (base >= n[d] - 1) base = n[d] - 2;
    lo[d] = base;
    frac[d] = u - static_cast<double>(base);
  }
  double sum = 0.0;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                         (dk ? frac[2] : 1.0 - frac[2]);
        if (w == 0.0) continue;
        sum += w * a(lo[0] + di, lo[1] + dj, lo[2] + dk);
      }
  return sum;
}

double field_energy(const EdgeField& E, const FaceField& H_old, const FaceField& H_new,
                    const GridSpec& g, const PhysicalConstants& consts) {
  return field_energy(E, E, H_old, H_new, g, consts);
}

double field_energy(const EdgeField& Ea, const EdgeField& Eb, const FaceField& Ha,
                    const FaceField& Hb, const GridSpec& g, const PhysicalConstants& consts) {
  require_edge(Ea, g);
  require_edge(Eb, g);
  require_face(Ha, g);
  require_face(Hb, g);
  const double e2 = pairwise_sum(std::array{dot_sum(Ea.x, Eb.x), dot_sum(Ea.y, Eb.y), dot_sum(Ea.z, Eb.z)});
  const double h2 = pairwise_sum(std::array{dot_sum(Ha.x, Hb.x), dot_sum(Ha.y, Hb.y), dot_sum(Ha.z, Hb.z)});
  return 0.5 * g.cell_volume() * (consts.eps0 * e2 + consts.mu0 * h2);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace hysmax
