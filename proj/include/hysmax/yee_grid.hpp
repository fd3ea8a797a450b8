// Staggered (Yee) lattice for a rectangular PEC cavity.
//
// Placement, with (i, j, k) integer node indices and h = (dx, dy, dz):
//
//   Ex (i+1/2, j, k)       Hx (i, j+1/2, k+1/2)
//   Ey (i, j+1/2, k)       Hy (i+1/2, j, k+1/2)
//   Ez (i, j, k+1/2)       Hz (i+1/2, j+1/2, k)
//
// Tangential E components on the six walls sit exactly on the walls, so the
// PEC condition is a plain zeroing of those entries.
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hysmax/constants.hpp"

namespace hysmax {

using Vec3 = std::array<double, 3>;

/// Dense 3-D array, k fastest.
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t nx, std::size_t ny, std::size_t nz, double fill = 0.0)
      : nx_(nx), ny_(ny), nz_(nz), data_(nx * ny * nz, fill) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * ny_ + j) * nz_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * ny_ + j) * nz_ + k];
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return data_.size(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Array3& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && nz_ == other.nz_;
  }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  double max_abs() const;

  bool operator==(const Array3&) const = default;

 private:
  std::size_t nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<double> data_;
};

enum class Component { Ex, Ey, Ez, Hx, Hy, Hz };

struct GridSpec {
  std::size_t nx = 20, ny = 20, nz = 8;
  double lx = 5.45, ly = 5.45, lz = 2.18;  // m
  double cfl_safety = 0.5;
  Vec3 origin{0.0, 0.0, 0.0};  // cavity corner, m

  double dx() const { return lx / static_cast<double>(nx); }
  double dy() const { return ly / static_cast<double>(ny); }
  double dz() const { return lz / static_cast<double>(nz); }
  double cell_volume() const { return dx() * dy() * dz(); }

  /// Leapfrog stability limit 1/(c sqrt(dx^-2 + dy^-2 + dz^-2)).
  double dt_max(const PhysicalConstants& consts = kSI) const;
  double dt(const PhysicalConstants& consts = kSI) const {
    return cfl_safety * dt_max(consts);
  }

  /// Throws ConfigError on non-positive sizes or cfl_safety outside (0, 1].
  void validate() const;

  /// Array shape of a staggered component.
  std::array<std::size_t, 3> shape(Component c) const;
  Array3 make(Component c) const;

  /// Physical position of sample (i, j, k) of component c.
  Vec3 position(Component c, std::size_t i, std::size_t j, std::size_t k) const;

  /// 20 x 20 x 8 cells over 5.45 m x 5.45 m x 2.18 m.
  static GridSpec paper() { return GridSpec{}; }
};

struct EdgeField {
  Array3 x, y, z;
  static EdgeField zeros(const GridSpec& g);
};

struct FaceField {
  Array3 x, y, z;
  static FaceField zeros(const GridSpec& g);
};

/// The Maxwell state: E on edges, H on faces.
struct FieldArrays {
  EdgeField E;
  FaceField H;

  explicit FieldArrays(const GridSpec& g) : E(EdgeField::zeros(g)), H(FaceField::zeros(g)) {}
};

/// Centred staggered curl of an edge field; result collocated with H.
FaceField curl_E(const EdgeField& E, const GridSpec& g);
void curl_E_into(const EdgeField& E, const GridSpec& g, FaceField& out);

/// Centred staggered curl of a face field on interior edges. Wall-tangential
/// edges are left at zero, so this is the exact transpose of curl_E restricted
/// to the edges that are actually updated.
EdgeField curl_H(const FaceField& H, const GridSpec& g);
void curl_H_into(const FaceField& H, const GridSpec& g, EdgeField& out);

/// Divergence of a face field at cell centres (nx, ny, nz).
Array3 div_B(const FaceField& B, const GridSpec& g);

/// Divergence of an edge field at nodes (nx+1, ny+1, nz+1). Wall nodes are zero.
Array3 div_D(const EdgeField& D, const GridSpec& g);

/// Zero wall-tangential E. Idempotent.
void apply_pec(EdgeField& E, const GridSpec& g);

enum class FaceAxis { x, y };

/// Average an Hx- or Hy-collocated array onto Ez sites: two-point mean in the
/// staggered direction, two-point linear extrapolation on the bounding walls.
/// Exact for fields affine in (x, y, z).
Array3 avg_to_Ez_sites(const Array3& face_component, FaceAxis axis, const GridSpec& g);

/// Two-point mean of an Ez-collocated array onto Hx (axis x) or Hy (axis y) sites.
Array3 avg_Ez_to_face(const Array3& ez_sited, FaceAxis axis, const GridSpec& g);

/// Trilinear interpolation of a staggered component at a point, clamped to the
/// component's lattice.
double interpolate(const Array3& a, Component c, const Vec3& p, const GridSpec& g);

/// Discrete energy conserved by the leapfrog with PEC walls:
///   1/2 sum eps0 |E^n|^2 V + 1/2 sum mu0 H^{n-1/2} . H^{n+1/2} V
/// Pairwise summation throughout.
double field_energy(const EdgeField& E, const FaceField& H_old, const FaceField& H_new,
                    const GridSpec& g, const PhysicalConstants& consts = kSI);

/// The other conserved form, 1/2 eps0 E^n . E^{n+1} + 1/2 mu0 |H^{n+1/2}|^2,
/// or any mix: 1/2 eps0 Ea . Eb + 1/2 mu0 Ha . Hb.
double field_energy(const EdgeField& Ea, const EdgeField& Eb, const FaceField& Ha,
                    const FaceField& Hb, const GridSpec& g, const PhysicalConstants& consts = kSI);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

}  // namespace hysmax
