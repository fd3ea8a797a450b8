// Rigidly rotating ferroelectric cylinder on the Yee lattice.
//
// The cylinder axis is z, it spans the full cavity height and rotates at
// angular speed omega about its own axis. Polarization is induced along z
// only, so the medium state is Pz (Ez sites) plus the motion-induced
// magnetization Mx (Hx sites) and My (Hy sites).
//
// Coordinates x, y in this module are measured from the cylinder axis.
#pragma once

#include <cstdint>
#include <vector>

#include "hysmax/constants.hpp"
#include "hysmax/point_hysteresis.hpp"
#include "hysmax/yee_grid.hpp"

namespace hysmax {

/// C1 smoothstep: 1 for r <= R - w, 0 for r >= R + w, 3s^2 - 2s^3 between,
/// s = (R + w - r) / (2w).
double bump_weight(double r, double radius, double width);

struct CylinderSpec {
  bool enabled = true;           // false leaves the cavity empty
  double radius = 1.36;          // m
  double center_x = 2.725;       // m, cavity frame
  double center_y = 2.725;       // m
  double transition_width = 0.0; // m; <= 0 means half a cell (dx / 2)
  double sigma = 2.6e-4;         // S/m
  double omega = 0.0;            // rad/s
  double eps_r = 0.0;            // > 0 selects a linear dielectric instead of hysteresis

  /// Throws ConfigError on bad geometry or when (omega R / c)^2 > 1e-3.
  /// A disabled cylinder is not checked.
  void validate(const GridSpec& g, const PhysicalConstants& consts = kSI) const;
  double effective_width(const GridSpec& g) const;
};

/// Bump weights sampled on every sub-lattice the medium touches.
struct MaterialMap {
  CylinderSpec spec;
  double width = 0.0;  // resolved transition width, m
  Array3 w_ex, w_ey, w_ez, w_hx, w_hy;

  static MaterialMap build(const GridSpec& g, const CylinderSpec& spec,
                           const PhysicalConstants& consts = kSI);

  const Array3& chi_weight() const { return w_ez; }
  /// Position of a staggered sample relative to the cylinder axis.
  std::array<double, 2> rel_xy(const GridSpec& g, Component c, std::size_t i, std::size_t j) const;
};

struct MediumState {
  Array3 Pz;                       // C/m^2, Ez sites
  Array3 Mx;                       // A/m, Hx sites
  Array3 My;                       // A/m, Hy sites
  std::vector<std::int8_t> s_psi;  // sign of psi-hat per Ez site, last step
  std::vector<std::int8_t> s_e;    // sign of E3-hat rate per Ez site, last step
  Array3 last_Edot_z;              // V/(m s)

  static MediumState zeros(const GridSpec& g);
};

/// Omega (y d/dx - x d/dy) f on f's own sub-lattice.
///
/// Centred differences where both neighbours lie in the support, one-sided
/// where only one does, zero where neither does or the site itself is outside.
/// An empty `support` means the whole lattice.
Array3 advect_phi(const Array3& f, Component site, double omega, const GridSpec& g,
                  const MaterialMap& map, const Array3& support);

struct HatFields {
  Array3 e3_hat;  // V/m
  Array3 P3_hat;  // C/m^2
};

/// Scalar forms, x and y relative to the axis.
double e3_hat_value(double Ez, double Bx, double By, double omega, double x, double y);
double P3_hat_value(double Pz, double Mx, double My, double omega, double x, double y,
                    const PhysicalConstants& consts = kSI);

/// Co-moving combinations at Ez sites. Bx, By, Mx, My must already be on Ez sites.
HatFields hat_fields(const Array3& Ez, const Array3& Bx, const Array3& By, const Array3& Pz,
                     const Array3& Mx, const Array3& My, double omega, const GridSpec& g,
                     const MaterialMap& map, const PhysicalConstants& consts = kSI);

/// The part of the co-moving rate that does not involve dEz/dt:
///   K = -omega (x dBx/dt + y dBy/dt) - omega (y d/dx - x d/dy) Ez
/// with the B rates on Ez sites.
Array3 e3_rate_known(const Array3& Bdot_x, const Array3& Bdot_y, const Array3& Ez,
                     double omega, const GridSpec& g, const MaterialMap& map);

/// Full co-moving rate dEz/dt + K.
Array3 e3_rate(const Array3& Edot_z, const Array3& Bdot_x, const Array3& Bdot_y,
               const Array3& Ez, double omega, const GridSpec& g, const MaterialMap& map);

struct EzSolve {
  double Edot_z = 0.0;
  double E3_hat_rate = 0.0;
  double Pdot_z = 0.0;
  int s_e = 0;         // branch used for chi
  int drive_sign = 0;  // sgn(rhs + eps0 K), the branch a consistent solve would pick
  int pieces = 0;      // branch_increment sub-intervals used by solve_Ez_step
};

/// Per-cell solve of
///   eps0 dEz/dt = curlH_z - w sigma Ez - dPz/dt
///   dPz/dt      = w (pz_adv + chi(S_E) E3),  E3 = dEz/dt + K
///   chi(S)      = kappa |psi_hat| + theta S psi_hat
/// for the unique consistent branch S_E = sgn(rhs + eps0 K). Passing a
/// `forced_branch` in {-1, 0, 1} skips the branch choice and uses it instead.
/// Throws NumericalError when kappa < |theta|.
EzSolve solve_Ez_rate(double curlH_z, double Ez, double pz_adv, double K, double psi_hat,
                      double sigma, double weight, const ChannelParams& params,
                      const PhysicalConstants& consts = kSI, int forced_branch = 2);

/// Change of the co-moving polarization along the straight path e0 -> e0 + de
/// with the direction sign s held fixed:
///   dP/de = kappa |psi(e, P)| + theta s psi(e, P).
/// RK4 on sub-intervals short against both 1/beta and the relaxation scale,
/// split where psi changes sign. `pieces` > 0 fixes the number of
/// sub-intervals; 0 picks it from |de| via branch_pieces.
double branch_increment(double e0, double p0, double de, int s, const ChannelParams& params,
                        const PhysicalConstants& consts = kSI, int pieces = 0);

/// Sub-interval count branch_increment uses for a path of length |de|.
int branch_pieces(double de, const ChannelParams& params, const PhysicalConstants& consts = kSI);

/// Step-integrated form of solve_Ez_rate. Instead of freezing chi at the
/// step start, the polarization change over dt follows the branch along
/// the step's co-moving increment x = dt E3:
///   eps0 x + w branch_increment(e3_hat, P3_hat, x, S_E) = dt (rhs + eps0 K)
/// which is monotone in x, so the root is bracketed by 0 and dt (rhs + eps0 K) / eps0.
/// Pdot_z is the step-averaged rate w (pz_adv + increment / dt).
EzSolve solve_Ez_step(double curlH_z, double Ez, double pz_adv, double K, double e3_hat,
                      double P3_hat, double sigma, double weight, double dt,
                      const ChannelParams& params, const PhysicalConstants& consts = kSI,
                      int forced_branch = 2);

/// kappa |Psi| dEz/dt + theta Psi |dEz/dt| with Psi = eps0 (alpha f(Ez) - xi Pz).
double magnetization_drive(double Ez, double Pz, double Edot_z, const ChannelParams& params,
                           const PhysicalConstants& consts = kSI);

struct MagnetizationRates {
  Array3 Mx_dot;
  Array3 My_dot;
};

/// dMx/dt and dMy/dt: advection of the current magnetization plus
/// x omega (resp. y omega) times the Ez-site drive, weighted by w_ez and averaged onto
/// the H sites, all scaled by the face bump weight.
MagnetizationRates magnetization_rates(const MediumState& m, const Array3& Ez, const Array3& Pz,
                                       const Array3& Edot_z, const MaterialMap& map,
                                       const GridSpec& g, const ChannelParams& params,
                                       const PhysicalConstants& consts = kSI);

/// Forward step of Pz, Mx, My. Entries outside the support stay exactly zero.
/// Throws NumericalError on non-finite rates.
void update_medium(MediumState& m, const Array3& Pz_dot, const MagnetizationRates& rates,
                   double dt, const MaterialMap& map);

}  // namespace hysmax
