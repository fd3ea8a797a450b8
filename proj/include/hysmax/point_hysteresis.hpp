// Zero-dimensional generalized Coleman-Hodgdon hysteresis.
//
// A single material point carries one electric and one magnetic drive
// component (E, H) along the soft axis and the induced responses (P, M).
// Four channels couple them:
//
//   pe : E -> P      ph : H -> P      me : E -> M      mh : H -> M
//
// Each channel's scalar susceptibility is X = Psi [kappa sgn(Psi) + theta sgn(rate)]
// with Psi an affine combination of a tanh drive shape and the response.
// The inertial system is
//
//   dP/dt = X_pe dE/dt - (1/c) X_ph dH/dt
//   dM/dt = X_mh dH/dt - c     X_me dE/dt
//
// which is rate independent: dP/dE depends only on the state and two signs.
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hysmax/constants.hpp"

namespace hysmax {

enum class Channel { pe, ph, me, mh };

std::string_view to_string(Channel channel);

/// The five hysteresis constants for one channel, strict SI.
///
/// beta is in m/V (pe, me) or m/A (ph, mh); xi is paired with the response
/// so that xi * response is dimensionless (m^2/C against P, m/A against M).
struct ChannelParams {
  Channel channel = Channel::pe;
  double alpha = 0.0;
  double beta = 0.0;
  double xi = 0.0;
  double kappa = 0.0;
  double theta = 0.0;

  /// Throws std::invalid_argument unless alpha, beta, xi > 0 and kappa, theta finite.
  void validate() const;

  /// Ferroelectric parameter set used for the rotating-cylinder experiment.
  static ChannelParams paper_pe();
};

/// Any subset of the four channels. Absent channels contribute nothing.
struct ChannelSet {
  std::optional<ChannelParams> pe;
  std::optional<ChannelParams> ph;
  std::optional<ChannelParams> me;
  std::optional<ChannelParams> mh;

  static ChannelSet pe_only(const ChannelParams& params);
  void validate() const;
};

struct PointState {
  double E = 0.0;  // V/m
  double H = 0.0;  // A/m
  double P = 0.0;  // C/m^2
  double M = 0.0;  // A/m
  double t = 0.0;  // s
};

struct BranchState {
  double psi = 0.0;
  int s_psi = 0;
  int s_drive = 0;
};

/// Three-valued sign with sgn(0) == 0.
constexpr int sgn(double z) noexcept { return (z > 0.0) - (z < 0.0); }

/// tanh(beta z).
double shape_fn(double z, double beta) noexcept;

/// Psi for a channel, with the sign pattern
///   pe: +eps0 (a f(E) - xi P)   ph: -(a f(H) - xi P)
///   mh: -(a f(H) + xi M)        me: +eps0 (a f(E) + xi M)
double psi(const ChannelParams& params, double drive, double response,
           const PhysicalConstants& consts = kSI) noexcept;

/// Psi [kappa sgn(Psi) + theta s] = kappa |Psi| + theta s Psi.
double susceptibility(const ChannelParams& params, double psi_val,
                      int drive_rate_sign) noexcept;

struct DriveRates {
  double Edot = 0.0;  // V/(m s)
  double Hdot = 0.0;  // A/(m s)
};

/// Advance (P, M) over dt with E and H ramping linearly at the given rates.
///
/// Classical RK4 with the drive signs fixed for the step. Sign changes of any
/// channel's Psi inside the step are located by bisection to 1e-3 dt and the
/// step is split there. Throws NumericalError on non-finite input.
PointState step_inertial(const PointState& state, DriveRates rates, double dt,
                         const ChannelSet& channels,
                         const PhysicalConstants& consts = kSI);

/// Closed-form pe branch through (E0, P0) with S_Psi and S_E held fixed:
///
///   P(E) = P0 exp(-eta xi (E - E0)) + eta alpha Int_{E0}^{E} f(u) exp(eta xi (u - E)) du
///   eta  = eps0 (kappa S_Psi + theta S_E)
///
/// The integral uses adaptive Gauss-Kronrod to 1e-12 relative. Throws
/// std::invalid_argument if s_drive disagrees with the direction E0 -> E.
double branch_solution(double E, double E0, double P0, int s_psi, int s_drive,
                       const ChannelParams& params,
                       const PhysicalConstants& consts = kSI);

struct TraceRow {
  double t = 0.0;
  double E = 0.0;
  double P = 0.0;
  double H = 0.0;
  double M = 0.0;
  int s_psi = 0;
  int s_drive = 0;
};

struct BranchEvent {
  enum class Kind { psi, drive };
  double t = 0.0;
  Kind kind = Kind::psi;
  int new_sign = 0;
};

struct PointTrace {
  std::vector<TraceRow> rows;
  std::vector<BranchEvent> transitions;

  /// CSV with header `t,E,P,H,M,s_psi,s_drive`, 17 significant digits.
  void write_csv(std::ostream& out) const;
  static PointTrace read_csv(std::istream& in);
};

/// Prescribed drive. `H` may be left empty for a purely electric drive.
struct Waveform {
  std::function<double(double)> E;
  std::function<double(double)> H;

  static Waveform sine(double amplitude, double frequency);
};

/// Integrate the point model along a prescribed drive. Rates within each step
/// are secants of the waveform samples, so the result depends only on the
/// sampled (E, H) sequence.
PointTrace run_drive(const Waveform& waveform, double duration, double dt,
                     const ChannelSet& channels,
                     const PhysicalConstants& consts = kSI,
                     const PointState& initial = {});

/// Same as run_drive but along recorded samples (t_i, E_i).
PointTrace run_samples(std::span<const double> t, std::span<const double> E,
                       const ChannelSet& channels,
                       const PhysicalConstants& consts = kSI,
                       const PointState& initial = {});

struct LoopMetrics {
  double p_sat = 0.0;       // C/m^2
  double p_remanent = 0.0;  // C/m^2
  double e_coercive = 0.0;  // V/m
  double loop_area = 0.0;   // J/m^3 per cycle
};

/// Descriptors of the last complete drive cycle (between the last two upward
/// zero crossings of E). A trace with identically zero E and P yields all
/// zeros; otherwise fewer than two upward crossings is an error.
LoopMetrics loop_metrics(const PointTrace& trace);

}  // namespace hysmax
