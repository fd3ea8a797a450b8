// Driven PEC cavity holding a rotating hysteretic cylinder.
//
// Time levels: E, Pz at integer steps n, B, H, Mx, My at half steps.
// One call to Simulation::step advances E from n to n+1 and B from n-1/2
// to n+1/2.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hysmax/constants.hpp"
#include "hysmax/errors.hpp"
#include "hysmax/point_hysteresis.hpp"
#include "hysmax/rotating_medium.hpp"
#include "hysmax/snapshot.hpp"
#include "hysmax/yee_grid.hpp"

namespace hysmax {

/// External current: J(t) = a(t) curl_h(W), with W a static face potential
/// that circulates about z inside slabs of `wall_layers` cells along the four
/// side walls (held `wall_layers` cells off the floor and lid). The resulting
/// current loops drive a toroidal flux and hence a nearly uniform Ez in the
/// cavity interior.
struct SourceSpec {
  double frequency = 250.0;   // Hz
  double amplitude = 0.0;     // A/m^2, peak current density on the slab faces
  double ramp_cycles = 2.0;   // periods of smoothstep ramp
  std::size_t wall_layers = 1;

  void validate(const GridSpec& g) const;
};

/// a(t) = amplitude * ramp(t) * sin(2 pi f t).
double source_envelope(double t, const SourceSpec& spec);

/// curl_h(W) for unit amplitude, A/m^2 per unit of a(t).
EdgeField source_pattern(const SourceSpec& spec, const GridSpec& g);

/// J at time t.
EdgeField build_source(double t, const SourceSpec& spec, const GridSpec& g);

enum class Scheme { semi_implicit, lagged_explicit };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct ProbeSpec {
  std::string name;
  Vec3 position{};  // m, cavity frame
};

enum class DurationUnit { seconds, periods, revolutions };

std::string_view to_string(DurationUnit u);
DurationUnit duration_unit_from_string(std::string_view s);

struct RunConfig {
  GridSpec grid;
  CylinderSpec material;
  ChannelParams hysteresis = ChannelParams::paper_pe();
  SourceSpec source;
  double duration = 0.0;
  DurationUnit duration_unit = DurationUnit::seconds;
  Scheme scheme = Scheme::semi_implicit;
  std::size_t record_stride = 1;
  std::size_t diagnostics_stride = 100;
  std::vector<ProbeSpec> probes;

  /// Throws ConfigError when any component is inconsistent.
  void validate(const PhysicalConstants& consts = kSI) const;
  double duration_seconds() const;
  std::size_t total_steps(const PhysicalConstants& consts = kSI) const;
};

struct ConsistencyReport {
  double omega = 0.0;                 // rad/s
  double cycles_per_revolution = 0.0; // inf at rest
  double dt = 0.0;                    // s
  double dt_max = 0.0;                // s
  double steps_per_period = 0.0;
  double steps_per_revolution = 0.0;  // inf at rest
  double f_lowest = 0.0;              // Hz, lowest analytic cavity mode
  double drive_over_f_lowest = 0.0;
  double rim_speed_ratio_sq = 0.0;    // (omega R / c)^2
};

ConsistencyReport consistency_report(const RunConfig& cfg, const PhysicalConstants& consts = kSI);

inline constexpr const char* kProbeHeader = "t,Ex,Ey,Ez,Hx,Hy,Hz,Bx,By,Bz,Pz,Mx,My";
inline constexpr const char* kDiagnosticsHeader = "t,energy,max_divB,max_divD";

struct ProbeRow {
  double t = 0.0;
  double Ex = 0, Ey = 0, Ez = 0, Hx = 0, Hy = 0, Hz = 0, Bx = 0, By = 0, Bz = 0;
  double Pz = 0, Mx = 0, My = 0;
};

struct ProbeTrace {
  ProbeSpec probe;
  std::array<std::size_t, 3> site{};  // snapped Ez index
  Vec3 site_position{};
  std::vector<ProbeRow> rows;

  void write_csv(std::ostream& out) const;
  static std::vector<ProbeRow> read_csv(std::istream& in);
};

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;
  double max_divB = 0.0;
  double max_divD = 0.0;  // of div D - rho_free
};

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);

class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg, const PhysicalConstants& consts = kSI);

  void step();
  void advance(std::size_t steps);

  double time() const { return t_; }
  double dt() const { return dt_; }
  std::size_t step_count() const { return n_; }

  const RunConfig& config() const { return cfg_; }
  const MaterialMap& material() const { return map_; }
  const EdgeField& E() const { return E_; }
  const FaceField& B() const { return B_; }
  const FaceField& H() const { return H_; }
  const MediumState& medium() const { return medium_; }
  const EdgeField& source() const { return pattern_; }
  const Array3& rho_free() const { return rho_free_; }

  /// Replace the initial electric field (t = 0 only). PEC is applied.
  void set_initial_E(const EdgeField& E);

  /// Snap a point to the nearest Ez site.
  std::array<std::size_t, 3> snap_to_Ez(const Vec3& p) const;
  ProbeRow sample(const std::array<std::size_t, 3>& site) const;

  DiagnosticsRow diagnostics() const;
  Snapshot snapshot() const;

  /// Largest magnitude of any field or medium entry; NumericalError if any is non-finite.
  double max_state_magnitude() const;

 private:
  // H = B / mu0 + M on the x and y faces, B / mu0 on z faces.
  void refresh_H(const FaceField& B, const Array3* Mx, const Array3* My);
  void check_instability() const;

  RunConfig cfg_;
  PhysicalConstants consts_;
  MaterialMap map_;
  bool hysteretic_ = false;
  double dt_ = 0.0;
  double t_ = 0.0;
  std::size_t n_ = 0;
  double instability_limit_ = 0.0;

  EdgeField E_, E_prev_;
  FaceField B_, H_;
  MediumState medium_;
  EdgeField pattern_;
  Array3 eps_ex_, eps_ey_, eps_ez_;  // edge permittivities for the linear material
  Array3 rho_free_;
};

/// Thrown out of run() when the instability detector trips; carries the
/// state at the time of the abort.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, Snapshot snap)
      : NumericalError(what), snapshot(std::move(snap)) {}
  Snapshot snapshot;
};

struct RunResult {
  std::vector<ProbeTrace> traces;
  std::vector<DiagnosticsRow> diagnostics;
  ConsistencyReport report;
  std::size_t steps = 0;
  double final_time = 0.0;
  std::optional<Snapshot> final_state;
};

/// Run the configured experiment. Deterministic.
RunResult run(const RunConfig& cfg, const PhysicalConstants& consts = kSI,
              bool keep_final_state = false);

}  // namespace hysmax
