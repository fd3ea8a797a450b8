// Acceptance checks shared by `hysmax validate` and the acceptance binary.
//
// Every tolerance lives here as a named constant; the checks never take a
// tolerance from the caller.
#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hysmax/config.hpp"
#include "hysmax/point_hysteresis.hpp"

namespace hysmax::validation {

// Point model
inline constexpr double kBranchOracleTol = 1e-6;        // relative to loop max |P|
inline constexpr double kBranchAmplitude = 1e7;         // V/m, deep saturation
inline constexpr std::size_t kBranchSamplesPerAmplitude = 2000;
inline constexpr double kSaturationAmplitude = 2e6;     // V/m
inline constexpr double kSaturationTol = 5e-3;          // relative to alpha / xi
inline constexpr double kRateIndependenceTol = 1e-6;    // relative, normalized loop plane
inline constexpr double kPointRuntimeLimit = 1.0;       // s

// Yee solver
inline constexpr double kResonanceTol = 0.02;
inline constexpr double kDivBFactor = 1e-12;            // max|div B| <= k max|B| / dx
inline constexpr double kEnergyDriftTol = 1e-9;
inline constexpr std::size_t kYeeSteps = 100000;
inline constexpr double kYeeRuntimeLimit = 120.0;       // s

// Static interface
inline constexpr double kStaticEpsR = 4.0;
inline constexpr double kStaticTol = 0.05;

// Cavity with the hysteretic cylinder
inline constexpr double kRestEquivalenceTol = 0.01;
inline constexpr double kRestRuntimeLimit = 300.0;      // s
inline constexpr double kNoiseFloorFactor = 1e3;
inline constexpr double kLinearityTol = 0.05;
inline constexpr double kRotationLoopTol = 0.01;
inline constexpr double kSchemeTol = 0.005;
inline constexpr std::size_t kSchemeWindowSteps = 40000;

// Consistency report on the full-scale configuration
inline constexpr double kOmegaExpected = 156.77;        // rad/s
inline constexpr double kOmegaTol = 0.005;
inline constexpr double kCyclesExpected = 10.02;
inline constexpr double kCyclesTol = 0.005;

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // space-separated key=value pairs
  double seconds = 0.0;
};

struct SuiteConfig {
  AppConfig paper;   // full scale: 250 Hz, 1497 rpm
  AppConfig scaled;  // drive and rotation scaled by 1e4
};

/// The full-scale cavity rotating at 1497 rpm under a 250 Hz drive.
AppConfig paper_rotating_config();
/// The jointly scaled surrogate (k = 1e4), rotating, one revolution.
AppConfig scaled_config();
SuiteConfig default_suite();

CheckResult check_branch_oracle(const ChannelParams& params = ChannelParams::paper_pe());
CheckResult check_saturation(const ChannelParams& params = ChannelParams::paper_pe());
CheckResult check_rate_independence(const ChannelParams& params = ChannelParams::paper_pe());
CheckResult check_yee(const AppConfig& cfg);
CheckResult check_static_dielectric(const AppConfig& cfg);
CheckResult check_consistency(const AppConfig& paper);

/// rest_equivalence and rotating_surrogate share their runs: rest, rotating
/// and half rotation, each over one revolution of the scaled config.
std::vector<CheckResult> check_cavity(const AppConfig& scaled);

/// Semi-implicit against lagged, probe traces over the first
/// kSchemeWindowSteps steps of the given (paper) config.
CheckResult check_scheme(const AppConfig& paper);

/// Names of every check, in suite order.
std::vector<std::string> check_names();

/// Run the suite. A non-empty `only` restricts it to the named checks (rest_equivalence and
/// rotating_surrogate always run together). A check that throws is
/// reported as failed.
std::vector<CheckResult> run_suite(const SuiteConfig& suite,
                                   const std::function<void(const CheckResult&)>& on_result = {},
                                   const std::vector<std::string>& only = {});

// Helpers, exposed for unit tests.

/// Closed-form pe response along a piecewise monotone drive starting from
/// the virgin state. Requires kappa == theta (frozen branches).
std::vector<double> branch_oracle(std::span<const double> E, const ChannelParams& params,
                                  const PhysicalConstants& consts = kSI);

/// Resample a planar polyline at n points equally spaced in arc length.
std::vector<std::array<double, 2>> resample_arclength(std::span<const std::array<double, 2>> pts,
                                                      std::size_t n);

/// Symmetric Hausdorff distance between two polylines (point to segment).
double hausdorff(std::span<const std::array<double, 2>> a, std::span<const std::array<double, 2>> b);

/// max |a - b| / max |a|; 0 when both are identically zero.
double max_rel_diff(std::span<const double> a, std::span<const double> b);

}  // namespace hysmax::validation
