// Text configuration: one `section.key = value` per line, `#` starts a comment.
//
//   grid.nx = 20                     material.omega_rpm = 1497
//   source.frequency = 250           probes.p0 = 2.45, 2.45, 1.36
//
// Unknown keys are errors. Keys under `meta.` are accepted and ignored so a
// run's metadata sidecar can be fed back in unchanged.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hysmax/cavity_sim.hpp"

namespace hysmax {

struct PointLoopSpec {
  double amplitude = 2e6;              // V/m
  double frequency = 250.0;            // Hz
  double periods = 5.0;
  std::size_t steps_per_period = 2000;
};

struct OutputSpec {
  std::string dir = "out";
  std::string prefix = "run";
  bool snapshot = false;
};

struct AppConfig {
  RunConfig run;
  double omega_rpm = 0.0;
  PointLoopSpec point;
  OutputSpec output;

  /// Push derived values (omega in rad/s) into `run`. Idempotent.
  void resolve();
  bool operator==(const AppConfig& other) const;
};

/// The full-scale cavity at rest with the built-in probe, 250 Hz drive.
AppConfig default_config();

/// Parse a config stream on top of the built-in defaults (no probes).
/// Throws ConfigError with the line number on malformed or unknown input.
AppConfig parse_config(std::istream& in, std::string_view origin = "<config>");
AppConfig load_config(const std::filesystem::path& path);

/// Apply one `key=value` override.
void apply_override(AppConfig& cfg, std::string_view assignment);

/// Every known fixed key, in serialization order.
std::vector<std::string> known_keys();

/// The resolved configuration in the same text format. When `report` is given
/// the derived quantities are appended as meta.* lines.
std::string serialize_config(const AppConfig& cfg, const ConsistencyReport* report = nullptr,
                             std::string_view version = {});

/// Shortest round-trip text for a double ("inf", "-inf", "nan" for non-finite).
std::string format_double(double v);

}  // namespace hysmax
