// Empty-cavity eigenfrequency scan.
#pragma once

#include <cstdint>
#include <vector>

#include "hysmax/constants.hpp"
#include "hysmax/yee_grid.hpp"

namespace hysmax {

struct ResonanceOptions {
  std::size_t steps = 16384;
  std::uint64_t seed = 20240611;
  double f_min = 5e6;         // Hz
  double f_max = 100e6;       // Hz
  double threshold = 0.05;    // peaks below this fraction of the strongest are dropped
  std::size_t zero_pad = 8;   // FFT length multiplier
  double max_resolution = 0;  // Hz; when > 0, 1/(steps dt) must not exceed it
};

struct ResonanceResult {
  std::vector<double> peaks;  // Hz, ascending
  double resolution = 0.0;    // 1/(steps dt), Hz
  std::vector<double> trace;  // probe Ez per step
};

/// Seed the empty cavity with random E, let it ring, and pick spectral peaks
/// of Ez at the node column nearest the cavity centre (Hann window, zero
/// padding, parabolic interpolation). Throws std::invalid_argument when the
/// run is too short for `max_resolution`.
ResonanceResult resonance_scan(const GridSpec& g, const ResonanceOptions& opts = {},
                               const PhysicalConstants& consts = kSI);

/// Peak frequencies of a uniformly sampled signal in [f_min, f_max].
std::vector<double> spectral_peaks(const std::vector<double>& signal, double dt, double f_min,
                                   double f_max, double threshold, std::size_t zero_pad);

/// f_mnp = (c/2) sqrt((m/a)^2 + (n/b)^2 + (p/d)^2).
double cavity_mode_frequency(int m, int n, int p, double a, double b, double d,
                             const PhysicalConstants& consts = kSI);

}  // namespace hysmax
