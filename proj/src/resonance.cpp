#include "hysmax/resonance.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hysmax/cavity_sim.hpp"

namespace hysmax {

double cavity_mode_frequency(int m, int n, int p, double a, double b, double d,
                             const PhysicalConstants& consts) {
  const double q = (m / a) * (m / a) + (n / b) * (n / b) + (p / d) * (p / d);
  return 0.5 * consts.c * std::sqrt(q);
}

std::vector<double> spectral_peaks(const std::vector<double>& signal, double dt, double f_min,
                                   double f_max, double threshold, std::size_t zero_pad) {
  const std::size_t n = signal.size();
  if (n < 8) throw std::invalid_argument("spectral_peaks: signal too short");
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);

  std::size_t nfft = 1;
  while (nfft < n * std::max<std::size_t>(zero_pad, 1)) nfft <<= 1;
  std::vector<double> in(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(n - 1));
    in[i] = (signal[i] - mean) * w;
  }
  std::vector<std::complex<double>> out(nfft / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double df = 1.0 / (static_cast<double>(nfft) * dt);
  std::vector<double> mag(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) mag[k] = std::abs(out[k]);
  const auto k_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(f_min / df)));
  const auto k_hi = std::min(out.size() - 2, static_cast<std::size_t>(std::floor(f_max / df)));
  double top = 0.0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) top = std::max(top, mag[k]);

  std::vector<double> peaks;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    if (mag[k] < threshold * top || mag[k] <= mag[k - 1] || mag[k] < mag[k + 1]) continue;
    const double a = mag[k - 1], b = mag[k], c = mag[k + 1];
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    peaks.push_back((static_cast<double>(k) + shift) * df);
  }
  return peaks;
}

ResonanceResult resonance_scan(const GridSpec& g, const ResonanceOptions& opts,
                               const PhysicalConstants& consts) {
  RunConfig cfg;
  cfg.grid = g;
  cfg.material.enabled = false;
  cfg.source.amplitude = 0.0;
  Simulation sim(cfg, consts);

  ResonanceResult res;
  res.resolution = 1.0 / (static_cast<double>(opts.steps) * sim.dt());
  if (opts.max_resolution > 0.0 && res.resolution > opts.max_resolution) {
    throw std::invalid_argument("resonance_scan: duration too short for the requested resolution");
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EdgeField E0 = EdgeField::zeros(g);
  for (Array3* c : {&E0.x, &E0.y, &E0.z})
    for (double& v : c->values()) v = u(rng);
  sim.set_initial_E(E0);

  const std::array<std::size_t, 3> site{g.nx / 2, g.ny / 2, g.nz / 2};
  res.trace.reserve(opts.steps);
  for (std::size_t s = 0; s < opts.steps; ++s) {
    sim.step();
    res.trace.push_back(sim.E().z(site[0], site[1], site[2]));
  }
  res.peaks = spectral_peaks(res.trace, sim.dt(), opts.f_min, opts.f_max, opts.threshold, opts.zero_pad);
  return res;
}

}  // namespace hysmax
