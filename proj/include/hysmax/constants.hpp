#pragma once

namespace hysmax {

/// SI vacuum constants. mu0 and eps0 satisfy mu0 = 1/(c^2 eps0) to ~1e-10.
struct PhysicalConstants {
  double eps0 = 8.8541878128e-12;  // F/m
  double mu0 = 1.25663706212e-6;   // H/m
  double c = 2.99792458e8;         // m/s
};

inline constexpr PhysicalConstants kSI{};

}  // namespace hysmax
