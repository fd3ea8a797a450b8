// Electrostatic check of the bump-weighted cylinder interface.
//
// A uniform field applied across an infinite dielectric cylinder leaves a
// uniform interior field of 2 / (eps_r + 1) times the applied one. The check
// solves div(eps grad phi) = 0 on the x-y node lattice of the cavity grid,
// with edge permittivities eps0 (1 + (eps_r - 1) w) taken from the same bump
// weights the time-domain solver uses.
//
// A closed PEC box cannot hold a uniform static transverse field, so the
// lattice is extended outward (same spacing, same node alignment) until the
// outer boundary is at least `padding_radii` cylinder radii from the axis,
// where phi = -E0 (x - xc) is imposed.
#pragma once

#include <cstddef>

#include "hysmax/rotating_medium.hpp"
#include "hysmax/yee_grid.hpp"

namespace hysmax {

struct StaticCheckOptions {
  double padding_radii = 8.0;
  double tolerance = 1e-12;  // CG relative residual
  std::size_t max_iterations = 20000;
};

struct StaticCheckResult {
  double ratio = 0.0;            // mean |E| inside / applied
  double analytic = 0.0;         // 2 / (eps_r + 1)
  std::size_t interior_nodes = 0;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Throws NumericalError if the linear solve does not converge and
/// std::invalid_argument if eps_r < 1 or no node has unit weight.
StaticCheckResult static_dielectric_check(double eps_r, const GridSpec& g, const CylinderSpec& cyl,
                                          const StaticCheckOptions& opts = {});

}  // namespace hysmax
