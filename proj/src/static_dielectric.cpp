#include "hysmax/static_dielectric.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hysmax/errors.hpp"

namespace hysmax {

StaticCheckResult static_dielectric_check(double eps_r, const GridSpec& g, const CylinderSpec& cyl,
                                          const StaticCheckOptions& opts) {
  if (!(eps_r >= 1.0)) throw std::invalid_argument("static_dielectric_check: eps_r must be >= 1");
  g.validate();
  const double dx = g.dx(), dy = g.dy();
  const double width = cyl.effective_width(g);
  const double reach = opts.padding_radii * cyl.radius;

  // Node lattice x_i = origin + i dx, extended in both directions.
  const auto first = [&](double o, double c, double h) {
    return static_cast<long>(std::floor((c - reach - o) / h)) - 1;
  };
  const auto last = [&](double o, double c, double h) {
    return static_cast<long>(std::ceil((c + reach - o) / h)) + 1;
  };
  const long i0 = first(g.origin[0], cyl.center_x, dx), i1 = last(g.origin[0], cyl.center_x, dx);
  const long j0 = first(g.origin[1], cyl.center_y, dy), j1 = last(g.origin[1], cyl.center_y, dy);
  const long nxn = i1 - i0 + 1, nyn = j1 - j0 + 1;
  auto xnode = [&](long i) { return g.origin[0] + static_cast<double>(i0 + i) * dx; };
  auto ynode = [&](long j) { return g.origin[1] + static_cast<double>(j0 + j) * dy; };
  auto weight = [&](double x, double y) {
    return bump_weight(std::hypot(x - cyl.center_x, y - cyl.center_y), cyl.radius, width);
  };
  auto eps_at = [&](double x, double y) { return 1.0 + (eps_r - 1.0) * weight(x, y); };

  // Relative permittivity on x-edges (i+1/2, j) and y-edges (i, j+1/2).
  std::vector<double> ex(static_cast<std::size_t>((nxn - 1) * nyn));
  std::vector<double> ey(static_cast<std::size_t>(nxn * (nyn - 1)));
  auto ix = [&](long i, long j) { return static_cast<std::size_t>(i * nyn + j); };
  auto iy = [&](long i, long j) { return static_cast<std::size_t>(i * (nyn - 1) + j); };
  for (long i = 0; i + 1 < nxn; ++i)
    for (long j = 0; j < nyn; ++j) ex[ix(i, j)] = eps_at(xnode(i) + 0.5 * dx, ynode(j));
  for (long i = 0; i < nxn; ++i)
    for (long j = 0; j + 1 < nyn; ++j) ey[iy(i, j)] = eps_at(xnode(i), ynode(j) + 0.5 * dy);

  const double E0 = 1.0;
  auto boundary_phi = [&](long i) { return -E0 * (xnode(i) - cyl.center_x); };
  const long mx = nxn - 2, my = nyn - 2;  // unknowns on interior nodes
  auto unk = [&](long i, long j) { return (i - 1) * my + (j - 1); };
  auto on_boundary = [&](long i, long j) { return i == 0 || j == 0 || i == nxn - 1 || j == nyn - 1; };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * mx * my));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mx * my);
  const double cx = 1.0 / (dx * dx), cy = 1.0 / (dy * dy);
  for (long i = 1; i < nxn - 1; ++i)
    for (long j = 1; j < nyn - 1; ++j) {
      const long row = unk(i, j);
      const struct {
        long i, j;
        double c;
      } nb[4] = {{i + 1, j, ex[ix(i, j)] * cx},
                 {i - 1, j, ex[ix(i - 1, j)] * cx},
                 {i, j + 1, ey[iy(i, j)] * cy},
                 {i, j - 1, ey[iy(i, j - 1)] * cy}};
      double diag = 0.0;
      for (const auto& n : nb) {
        diag += n.c;
        if (on_boundary(n.i, n.j)) rhs[row] += n.c * boundary_phi(n.i);
        else trip.emplace_back(row, unk(n.i, n.j), -n.c);
      }
      trip.emplace_back(row, row, diag);
    }
  Eigen::SparseMatrix<double> A(mx * my, mx * my);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opts.tolerance);
  cg.setMaxIterations(static_cast<Eigen::Index>(opts.max_iterations));
  cg.compute(A);
  const Eigen::VectorXd phi_in = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    throw NumericalError("static_dielectric_check: CG did not converge (residual " +
                         std::to_string(cg.error()) + ")");
  }
  auto phi = [&](long i, long j) { return on_boundary(i, j) ? boundary_phi(i) : phi_in[unk(i, j)]; };

  StaticCheckResult res;
  res.analytic = 2.0 / (eps_r + 1.0);
  res.iterations = static_cast<std::size_t>(cg.iterations());
  res.residual = cg.error();
  double sum = 0.0;
  for (long i = 1; i < nxn - 1; ++i)
    for (long j = 1; j < nyn - 1; ++j) {
      if (weight(xnode(i), ynode(j)) < 1.0) continue;
      const double Ex = -0.5 * ((phi(i + 1, j) - phi(i, j)) + (phi(i, j) - phi(i - 1, j))) / dx;
      const double Ey = -0.5 * ((phi(i, j + 1) - phi(i, j)) + (phi(i, j) - phi(i, j - 1))) / dy;
      sum += std::hypot(Ex, Ey);
      ++res.interior_nodes;
    }
  if (res.interior_nodes == 0) throw std::invalid_argument("static_dielectric_check: no fully interior nodes");
  res.ratio = sum / static_cast<double>(res.interior_nodes) / E0;
  return res;
}

}  // namespace hysmax
