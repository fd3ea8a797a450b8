#include <doctest.h>

#include <cmath>
#include <random>

#include "hysmax/errors.hpp"
#include "hysmax/rotating_medium.hpp"

using namespace hysmax;

namespace {

const ChannelParams kPe = ChannelParams::paper_pe();

CylinderSpec paper_cylinder(double omega) {
  CylinderSpec c;
  c.omega = omega;
  return c;
}

void randomize(Array3& a, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : a.values()) v = u(rng);
}

// Omega (y d/dx - x d/dy) f written out site by site.
double naive_advect(const Array3& f, const Array3& support, const GridSpec& g, const MaterialMap& map,
                    Component c, double omega, std::size_t i, std::size_t j, std::size_t k) {
  auto in = [&](long a, long b) {
    return a >= 0 && b >= 0 && a < static_cast<long>(f.nx()) && b < static_cast<long>(f.ny()) &&
           support(static_cast<std::size_t>(a), static_cast<std::size_t>(b), k) > 0.0;
  };
  const long I = static_cast<long>(i), J = static_cast<long>(j);
  if (!in(I, J)) return 0.0;
  auto val = [&](long a, long b) { return f(static_cast<std::size_t>(a), static_cast<std::size_t>(b), k); };
  double fx = 0.0, fy = 0.0;
  if (in(I - 1, J) && in(I + 1, J)) fx = (val(I + 1, J) - val(I - 1, J)) / (2 * g.dx());
  else if (in(I + 1, J)) fx = (val(I + 1, J) - val(I, J)) / g.dx();
  else if (in(I - 1, J)) fx = (val(I, J) - val(I - 1, J)) / g.dx();
  if (in(I, J - 1) && in(I, J + 1)) fy = (val(I, J + 1) - val(I, J - 1)) / (2 * g.dy());
  else if (in(I, J + 1)) fy = (val(I, J + 1) - val(I, J)) / g.dy();
  else if (in(I, J - 1)) fy = (val(I, J) - val(I, J - 1)) / g.dy();
  const Vec3 p = g.position(c, i, j, k);
  const double x = p[0] - map.spec.center_x, y = p[1] - map.spec.center_y;
  return omega * (y * fx - x * fy);
}

// Root of eps0 r + chi r = drive by bisection.
double bisect_rate(double drive, double chi) {
  double lo = -std::abs(drive) / kSI.eps0 - 1.0, hi = std::abs(drive) / kSI.eps0 + 1.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kSI.eps0 * mid + chi * mid - drive > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("bump weight") {
  const double R = 1.36, w = 0.13625;
  CHECK(bump_weight(0.0, R, w) == 1.0);
  CHECK(bump_weight(R, R, w) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bump_weight(R + w, R, w) == 0.0);
  CHECK(bump_weight(R - w, R, w) == 1.0);
  double prev = 1.0;
  for (double r = 0.0; r < 2.0; r += 0.01) {
    const double v = bump_weight(r, R, w);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(bump_weight(1.0, R, 0.0), std::invalid_argument);
}

TEST_CASE("material map") {
  const GridSpec g = GridSpec::paper();
  const MaterialMap m = MaterialMap::build(g, paper_cylinder(0.0));
  CHECK(m.width == doctest::Approx(0.5 * g.dx()));
  CHECK(m.w_ez(10, 10, 3) == 1.0);
  CHECK(m.w_ez(0, 0, 0) == 0.0);
  CHECK(m.w_ez(20, 10, 0) == 0.0);
  SUBCASE("rim speed gate") {
    // (omega R / c)^2 > 1e-3
    CHECK_THROWS_AS(MaterialMap::build(g, paper_cylinder(8e6)), ConfigError);
    CHECK_NOTHROW(MaterialMap::build(g, paper_cylinder(1.5677e6)));
  }
  SUBCASE("cylinder must fit") {
    CylinderSpec c = paper_cylinder(0.0);
    c.radius = 2.8;
    CHECK_THROWS_AS(MaterialMap::build(g, c), ConfigError);
  }
}

TEST_CASE("advect_phi") {
  const GridSpec g = GridSpec::paper();
  const double omega = 156.77;
  const MaterialMap map = MaterialMap::build(g, paper_cylinder(omega));
  const Array3 none;

  SUBCASE("f = x gives omega y") {
    Array3 f = g.make(Component::Ez);
    for (std::size_t i = 0; i < f.nx(); ++i)
      for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t k = 0; k < f.nz(); ++k) f(i, j, k) = map.rel_xy(g, Component::Ez, i, j)[0];
    const Array3 a = advect_phi(f, Component::Ez, omega, g, map, none);
    for (std::size_t i = 0; i < f.nx(); ++i)
      for (std::size_t j = 0; j < f.ny(); ++j)
        CHECK(a(i, j, 2) == doctest::Approx(omega * map.rel_xy(g, Component::Ez, i, j)[1]).epsilon(1e-12));
  }
  SUBCASE("axisymmetric field") {
    Array3 f = g.make(Component::Ez);
    for (std::size_t i = 0; i < f.nx(); ++i)
      for (std::size_t j = 0; j < f.ny(); ++j) {
        const auto [x, y] = map.rel_xy(g, Component::Ez, i, j);
        for (std::size_t k = 0; k < f.nz(); ++k) f(i, j, k) = x * x + y * y;
      }
    const Array3 a = advect_phi(f, Component::Ez, omega, g, map, none);
    for (std::size_t i = 1; i + 1 < f.nx(); ++i)
      for (std::size_t j = 1; j + 1 < f.ny(); ++j) CHECK(std::abs(a(i, j, 0)) <= 1e-9);
  }
  SUBCASE("random field against a site-by-site loop") {
    std::mt19937 rng(21);
    for (auto [c, w] : {std::pair{Component::Ez, &map.w_ez}, std::pair{Component::Hx, &map.w_hx},
                        std::pair{Component::Hy, &map.w_hy}}) {
      Array3 f = g.make(c);
      randomize(f, rng);
      const Array3 a = advect_phi(f, c, omega, g, map, *w);
      for (std::size_t i = 0; i < f.nx(); ++i)
        for (std::size_t j = 0; j < f.ny(); ++j)
          for (std::size_t k = 0; k < f.nz(); ++k)
            CHECK(a(i, j, k) == doctest::Approx(naive_advect(f, *w, g, map, c, omega, i, j, k)).epsilon(1e-14));
    }
  }
  SUBCASE("zero rotation") {
    Array3 f = g.make(Component::Ez);
    f.fill(3.0);
    CHECK(advect_phi(f, Component::Ez, 0.0, g, map, none).max_abs() == 0.0);
  }
}

TEST_CASE("hatted combinations") {
  CHECK(e3_hat_value(1.0, 1.0, 2.0, 156.77, 0.2725, 0.5450) ==
        doctest::Approx(1.0 - 156.77 * (0.2725 * 1.0 + 0.5450 * 2.0)).epsilon(1e-14));
  CHECK(e3_hat_value(5.0, 1.0, 2.0, 0.0, 0.3, 0.4) == 5.0);
  CHECK(e3_hat_value(5.0, 1.0, 2.0, 100.0, 0.0, 0.0) == 5.0);
  CHECK(P3_hat_value(0.1, 3.0, 4.0, 0.0, 0.3, 0.4) == 0.1);
  CHECK(P3_hat_value(0.1, 3.0, 4.0, 1e6, 0.3, 0.4) ==
        doctest::Approx(0.1 - 1e6 / (kSI.c * kSI.c) * (0.9 + 1.6)).epsilon(1e-15));

  const GridSpec g = GridSpec::paper();
  const MaterialMap map = MaterialMap::build(g, paper_cylinder(156.77));
  std::mt19937 rng(22);
  Array3 Ez = g.make(Component::Ez), Bx = Ez, By = Ez, Pz = Ez, Mx = Ez, My = Ez;
  for (Array3* a : {&Ez, &Bx, &By, &Pz, &Mx, &My}) randomize(*a, rng);
  const HatFields rest = hat_fields(Ez, Bx, By, Pz, Mx, My, 0.0, g, map);
  CHECK(rest.e3_hat == Ez);
  CHECK(rest.P3_hat == Pz);
  const HatFields h = hat_fields(Ez, Bx, By, Pz, Mx, My, 156.77, g, map);
  // the Ez site (10, 10) sits on the axis
  for (std::size_t k = 0; k < g.nz; ++k) {
    CHECK(h.e3_hat(10, 10, k) == Ez(10, 10, k));
    CHECK(h.P3_hat(10, 10, k) == Pz(10, 10, k));
  }
  CHECK(h.e3_hat(12, 13, 1) != Ez(12, 13, 1));
}

TEST_CASE("co-moving rate") {
  const GridSpec g = GridSpec::paper();
  const double omega = 1.5677e6;
  const MaterialMap map = MaterialMap::build(g, paper_cylinder(omega));
  std::mt19937 rng(23);
  Array3 Ed = g.make(Component::Ez), Bdx = Ed, Bdy = Ed, Ez = Ed;
  for (Array3* a : {&Ed, &Bdx, &Bdy, &Ez}) randomize(*a, rng);

  CHECK(e3_rate(Ed, Bdx, Bdy, Ez, 0.0, g, map) == Ed);

  const Array3 r = e3_rate(Ed, Bdx, Bdy, Ez, omega, g, map);
  for (std::size_t i = 0; i < r.nx(); ++i)
    for (std::size_t j = 0; j < r.ny(); ++j)
      for (std::size_t k = 0; k < r.nz(); ++k) {
        const auto [x, y] = map.rel_xy(g, Component::Ez, i, j);
        const double ref = Ed(i, j, k) - omega * (y * Bdy(i, j, k) + x * Bdx(i, j, k)) -
                           naive_advect(Ez, map.w_ez, g, map, Component::Ez, omega, i, j, k);
        CHECK(r(i, j, k) == doctest::Approx(ref).epsilon(1e-13).scale(std::abs(omega)));
      }

  Array3 zero = g.make(Component::Ez);
  Array3 uniform = zero;
  uniform.fill(2.0);
  CHECK(e3_rate(zero, zero, zero, uniform, omega, g, map).max_abs() == 0.0);
}

TEST_CASE("solve_Ez_rate") {
  const double sigma = 2.6e-4, w = 1.0;
  SUBCASE("psi-hat zero is a plain Maxwell update") {
    const EzSolve s = solve_Ez_rate(3.0, 1e3, 0.0, 5.0, 0.0, sigma, w, kPe);
    const double rhs = 3.0 - sigma * 1e3;
    CHECK(s.Edot_z == doctest::Approx((rhs + kSI.eps0 * 5.0) / kSI.eps0 - 5.0).epsilon(1e-14));
    CHECK(s.Pdot_z == 0.0);
  }
  SUBCASE("zero drive gives the root at the origin") {
    const double K = 2.0;
    const double curl = -kSI.eps0 * K;
    const EzSolve s = solve_Ez_rate(curl, 0.0, 0.0, K, 1e-7, 0.0, w, kPe);
    CHECK(s.E3_hat_rate == 0.0);
    CHECK(s.s_e == 0);
    CHECK(s.Pdot_z == 0.0);
  }
  SUBCASE("active branch against bisection") {
    const double psi_hat = 3e-8, K = 1e3, curl = 0.4;
    const EzSolve s = solve_Ez_rate(curl, 1e3, 0.0, K, psi_hat, sigma, w, kPe);
    const double drive = curl - sigma * 1e3 + kSI.eps0 * K;
    REQUIRE(drive > 0.0);
    CHECK(s.s_e == 1);
    const double ref = bisect_rate(drive, psi_hat);
    CHECK(std::abs(s.E3_hat_rate - ref) <= 1e-12 * std::abs(ref));
    CHECK(s.E3_hat_rate == doctest::Approx(drive / (kSI.eps0 + psi_hat)).epsilon(1e-14));
    // both equations hold together
    const double res = kSI.eps0 * s.Edot_z - (curl - sigma * 1e3 - s.Pdot_z);
    CHECK(std::abs(res) <= 1e-12 * std::abs(curl));
  }
  SUBCASE("forced branch") {
    const EzSolve s = solve_Ez_rate(0.4, 0.0, 0.0, 0.0, 3e-8, 0.0, w, kPe, kSI, -1);
    CHECK(s.s_e == -1);
    CHECK(s.drive_sign == 1);
    CHECK(s.Pdot_z == 0.0);
  }
  SUBCASE("negative susceptibility is rejected") {
    ChannelParams p = kPe;
    p.kappa = 0.1;
    CHECK_THROWS_AS(solve_Ez_rate(0.4, 0.0, 0.0, 0.0, 3e-8, 0.0, w, p), NumericalError);
  }
}

TEST_CASE("branch_increment") {
  SUBCASE("follows the closed-form branch") {
    const double d = branch_increment(0.0, 0.0, 2e6, 1, kPe);
    const double ref = branch_solution(2e6, 0.0, 0.0, 1, 1, kPe);
    CHECK(std::abs(d - ref) <= 1e-8 * std::abs(ref));
  }
  SUBCASE("frozen then active across a psi crossing") {
    // psi > 0 and falling E: nothing moves until E = 0, then the descending branch
    const double d = branch_increment(5e5, 0.0, -1e6, -1, kPe);
    const double ref = branch_solution(-5e5, 0.0, 0.0, -1, -1, kPe);
    CHECK(std::abs(d - ref) <= 1e-8 * std::abs(ref));
  }
  SUBCASE("zero path") { CHECK(branch_increment(1e5, 0.1, 0.0, 1, kPe) == 0.0); }
}

TEST_CASE("solve_Ez_step") {
  const double sigma = 2.6e-4, dt = 2.624e-10;
  SUBCASE("both equations hold") {
    std::mt19937 rng(24);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 200; ++n) {
      const double curl = 5.0 * u(rng), Ez = 1e6 * u(rng), Pz = 0.2 * u(rng), K = 1e14 * u(rng);
      const double w = 0.5 + 0.5 * std::abs(u(rng));
      const EzSolve s = solve_Ez_step(curl, Ez, 0.0, K, Ez, Pz, sigma, w, dt, kPe);
      const double rhs = curl - w * sigma * Ez;
      // same piece count as the solver, so the increment is reproduced up to rounding
      const double dp = branch_increment(Ez, Pz, dt * s.E3_hat_rate, s.s_e, kPe, kSI, s.pieces);
      CHECK(std::abs(s.Pdot_z - w * dp / dt) <= 1e-12 * std::abs(rhs + kSI.eps0 * K) + 1e-300);
      const double res = kSI.eps0 * s.Edot_z - (rhs - s.Pdot_z);
      CHECK(std::abs(res) <= 1e-12 * (std::abs(rhs) + kSI.eps0 * std::abs(K)));
      CHECK(s.s_e == sgn(rhs + kSI.eps0 * K));
    }
  }
  SUBCASE("reduces to solve_Ez_rate for a vanishing step") {
    const EzSolve a = solve_Ez_step(0.4, 2e4, 0.0, 0.0, 2e4, 0.0, sigma, 1.0, 1e-25, kPe);
    const EzSolve b = solve_Ez_rate(0.4, 2e4, 0.0, 0.0, psi(kPe, 2e4, 0.0), sigma, 1.0, kPe);
    CHECK(a.Edot_z == doctest::Approx(b.Edot_z).epsilon(1e-9));
  }
  SUBCASE("single cell follows the point model") {
    // one cell with a sinusoidal curl H; the recorded Ez history drives the point model
    const double f = 2.5e6, amp = 2.0;
    const int steps = static_cast<int>(4.0 / (f * dt));
    std::vector<double> t{0.0}, E{0.0}, P{0.0};
    double Ez = 0.0, Pz = 0.0;
    for (int n = 0; n < steps; ++n) {
      const double curl = amp * std::sin(2 * M_PI * f * (n + 0.5) * dt);
      const EzSolve s = solve_Ez_step(curl, Ez, 0.0, 0.0, Ez, Pz, 0.0, 1.0, dt, kPe);
      Ez += dt * s.Edot_z;
      Pz += dt * s.Pdot_z;
      t.push_back((n + 1) * dt);
      E.push_back(Ez);
      P.push_back(Pz);
    }
    const PointTrace ref = run_samples(t, E, ChannelSet::pe_only(kPe));
    REQUIRE(ref.rows.size() == P.size());
    double pmax = 0.0, err = 0.0;
    for (std::size_t n = 0; n < P.size(); ++n) {
      pmax = std::max(pmax, std::abs(ref.rows[n].P));
      err = std::max(err, std::abs(ref.rows[n].P - P[n]));
    }
    REQUIRE(pmax > 0.0);
    CHECK(err <= 0.01 * pmax);
  }
}

TEST_CASE("magnetization sources") {
  const GridSpec g = GridSpec::paper();
  const double omega = 1.5677e6;
  const MaterialMap map = MaterialMap::build(g, paper_cylinder(omega));
  const MaterialMap half = MaterialMap::build(g, paper_cylinder(0.5 * omega));
  const MaterialMap rest = MaterialMap::build(g, paper_cylinder(0.0));
  std::mt19937 rng(25);
  Array3 Ez = g.make(Component::Ez), Pz = Ez, Ed = Ez;
  randomize(Ez, rng, 1e6);
  randomize(Pz, rng, 0.2);
  randomize(Ed, rng, 1e13);
  const MediumState m = MediumState::zeros(g);

  CHECK(magnetization_drive(1e5, 0.0, 2.0, kPe) ==
        doctest::Approx(kPe.kappa * std::abs(psi(kPe, 1e5, 0.0)) * 2.0 + kPe.theta * psi(kPe, 1e5, 0.0) * 2.0));

  const MagnetizationRates a = magnetization_rates(m, Ez, Pz, Ed, map, g, kPe);
  const MagnetizationRates b = magnetization_rates(m, Ez, Pz, Ed, half, g, kPe);
  const MagnetizationRates z = magnetization_rates(m, Ez, Pz, Ed, rest, g, kPe);
  CHECK(z.Mx_dot.max_abs() == 0.0);
  CHECK(z.My_dot.max_abs() == 0.0);
  CHECK(a.Mx_dot.max_abs() > 0.0);
  for (std::size_t n = 0; n < a.Mx_dot.size(); ++n) CHECK(a.Mx_dot.values()[n] == 2.0 * b.Mx_dot.values()[n]);
  for (std::size_t n = 0; n < a.My_dot.size(); ++n) CHECK(a.My_dot.values()[n] == 2.0 * b.My_dot.values()[n]);
  for (std::size_t n = 0; n < a.Mx_dot.size(); ++n)
    if (map.w_hx.values()[n] == 0.0) CHECK(a.Mx_dot.values()[n] == 0.0);
}

TEST_CASE("update_medium keeps the support") {
  const GridSpec g = GridSpec::paper();
  const MaterialMap map = MaterialMap::build(g, paper_cylinder(1e3));
  MediumState m = MediumState::zeros(g);
  Array3 pd = g.make(Component::Ez);
  pd.fill(1.0);
  MagnetizationRates r{g.make(Component::Hx), g.make(Component::Hy)};
  r.Mx_dot.fill(2.0);
  r.My_dot.fill(3.0);
  update_medium(m, pd, r, 0.5, map);
  for (std::size_t n = 0; n < m.Pz.size(); ++n)
    CHECK(m.Pz.values()[n] == (map.w_ez.values()[n] == 0.0 ? 0.0 : 0.5));
  for (std::size_t n = 0; n < m.Mx.size(); ++n)
    CHECK(m.Mx.values()[n] == (map.w_hx.values()[n] == 0.0 ? 0.0 : 1.0));
  pd(10, 10, 2) = NAN;
  CHECK_THROWS_AS(update_medium(m, pd, r, 0.5, map), NumericalError);
}
