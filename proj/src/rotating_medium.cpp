#include "hysmax/rotating_medium.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hysmax/errors.hpp"

namespace hysmax {

namespace {

Array3 sample_weight(const GridSpec& g, Component c, const CylinderSpec& s, double width) {
  Array3 w = g.make(c);
  for (std::size_t i = 0; i < w.nx(); ++i)
    for (std::size_t j = 0; j < w.ny(); ++j) {
      const Vec3 p = g.position(c, i, j, 0);
      const double r = std::hypot(p[0] - s.center_x, p[1] - s.center_y);
      const double v = bump_weight(r, s.radius, width);
      for (std::size_t k = 0; k < w.nz(); ++k) w(i, j, k) = v;
    }
  return w;
}

bool inside(const Array3& support, std::size_t i, std::size_t j, std::size_t k) {
  return support.size() == 0 || support(i, j, k) > 0.0;
}

void require_ez(const Array3& a, const GridSpec& g, const char* what) {
  const auto s = g.shape(Component::Ez);
  if (a.nx() != s[0] || a.ny() != s[1] || a.nz() != s[2]) {
    throw std::invalid_argument(std::string(what) + " must live on Ez sites");
  }
}

}  // namespace

double bump_weight(double r, double radius, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bump_weight: width must be positive");
  if (r <= radius - width) return 1.0;
  if (r >= radius + width) return 0.0;
  const double s = (radius + width - r) / (2.0 * width);
  return s * s * (3.0 - 2.0 * s);
}

double CylinderSpec::effective_width(const GridSpec& g) const {
  return transition_width > 0.0 ? transition_width : 0.5 * g.dx();
}

void CylinderSpec::validate(const GridSpec& g, const PhysicalConstants& consts) const {
  if (!enabled) return;
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("material: radius must be positive");
  if (!std::isfinite(center_x) || !std::isfinite(center_y)) {
    throw ConfigError("material: cylinder centre must be finite");
  }
  const double w = effective_width(g);
  if (w >= radius) throw ConfigError("material: transition_width must be smaller than radius");
  const double xlo = g.origin[0], xhi = g.origin[0] + g.lx;
  const double ylo = g.origin[1], yhi = g.origin[1] + g.ly;
  if (center_x - radius - w < xlo || center_x + radius + w > xhi || center_y - radius - w < ylo ||
      center_y + radius + w > yhi) {
    throw ConfigError("material: cylinder does not fit inside the cavity");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("material: sigma must be >= 0");
  if (!std::isfinite(omega)) throw ConfigError("material: omega must be finite");
  if (!(eps_r >= 0.0) || !std::isfinite(eps_r)) throw ConfigError("material: eps_r must be >= 0");
  const double beta = omega * radius / consts.c;
  if (beta * beta > 1e-3) {
    throw ConfigError("material: rim speed too high, (omega R / c)^2 = " + std::to_string(beta * beta) +
                      " exceeds 1e-3");
  }
}

MaterialMap MaterialMap::build(const GridSpec& g, const CylinderSpec& spec,
                               const PhysicalConstants& consts) {
  g.validate();
  spec.validate(g, consts);
  MaterialMap m;
  m.spec = spec;
  m.width = spec.effective_width(g);
  if (!spec.enabled) {
    m.w_ex = g.make(Component::Ex);
    m.w_ey = g.make(Component::Ey);
    m.w_ez = g.make(Component::Ez);
    m.w_hx = g.make(Component::Hx);
    m.w_hy = g.make(Component::Hy);
    return m;
  }
  m.w_ex = sample_weight(g, Component::Ex, spec, m.width);
  m.w_ey = sample_weight(g, Component::Ey, spec, m.width);
  m.w_ez = sample_weight(g, Component::Ez, spec, m.width);
  m.w_hx = sample_weight(g, Component::Hx, spec, m.width);
  m.w_hy = sample_weight(g, Component::Hy, spec, m.width);
  return m;
}

std::array<double, 2> MaterialMap::rel_xy(const GridSpec& g, Component c, std::size_t i,
                                          std::size_t j) const {
  const Vec3 p = g.position(c, i, j, 0);
  return {p[0] - spec.center_x, p[1] - spec.center_y};
}

MediumState MediumState::zeros(const GridSpec& g) {
  MediumState m;
  m.Pz = g.make(Component::Ez);
  m.Mx = g.make(Component::Hx);
  m.My = g.make(Component::Hy);
  m.s_psi.assign(m.Pz.size(), 0);
  m.s_e.assign(m.Pz.size(), 0);
  m.last_Edot_z = g.make(Component::Ez);
  return m;
}

Array3 advect_phi(const Array3& f, Component site, double omega, const GridSpec& g,
                  const MaterialMap& map, const Array3& support) {
  const auto shp = g.shape(site);
  if (f.nx() != shp[0] || f.ny() != shp[1] || f.nz() != shp[2]) {
    throw std::invalid_argument("advect_phi: array does not match its sub-lattice");
  }
  if (support.size() != 0 && !support.same_shape(f)) {
    throw std::invalid_argument("advect_phi: support shape mismatch");
  }
  Array3 out(f.nx(), f.ny(), f.nz());
  if (omega == 0.0) return out;
  const double dx = g.dx(), dy = g.dy();
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.ny(); ++j) {
      const auto [x, y] = map.rel_xy(g, site, i, j);
      for (std::size_t k = 0; k < f.nz(); ++k) {
        if (!inside(support, i, j, k)) continue;
        const bool xp = i + 1 < f.nx() && inside(support, i + 1, j, k);
        const bool xm = i > 0 && inside(support, i - 1, j, k);
        const bool yp = j + 1 < f.ny() && inside(support, i, j + 1, k);
        const bool ym = j > 0 && inside(support, i, j - 1, k);
        double fx = 0.0, fy = 0.0;
        if (xp && xm) fx = (f(i + 1, j, k) - f(i - 1, j, k)) / (2.0 * dx);
        else if (xp) fx = (f(i + 1, j, k) - f(i, j, k)) / dx;
        else if (xm) fx = (f(i, j, k) - f(i - 1, j, k)) / dx;
        if (yp && ym) fy = (f(i, j + 1, k) - f(i, j - 1, k)) / (2.0 * dy);
        else if (yp) fy = (f(i, j + 1, k) - f(i, j, k)) / dy;
        else if (ym) fy = (f(i, j, k) - f(i, j - 1, k)) / dy;
        out(i, j, k) = omega * (y * fx - x * fy);
      }
    }
  return out;
}

double e3_hat_value(double Ez, double Bx, double By, double omega, double x, double y) {
  return Ez - omega * (x * Bx + y * By);
}

double P3_hat_value(double Pz, double Mx, double My, double omega, double x, double y,
                    const PhysicalConstants& consts) {
  return Pz - omega / (consts.c * consts.c) * (x * Mx + y * My);
}

HatFields hat_fields(const Array3& Ez, const Array3& Bx, const Array3& By, const Array3& Pz,
                     const Array3& Mx, const Array3& My, double omega, const GridSpec& g,
                     const MaterialMap& map, const PhysicalConstants& consts) {
  for (const Array3* a : {&Ez, &Bx, &By, &Pz, &Mx, &My}) require_ez(*a, g, "hat_fields input");
  HatFields h{Ez, Pz};
  if (omega == 0.0) return h;
  for (std::size_t i = 0; i < Ez.nx(); ++i)
    for (std::size_t j = 0; j < Ez.ny(); ++j) {
      const auto [x, y] = map.rel_xy(g, Component::Ez, i, j);
      for (std::size_t k = 0; k < Ez.nz(); ++k) {
        h.e3_hat(i, j, k) = e3_hat_value(Ez(i, j, k), Bx(i, j, k), By(i, j, k), omega, x, y);
        h.P3_hat(i, j, k) = P3_hat_value(Pz(i, j, k), Mx(i, j, k), My(i, j, k), omega, x, y, consts);
      }
    }
  return h;
}

Array3 e3_rate_known(const Array3& Bdot_x, const Array3& Bdot_y, const Array3& Ez, double omega,
                     const GridSpec& g, const MaterialMap& map) {
  require_ez(Bdot_x, g, "e3_rate Bdot_x");
  require_ez(Bdot_y, g, "e3_rate Bdot_y");
  require_ez(Ez, g, "e3_rate Ez");
  Array3 K = advect_phi(Ez, Component::Ez, omega, g, map, map.w_ez);
  if (omega == 0.0) return K;
  for (std::size_t i = 0; i < K.nx(); ++i)
    for (std::size_t j = 0; j < K.ny(); ++j) {
      const auto [x, y] = map.rel_xy(g, Component::Ez, i, j);
      for (std::size_t k = 0; k < K.nz(); ++k) {
        K(i, j, k) = -omega * (x * Bdot_x(i, j, k) + y * Bdot_y(i, j, k)) - K(i, j, k);
      }
    }
  return K;
}

Array3 e3_rate(const Array3& Edot_z, const Array3& Bdot_x, const Array3& Bdot_y, const Array3& Ez,
               double omega, const GridSpec& g, const MaterialMap& map) {
  require_ez(Edot_z, g, "e3_rate Edot_z");
  Array3 r = e3_rate_known(Bdot_x, Bdot_y, Ez, omega, g, map);
  auto rv = r.values();
  auto ev = Edot_z.values();
  for (std::size_t n = 0; n < rv.size(); ++n) rv[n] += ev[n];
  return r;
}

EzSolve solve_Ez_rate(double curlH_z, double Ez, double pz_adv, double K, double psi_hat,
                      double sigma, double weight, const ChannelParams& params,
                      const PhysicalConstants& consts, int forced_branch) {
  if (params.kappa < std::abs(params.theta))
    throw NumericalError("solve_Ez_rate: negative susceptibility, need kappa >= |theta|");
  const double rhs = curlH_z - weight * sigma * Ez - weight * pz_adv;
  const double drive = rhs + consts.eps0 * K;
  EzSolve out;
  out.drive_sign = sgn(drive);
  out.s_e = (forced_branch >= -1 && forced_branch <= 1) ? forced_branch : out.drive_sign;
  const double chi = susceptibility(params, psi_hat, out.s_e);
  out.E3_hat_rate = drive / (consts.eps0 + weight * chi);
  out.Edot_z = out.E3_hat_rate - K;
  out.Pdot_z = weight * (pz_adv + chi * out.E3_hat_rate);
  return out;
}

int branch_pieces(double de, const ChannelParams& params, const PhysicalConstants& consts) {
  const double relax = consts.eps0 * params.xi * (std::abs(params.kappa) + std::abs(params.theta));
  const double h_max = 0.02 / std::max(relax, params.beta);
  const double pieces = std::ceil(std::abs(de) / h_max);
  if (!std::isfinite(pieces) || pieces > 1e8) throw NumericalError("branch_increment: path too long");
  return std::max(1, static_cast<int>(pieces));
}

double branch_increment(double e0, double p0, double de, int s, const ChannelParams& params,
                        const PhysicalConstants& consts, int pieces) {
  if (de == 0.0) return 0.0;
  const int n = pieces > 0 ? pieces : branch_pieces(de, params, consts);
  const double h = de / n;

  // integrate q = P - p0 directly so small increments keep their digits
  auto rhs = [&](double e, double q) { return susceptibility(params, psi(params, e, p0 + q, consts), s); };
  auto rk4 = [&](double e, double q, double hh) {
    const double k1 = rhs(e, q);
    const double k2 = rhs(e + 0.5 * hh, q + 0.5 * hh * k1);
    const double k3 = rhs(e + 0.5 * hh, q + 0.5 * hh * k2);
    const double k4 = rhs(e + hh, q + hh * k3);
    return q + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto sign_at = [&](double e, double q) { return sgn(psi(params, e, p0 + q, consts)); };

  double e = e0, q = 0.0;
  for (int i = 0; i < n; ++i) {
    double rem = h;
    // psi crossings split the piece so RK4 never straddles the kink
    for (int split = 0; split < 4 && rem != 0.0; ++split) {
      const int s0 = sign_at(e, q);
      const double qn = rk4(e, q, rem);
      const int s1 = sign_at(e + rem, qn);
      if (s0 == 0 || s1 == 0 || s0 == s1 || split == 3) {
        e += rem;
        q = qn;
        rem = 0.0;
        break;
      }
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sign_at(e + mid * rem, rk4(e, q, mid * rem)) == s0) lo = mid;
        else hi = mid;
      }
      const double part = hi * rem;
      q = rk4(e, q, part);
      e += part;
      rem -= part;
    }
  }
  return q;
}

EzSolve solve_Ez_step(double curlH_z, double Ez, double pz_adv, double K, double e3_hat,
                      double P3_hat, double sigma, double weight, double dt,
                      const ChannelParams& params, const PhysicalConstants& consts, int forced_branch) {
  if (params.kappa < std::abs(params.theta))
    throw NumericalError("solve_Ez_step: negative susceptibility, need kappa >= |theta|");
  const double rhs = curlH_z - weight * sigma * Ez - weight * pz_adv;
  const double drive = rhs + consts.eps0 * K;
  EzSolve out;
  out.drive_sign = sgn(drive);
  out.s_e = (forced_branch >= -1 && forced_branch <= 1) ? forced_branch : out.drive_sign;
  const double target = dt * drive;
  double x = 0.0, dp = 0.0;
  if (target != 0.0) {
    // F(x) = eps0 x + w G(x) - target is increasing with F(0) = -target and
    // F(target / eps0) on the other side. Bracket the root tightly by doubling
    // from the linearized guess, then fix the RK4 piece count from the bracket
    // so F stays continuous in x during the iteration.
    const double dir = target > 0.0 ? 1.0 : -1.0;
    const double far = std::abs(target) / consts.eps0;
    const double chi0 = susceptibility(params, psi(params, e3_hat, P3_hat, consts), out.s_e);
    const double guess = std::abs(target) / (consts.eps0 + weight * chi0);
    int pieces = 1;
    auto F = [&](double xx, double& inc) {
      inc = branch_increment(e3_hat, P3_hat, xx, out.s_e, params, consts, pieces);
      return consts.eps0 * xx + weight * inc - target;
    };
    double hi_abs = std::min(far, 1.5 * guess);
    for (int it = 0; it < 200; ++it) {
      pieces = branch_pieces(hi_abs, params, consts);
      if (hi_abs >= far || dir * F(dir * hi_abs, dp) >= 0.0) break;
      hi_abs = std::min(far, 2.0 * hi_abs);
    }
    double lo = std::min(0.0, dir * hi_abs), hi = std::max(0.0, dir * hi_abs);
    x = dir * guess;
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double tol = 1e-14 * std::abs(target);
    for (int it = 0; it < 100; ++it) {
      const double f = F(x, dp);
      if (std::abs(f) <= tol) break;
      if (f > 0.0) hi = x;
      else lo = x;
      const double slope = consts.eps0 +
          weight * susceptibility(params, psi(params, e3_hat + x, P3_hat + dp, consts), out.s_e);
      double next = x - f / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == x || hi - lo <= 1e-15 * std::abs(x)) break;
      x = next;
    }
    F(x, dp);
    out.pieces = pieces;
  }
  out.E3_hat_rate = x / dt;
  out.Edot_z = out.E3_hat_rate - K;
  out.Pdot_z = weight * (pz_adv + dp / dt);
  return out;
}

double magnetization_drive(double Ez, double Pz, double Edot_z, const ChannelParams& params,
                           const PhysicalConstants& consts) {
  const double ps = psi(params, Ez, Pz, consts);
  return params.kappa * std::abs(ps) * Edot_z + params.theta * ps * std::abs(Edot_z);
}

MagnetizationRates magnetization_rates(const MediumState& m, const Array3& Ez, const Array3& Pz,
                                       const Array3& Edot_z, const MaterialMap& map,
                                       const GridSpec& g, const ChannelParams& params,
                                       const PhysicalConstants& consts) {
  require_ez(Ez, g, "magnetization_rates Ez");
  require_ez(Pz, g, "magnetization_rates Pz");
  require_ez(Edot_z, g, "magnetization_rates Edot_z");
  const double omega = map.spec.omega;
  MagnetizationRates r{g.make(Component::Hx), g.make(Component::Hy)};
  if (omega == 0.0) return r;

  // Vacuum sites carry no polarization response and must not feed the rim faces.
  Array3 s = g.make(Component::Ez);
  const auto wz = map.w_ez.values();
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (wz[n] == 0.0) continue;
    s.values()[n] = wz[n] * magnetization_drive(Ez.values()[n], Pz.values()[n], Edot_z.values()[n], params, consts);
  }
  const Array3 sx = avg_Ez_to_face(s, FaceAxis::x, g);
  const Array3 sy = avg_Ez_to_face(s, FaceAxis::y, g);
  r.Mx_dot = advect_phi(m.Mx, Component::Hx, omega, g, map, map.w_hx);
  r.My_dot = advect_phi(m.My, Component::Hy, omega, g, map, map.w_hy);

  for (std::size_t i = 0; i < r.Mx_dot.nx(); ++i)
    for (std::size_t j = 0; j < r.Mx_dot.ny(); ++j) {
      const double x = map.rel_xy(g, Component::Hx, i, j)[0];
      for (std::size_t k = 0; k < r.Mx_dot.nz(); ++k) {
        const double w = map.w_hx(i, j, k);
        r.Mx_dot(i, j, k) = w == 0.0 ? 0.0 : w * (r.Mx_dot(i, j, k) + x * omega * sx(i, j, k));
      }
    }
  for (std::size_t i = 0; i < r.My_dot.nx(); ++i)
    for (std::size_t j = 0; j < r.My_dot.ny(); ++j) {
      const double y = map.rel_xy(g, Component::Hy, i, j)[1];
      for (std::size_t k = 0; k < r.My_dot.nz(); ++k) {
        const double w = map.w_hy(i, j, k);
        r.My_dot(i, j, k) = w == 0.0 ? 0.0 : w * (r.My_dot(i, j, k) + y * omega * sy(i, j, k));
      }
    }
  return r;
}

void update_medium(MediumState& m, const Array3& Pz_dot, const MagnetizationRates& rates, double dt,
                   const MaterialMap& map) {
  auto step = [dt](Array3& a, const Array3& rate, const Array3& w, const char* what) {
    if (!a.same_shape(rate) || !a.same_shape(w)) {
      throw std::invalid_argument(std::string("update_medium: shape mismatch for ") + what);
    }
    auto av = a.values();
    auto rv = rate.values();
    auto wv = w.values();
    for (std::size_t n = 0; n < av.size(); ++n) {
      if (wv[n] == 0.0) continue;
      if (!std::isfinite(rv[n])) throw NumericalError(std::string("non-finite rate for ") + what);
      av[n] += dt * rv[n];
    }
  };
  step(m.Pz, Pz_dot, map.w_ez, "Pz");
  step(m.Mx, rates.Mx_dot, map.w_hx, "Mx");
  step(m.My, rates.My_dot, map.w_hy, "My");
}

}  // namespace hysmax
