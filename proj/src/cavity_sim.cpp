#include "hysmax/cavity_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hysmax {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kInstabilityCheckEvery = 32;

void axpy(Array3& y, double a, const Array3& x) {
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t n = 0; n < yv.size(); ++n) yv[n] += a * xv[n];
}

Array3 scaled(const Array3& x, double a) {
  Array3 y = x;
  for (double& v : y.values()) v *= a;
  return y;
}

Array3 midpoint(const Array3& a, const Array3& b) {
  Array3 m = a;
  auto mv = m.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < mv.size(); ++n) mv[n] = 0.5 * (mv[n] + bv[n]);
  return m;
}

double max_abs_all(const EdgeField& E) {
  return std::max({E.x.max_abs(), E.y.max_abs(), E.z.max_abs()});
}
double max_abs_all(const FaceField& H) {
  return std::max({H.x.max_abs(), H.y.max_abs(), H.z.max_abs()});
}

bool all_finite(const Array3& a) {
  for (double v : a.values())
    if (!std::isfinite(v)) return false;
  return true;
}

// W: face potential circulating about z in the side slabs. Magnitude is one
// cell so that curl_h(W) is O(1) on the slab faces.
FaceField flux_ring_potential(const SourceSpec& spec, const GridSpec& g) {
  FaceField W = FaceField::zeros(g);
  const std::size_t L = spec.wall_layers;
  const double h = std::min({g.dx(), g.dy(), g.dz()});
  for (std::size_t k = L; k + L < g.nz; ++k) {
    for (std::size_t i = 0; i < g.nx; ++i)
      for (std::size_t j = 0; j <= g.ny; ++j) {
        if (i < L) W.y(i, j, k) -= h;
        if (i >= g.nx - L) W.y(i, j, k) += h;
      }
    for (std::size_t i = 0; i <= g.nx; ++i)
      for (std::size_t j = 0; j < g.ny; ++j) {
        if (j < L) W.x(i, j, k) += h;
        if (j >= g.ny - L) W.x(i, j, k) -= h;
      }
  }
  return W;
}

void check_overlap(const EdgeField& J, const MaterialMap& map) {
  auto test = [](const Array3& j, const Array3& w, const char* what) {
    auto jv = j.values();
    auto wv = w.values();
    for (std::size_t n = 0; n < jv.size(); ++n) {
      if (jv[n] != 0.0 && wv[n] > 0.0) {
        throw ConfigError(std::string("source: current on ") + what +
                          " edges overlaps the cylinder; reduce source.wall_layers");
      }
    }
  };
  test(J.x, map.w_ex, "x");
  test(J.y, map.w_ey, "y");
  test(J.z, map.w_ez, "z");
}

}  // namespace

void SourceSpec::validate(const GridSpec& g) const {
  if (!std::isfinite(frequency) || frequency < 0.0) throw ConfigError("source: frequency must be >= 0");
  if (!std::isfinite(amplitude)) throw ConfigError("source: amplitude must be finite");
  if (!std::isfinite(ramp_cycles) || ramp_cycles < 0.0) throw ConfigError("source: ramp_cycles must be >= 0");
  if (wall_layers < 1) throw ConfigError("source: wall_layers must be >= 1");
  if (2 * wall_layers >= g.nz || 2 * wall_layers >= g.nx || 2 * wall_layers >= g.ny) {
    throw ConfigError("source: wall_layers too large for the grid");
  }
  if (amplitude != 0.0 && frequency == 0.0) throw ConfigError("source: nonzero amplitude needs a frequency");
}

double source_envelope(double t, const SourceSpec& spec) {
  if (spec.amplitude == 0.0 || t <= 0.0) return 0.0;
  double ramp = 1.0;
  if (spec.ramp_cycles > 0.0) {
    const double s = std::min(1.0, t * spec.frequency / spec.ramp_cycles);
    ramp = s * s * (3.0 - 2.0 * s);
  }
  return spec.amplitude * ramp * std::sin(kTwoPi * spec.frequency * t);
}

EdgeField source_pattern(const SourceSpec& spec, const GridSpec& g) {
  spec.validate(g);
  return curl_H(flux_ring_potential(spec, g), g);
}

EdgeField build_source(double t, const SourceSpec& spec, const GridSpec& g) {
  EdgeField J = source_pattern(spec, g);
  const double a = source_envelope(t, spec);
  for (Array3* c : {&J.x, &J.y, &J.z})
    for (double& v : c->values()) v *= a;
  return J;
}

std::string_view to_string(Scheme s) {
  return s == Scheme::semi_implicit ? "semi_implicit" : "lagged_explicit";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "semi_implicit") return Scheme::semi_implicit;
  if (s == "lagged_explicit") return Scheme::lagged_explicit;
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

std::string_view to_string(DurationUnit u) {
  switch (u) {
    case DurationUnit::seconds: return "s";
    case DurationUnit::periods: return "periods";
    case DurationUnit::revolutions: return "revolutions";
  }
  return "s";
}

DurationUnit duration_unit_from_string(std::string_view s) {
  if (s == "s" || s == "seconds") return DurationUnit::seconds;
  if (s == "periods") return DurationUnit::periods;
  if (s == "revolutions") return DurationUnit::revolutions;
  throw ConfigError("unknown duration unit '" + std::string(s) + "'");
}

void RunConfig::validate(const PhysicalConstants& consts) const {
  grid.validate();
  material.validate(grid, consts);
  try {
    hysteresis.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("hysteresis: ") + e.what());
  }
  if (hysteresis.channel != Channel::pe) throw ConfigError("hysteresis: the cavity supports the pe channel only");
  if (hysteresis.kappa < std::abs(hysteresis.theta)) {
    throw ConfigError("hysteresis: kappa < |theta| makes the branch solve non-monotone");
  }
  source.validate(grid);
  if (!std::isfinite(duration) || duration < 0.0) throw ConfigError("run: duration must be >= 0");
  if (duration_unit == DurationUnit::periods && source.frequency == 0.0 && duration > 0.0) {
    throw ConfigError("run: duration in periods needs source.frequency > 0");
  }
  if (duration_unit == DurationUnit::revolutions && material.omega == 0.0 && duration > 0.0) {
    throw ConfigError("run: duration in revolutions needs a rotating cylinder");
  }
  if (record_stride < 1 || diagnostics_stride < 1) throw ConfigError("run: strides must be >= 1");
  for (const auto& p : probes) {
    for (int d = 0; d < 3; ++d) {
      const double lo = grid.origin[d];
      const double hi = lo + (d == 0 ? grid.lx : d == 1 ? grid.ly : grid.lz);
      if (!(p.position[d] >= lo && p.position[d] <= hi)) {
        throw ConfigError("probes: '" + p.name + "' lies outside the cavity");
      }
    }
  }
  if (material.enabled && source.amplitude != 0.0) {
    check_overlap(source_pattern(source, grid), MaterialMap::build(grid, material, consts));
  }
}

double RunConfig::duration_seconds() const {
  switch (duration_unit) {
    case DurationUnit::seconds: return duration;
    case DurationUnit::periods: return duration == 0.0 ? 0.0 : duration / source.frequency;
    case DurationUnit::revolutions:
      return duration == 0.0 ? 0.0 : duration * kTwoPi / std::abs(material.omega);
  }
  return duration;
}

std::size_t RunConfig::total_steps(const PhysicalConstants& consts) const {
  return static_cast<std::size_t>(std::llround(duration_seconds() / grid.dt(consts)));
}

ConsistencyReport consistency_report(const RunConfig& cfg, const PhysicalConstants& consts) {
  ConsistencyReport r;
  const double inf = std::numeric_limits<double>::infinity();
  r.omega = cfg.material.omega;
  r.dt = cfg.grid.dt(consts);
  r.dt_max = cfg.grid.dt_max(consts);
  const double f = cfg.source.frequency;
  r.cycles_per_revolution = r.omega == 0.0 ? inf : f * kTwoPi / std::abs(r.omega);
  r.steps_per_period = f == 0.0 ? inf : 1.0 / (f * r.dt);
  r.steps_per_revolution = r.omega == 0.0 ? inf : kTwoPi / (std::abs(r.omega) * r.dt);
  const double a = cfg.grid.lx, b = cfg.grid.ly, d = cfg.grid.lz;
  const double q = std::min({1 / (a * a) + 1 / (b * b), 1 / (a * a) + 1 / (d * d), 1 / (b * b) + 1 / (d * d)});
  r.f_lowest = 0.5 * consts.c * std::sqrt(q);
  r.drive_over_f_lowest = f / r.f_lowest;
  const double beta = r.omega * cfg.material.radius / consts.c;
  r.rim_speed_ratio_sq = cfg.material.enabled ? beta * beta : 0.0;
  return r;
}

void ProbeTrace::write_csv(std::ostream& out) const {
  out << kProbeHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.t << ',' << r.Ex << ',' << r.Ey << ',' << r.Ez << ',' << r.Hx << ',' << r.Hy << ','
        << r.Hz << ',' << r.Bx << ',' << r.By << ',' << r.Bz << ',' << r.Pz << ',' << r.Mx << ','
        << r.My << '\n';
  }
}

std::vector<ProbeRow> ProbeTrace::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kProbeHeader) throw std::runtime_error("probe csv: bad header");
  std::vector<ProbeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ProbeRow r;
    if (!(ss >> r.t >> r.Ex >> r.Ey >> r.Ez >> r.Hx >> r.Hy >> r.Hz >> r.Bx >> r.By >> r.Bz >> r.Pz >>
          r.Mx >> r.My)) {
      throw std::runtime_error("probe csv: malformed row");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  out << kDiagnosticsHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.t << ',' << r.energy << ',' << r.max_divB << ',' << r.max_divD << '\n';
}

Simulation::Simulation(const RunConfig& cfg, const PhysicalConstants& consts)
    : cfg_(cfg), consts_(consts) {
  cfg_.validate(consts_);
  const GridSpec& g = cfg_.grid;
  map_ = MaterialMap::build(g, cfg_.material, consts_);
  hysteretic_ = cfg_.material.enabled && cfg_.material.eps_r == 0.0;
  dt_ = g.dt(consts_);
  E_ = EdgeField::zeros(g);
  E_prev_ = E_;
  B_ = FaceField::zeros(g);
  H_ = B_;
  medium_ = MediumState::zeros(g);
  pattern_ = source_pattern(cfg_.source, g);
  rho_free_ = Array3(g.nx + 1, g.ny + 1, g.nz + 1);

  const double er = cfg_.material.enabled && cfg_.material.eps_r > 0.0 ? cfg_.material.eps_r : 1.0;
  auto eps_of = [&](const Array3& w) {
    Array3 e = w;
    for (double& v : e.values()) v = consts_.eps0 * (1.0 + (er - 1.0) * v);
    return e;
  };
  eps_ex_ = eps_of(map_.w_ex);
  eps_ey_ = eps_of(map_.w_ey);
  eps_ez_ = eps_of(map_.w_ez);
  instability_limit_ = 1e9 * std::max(1.0, std::abs(cfg_.source.amplitude));
}

void Simulation::set_initial_E(const EdgeField& E) {
  if (n_ != 0) throw std::logic_error("set_initial_E after stepping");
  if (!E.x.same_shape(E_.x) || !E.y.same_shape(E_.y) || !E.z.same_shape(E_.z)) {
    throw std::invalid_argument("set_initial_E: shape mismatch");
  }
  E_ = E;
  apply_pec(E_, cfg_.grid);
  E_prev_ = E_;
  instability_limit_ = std::max(instability_limit_, 1e9 * max_abs_all(E_));
}

void Simulation::refresh_H(const FaceField& B, const Array3* Mx, const Array3* My) {
  const double inv_mu0 = 1.0 / consts_.mu0;
  auto set = [inv_mu0](Array3& h, const Array3& b, const Array3* m) {
    auto hv = h.values();
    auto bv = b.values();
    if (m) {
      auto mv = m->values();
      for (std::size_t n = 0; n < hv.size(); ++n) hv[n] = bv[n] * inv_mu0 + mv[n];
    } else {
      for (std::size_t n = 0; n < hv.size(); ++n) hv[n] = bv[n] * inv_mu0;
    }
  };
  set(H_.x, B.x, Mx);
  set(H_.y, B.y, My);
  set(H_.z, B.z, nullptr);
}

void Simulation::step() {
  const GridSpec& g = cfg_.grid;
  const double dt = dt_;
  const double eps0 = consts_.eps0;
  const double omega = map_.spec.omega;
  const ChannelParams& hp = cfg_.hysteresis;
  const bool lagged = cfg_.scheme == Scheme::lagged_explicit;
  const double a_half = source_envelope(t_ + 0.5 * dt, cfg_.source);

  // Faraday: dB/dt = -curl E at time n.
  const FaceField curlE = curl_E(E_, g);
  FaceField B_new = B_;
  axpy(B_new.x, -dt, curlE.x);
  axpy(B_new.y, -dt, curlE.y);
  axpy(B_new.z, -dt, curlE.z);

  Array3 K, pz_adv, psi_hat, e3h, P3h;
  MagnetizationRates mrates{g.make(Component::Hx), g.make(Component::Hy)};
  Array3 Mx_new, My_new;
  const Array3& Ez = E_.z;
  const Array3& w_ez = map_.w_ez;

  if (hysteretic_) {
    const Array3 Bdot_x = avg_to_Ez_sites(scaled(curlE.x, -1.0), FaceAxis::x, g);
    const Array3 Bdot_y = avg_to_Ez_sites(scaled(curlE.y, -1.0), FaceAxis::y, g);
    HatFields hat{Ez, medium_.Pz};
    if (omega != 0.0) {
      hat = hat_fields(Ez, avg_to_Ez_sites(midpoint(B_.x, B_new.x), FaceAxis::x, g),
                       avg_to_Ez_sites(midpoint(B_.y, B_new.y), FaceAxis::y, g), medium_.Pz,
                       avg_to_Ez_sites(medium_.Mx, FaceAxis::x, g),
                       avg_to_Ez_sites(medium_.My, FaceAxis::y, g), omega, g, map_, consts_);
    }
    psi_hat = g.make(Component::Ez);
    for (std::size_t n = 0; n < psi_hat.size(); ++n) {
      psi_hat.values()[n] = psi(hp, hat.e3_hat.values()[n], hat.P3_hat.values()[n], consts_);
    }
    e3h = std::move(hat.e3_hat);
    P3h = std::move(hat.P3_hat);
    K = e3_rate_known(Bdot_x, Bdot_y, Ez, omega, g, map_);
    pz_adv = advect_phi(medium_.Pz, Component::Ez, omega, g, map_, w_ez);

    if (omega != 0.0) {
      // Predictor: Ez rate from H carrying the old magnetization, used only to
      // drive the magnetization update for this step.
      refresh_H(B_new, &medium_.Mx, &medium_.My);
      const EdgeField curlH_pred = curl_H(H_, g);
      Array3 Edot_pred = g.make(Component::Ez);
      for (std::size_t n = 0; n < Edot_pred.size(); ++n) {
        const double w = w_ez.values()[n];
        const double ch = curlH_pred.z.values()[n];
        if (w > 0.0) {
          const int forced = lagged ? medium_.s_e[n] : 2;
          Edot_pred.values()[n] =
              solve_Ez_step(ch, Ez.values()[n], pz_adv.values()[n], K.values()[n],
                            e3h.values()[n], P3h.values()[n], map_.spec.sigma, w, dt, hp, consts_, forced)
                  .Edot_z;
        } else {
          Edot_pred.values()[n] = (ch - a_half * pattern_.z.values()[n]) / eps0;
        }
      }
      mrates = magnetization_rates(medium_, Ez, medium_.Pz, Edot_pred, map_, g, hp, consts_);
      Mx_new = medium_.Mx;
      My_new = medium_.My;
      axpy(Mx_new, dt, mrates.Mx_dot);
      axpy(My_new, dt, mrates.My_dot);
    }
  }

  B_ = std::move(B_new);
  if (Mx_new.size() == 0) refresh_H(B_, nullptr, nullptr);
  else refresh_H(B_, &Mx_new, &My_new);

  // Ampere.
  const EdgeField curlH = curl_H(H_, g);
  E_prev_ = E_;
  const double sigma = cfg_.material.enabled ? cfg_.material.sigma : 0.0;
  EdgeField cond = EdgeField::zeros(g);
  if (sigma > 0.0) {
    auto fill = [sigma](Array3& c, const Array3& w, const Array3& e) {
      for (std::size_t n = 0; n < c.size(); ++n) c.values()[n] = w.values()[n] * sigma * e.values()[n];
    };
    fill(cond.x, map_.w_ex, E_.x);
    fill(cond.y, map_.w_ey, E_.y);
    fill(cond.z, map_.w_ez, E_.z);
  }
  auto update = [&](Array3& e, const Array3& ch, const Array3& cd, const Array3& j, const Array3& eps) {
    auto ev = e.values();
    for (std::size_t n = 0; n < ev.size(); ++n) {
      ev[n] += dt / eps.values()[n] * (ch.values()[n] - cd.values()[n] - a_half * j.values()[n]);
    }
  };
  update(E_.x, curlH.x, cond.x, pattern_.x, eps_ex_);
  update(E_.y, curlH.y, cond.y, pattern_.y, eps_ey_);

  Array3 Pz_dot;
  if (hysteretic_) {
    Pz_dot = g.make(Component::Ez);
    auto ev = E_.z.values();
    for (std::size_t n = 0; n < ev.size(); ++n) {
      const double w = w_ez.values()[n];
      const double ch = curlH.z.values()[n];
      if (w > 0.0) {
        const int forced = lagged ? medium_.s_e[n] : 2;
        const EzSolve s = solve_Ez_step(ch, E_prev_.z.values()[n], pz_adv.values()[n], K.values()[n],
                                        e3h.values()[n], P3h.values()[n], map_.spec.sigma, w, dt, hp,
                                        consts_, forced);
        ev[n] += dt * s.Edot_z;
        Pz_dot.values()[n] = s.Pdot_z;
        medium_.s_e[n] = static_cast<std::int8_t>(s.drive_sign);
        medium_.s_psi[n] = static_cast<std::int8_t>(sgn(psi_hat.values()[n]));
        medium_.last_Edot_z.values()[n] = s.Edot_z;
      } else {
        ev[n] += dt / eps0 * (ch - a_half * pattern_.z.values()[n]);
      }
    }
  } else {
    update(E_.z, curlH.z, cond.z, pattern_.z, eps_ez_);
  }
  apply_pec(E_, g);

  if (hysteretic_) update_medium(medium_, Pz_dot, mrates, dt, map_);
  if (sigma > 0.0) axpy(rho_free_, -dt, div_D(cond, g));

  ++n_;
  t_ = static_cast<double>(n_) * dt_;
  if (n_ % kInstabilityCheckEvery == 0) check_instability();
}

void Simulation::advance(std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) step();
  check_instability();
}

double Simulation::max_state_magnitude() const {
  for (const Array3* a : {&E_.x, &E_.y, &E_.z, &B_.x, &B_.y, &B_.z, &H_.x, &H_.y, &H_.z, &medium_.Pz,
                          &medium_.Mx, &medium_.My}) {
    if (!all_finite(*a)) throw NumericalError("non-finite value in the field state");
  }
  return std::max({max_abs_all(E_), max_abs_all(H_), medium_.Pz.max_abs(), medium_.Mx.max_abs(),
                   medium_.My.max_abs()});
}

void Simulation::check_instability() const {
  double m = 0.0;
  try {
    m = max_state_magnitude();
  } catch (const NumericalError& e) {
    throw InstabilityError(std::string(e.what()) + " at step " + std::to_string(n_), snapshot());
  }
  if (m > instability_limit_) {
    throw InstabilityError("field magnitude " + std::to_string(m) + " exceeds instability limit at step " +
                               std::to_string(n_),
                           snapshot());
  }
}

std::array<std::size_t, 3> Simulation::snap_to_Ez(const Vec3& p) const {
  const GridSpec& g = cfg_.grid;
  auto idx = [](double u, std::size_t hi) {
    const double r = std::round(u);
    if (r <= 0.0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(r), hi);
  };
  return {idx((p[0] - g.origin[0]) / g.dx(), g.nx), idx((p[1] - g.origin[1]) / g.dy(), g.ny),
          idx((p[2] - g.origin[2]) / g.dz() - 0.5, g.nz - 1)};
}

ProbeRow Simulation::sample(const std::array<std::size_t, 3>& s) const {
  const GridSpec& g = cfg_.grid;
  const Vec3 p = g.position(Component::Ez, s[0], s[1], s[2]);
  ProbeRow r;
  r.t = t_;
  r.Ex = interpolate(E_.x, Component::Ex, p, g);
  r.Ey = interpolate(E_.y, Component::Ey, p, g);
  r.Ez = E_.z(s[0], s[1], s[2]);
  r.Hx = interpolate(H_.x, Component::Hx, p, g);
  r.Hy = interpolate(H_.y, Component::Hy, p, g);
  r.Hz = interpolate(H_.z, Component::Hz, p, g);
  r.Bx = interpolate(B_.x, Component::Hx, p, g);
  r.By = interpolate(B_.y, Component::Hy, p, g);
  r.Bz = interpolate(B_.z, Component::Hz, p, g);
  r.Pz = medium_.Pz(s[0], s[1], s[2]);
  r.Mx = interpolate(medium_.Mx, Component::Hx, p, g);
  r.My = interpolate(medium_.My, Component::Hy, p, g);
  return r;
}

DiagnosticsRow Simulation::diagnostics() const {
  const GridSpec& g = cfg_.grid;
  DiagnosticsRow d;
  d.t = t_;
  d.energy = field_energy(E_prev_, E_, H_, H_, g, consts_);
  d.max_divB = div_B(B_, g).max_abs();
  EdgeField D = E_;
  auto mul = [](Array3& e, const Array3& eps) {
    for (std::size_t n = 0; n < e.size(); ++n) e.values()[n] *= eps.values()[n];
  };
  mul(D.x, eps_ex_);
  mul(D.y, eps_ey_);
  mul(D.z, eps_ez_);
  axpy(D.z, 1.0, medium_.Pz);
  Array3 dd = div_D(D, g);
  axpy(dd, -1.0, rho_free_);
  d.max_divD = dd.max_abs();
  return d;
}

Snapshot Simulation::snapshot() const {
  Snapshot s = Snapshot::from_grid(cfg_.grid, dt_, t_);
  s.add("Ex", E_.x);
  s.add("Ey", E_.y);
  s.add("Ez", E_.z);
  s.add("Hx", H_.x);
  s.add("Hy", H_.y);
  s.add("Hz", H_.z);
  s.add("Bx", B_.x);
  s.add("By", B_.y);
  s.add("Bz", B_.z);
  s.add("Pz", medium_.Pz);
  s.add("Mx", medium_.Mx);
  s.add("My", medium_.My);
  Array3 spsi = cfg_.grid.make(Component::Ez);
  Array3 se = cfg_.grid.make(Component::Ez);
  for (std::size_t n = 0; n < spsi.size(); ++n) {
    spsi.values()[n] = medium_.s_psi[n];
    se.values()[n] = medium_.s_e[n];
  }
  s.add("s_psi", spsi);
  s.add("s_e", se);
  return s;
}

RunResult run(const RunConfig& cfg, const PhysicalConstants& consts, bool keep_final_state) {
  Simulation sim(cfg, consts);
  RunResult res;
  res.report = consistency_report(cfg, consts);
  for (const auto& p : cfg.probes) {
    ProbeTrace tr;
    tr.probe = p;
    tr.site = sim.snap_to_Ez(p.position);
    tr.site_position = cfg.grid.position(Component::Ez, tr.site[0], tr.site[1], tr.site[2]);
    res.traces.push_back(std::move(tr));
  }
  res.diagnostics.push_back(sim.diagnostics());
  const std::size_t steps = cfg.total_steps(consts);
  for (std::size_t s = 1; s <= steps; ++s) {
    sim.step();
    if (s % cfg.record_stride == 0 || s == steps) {
      for (auto& tr : res.traces) tr.rows.push_back(sim.sample(tr.site));
    }
    if (s % cfg.diagnostics_stride == 0 || s == steps) res.diagnostics.push_back(sim.diagnostics());
  }
  if (steps > 0) sim.advance(0);
  res.steps = steps;
  res.final_time = sim.time();
  if (keep_final_state) res.final_state = sim.snapshot();
  return res;
}

}  // namespace hysmax
