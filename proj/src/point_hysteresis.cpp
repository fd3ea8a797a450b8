#include "hysmax/point_hysteresis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hysmax/errors.hpp"

namespace hysmax {

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::pe: return "pe";
    case Channel::ph: return "ph";
    case Channel::me: return "me";
    case Channel::mh: return "mh";
  }
  return "?";
}

void ChannelParams::validate() const {
  const auto name = std::string(to_string(channel));
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument(name + ": alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument(name + ": beta must be positive");
  if (!(xi > 0.0) || !std::isfinite(xi))
    throw std::invalid_argument(name + ": xi must be positive");
  if (!std::isfinite(kappa) || !std::isfinite(theta))
    throw std::invalid_argument(name + ": kappa and theta must be finite");
}

ChannelParams ChannelParams::paper_pe() {
  return ChannelParams{Channel::pe, 3.6e4, 2.0e-6, 1.3e5, 0.5, 0.5};
}

ChannelSet ChannelSet::pe_only(const ChannelParams& params) {
  ChannelSet set;
  set.pe = params;
  set.pe->channel = Channel::pe;
  return set;
}

void ChannelSet::validate() const {
  auto check = [](const std::optional<ChannelParams>& p, Channel expected) {
    if (!p) return;
    if (p->channel != expected)
      throw std::invalid_argument("channel slot holds parameters for " +
                                  std::string(to_string(p->channel)));
    p->validate();
  };
  check(pe, Channel::pe);
  check(ph, Channel::ph);
  check(me, Channel::me);
  check(mh, Channel::mh);
}

double shape_fn(double z, double beta) noexcept { return std::tanh(beta * z); }

double psi(const ChannelParams& p, double drive, double response,
           const PhysicalConstants& consts) noexcept {
  const double f = shape_fn(drive, p.beta);
  switch (p.channel) {
    case Channel::pe: return consts.eps0 * (p.alpha * f - p.xi * response);
    case Channel::ph: return -(p.alpha * f - p.xi * response);
    case Channel::mh: return -(p.alpha * f + p.xi * response);
    case Channel::me: return consts.eps0 * (p.alpha * f + p.xi * response);
  }
  return 0.0;
}

double susceptibility(const ChannelParams& p, double psi_val,
                      int drive_rate_sign) noexcept {
  // Written as a product so that kappa == theta with opposite signs gives an
  // exact zero.
  return psi_val * (p.kappa * sgn(psi_val) + p.theta * drive_rate_sign);
}

namespace {

struct Response {
  double P = 0.0;
  double M = 0.0;
};

using SignVec = std::array<int, 4>;  // pe, ph, me, mh

struct InertialRhs {
  const ChannelSet& ch;
  const PhysicalConstants& consts;
  DriveRates rates;
  int sE;
  int sH;

  Response operator()(double E, double H, Response y) const {
    Response d;
    if (ch.pe) {
      const double ps = psi(*ch.pe, E, y.P, consts);
      d.P += susceptibility(*ch.pe, ps, sE) * rates.Edot;
    }
    if (ch.ph) {
      const double ps = psi(*ch.ph, H, y.P, consts);
      d.P -= susceptibility(*ch.ph, ps, sH) * rates.Hdot / consts.c;
    }
    if (ch.mh) {
      const double ps = psi(*ch.mh, H, y.M, consts);
      d.M += susceptibility(*ch.mh, ps, sH) * rates.Hdot;
    }
    if (ch.me) {
      const double ps = psi(*ch.me, E, y.M, consts);
      d.M -= consts.c * susceptibility(*ch.me, ps, sE) * rates.Edot;
    }
    return d;
  }

  SignVec signs(double E, double H, Response y) const {
    SignVec s{0, 0, 0, 0};
    if (ch.pe) s[0] = sgn(psi(*ch.pe, E, y.P, consts));
    if (ch.ph) s[1] = sgn(psi(*ch.ph, H, y.P, consts));
    if (ch.me) s[2] = sgn(psi(*ch.me, E, y.M, consts));
    if (ch.mh) s[3] = sgn(psi(*ch.mh, H, y.M, consts));
    return s;
  }

  // Largest RK4 sub-step that keeps every channel well inside the stability
  // region: both the relaxation rate toward the anhysteretic curve and the
  // variation of tanh(beta u) are limited to 0.05 per sub-step.
  double max_substep() const {
    double rate = 0.0;
    auto add = [&](const std::optional<ChannelParams>& p, double drive, double scale) {
      if (!p) return;
      const double dpsi = std::abs(psi(*p, 0.0, 1.0, consts) - psi(*p, 0.0, 0.0, consts));
      rate = std::max(rate, (std::abs(p->kappa) + std::abs(p->theta)) * dpsi * std::abs(drive) * scale);
      rate = std::max(rate, std::abs(p->beta * drive));
    };
    add(ch.pe, rates.Edot, 1.0);
    add(ch.ph, rates.Hdot, 1.0 / consts.c);
    add(ch.mh, rates.Hdot, 1.0);
    add(ch.me, rates.Edot, consts.c);
    return rate > 0.0 ? 0.05 / rate : std::numeric_limits<double>::infinity();
  }

  Response integrate(double E, double H, Response y, double h) const {
    const double hmax = max_substep();
    const double n = std::isfinite(hmax) ? std::ceil(h / hmax) : 1.0;
    if (n > 1e7) throw NumericalError("step_inertial: drive too fast for the step");
    const int steps = std::max(1, static_cast<int>(n));
    const double sub = h / steps;
    for (int i = 0; i < steps; ++i) {
      y = rk4(E, H, y, sub);
      E += sub * rates.Edot;
      H += sub * rates.Hdot;
    }
    return y;
  }

  Response rk4(double E, double H, Response y, double h) const {
    const double Eh = E + 0.5 * h * rates.Edot;
    const double Hh = H + 0.5 * h * rates.Hdot;
    const double E1 = E + h * rates.Edot;
    const double H1 = H + h * rates.Hdot;
    const Response k1 = (*this)(E, H, y);
    const Response k2 = (*this)(Eh, Hh, {y.P + 0.5 * h * k1.P, y.M + 0.5 * h * k1.M});
    const Response k3 = (*this)(Eh, Hh, {y.P + 0.5 * h * k2.P, y.M + 0.5 * h * k2.M});
    const Response k4 = (*this)(E1, H1, {y.P + h * k3.P, y.M + h * k3.M});
    return {y.P + h / 6.0 * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P),
            y.M + h / 6.0 * (k1.M + 2.0 * k2.M + 2.0 * k3.M + k4.M)};
  }
};

bool sign_flipped(const SignVec& before, const SignVec& after) {
  for (std::size_t i = 0; i < before.size(); ++i)
    if (before[i] != 0 && after[i] != before[i]) return true;
  return false;
}

constexpr int kMaxEventsPerStep = 8;
constexpr double kEventTolerance = 1e-3;  // fraction of dt

}  // namespace

PointState step_inertial(const PointState& state, DriveRates rates, double dt,
                         const ChannelSet& channels,
                         const PhysicalConstants& consts) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NumericalError("step_inertial: dt must be positive and finite");
  for (double v : {state.E, state.H, state.P, state.M, rates.Edot, rates.Hdot})
    if (!std::isfinite(v)) throw NumericalError("step_inertial: non-finite input");

  const InertialRhs rhs{channels, consts, rates, sgn(rates.Edot), sgn(rates.Hdot)};

  Response y{state.P, state.M};
  double tau = 0.0;
  for (int event = 0; event <= kMaxEventsPerStep && tau < dt; ++event) {
    const double h = dt - tau;
    const double E0 = state.E + rates.Edot * tau;
    const double H0 = state.H + rates.Hdot * tau;
    const SignVec s0 = rhs.signs(E0, H0, y);
    const Response y1 = rhs.integrate(E0, H0, y, h);
    const SignVec s1 = rhs.signs(E0 + rates.Edot * h, H0 + rates.Hdot * h, y1);
    if (event == kMaxEventsPerStep || !sign_flipped(s0, s1)) {
      y = y1;
      tau = dt;
      break;
    }
    double lo = 0.0;
    double hi = 1.0;
    while ((hi - lo) * h > kEventTolerance * dt) {
      const double mid = 0.5 * (lo + hi);
      const Response ym = rhs.integrate(E0, H0, y, mid * h);
      const SignVec sm =
          rhs.signs(E0 + rates.Edot * mid * h, H0 + rates.Hdot * mid * h, ym);
      (sign_flipped(s0, sm) ? hi : lo) = mid;
    }
    y = rhs.integrate(E0, H0, y, hi * h);
    tau += hi * h;
  }

  PointState out = state;
  out.E = state.E + rates.Edot * dt;
  out.H = state.H + rates.Hdot * dt;
  out.P = y.P;
  out.M = y.M;
  out.t = state.t + dt;
  if (!std::isfinite(out.P) || !std::isfinite(out.M))
    throw NumericalError("step_inertial: non-finite response");
  return out;
}

double branch_solution(double E, double E0, double P0, int s_psi, int s_drive,
                       const ChannelParams& params,
                       const PhysicalConstants& consts) {
  if (std::abs(s_psi) != 1 || std::abs(s_drive) != 1)
    throw std::invalid_argument("branch_solution: signs must be +1 or -1");
  if ((E > E0 && s_drive < 0) || (E < E0 && s_drive > 0))
    throw std::invalid_argument(
        "branch_solution: drive sign contradicts the direction from E0 to E");
  if (E == E0) return P0;

  const double eta = consts.eps0 * (params.kappa * s_psi + params.theta * s_drive);
  if (eta == 0.0) return P0;
  const double rate = eta * params.xi;

  auto integrand = [&](double u) {
    return std::tanh(params.beta * u) * std::exp(rate * (u - E));
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  double integral = Quadrature::integrate(integrand, std::min(E0, E), std::max(E0, E),
                                          30, 1e-12);
  if (E < E0) integral = -integral;
  return P0 * std::exp(-rate * (E - E0)) + eta * params.alpha * integral;
}

// ---------------------------------------------------------------------------
// Traces

void PointTrace::write_csv(std::ostream& out) const {
  out << "t,E,P,H,M,s_psi,s_drive\n";
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.t << ',' << r.E << ',' << r.P << ',' << r.H << ',' << r.M << ','
        << r.s_psi << ',' << r.s_drive << '\n';
}

PointTrace PointTrace::read_csv(std::istream& in) {
  PointTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != "t,E,P,H,M,s_psi,s_drive")
    throw std::runtime_error("point trace CSV: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    TraceRow r;
    char c1, c2, c3, c4, c5, c6;
    ss >> r.t >> c1 >> r.E >> c2 >> r.P >> c3 >> r.H >> c4 >> r.M >> c5 >> r.s_psi >>
        c6 >> r.s_drive;
    if (!ss) throw std::runtime_error("point trace CSV: malformed row: " + line);
    trace.rows.push_back(r);
  }
  return trace;
}

Waveform Waveform::sine(double amplitude, double frequency) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return Waveform{[=](double t) { return amplitude * std::sin(kTwoPi * frequency * t); },
                  {}};
}

namespace {

TraceRow make_row(const PointState& s, const ChannelSet& ch, DriveRates rates,
                  const PhysicalConstants& consts) {
  TraceRow r{s.t, s.E, s.P, s.H, s.M, 0, 0};
  if (ch.pe) {
    r.s_psi = sgn(psi(*ch.pe, s.E, s.P, consts));
    r.s_drive = sgn(rates.Edot);
  } else if (ch.mh) {
    r.s_psi = sgn(psi(*ch.mh, s.H, s.M, consts));
    r.s_drive = sgn(rates.Hdot);
  }
  return r;
}

void log_transitions(PointTrace& trace) {
  const auto n = trace.rows.size();
  if (n < 2) return;
  const TraceRow& prev = trace.rows[n - 2];
  const TraceRow& cur = trace.rows[n - 1];
  if (cur.s_psi != prev.s_psi)
    trace.transitions.push_back({cur.t, BranchEvent::Kind::psi, cur.s_psi});
  if (cur.s_drive != prev.s_drive)
    trace.transitions.push_back({cur.t, BranchEvent::Kind::drive, cur.s_drive});
}

PointTrace integrate_samples(std::span<const double> t, std::span<const double> E,
                             std::span<const double> H, const ChannelSet& channels,
                             const PhysicalConstants& consts, PointState state) {
  channels.validate();
  PointTrace trace;
  if (t.empty()) return trace;
  trace.rows.reserve(t.size());
  state.t = t[0];
  state.E = E[0];
  if (!H.empty()) state.H = H[0];
  trace.rows.push_back(make_row(state, channels, {}, consts));
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    if (!(dt > 0.0)) throw std::invalid_argument("sample times must increase strictly");
    DriveRates rates{(E[i] - E[i - 1]) / dt, H.empty() ? 0.0 : (H[i] - H[i - 1]) / dt};
    state = step_inertial(state, rates, dt, channels, consts);
    state.t = t[i];
    state.E = E[i];
    if (!H.empty()) state.H = H[i];
    trace.rows.push_back(make_row(state, channels, rates, consts));
    log_transitions(trace);
  }
  return trace;
}

}  // namespace

PointTrace run_drive(const Waveform& waveform, double duration, double dt,
                     const ChannelSet& channels, const PhysicalConstants& consts,
                     const PointState& initial) {
  if (!(dt > 0.0)) throw std::invalid_argument("run_drive: dt must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("run_drive: negative duration");
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  std::vector<double> t(steps + 1), E(steps + 1), H;
  if (waveform.H) H.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    t[i] = std::min(static_cast<double>(i) * dt, duration);
    E[i] = waveform.E ? waveform.E(t[i]) : initial.E;
    if (waveform.H) H[i] = waveform.H(t[i]);
  }
  if (steps > 0 && t[steps] <= t[steps - 1]) {
    // duration/dt a hair above an integer; drop the degenerate tail sample
    t.pop_back();
    E.pop_back();
    if (!H.empty()) H.pop_back();
  }
  return integrate_samples(t, E, H, channels, consts, initial);
}

PointTrace run_samples(std::span<const double> t, std::span<const double> E,
                       const ChannelSet& channels, const PhysicalConstants& consts,
                       const PointState& initial) {
  if (t.size() != E.size()) throw std::invalid_argument("run_samples: size mismatch");
  return integrate_samples(t, E, {}, channels, consts, initial);
}

// ---------------------------------------------------------------------------
// Loop descriptors

LoopMetrics loop_metrics(const PointTrace& trace) {
  const auto& rows = trace.rows;
  const bool degenerate = std::all_of(rows.begin(), rows.end(), [](const TraceRow& r) {
    return r.E == 0.0 && r.P == 0.0;
  });
  if (degenerate) return {};

  std::vector<std::size_t> up;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i - 1].E < 0.0 && rows[i].E >= 0.0) up.push_back(i);
  if (up.size() < 2) throw std::runtime_error("loop_metrics: no closed cycle in trace");

  const std::size_t first = up[up.size() - 2];
  const std::size_t last = up.back();

  LoopMetrics m;
  for (std::size_t i = first; i <= last; ++i)
    m.p_sat = std::max(m.p_sat, std::abs(rows[i].P));

  // Crossings strictly inside (first, last] cover one upward and one downward pass.
  double rem_sum = 0.0;
  int rem_count = 0;
  double coer_sum = 0.0;
  int coer_count = 0;
  for (std::size_t i = first + 1; i <= last; ++i) {
    const TraceRow& a = rows[i - 1];
    const TraceRow& b = rows[i];
    if ((a.E < 0.0) != (b.E < 0.0) && a.E != b.E) {
      const double w = a.E / (a.E - b.E);
      rem_sum += std::abs(a.P + w * (b.P - a.P));
      ++rem_count;
    }
    if ((a.P < 0.0) != (b.P < 0.0) && a.P != b.P) {
      const double w = a.P / (a.P - b.P);
      coer_sum += std::abs(a.E + w * (b.E - a.E));
      ++coer_count;
    }
  }
  if (rem_count > 0) m.p_remanent = rem_sum / rem_count;
  if (coer_count > 0) m.e_coercive = coer_sum / coer_count;

  double area = 0.0;
  for (std::size_t i = first + 1; i <= last; ++i)
    area += 0.5 * (rows[i].E + rows[i - 1].E) * (rows[i].P - rows[i - 1].P);
  area += 0.5 * (rows[first].E + rows[last].E) * (rows[first].P - rows[last].P);
  m.loop_area = std::abs(area);
  return m;
}

}  // namespace hysmax
