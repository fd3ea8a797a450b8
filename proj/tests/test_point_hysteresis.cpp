#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hysmax/errors.hpp"
#include "hysmax/point_hysteresis.hpp"

using namespace hysmax;

namespace {

const ChannelParams kPe = ChannelParams::paper_pe();

// dP/dE on a branch with fixed drive sign, straight from the definitions.
double slope(double E, double P, int s) {
  const double ps = kSI.eps0 * (kPe.alpha * std::tanh(kPe.beta * E) - kPe.xi * P);
  return kPe.kappa * std::abs(ps) + kPe.theta * s * ps;
}

// Fine fixed-step RK4 in E from (E0, P0) to E1.
double rk4_branch(double E0, double P0, double E1, int n) {
  const double h = (E1 - E0) / n;
  const int s = E1 > E0 ? 1 : -1;
  double E = E0, P = P0;
  for (int i = 0; i < n; ++i) {
    const double k1 = slope(E, P, s);
    const double k2 = slope(E + h / 2, P + h / 2 * k1, s);
    const double k3 = slope(E + h / 2, P + h / 2 * k2, s);
    const double k4 = slope(E + h, P + h * k3, s);
    P += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    E += h;
  }
  return P;
}

struct Loop {
  double remanent = 0, coercive = 0;
};

// Fine RK4 along a sine of amplitude A for `periods`, then crossings of the
// last cycle by linear interpolation.
Loop oracle_loop(double A, int periods, int per_period) {
  std::vector<double> E, P;
  E.push_back(0.0);
  P.push_back(0.0);
  for (int n = 1; n <= periods * per_period; ++n) {
    const double e = A * std::sin(2 * M_PI * n / per_period);
    // small segments with sub-stepping so the kinks are resolved
    P.push_back(rk4_branch(E.back(), P.back(), e, 20));
    E.push_back(e);
  }
  Loop l;
  const std::size_t from = static_cast<std::size_t>((periods - 1) * per_period);
  for (std::size_t n = from; n + 1 < E.size(); ++n) {
    if ((E[n] < 0) != (E[n + 1] < 0) && E[n] != E[n + 1]) {
      const double f = E[n] / (E[n] - E[n + 1]);
      l.remanent = std::max(l.remanent, std::abs(P[n] + f * (P[n + 1] - P[n])));
    }
    if ((P[n] < 0) != (P[n + 1] < 0) && P[n] != P[n + 1]) {
      const double f = P[n] / (P[n] - P[n + 1]);
      l.coercive = std::max(l.coercive, std::abs(E[n] + f * (E[n + 1] - E[n])));
    }
  }
  return l;
}

}  // namespace

TEST_CASE("sgn is three-valued") {
  CHECK(sgn(0.0) == 0);
  CHECK(sgn(-0.0) == 0);
  CHECK(sgn(3.0) == 1);
  CHECK(sgn(-1e-300) == -1);
}

TEST_CASE("psi vanishes on the anhysteretic curve") {
  for (double E : {-5e6, -1e6, -1e3, 0.0, 2e2, 7e5, 3e6}) {
    const double P = kPe.alpha * std::tanh(kPe.beta * E) / kPe.xi;
    CHECK(std::abs(psi(kPe, E, P)) <= 1e-15 * kSI.eps0 * kPe.alpha);
  }
}

TEST_CASE("susceptibility follows kappa |psi| + theta s psi") {
  CHECK(susceptibility(kPe, 2.0, 1) == doctest::Approx(2.0));
  CHECK(susceptibility(kPe, 2.0, -1) == 0.0);
  CHECK(susceptibility(kPe, -2.0, -1) == doctest::Approx(2.0));
  CHECK(susceptibility(kPe, -2.0, 0) == doctest::Approx(1.0));
}

TEST_CASE("step_inertial with zero rates keeps the state") {
  const PointState s{1e5, 3.0, 0.01, 2.0, 0.5};
  const PointState out = step_inertial(s, {}, 1e-4, ChannelSet::pe_only(kPe));
  CHECK(out.E == s.E);
  CHECK(out.P == s.P);
  CHECK(out.M == s.M);
  CHECK(out.t == doctest::Approx(s.t + 1e-4));
}

TEST_CASE("pe-only drive leaves M untouched") {
  PointState s{};
  s.M = 7.0;
  const ChannelSet ch = ChannelSet::pe_only(kPe);
  for (int i = 0; i < 100; ++i) s = step_inertial(s, {1e8 * std::cos(i * 0.3), 5e3}, 1e-4, ch);
  CHECK(s.M == 7.0);
  CHECK(s.P != 0.0);
}

TEST_CASE("ramp 0 -> 2e6 matches the closed-form branch") {
  const ChannelSet ch = ChannelSet::pe_only(kPe);
  PointState s{};
  const int n = 2000;
  const double rate = 2e6 / (n * 1e-6);
  for (int i = 0; i < n; ++i) s = step_inertial(s, {rate, 0.0}, 1e-6, ch);
  const double ref = branch_solution(2e6, 0.0, 0.0, 1, 1, kPe);
  CHECK(std::abs(s.P - ref) <= 1e-6 * std::abs(ref));
}

TEST_CASE("branch_solution") {
  SUBCASE("zero-length branch") { CHECK(branch_solution(1e5, 1e5, 0.02, 1, 1, kPe) == 0.02); }
  SUBCASE("frozen branch") { CHECK(branch_solution(3e5, 1e5, 0.02, -1, 1, kPe) == 0.02); }
  SUBCASE("against fine RK4 of the branch ODE") {
    const double P = branch_solution(2e6, 0.0, 0.0, 1, 1, kPe);
    const double ref = rk4_branch(0.0, 0.0, 2e6, 200000);
    CHECK(std::abs(P - ref) <= 1e-6 * std::abs(ref));
  }
  SUBCASE("descending active branch") {
    // start below the anhysteretic curve, psi < 0 while E falls
    const double P = branch_solution(-1e6, 5e5, 0.25, -1, -1, kPe);
    const double ref = rk4_branch(5e5, 0.25, -1e6, 200000);
    CHECK(std::abs(P - ref) <= 1e-6 * std::abs(ref));
  }
  SUBCASE("drive sign must match the direction") {
    CHECK_THROWS_AS(branch_solution(1e5, 2e5, 0.0, 1, 1, kPe), std::invalid_argument);
  }
}

TEST_CASE("frozen branch holds P exactly") {
  // psi > 0 while E falls: nothing moves until psi changes sign
  const ChannelSet ch = ChannelSet::pe_only(kPe);
  PointState s{5e5, 0.0, 0.0, 0.0, 0.0};
  const double P0 = s.P;
  for (int i = 0; i < 50; ++i) {
    s = step_inertial(s, {-1e8, 0.0}, 1e-5, ch);
    REQUIRE(psi(kPe, s.E, s.P) > 0.0);
    CHECK(s.P == P0);
  }
}

TEST_CASE("sinusoidal drive closes on a limit cycle") {
  const double f = 250.0;
  const std::size_t per = 2000;
  const PointTrace tr = run_drive(Waveform::sine(2e6, f), 5.0 / f, 1.0 / (f * per), ChannelSet::pe_only(kPe));
  REQUIRE(tr.rows.size() >= 5 * per);
  double pmax = 0.0, dev = 0.0;
  for (std::size_t n = 3 * per; n + per < tr.rows.size(); ++n) {
    pmax = std::max(pmax, std::abs(tr.rows[n].P));
    dev = std::max(dev, std::abs(tr.rows[n + per].P - tr.rows[n].P));
  }
  CHECK(dev <= 1e-4 * pmax);
}

TEST_CASE("randomized drives stay bounded by alpha / xi") {
  std::mt19937 rng(12345);
  std::normal_distribution<double> nd(0.0, 3e6);
  const ChannelSet ch = ChannelSet::pe_only(kPe);
  const double bound = kPe.alpha / kPe.xi;
  for (int trial = 0; trial < 20; ++trial) {
    PointState s{};
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double target = nd(rng);
      s = step_inertial(s, {(target - s.E) / 1e-4, 0.0}, 1e-4, ch);
      worst = std::max(worst, std::abs(s.P));
    }
    CHECK(worst <= bound * (1 + 1e-12));
  }
}

TEST_CASE("zero waveform gives a constant trace and zero metrics") {
  Waveform w{[](double) { return 0.0; }, {}};
  const PointTrace tr = run_drive(w, 1e-2, 1e-5, ChannelSet::pe_only(kPe));
  for (const auto& r : tr.rows) CHECK(r.P == 0.0);
  const LoopMetrics m = loop_metrics(tr);
  CHECK(m.p_sat == 0.0);
  CHECK(m.p_remanent == 0.0);
  CHECK(m.e_coercive == 0.0);
  CHECK(m.loop_area == 0.0);
}

TEST_CASE("loop_metrics needs a closed cycle") {
  Waveform w{[](double t) { return 1e9 * t; }, {}};
  const PointTrace tr = run_drive(w, 1e-3, 1e-5, ChannelSet::pe_only(kPe));
  CHECK_THROWS(loop_metrics(tr));
}

TEST_CASE("remanence and coercive field against a fine-step oracle") {
  const double f = 250.0;
  const PointTrace tr = run_drive(Waveform::sine(2e6, f), 5.0 / f, 1.0 / (f * 2000), ChannelSet::pe_only(kPe));
  const LoopMetrics m = loop_metrics(tr);
  const Loop ref = oracle_loop(2e6, 5, 20000);
  CHECK(std::abs(m.p_remanent - ref.remanent) <= 0.01 * ref.remanent);
  CHECK(std::abs(m.e_coercive - ref.coercive) <= 0.01 * ref.coercive);
  CHECK(m.loop_area > 0.0);
}

TEST_CASE("trace CSV round trip") {
  const PointTrace tr = run_drive(Waveform::sine(1e6, 250.0), 4e-3, 1e-5, ChannelSet::pe_only(kPe));
  std::stringstream ss;
  tr.write_csv(ss);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  CHECK(header == "t,E,P,H,M,s_psi,s_drive");
  const PointTrace back = PointTrace::read_csv(ss);
  REQUIRE(back.rows.size() == tr.rows.size());
  for (std::size_t n = 0; n < tr.rows.size(); ++n) {
    CHECK(back.rows[n].t == tr.rows[n].t);
    CHECK(back.rows[n].E == tr.rows[n].E);
    CHECK(back.rows[n].P == tr.rows[n].P);
    CHECK(back.rows[n].s_psi == tr.rows[n].s_psi);
  }
}

TEST_CASE("parameter validation") {
  ChannelParams p = kPe;
  p.xi = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = kPe;
  p.theta = NAN;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(kPe.validate());
}
