#include "hysmax/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "hysmax/cavity_sim.hpp"
#include "hysmax/config.hpp"
#include "hysmax/errors.hpp"
#include "hysmax/point_hysteresis.hpp"
#include "hysmax/validation.hpp"

#ifndef HYSMAX_VERSION
#define HYSMAX_VERSION "unknown"
#endif

namespace hysmax::cli {

namespace fs = std::filesystem;

namespace {

struct Names {
  const char* name;
  Subcommand sub;
  const char* about;
  bool needs_config;
};

constexpr Names kSubcommands[] = {
    {"point-loop", Subcommand::point_loop, "Drive the point model with a sine and report loop metrics", true},
    {"cavity-run", Subcommand::cavity_run, "Run the cavity simulation and write probe traces", true},
    {"validate", Subcommand::validate, "Run the acceptance checks and print a summary", false},
    {"report", Subcommand::report, "Print derived quantities for a configuration", false},
    {"version", Subcommand::version, "Print the version", false},
};

AppConfig resolve_config(const Command& cmd, AppConfig fallback) {
  AppConfig cfg = cmd.config_path ? load_config(*cmd.config_path) : std::move(fallback);
  for (const auto& o : cmd.overrides) apply_override(cfg, o);
  if (cmd.output_dir) cfg.output.dir = *cmd.output_dir;
  cfg.resolve();
  return cfg;
}

fs::path output_path(const AppConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.output.dir);
  return fs::path(cfg.output.dir) / (cfg.output.prefix + suffix);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

void write_sidecar(const AppConfig& cfg, const ConsistencyReport& rep, const fs::path& p) {
  auto f = open_out(p);
  f << serialize_config(cfg, &rep, HYSMAX_VERSION);
}

void print_report(std::ostream& out, const ConsistencyReport& r) {
  out << std::setprecision(10) << "omega=" << r.omega << '\n'
      << "cycles_per_revolution=" << r.cycles_per_revolution << '\n'
      << "dt=" << r.dt << '\n'
      << "dt_max=" << r.dt_max << '\n'
      << "steps_per_period=" << r.steps_per_period << '\n'
      << "steps_per_revolution=" << r.steps_per_revolution << '\n'
      << "f_lowest=" << r.f_lowest << '\n'
      << "drive_over_f_lowest=" << r.drive_over_f_lowest << '\n'
      << "rim_speed_ratio_sq=" << r.rim_speed_ratio_sq << '\n';
}

int do_point_loop(const Command& cmd, std::ostream& out) {
  const AppConfig cfg = resolve_config(cmd, default_config());
  const PointLoopSpec& p = cfg.point;
  if (!(std::isfinite(p.amplitude) && p.frequency > 0.0 && p.periods > 0.0 && p.steps_per_period >= 8))
    throw ConfigError("point: need finite amplitude, frequency > 0, periods > 0, steps_per_period >= 8");
  ChannelSet channels;
  try {
    channels = ChannelSet::pe_only(cfg.run.hysteresis);
    channels.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("hysteresis: ") + e.what());
  }
  const double dt = 1.0 / (p.frequency * static_cast<double>(p.steps_per_period));
  const PointTrace trace = run_drive(Waveform::sine(p.amplitude, p.frequency), p.periods / p.frequency, dt, channels);
  const fs::path csv = output_path(cfg, "_point.csv");
  {
    auto f = open_out(csv);
    trace.write_csv(f);
  }
  out << "rows=" << trace.rows.size() << '\n' << "transitions=" << trace.transitions.size() << '\n';
  out << std::setprecision(10);
  if (p.periods >= 2.0) {
    const LoopMetrics m = loop_metrics(trace);
    out << "p_sat=" << m.p_sat << '\n'
        << "p_remanent=" << m.p_remanent << '\n'
        << "e_coercive=" << m.e_coercive << '\n'
        << "loop_area=" << m.loop_area << '\n';
  }
  out << "csv=" << csv.string() << '\n';
  return kExitOk;
}

int do_cavity_run(const Command& cmd, std::ostream& out) {
  const AppConfig cfg = resolve_config(cmd, default_config());
  cfg.run.validate();
  const ConsistencyReport rep = consistency_report(cfg.run);
  out << "steps=" << cfg.run.total_steps() << '\n';
  print_report(out, rep);
  write_sidecar(cfg, rep, output_path(cfg, "_meta.cfg"));

  RunResult res;
  try {
    res = run(cfg.run, kSI, cfg.output.snapshot);
  } catch (const InstabilityError& e) {
    const fs::path snap = output_path(cfg, "_abort.hysnap");
    e.snapshot.write(snap);
    out << "abort_snapshot=" << snap.string() << '\n';
    throw;
  }
  for (const auto& tr : res.traces) {
    const fs::path p = output_path(cfg, "_probe_" + tr.probe.name + ".csv");
    auto f = open_out(p);
    tr.write_csv(f);
    out << "probe_csv=" << p.string() << '\n';
  }
  {
    const fs::path p = output_path(cfg, "_diagnostics.csv");
    auto f = open_out(p);
    write_diagnostics_csv(f, res.diagnostics);
    out << "diagnostics_csv=" << p.string() << '\n';
  }
  if (res.final_state) {
    const fs::path p = output_path(cfg, "_final.hysnap");
    res.final_state->write(p);
    out << "snapshot=" << p.string() << '\n';
  }
  out << "final_time=" << res.final_time << '\n' << "status=ok\n";
  return kExitOk;
}

int do_validate(const Command& cmd, std::ostream& out) {
  validation::SuiteConfig suite = validation::default_suite();
  if (cmd.config_path || !cmd.overrides.empty()) suite.scaled = resolve_config(cmd, suite.scaled);
  suite.scaled.run.validate();
  bool all = true;
  validation::run_suite(suite, [&](const validation::CheckResult& r) {
    all = all && r.passed;
    out << "check=" << r.name << " status=" << (r.passed ? "PASS" : "FAIL") << " seconds=" << std::setprecision(3)
        << r.seconds << ' ' << r.detail << '\n'
        << std::flush;
  });
  out << "summary=" << (all ? "PASS" : "FAIL") << '\n';
  return all ? kExitOk : kExitNumerical;
}

int do_report(const Command& cmd, std::ostream& out) {
  const AppConfig cfg = resolve_config(cmd, validation::paper_rotating_config());
  print_report(out, consistency_report(cfg.run));
  return kExitOk;
}

}  // namespace

Command parse_args(int argc, const char* const* argv) {
  CLI::App app{"Hysteretic rotating-medium FDTD engine", "hysmax"};
  app.require_subcommand(1, 1);
  Command cmd;
  std::string config, output;
  std::vector<std::string> sets;
  std::vector<std::pair<CLI::App*, const Names*>> subs;
  for (const auto& n : kSubcommands) {
    CLI::App* sub = app.add_subcommand(n.name, n.about);
    if (n.sub != Subcommand::version) {
      auto* opt = sub->add_option("-c,--config", config, "Configuration file");
      if (n.needs_config) opt->required();
      sub->add_option("-o,--output", output, "Output directory (overrides output.dir)");
      sub->add_option("--set", sets, "Override a key, e.g. --set material.omega_rpm=0")->allow_extra_args(false);
    }
    subs.emplace_back(sub, &n);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    for (auto& [sub, n] : subs)
      if (sub->parsed()) throw HelpRequested(sub->help());
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (auto& [sub, n] : subs)
    if (sub->parsed()) cmd.subcommand = n->sub;
  if (!config.empty()) cmd.config_path = config;
  if (!output.empty()) cmd.output_dir = output;
  for (const auto& s : sets)
    if (s.find('=') == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
  cmd.overrides = std::move(sets);
  return cmd;
}

int dispatch(const Command& cmd, std::ostream& out) {
  switch (cmd.subcommand) {
    case Subcommand::point_loop:
      return do_point_loop(cmd, out);
    case Subcommand::cavity_run:
      return do_cavity_run(cmd, out);
    case Subcommand::validate:
      return do_validate(cmd, out);
    case Subcommand::report:
      return do_report(cmd, out);
    case Subcommand::version:
      out << "version=" << HYSMAX_VERSION << '\n';
      return kExitOk;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(parse_args(argc, argv), out);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'hysmax --help' for usage\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace hysmax::cli
