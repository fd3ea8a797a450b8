#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hysmax/cli.hpp"
#include "hysmax/config.hpp"
#include "hysmax/errors.hpp"
#include "hysmax/validation.hpp"

using namespace hysmax;
namespace fs = std::filesystem;

namespace {

AppConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "hysmax");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hysmax_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("parse keys, comments and probes") {
  const AppConfig c = parse(
      "# comment\n"
      "grid.nx = 10   # trailing\n"
      "material.omega_rpm = 1497\n"
      "source.frequency = 250\n"
      "run.scheme = lagged_explicit\n"
      "probes.a = 1, 2, 0.5\n"
      "output.snapshot = true\n"
      "meta.whatever = 3\n");
  CHECK(c.run.grid.nx == 10);
  CHECK(c.omega_rpm == 1497.0);
  CHECK(c.run.material.omega == doctest::Approx(156.77).epsilon(3e-5));
  CHECK(c.run.scheme == Scheme::lagged_explicit);
  REQUIRE(c.run.probes.size() == 1);
  CHECK(c.run.probes[0].name == "a");
  CHECK(c.run.probes[0].position[2] == 0.5);
  CHECK(c.output.snapshot);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("grid.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("grid.nx = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse("grid.nx 10\n"), ConfigError);
  CHECK_THROWS_AS(parse("grid.nx = 1\ngrid.nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("probes.p = 1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("probes.b@d = 1, 2, 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("run.scheme = fancy\n"), ConfigError);
  try {
    parse("\n\ngrid.bogus = 1\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test:3") != std::string::npos);
  }
}

TEST_CASE("overrides win over the file") {
  AppConfig c = parse("material.omega_rpm = 1497\n");
  apply_override(c, "material.omega_rpm=0");
  c.resolve();
  CHECK(c.omega_rpm == 0.0);
  CHECK(c.run.material.omega == 0.0);
  CHECK_THROWS_AS(apply_override(c, "nonsense"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "meta.version=1"), ConfigError);
}

TEST_CASE("serialized config round trips, including the sidecar") {
  AppConfig c = validation::scaled_config();
  c.run.probes.push_back({"q", {1.0, 1.5, 0.25}});
  const ConsistencyReport rep = consistency_report(c.run);
  const std::string text = serialize_config(c, &rep, "9.9");
  CHECK(text.find("meta.dt") != std::string::npos);
  const AppConfig back = parse(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
  for (const auto& k : known_keys()) CHECK(text.find(k + " = ") != std::string::npos);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("shipped configs") {
  const fs::path dir = fs::path(HYSMAX_SOURCE_DIR) / "configs";
  CHECK(load_config(dir / "paper_scaled_k1e4.cfg") == validation::scaled_config());
  CHECK(load_config(dir / "paper_rotating.cfg") == validation::paper_rotating_config());
  AppConfig rest = validation::paper_rotating_config();
  rest.omega_rpm = 0.0;
  rest.run.duration = 10.0;
  rest.run.duration_unit = DurationUnit::periods;
  rest.output.prefix = "rest";
  rest.resolve();
  CHECK(load_config(dir / "paper_rest.cfg") == rest);
  const AppConfig loop = load_config(dir / "loop.cfg");
  CHECK(loop.point.amplitude == 2e6);
  CHECK(loop.point.frequency == 250.0);
  for (const char* name : {"paper_scaled_k1e4.cfg", "paper_rotating.cfg", "paper_rest.cfg"})
    CHECK_NOTHROW(load_config(dir / name).run.validate());
}

TEST_CASE("argument parsing") {
  SUBCASE("point-loop needs a config") {
    const char* argv[] = {"hysmax", "point-loop"};
    CHECK_THROWS_AS(cli::parse_args(2, argv), cli::UsageError);
  }
  SUBCASE("cavity-run with overrides") {
    const char* argv[] = {"hysmax", "cavity-run", "--config", "paper.cfg", "--set", "material.omega_rpm=0",
                          "-o", "dir"};
    const cli::Command c = cli::parse_args(8, argv);
    CHECK(c.subcommand == cli::Subcommand::cavity_run);
    CHECK(*c.config_path == "paper.cfg");
    CHECK(*c.output_dir == "dir");
    REQUIRE(c.overrides.size() == 1);
    CHECK(c.overrides[0] == "material.omega_rpm=0");
  }
  SUBCASE("validate without a config") {
    const char* argv[] = {"hysmax", "validate"};
    const cli::Command c = cli::parse_args(2, argv);
    CHECK(c.subcommand == cli::Subcommand::validate);
    CHECK(!c.config_path);
  }
  SUBCASE("unknown subcommand") {
    const char* argv[] = {"hysmax", "frobnicate"};
    CHECK_THROWS_AS(cli::parse_args(2, argv), cli::UsageError);
  }
  SUBCASE("malformed --set") {
    const char* argv[] = {"hysmax", "report", "--set", "novalue"};
    CHECK_THROWS_AS(cli::parse_args(4, argv), cli::UsageError);
  }
}

TEST_CASE("exit codes") {
  std::string out, err;
  CHECK(run_cli({"version"}, &out) == cli::kExitOk);
  CHECK(out.find("version=") == 0);
  CHECK(run_cli({"bogus"}, nullptr, &err) == cli::kExitUsage);

  CHECK(run_cli({"report"}, &out) == cli::kExitOk);
  const auto om = out.find("omega=");
  REQUIRE(om != std::string::npos);
  CHECK(std::stod(out.substr(om + 6)) == doctest::Approx(156.77).epsilon(3e-5));
  CHECK(out.find("cycles_per_revolution=10.02") != std::string::npos);

  const fs::path dir = temp_dir("cli");
  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "grid.nope = 1\n";
  CHECK(run_cli({"cavity-run", "-c", bad.string()}, nullptr, &err) == cli::kExitConfig);
  CHECK(err.find("config error") != std::string::npos);

  // rim-speed gate
  const fs::path cfg = fs::path(HYSMAX_SOURCE_DIR) / "configs" / "paper_scaled_k1e4.cfg";
  CHECK(run_cli({"cavity-run", "-c", cfg.string(), "--set", "material.omega_rpm=5e8", "-o", dir.string()}) ==
        cli::kExitConfig);
}

TEST_CASE("point-loop and a short cavity-run write their outputs") {
  const fs::path dir = temp_dir("outputs");
  const fs::path loop = fs::path(HYSMAX_SOURCE_DIR) / "configs" / "loop.cfg";
  std::string out;
  REQUIRE(run_cli({"point-loop", "-c", loop.string(), "-o", dir.string()}, &out) == cli::kExitOk);
  CHECK(out.find("p_sat=") != std::string::npos);
  CHECK(fs::exists(dir / "loop_point.csv"));

  const fs::path cfg = fs::path(HYSMAX_SOURCE_DIR) / "configs" / "paper_scaled_k1e4.cfg";
  REQUIRE(run_cli({"cavity-run", "-c", cfg.string(), "-o", dir.string(), "--set", "run.duration_unit=seconds",
                   "--set", "run.duration=1e-8", "--set", "output.snapshot=true"},
                  &out) == cli::kExitOk);
  CHECK(out.find("status=ok") != std::string::npos);
  CHECK(fs::exists(dir / "scaled_probe_p0.csv"));
  CHECK(fs::exists(dir / "scaled_diagnostics.csv"));
  CHECK(fs::exists(dir / "scaled_final.hysnap"));
  const AppConfig side = load_config(dir / "scaled_meta.cfg");
  AppConfig expect = load_config(cfg);
  apply_override(expect, "run.duration_unit=seconds");
  apply_override(expect, "run.duration=1e-8");
  apply_override(expect, "output.snapshot=true");
  expect.output.dir = dir.string();
  expect.resolve();
  CHECK(side == expect);
}
