#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "magtrap/cli.hpp"
#include "magtrap/config.hpp"
#include "magtrap/schedule_io.hpp"
#include "oracles.hpp"

using namespace magtrap;
using nlohmann::json;

namespace {

constexpr double kHz = two_pi * 1e3;

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "magtrap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("magtrap_test_" + name)).string();
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line " + std::to_string(e.line())) != std::string::npos);
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("preset catalogue") {
  CHECK(presets().size() == 12);
  const Preset& d4 = find_preset("table1-d4");
  CHECK(d4.mode == TrapMode::MultiTrap);
  CHECK(d4.d == doctest::Approx(4e-6));
  CHECK(d4.gradient == doctest::Approx(500));
  CHECK(d4.J == doctest::Approx(0.459 * kHz));
  const Preset& h4 = find_preset("table3-h4");
  CHECK(h4.mode == TrapMode::Linear);
  try {
    find_preset("table2-x");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("table1-d1") != std::string::npos);
  }
}

TEST_CASE("config files") {
  const RunConfig c = parse(
      "# comment line\n"
      "d_um = 5   # trailing comment\n"
      "W1_MHz = 1.5\n"
      "W2_MHz = 1.1\n"
      "gradient_T_per_m = 300\n"
      "seed = 42\n"
      "format = json\n");
  CHECK(c.setup.d == doctest::Approx(5e-6));
  CHECK(c.setup.outer == doctest::Approx(two_pi * 1.5e6));
  CHECK(c.setup.middle == doctest::Approx(two_pi * 1.1e6));
  CHECK(c.setup.field.gradient == 300);
  CHECK(c.seed == 42);
  CHECK(c.format == OutputFormat::Json);
  CHECK_FALSE(c.setup.tabulated_J);

  // a preset applies first, wherever it is written
  const RunConfig p = parse("gradient_T_per_m = 500\npreset = table3-h4\n");
  CHECK(p.setup.mode == TrapMode::Linear);
  CHECK(p.setup.field.gradient == 500);
  CHECK_FALSE(p.setup.tabulated_J);  // overriding a physical input drops the published couplings

  const RunConfig q = parse("preset = table3-h4\npulse_time_us = 5\n");
  CHECK(q.setup.tabulated_J);
  CHECK(q.setup.timing.pulse_time == doctest::Approx(5e-6));

  CHECK(parse("mode = linear\nW_MHz = 0.6\n").setup.mode == TrapMode::Linear);
}

TEST_CASE("config errors carry the line number") {
  CHECK(error_line("d_um = 4\nfrobnicate = 1\n") == 2);
  CHECK(error_line("\n\nd_um = four\n") == 3);
  CHECK(error_line("d_um 4\n") == 1);
  CHECK(error_line("d_um =\n") == 1);
  CHECK(error_line("# x\npreset = nope\n") == 2);
  CHECK(error_line("mode = ring\n") == 1);
  CHECK(error_line("format = xml\n") == 1);
  CHECK(error_line("seed = -3\n") == 1);
  CHECK_THROWS_AS(load_config(temp_path("does_not_exist.cfg")), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"table3", "--help"}).code == kExitOk);
  CHECK(cli({"nonsense"}).code == kExitUsage);
  CHECK(cli({"couplings", "--bogus"}).code == kExitUsage);
  CHECK(cli({"--preset", "table9-d1", "couplings"}).code == kExitUsage);
  CHECK(cli({"--format", "xml", "couplings"}).code == kExitUsage);
  CHECK(cli({"teleport", "--mode", "fast"}).code == kExitUsage);
  CHECK(cli({"teleport", "--outcome", "2"}).code == kExitUsage);
  CHECK(cli({"teleport", "--alpha", "1,x"}).code == kExitUsage);
  CHECK(cli({"teleport", "--alpha", "1", "--beta", "1"}).code == kExitUsage);
  CHECK(cli({"cnot", "--pair", "2-3"}).code == kExitUsage);
  CHECK(cli({"cnot", "--frame", "lab", "--integrate"}).code == kExitUsage);
  CHECK(cli({"--config", temp_path("missing.cfg"), "couplings"}).code == kExitUsage);
  const Run ok = cli({"couplings"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.err.empty());
  const Run v = cli({"verify", "--format", "json"});
  CHECK(v.code == kExitOk);
  CHECK(json::parse(v.out)["passed"] == true);
}

TEST_CASE("diagnostics go to stderr and name the problem") {
  const Run r = cli({"--preset", "table9-d1", "couplings"});
  CHECK(r.out.empty());
  CHECK(r.err.find("unknown preset") != std::string::npos);
}

TEST_CASE("couplings report for a preset") {
  const Run r = cli({"--preset", "table1-d4", "--format", "json", "couplings"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto ref = oracle::multi_trap_row(4e-6, two_pi * 1.37e6, two_pi * 1.24e6, 500);
  CHECK(j["J_rad_per_s"].get<double>() == doctest::Approx(ref.J).epsilon(1e-9));
  CHECK(j["J13_rad_per_s"].get<double>() == doctest::Approx(ref.J13).epsilon(1e-9));
  CHECK(j["published"]["J_rad_per_s"].get<double>() == doctest::Approx(0.459 * kHz));
  // a gradient override drops the published block
  const json k = json::parse(cli({"--preset", "table1-d4", "--gradient", "400", "--format", "json", "couplings"}).out);
  CHECK_FALSE(k.contains("published"));
  CHECK(k["J_rad_per_s"].get<double>() == doctest::Approx(ref.J * 0.64).epsilon(1e-9));
}

TEST_CASE("config file with the linear preset and a gradient override") {
  const std::string path = temp_path("h4.cfg");
  std::ofstream(path) << "preset = table3-h4\ngradient_T_per_m = 500\nformat = json\n";
  const Run r = cli({"--config", path, "couplings"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["setup"]["mode"] == "linear");
  CHECK_FALSE(j.contains("published"));
  const double W = find_preset("table3-h4").outer;
  CHECK(j["J_rad_per_s"].get<double>() == doctest::Approx(oracle::linear_row(W, 500).J).epsilon(1e-9));
  std::filesystem::remove(path);
}

TEST_CASE("reports are byte-for-byte reproducible") {
  for (const char* fmt : {"json", "csv", "text"}) {
    const auto a = cli({"--seed", "7", "--format", fmt, "teleport", "--alpha", "0.6", "--beta", "0,0.8"});
    const auto b = cli({"--seed", "7", "--format", fmt, "teleport", "--alpha", "0.6", "--beta", "0,0.8"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  const auto s = cli({"--format", "json", "table1", "--d", "3", "--serial"});
  const auto p = cli({"--format", "json", "table1", "--d", "3"});
  CHECK(s.out == p.out);
}

TEST_CASE("table outputs") {
  const Run r = cli({"--format", "csv", "table1", "--d", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("d(um),W1(MHz),W2(MHz),dB/dz(T/m),Delta(um),eps_max,h(um),J(kHz),J13(kHz)\n", 0) == 0);
  const json t3 = json::parse(cli({"--format", "json", "table3", "--h", "4"}).out);
  REQUIRE(t3["rows"].size() == 1);
  CHECK(t3["rows"][0]["feasible"] == true);
  CHECK(t3["rows"][0]["epsilon_max"].get<double>() < 0.05);
  CHECK(t3["rows"][0].contains("published"));
  const json off = json::parse(cli({"--format", "json", "table3", "--h", "4.5"}).out);
  CHECK_FALSE(off["rows"][0].contains("published"));
}

TEST_CASE("cnot command") {
  const std::string path = temp_path("cnot.sched");
  const Run r = cli({"--preset", "table1-d4", "--format", "json", "cnot", "--emit-schedule", path});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["couplings"] == "tabulated");
  CHECK(j["segments"] == 16);
  CHECK(j["pulses"] == 12);
  CHECK(j["total_duration_s"].get<double>() == doctest::Approx(3.84e-3).epsilon(0.02));
  CHECK(j["gate_error"].get<double>() < 1e-9);
  std::ifstream in(path);
  const PulseSchedule s = read_schedule(in);
  CHECK(s.segments.size() == 16);
  CHECK(s.total_duration() == doctest::Approx(j["total_duration_s"].get<double>()).epsilon(1e-13));
  std::filesystem::remove(path);

  const json c = json::parse(cli({"--preset", "table1-d4", "--format", "json", "cnot", "--couplings", "computed"}).out);
  CHECK(c["couplings"] == "computed");
  CHECK(c["zz_time_s"].get<double>() < j["zz_time_s"].get<double>());
  const json i = json::parse(cli({"--format", "json", "cnot", "--integrate", "--step", "2e-8"}).out);
  CHECK(i["integrated"]["fidelity_vs_ideal"].get<double>() > 0.99);
}

TEST_CASE("output file") {
  const std::string path = temp_path("report.json");
  const Run r = cli({"--format", "json", "--output", path, "modes"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  CHECK(j["frequencies_rad_per_s"].size() == 3);
  std::filesystem::remove(path);
}
