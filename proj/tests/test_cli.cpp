#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "sselab/error.hpp"
#include "sselab/scenario.hpp"

using namespace sselab;
using namespace sselab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sselab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Scenario from_ini(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(parse_ini(in));
}

Scenario small_pauli() {
  return from_ini(
      "[scenario]\nkind = pauli\n"
      "[noise]\nkind = ou, wn\ngamma = 0.3\nk = 0.2\n"
      "[operator]\nnoise_op = x\nhamiltonian = 0.5*x\n"
      "[state]\ninitial = 0, +\n"
      "[sim]\ndt = 0.01\nT = 1\npaths = 40\nseed = 5\nrecord_every = 10\n"
      "[output]\ncheck_times = 0.5, 1\ntrajectories = 2\n");
}

}  // namespace

TEST_CASE("presets parse with their parameters") {
  REQUIRE(presets().size() == 6);
  for (const auto& p : presets()) {
    std::istringstream in(p.ini);
    CHECK_NOTHROW(parse_scenario(parse_ini(in)));
  }
  std::istringstream f3(find_preset("fig3")->ini);
  const Scenario s3 = parse_scenario(parse_ini(f3));
  CHECK(s3.kind == ScenarioKind::ApproxOrder);
  CHECK(s3.gamma == 0.2);
  CHECK(s3.k == 0.1);
  std::istringstream f5(find_preset("fig5")->ini);
  const Scenario s5 = parse_scenario(parse_ini(f5));
  CHECK(s5.kind == ScenarioKind::NonCommuting);
  CHECK(s5.initial.size() == 3);
  std::istringstream f7(find_preset("fig7b")->ini);
  const Scenario s7 = parse_scenario(parse_ini(f7));
  CHECK(s7.k == 0.01);
  CHECK(s7.init == InitialData::Stationary);
  CHECK_FALSE(find_preset("nope").has_value());
}

TEST_CASE("unknown keys and sections are rejected") {
  CHECK_THROWS_AS(from_ini("[scenario]\nkind = pauli\n[noise]\ngama = 0.1\n"), Error);
  CHECK_THROWS_AS(from_ini("[scenario]\nkind = pauli\n[extra]\nx = 1\n"), Error);
  CHECK_THROWS_AS(from_ini("[scenario]\nkind = bogus\n"), Error);
  CHECK_THROWS_AS(from_ini("[scenario]\nkind = pauli\n[sim]\npaths = -3\n"), Error);
  CHECK_THROWS_AS(from_ini("[noise]\nkind = wn\n"), Error);
}

TEST_CASE("config round trip") {
  const Scenario s = small_pauli();
  const ConfigMap c = to_config(s);
  std::istringstream in(to_ini(c));
  const ConfigMap back = parse_ini(in);
  CHECK(back == c);
  CHECK(to_config(parse_scenario(back)) == c);
}

TEST_CASE("state specs") {
  CHECK(std::abs(parse_state("+", 1).amplitudes()(1) - cplx(std::sqrt(0.5), 0)) < 1e-15);
  CHECK(std::abs(parse_state("r", 1).amplitudes()(1) - cplx(0, std::sqrt(0.5))) < 1e-15);
  const auto ghz = parse_state("ghz", 2).amplitudes();
  CHECK(std::abs(ghz(0) - ghz(3)) < 1e-15);
  CHECK(std::abs(ghz(1)) == 0.0);
  CHECK(std::abs(parse_state("01", 2).amplitudes()(1) - 1.0) < 1e-15);
  CHECK_THROWS_AS(parse_state("c1", 1), Error);
  CHECK_THROWS_AS(parse_state("0", 2), Error);
}

TEST_CASE("reruns are byte identical and thread independent") {
  std::ostringstream log;
  const fs::path a = scratch("a"), b = scratch("b"), c = scratch("c");
  RunOptions o;
  o.out = a;
  o.threads = 1;
  REQUIRE(run(small_pauli(), o, log).exit_code == kExitOk);
  o.out = b;
  o.threads = 4;
  REQUIRE(run(small_pauli(), o, log).exit_code == kExitOk);
  const auto sa = snapshot(a);
  CHECK(sa.count("run.json") == 1);
  CHECK(sa.size() > 4);
  CHECK(sa == snapshot(b));

  // replaying run.json reproduces everything
  o.out = c;
  o.threads = 2;
  REQUIRE(run(parse_scenario(load_config(a / "run.json")), o, log).exit_code == kExitOk);
  CHECK(sa == snapshot(c));

  // a different seed changes the Monte-Carlo columns
  const fs::path d = scratch("d");
  o.out = d;
  o.seed = 6;
  run(small_pauli(), o, log);
  CHECK(snapshot(d) != sa);
  for (const auto& p : {a, b, c, d}) fs::remove_all(p);
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  RunOptions o;
  o.out = scratch("exit");
  CHECK(run_command("/nonexistent/config.ini", o, log) == kExitConfig);
  const fs::path bad = o.out / "bad.ini";
  std::ofstream(bad) << "[scenario]\nkind = pauli\n[sim]\nwhat = 1\n";
  CHECK(run_command(bad.string(), o, log) == kExitConfig);

  // strong noise: the Magnus mean is far off the simulation
  const fs::path breach = o.out / "breach.ini";
  std::ofstream(breach) << "[scenario]\nkind = noncommuting\n[noise]\nkind = wn\ngamma = 1.5\n"
                           "[state]\ninitial = c2\n[sim]\ndt = 0.005\nT = 3\npaths = 300\nseed = 2\n"
                           "record_every = 20\n[output]\ncheck_times = 1, 2, 3\n";
  o.check = true;
  o.out = o.out / "run";
  CHECK(run_command(breach.string(), o, log) == kExitCheck);
  o.check = false;
  CHECK(run_command(breach.string(), o, log) == kExitOk);
  fs::remove_all(scratch("exit"));
}
