#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sselab/laws.hpp"
#include "sselab/noise.hpp"
#include "sselab/qstate.hpp"
#include "sselab/sde.hpp"

namespace sselab::cli {

enum class ScenarioKind { Pauli, Projection, NonCommuting, TwoQubit, ApproxOrder, Distribution };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& s);

/// Section -> key -> raw value, as read from an INI file or the "config"
/// object of a run.json.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

struct Scenario {
  std::string name = "custom";
  ScenarioKind kind = ScenarioKind::Pauli;

  // [noise]: one series per (noise kind, initial state) pair.
  std::vector<NoiseKind> noise_kinds{NoiseKind::WhiteNoise};
  double gamma = 0.2;
  double k = 0.0;
  InitialData init = InitialData::Calibrated;

  // [operator]
  std::string noise_op = "x";
  std::string hamiltonian = "0";
  double alpha = 1.0;
  qstate::Axis h_axis = qstate::Axis::X;
  qstate::Axis s_axis = qstate::Axis::Z;
  laws::NoiseClass noise_class = laws::NoiseClass::Pauli;
  std::string q = "x";

  // [state]
  std::vector<std::string> initial{"0"};

  // [sim]
  sde::SimConfig sim;

  // [output]
  std::vector<double> distribution_times;
  double time_unit = 1.0;
  std::size_t law_samples = 2000;
  std::vector<double> check_times;
  std::size_t trajectories = 0;
  double closure_T = 0.0;  // 0 means sim.T
  double closure_dt = 1e-3;

  std::vector<NoiseModel> models() const;
};

ConfigMap parse_ini(std::istream& in);
/// Reads an INI file, or a run.json whose "config" object is replayed.
ConfigMap load_config(const std::filesystem::path& path);

/// Throws Error(Config) on unknown sections or keys and on bad values.
Scenario parse_scenario(const ConfigMap& config);
ConfigMap to_config(const Scenario& s);
std::string to_ini(const ConfigMap& config);

/// Initial-state spec: a product of per-qubit symbols 0, 1, +, -, r (+i), l (-i),
/// "ghz" for the n-qubit GHZ state, or c1/c2/c3 for the +1 eigenstate of
/// sigma_i in a non-commuting scenario.
PureState parse_state(const std::string& spec, int n_qubits, const Scenario* context = nullptr);

struct Preset {
  std::string name;
  std::string description;
  std::string ini;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);
void list_presets(std::ostream& out);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  bool check = false;
  std::filesystem::path out;
  unsigned threads = 0;
};

struct CheckResult {
  std::string series;
  std::string metric;
  double t = 0.0;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct RunReport {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> files;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheck = 2;

/// Runs every series, writes artifacts under options.out and evaluates the
/// acceptance checks. Exit code 2 only when options.check is set.
RunReport run(Scenario scenario, const RunOptions& options, std::ostream& log);

/// Resolves a preset name or a config path, then runs it. Config and
/// simulation errors map to exit code 1.
int run_command(const std::string& target, const RunOptions& options, std::ostream& log);

/// 17 significant digits ("%.17g"); "nan" and "inf" spelled out.
std::string format_double(double v);

}  // namespace sselab::cli
