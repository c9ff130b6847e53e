#include "sselab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "sselab/approx.hpp"
#include "sselab/error.hpp"
#include "sselab/magnus.hpp"
#include "sselab/stats.hpp"

namespace sselab::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) config_error(key + ": expected a number, got '" + v + "'");
  return d;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
    config_error(key + ": expected a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    config_error(key + ": integer out of range");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

std::string format_reals(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double d : v) s.push_back(format_double(d));
  return join(s);
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"scenario", {"name", "kind"}},
      {"noise", {"kind", "gamma", "k", "init"}},
      {"operator", {"noise_op", "hamiltonian", "alpha", "h_axis", "s_axis", "class", "q"}},
      {"state", {"initial"}},
      {"sim", {"dt", "T", "scheme", "renormalize", "paths", "seed", "record_every"}},
      {"output",
       {"distribution_times", "time_unit", "law_samples", "check_times", "trajectories", "closure_T", "closure_dt"}},
  };
  return keys;
}

// Nearest recorded index to t; throws when t is off the record grid.
std::size_t record_index(const std::vector<double>& times, double t, double dt) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::abs(times[j] - t) < std::abs(times[best] - t)) best = j;
  if (std::abs(times[best] - t) > 0.5 * dt + 1e-12)
    config_error("time " + format_double(t) + " is not on the record grid");
  return best;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += c;
    else if (c == '+')
      out += 'p';
    else if (c == '-')
      out += 'm';
    else
      out += '_';
  }
  return out;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(ErrorKind::Config, "cannot write " + path.string());
    row_strings(header);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    s.reserve(values.size());
    for (double v : values) s.push_back(format_double(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

int qubit_count(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw Error(ErrorKind::DimensionMismatch, "register dimension is not 2^n");
  return n;
}

ComplexMatrix operator_or_zero(const std::string& spec, Eigen::Index dim) {
  const std::string s = trim(spec);
  if (s.empty() || s == "0") return ComplexMatrix::Zero(dim, dim);
  ComplexMatrix m = qstate::build_operator(s);
  if (m.rows() != dim) throw Error(ErrorKind::DimensionMismatch, "hamiltonian and noise operator sizes differ");
  return m;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Pauli: return "pauli";
    case ScenarioKind::Projection: return "projection";
    case ScenarioKind::NonCommuting: return "noncommuting";
    case ScenarioKind::TwoQubit: return "twoqubit";
    case ScenarioKind::ApproxOrder: return "approx-order";
    case ScenarioKind::Distribution: return "distribution";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  for (auto k : {ScenarioKind::Pauli, ScenarioKind::Projection, ScenarioKind::NonCommuting, ScenarioKind::TwoQubit,
                 ScenarioKind::ApproxOrder, ScenarioKind::Distribution})
    if (to_string(k) == s) return k;
  config_error("unknown scenario kind '" + s + "'");
}

std::vector<NoiseModel> Scenario::models() const {
  std::vector<NoiseModel> out;
  for (NoiseKind kind : noise_kinds)
    out.push_back(kind == NoiseKind::WhiteNoise ? NoiseModel::white(gamma) : NoiseModel::ou(gamma, k, init));
  return out;
}

ConfigMap parse_ini(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    config_error(std::string("bad INI: ") + e.what());
  }
  ConfigMap out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) config_error("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) out[section][key] = trim(value.get_value<std::string>());
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      config_error(std::string("bad JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) config_error("run.json has no config object");
    ConfigMap out;
    for (const auto& [section, body] : j["config"].items()) {
      if (!body.is_object()) config_error("config section '" + section + "' is not an object");
      for (const auto& [key, value] : body.items()) {
        if (value.is_string())
          out[section][key] = value.get<std::string>();
        else if (value.is_number())
          out[section][key] = format_double(value.get<double>());
        else if (value.is_boolean())
          out[section][key] = value.get<bool>() ? "true" : "false";
        else
          config_error("config value " + section + "." + key + " must be a string or number");
      }
    }
    return out;
  }
  std::istringstream ss(text);
  return parse_ini(ss);
}

Scenario parse_scenario(const ConfigMap& config) {
  for (const auto& [section, body] : config) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) config_error("unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) config_error("unknown key '" + key + "' in [" + section + "]");
  }
  const auto get = [&](const std::string& section, const std::string& key) -> const std::string* {
    const auto s = config.find(section);
    if (s == config.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  Scenario sc;
  try {
    const std::string* kind = get("scenario", "kind");
    if (!kind) config_error("[scenario] kind is required");
    sc.kind = parse_scenario_kind(*kind);
    if (auto v = get("scenario", "name")) sc.name = *v;

    if (auto v = get("noise", "kind")) {
      sc.noise_kinds.clear();
      for (const auto& item : split_list(*v)) sc.noise_kinds.push_back(parse_noise_kind(item));
      if (sc.noise_kinds.empty()) config_error("[noise] kind is empty");
    }
    if (auto v = get("noise", "gamma")) sc.gamma = parse_real("gamma", *v);
    if (auto v = get("noise", "k")) sc.k = parse_real("k", *v);
    if (auto v = get("noise", "init")) sc.init = parse_initial_data(*v);

    if (auto v = get("operator", "noise_op")) sc.noise_op = *v;
    if (auto v = get("operator", "hamiltonian")) sc.hamiltonian = *v;
    if (auto v = get("operator", "alpha")) sc.alpha = parse_real("alpha", *v);
    if (auto v = get("operator", "h_axis")) sc.h_axis = qstate::parse_axis(*v);
    if (auto v = get("operator", "s_axis")) sc.s_axis = qstate::parse_axis(*v);
    if (auto v = get("operator", "class")) sc.noise_class = laws::parse_noise_class(*v);
    if (auto v = get("operator", "q")) sc.q = *v;

    if (auto v = get("state", "initial")) {
      sc.initial = split_list(*v);
      if (sc.initial.empty()) config_error("[state] initial is empty");
    }

    if (auto v = get("sim", "dt")) sc.sim.dt = parse_real("dt", *v);
    if (auto v = get("sim", "T")) sc.sim.T = parse_real("T", *v);
    if (auto v = get("sim", "scheme")) sc.sim.scheme = sde::parse_scheme(*v);
    if (auto v = get("sim", "renormalize")) sc.sim.renormalize = parse_bool("renormalize", *v);
    if (auto v = get("sim", "paths")) sc.sim.n_paths = parse_count("paths", *v);
    if (auto v = get("sim", "seed")) sc.sim.master_seed = parse_count("seed", *v);
    if (auto v = get("sim", "record_every")) sc.sim.record_every = parse_count("record_every", *v);

    if (auto v = get("output", "distribution_times")) sc.distribution_times = parse_reals("distribution_times", *v);
    if (auto v = get("output", "time_unit")) sc.time_unit = parse_real("time_unit", *v);
    if (auto v = get("output", "law_samples")) sc.law_samples = parse_count("law_samples", *v);
    if (auto v = get("output", "check_times")) sc.check_times = parse_reals("check_times", *v);
    if (auto v = get("output", "trajectories")) sc.trajectories = parse_count("trajectories", *v);
    if (auto v = get("output", "closure_T")) sc.closure_T = parse_real("closure_T", *v);
    if (auto v = get("output", "closure_dt")) sc.closure_dt = parse_real("closure_dt", *v);

    sc.sim.validate();
    for (const auto& m : sc.models()) m.validate();
    if (sc.time_unit <= 0.0) config_error("time_unit must be positive");
    if (sc.law_samples < 10 && !sc.distribution_times.empty()) config_error("law_samples must be >= 10");
    if (sc.trajectories > sc.sim.n_paths) config_error("trajectories exceeds paths");
    if (sc.kind == ScenarioKind::Distribution && sc.distribution_times.empty())
      config_error("distribution scenario needs [output] distribution_times");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(e.what());
  }
  return sc;
}

ConfigMap to_config(const Scenario& s) {
  ConfigMap c;
  c["scenario"]["name"] = s.name;
  c["scenario"]["kind"] = to_string(s.kind);
  std::vector<std::string> kinds;
  for (auto k : s.noise_kinds) kinds.push_back(sselab::to_string(k));
  c["noise"]["kind"] = join(kinds);
  c["noise"]["gamma"] = format_double(s.gamma);
  c["noise"]["k"] = format_double(s.k);
  c["noise"]["init"] = sselab::to_string(s.init);
  c["operator"]["noise_op"] = s.noise_op;
  c["operator"]["hamiltonian"] = s.hamiltonian;
  c["operator"]["alpha"] = format_double(s.alpha);
  c["operator"]["h_axis"] = qstate::to_string(s.h_axis);
  c["operator"]["s_axis"] = qstate::to_string(s.s_axis);
  c["operator"]["class"] = laws::to_string(s.noise_class);
  c["operator"]["q"] = s.q;
  c["state"]["initial"] = join(s.initial);
  c["sim"]["dt"] = format_double(s.sim.dt);
  c["sim"]["T"] = format_double(s.sim.T);
  c["sim"]["scheme"] = sde::to_string(s.sim.scheme);
  c["sim"]["renormalize"] = s.sim.renormalize ? "true" : "false";
  c["sim"]["paths"] = std::to_string(s.sim.n_paths);
  c["sim"]["seed"] = std::to_string(s.sim.master_seed);
  c["sim"]["record_every"] = std::to_string(s.sim.record_every);
  c["output"]["distribution_times"] = format_reals(s.distribution_times);
  c["output"]["time_unit"] = format_double(s.time_unit);
  c["output"]["law_samples"] = std::to_string(s.law_samples);
  c["output"]["check_times"] = format_reals(s.check_times);
  c["output"]["trajectories"] = std::to_string(s.trajectories);
  c["output"]["closure_T"] = format_double(s.closure_T);
  c["output"]["closure_dt"] = format_double(s.closure_dt);
  return c;
}

std::string to_ini(const ConfigMap& config) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, body] : config) {
    out << (first ? "" : "\n") << '[' << section << "]\n";
    first = false;
    for (const auto& [key, value] : body) out << key << " = " << value << '\n';
  }
  return out.str();
}

PureState parse_state(const std::string& spec, int n_qubits, const Scenario* context) {
  const std::string s = trim(spec);
  if (s == "ghz") {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
    v(0) = 1.0;
    v(v.size() - 1) = 1.0;
    return PureState(v);
  }
  if (s == "c1" || s == "c2" || s == "c3") {
    if (!context || context->kind != ScenarioKind::NonCommuting)
      config_error("state '" + s + "' is only defined for the noncommuting scenario");
    magnus::NonCommutingSystem sys{context->alpha, context->gamma, context->h_axis, context->s_axis};
    sys.validate();
    const ComplexMatrix op = s == "c1" ? sys.s1() : (s == "c2" ? sys.s2() : sys.s3());
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op);
    return PureState(es.eigenvectors().col(1));  // eigenvalue +1
  }
  if (static_cast<int>(s.size()) != n_qubits) {
    config_error("state '" + s + "' does not match a " + std::to_string(n_qubits) + "-qubit register");
  }
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i{0.0, 1.0};
  std::optional<PureState> state;
  for (char c : s) {
    ComplexVector q(2);
    switch (c) {
      case '0': q << 1.0, 0.0; break;
      case '1': q << 0.0, 1.0; break;
      case '+': q << r, r; break;
      case '-': q << r, -r; break;
      case 'r': q << r, i * r; break;
      case 'l': q << r, -i * r; break;
      default: config_error(std::string("unknown qubit symbol '") + c + "' in state '" + s + "'");
    }
    PureState single(q);
    state = state ? tensor(*state, single) : single;
  }
  return *state;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"fig3", "Pauli noise S=X, gamma=0.2, k=0.1, calibrated OU; closure orders 1 and 2 vs exact mean; 200 paths",
       "[scenario]\nname = fig3\nkind = approx-order\n"
       "[noise]\nkind = ou\ngamma = 0.2\nk = 0.1\ninit = calibrated\n"
       "[operator]\nnoise_op = x\n"
       "[state]\ninitial = 0\n"
       "[sim]\ndt = 0.001\nT = 10\npaths = 200\nseed = 1\nrecord_every = 100\n"
       "[output]\ncheck_times = 0.5, 1, 2, 5\nclosure_T = 100\n"},
      {"fig4", "Pauli noise S=X, gamma=0.2, k=0.1, calibrated OU; distributions at t = 1, 10, 25, 50 t0 (t0 = 0.06)",
       "[scenario]\nname = fig4\nkind = distribution\n"
       "[noise]\nkind = ou\ngamma = 0.2\nk = 0.1\ninit = calibrated\n"
       "[operator]\nnoise_op = x\n"
       "[state]\ninitial = 0\n"
       "[sim]\ndt = 0.001\nT = 3\npaths = 2000\nseed = 1\nrecord_every = 10\n"
       "[output]\ndistribution_times = 1, 10, 25, 50\ntime_unit = 0.06\nlaw_samples = 2000\n"},
      {"fig5", "Non-commuting H=X, S=Z, gamma=0.4, white noise; C1=1, C2=1, C3=1; 1000 paths",
       "[scenario]\nname = fig5\nkind = noncommuting\n"
       "[noise]\nkind = wn\ngamma = 0.4\n"
       "[operator]\nalpha = 1\nh_axis = x\ns_axis = z\n"
       "[state]\ninitial = c1, c2, c3\n"
       "[sim]\ndt = 0.001\nT = 5\npaths = 1000\nseed = 1\nrecord_every = 50\n"
       "[output]\ncheck_times = 0.5, 1, 2, 3, 4, 5\n"},
      {"fig6", "Projection noise S=|1><1|, gamma=0.1, stationary OU (k=0.1) vs white noise; 500 paths",
       "[scenario]\nname = fig6\nkind = projection\n"
       "[noise]\nkind = ou, wn\ngamma = 0.1\nk = 0.1\ninit = stationary\n"
       "[operator]\nnoise_op = p1\n"
       "[state]\ninitial = +\n"
       "[sim]\ndt = 0.01\nT = 100\npaths = 500\nseed = 1\nrecord_every = 100\n"
       "[output]\ncheck_times = 1, 10, 25, 50, 100\n"},
      {"fig7a", "Two qubits S=X(x)I+I(x)X, gamma=0.2, k=0.3, stationary OU; |00> and GHZ; 500 paths",
       "[scenario]\nname = fig7a\nkind = twoqubit\n"
       "[noise]\nkind = ou\ngamma = 0.2\nk = 0.3\ninit = stationary\n"
       "[operator]\nq = x\nclass = pauli\n"
       "[state]\ninitial = 00, ghz\n"
       "[sim]\ndt = 0.002\nT = 20\npaths = 500\nseed = 1\nrecord_every = 250\n"
       "[output]\ncheck_times = 1, 5, 10, 20\n"},
      {"fig7b", "Two qubits S=X(x)I+I(x)X, gamma=0.2, k=0.01, stationary OU; |00> and GHZ; 500 paths",
       "[scenario]\nname = fig7b\nkind = twoqubit\n"
       "[noise]\nkind = ou\ngamma = 0.2\nk = 0.01\ninit = stationary\n"
       "[operator]\nq = x\nclass = pauli\n"
       "[state]\ninitial = 00, ghz\n"
       "[sim]\ndt = 0.01\nT = 100\npaths = 500\nseed = 1\nrecord_every = 100\n"
       "[output]\ncheck_times = 1, 10, 50, 100\n"},
  };
  return table;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

void list_presets(std::ostream& out) {
  for (const auto& p : presets()) {
    out << p.name << "  " << p.description << '\n';
    std::istringstream in(p.ini);
    const Scenario sc = parse_scenario(parse_ini(in));
    const ConfigMap c = to_config(sc);
    for (const auto& [section, body] : c)
      for (const auto& [key, value] : body)
        if (!value.empty()) out << "    " << section << '.' << key << " = " << value << '\n';
  }
}

namespace {

struct SeriesSetup {
  std::string label;
  std::string state_spec;
  NoiseModel model;
  ComplexMatrix H;
  ComplexMatrix S;
  PureState phi0 = PureState::basis(2, 0);
  std::optional<laws::ScenarioLaw> law;
  std::optional<magnus::NonCommutingSystem> noncommuting;
};

SeriesSetup setup_series(const Scenario& sc, const NoiseModel& model, const std::string& state_spec) {
  SeriesSetup s;
  s.model = model;
  s.state_spec = state_spec;
  const auto require_commuting = [&] {
    if (qstate::commutator(s.H, s.S).norm() > 1e-12)
      config_error("the closed-form laws need [H, S] = 0; use the noncommuting scenario");
  };

  switch (sc.kind) {
    case ScenarioKind::Pauli:
    case ScenarioKind::Distribution:
    case ScenarioKind::ApproxOrder:
    case ScenarioKind::Projection: {
      s.S = qstate::build_operator(sc.noise_op);
      s.H = operator_or_zero(sc.hamiltonian, s.S.rows());
      s.phi0 = parse_state(state_spec, qubit_count(s.S.rows()), &sc);
      require_commuting();
      if (!qstate::is_hermitian(s.S) || !qstate::is_hermitian(s.H)) config_error("operators must be Hermitian");
      const bool projection = sc.kind == ScenarioKind::Projection;
      const ComplexMatrix S2 = s.S * s.S;
      if (projection && (S2 - s.S).norm() > 1e-12) config_error("projection noise needs S^2 = S");
      if (!projection && (S2 - qstate::identity(s.S.rows())).norm() > 1e-12) config_error("Pauli noise needs S^2 = I");
      const double e = qstate::expect_real(s.S, s.phi0);
      laws::ScenarioLaw law;
      law.model = model;
      law.s0 = projection ? std::sqrt(std::max(0.0, e)) : e;
      law.series = projection ? laws::projection_law(law.s0) : laws::pauli_law(law.s0);
      s.law = law;
      break;
    }
    case ScenarioKind::TwoQubit: {
      const ComplexMatrix Q = qstate::build_operator(sc.q);
      if (Q.rows() != 2) config_error("q must be a single-qubit operator");
      const ComplexMatrix Q2 = Q * Q;
      if (sc.noise_class == laws::NoiseClass::Pauli && (Q2 - qstate::identity(2)).norm() > 1e-12)
        config_error("class pauli needs q^2 = I");
      if (sc.noise_class == laws::NoiseClass::Projection && (Q2 - Q).norm() > 1e-12)
        config_error("class projection needs q^2 = q");
      s.S = qstate::collective(Q, 2);
      s.H = operator_or_zero(sc.hamiltonian, 4);
      s.phi0 = parse_state(state_spec, 2, &sc);
      require_commuting();
      laws::ScenarioLaw law;
      law.model = model;
      law.s0 = qstate::expect_real(s.S, s.phi0);
      law.r0 = qstate::expect_real(qstate::kron(Q, Q), s.phi0);
      law.has_r0 = true;
      law.series = laws::two_qubit_law(law.s0, law.r0, sc.noise_class);
      s.law = law;
      break;
    }
    case ScenarioKind::NonCommuting: {
      magnus::NonCommutingSystem sys{sc.alpha, model.gamma, sc.h_axis, sc.s_axis};
      sys.validate();
      s.H = sys.hamiltonian();
      s.S = sys.noise_operator();
      s.phi0 = parse_state(state_spec, 1, &sc);
      s.noncommuting = sys;
      break;
    }
  }
  return s;
}

struct Analytic {
  double mean = 0.0;
  double variance = std::numeric_limits<double>::quiet_NaN();
};

Analytic analytic_at(const SeriesSetup& s, double t) {
  if (s.law) {
    const auto mv = laws::series_mean_variance(s.law->series, s.model, t);
    return {mv.mean, mv.variance};
  }
  Analytic a;
  if (s.model.kind == NoiseKind::WhiteNoise)
    a.mean = magnus::wn_mean_fidelity(*s.noncommuting, s.phi0, t);
  else
    a.mean = magnus::ou_second_order_mean(*s.noncommuting, s.phi0, s.model, t).value;
  return a;
}

}  // namespace

RunReport run(Scenario sc, const RunOptions& options, std::ostream& log) {
  if (options.seed) sc.sim.master_seed = *options.seed;
  if (options.paths) {
    sc.sim.n_paths = *options.paths;
    if (sc.trajectories > sc.sim.n_paths) sc.trajectories = sc.sim.n_paths;
  }
  sc.sim.validate();
  sc.sim.threads = options.threads;
  sc.sim.keep_states = sc.trajectories > 0;

  const std::filesystem::path out = options.out.empty() ? std::filesystem::path("out") / sc.name : options.out;
  std::filesystem::create_directories(out);

  RunReport report;
  nlohmann::json series_json = nlohmann::json::array();

  const auto models = sc.models();
  const bool multi = models.size() * sc.initial.size() > 1;
  std::uint64_t series_index = 0;

  for (const NoiseModel& model : models) {
    for (const std::string& state_spec : sc.initial) {
      SeriesSetup s = setup_series(sc, model, state_spec);
      s.label = sselab::to_string(model.kind) + (model.stationary() ? "-stationary" : "") + "_" + sanitize(state_spec);
      const std::filesystem::path dir = multi ? out / s.label : out;
      std::filesystem::create_directories(dir);
      if (s.noncommuting)
        if (auto w = s.noncommuting->warning()) log << "warning: " << *w << '\n';

      sde::SimConfig cfg = sc.sim;
      cfg.series = series_index;
      log << "series " << s.label << ": " << cfg.n_paths << " paths, T=" << cfg.T << ", dt=" << cfg.dt << '\n';
      const sde::SimulationResult sim = sde::simulate_paths(s.H, s.S, model, s.phi0, cfg);
      if (sim.aborted) log << "  " << sim.aborted << " paths aborted\n";

      std::vector<Analytic> analytic;
      analytic.reserve(sim.times.size());
      for (double t : sim.times) analytic.push_back(analytic_at(s, t));

      {
        CsvWriter csv(dir / "summary.csv", {"t", "analytic_mean", "analytic_var", "mc_mean", "mc_stderr", "mc_var"});
        for (std::size_t j = 0; j < sim.times.size(); ++j) {
          const auto& row = sim.summary[j];
          csv.row({sim.times[j], analytic[j].mean, analytic[j].variance, row.mean, row.stderr_mean, row.variance});
        }
        report.files.push_back(dir / "summary.csv");
      }

      if (s.law) {
        std::ofstream(dir / "law.json") << laws::to_json(*s.law).dump(2) << '\n';
        report.files.push_back(dir / "law.json");
      }

      if (s.noncommuting && model.kind == NoiseKind::WhiteNoise) {
        CsvWriter csv(dir / "exact_mean.csv", {"t", "magnus_mean", "exact_mean"});
        for (std::size_t j = 0; j < sim.times.size(); ++j)
          csv.row({sim.times[j], analytic[j].mean, magnus::wn_mean_exact(*s.noncommuting, s.phi0, sim.times[j])});
        report.files.push_back(dir / "exact_mean.csv");
      }

      // Mean checks at the requested times.
      for (double t : sc.check_times) {
        const std::size_t j = record_index(sim.times, t, sc.sim.dt * static_cast<double>(sc.sim.record_every));
        CheckResult c;
        c.series = s.label;
        c.t = sim.times[j];
        c.value = std::abs(sim.summary[j].mean - analytic[j].mean);
        if (s.law) {
          c.metric = "mean_within_3_stderr";
          c.threshold = 3.0 * sim.summary[j].stderr_mean + 1e-9;
        } else {
          c.metric = "mean_within_0.02";
          c.threshold = 0.02;
        }
        c.pass = c.value <= c.threshold;
        report.checks.push_back(c);
      }

      if (!sc.distribution_times.empty() && s.law) {
        CsvWriter ks(dir / "distribution_summary.csv",
                     {"t", "ks_distance", "ks_critical", "law_mean", "mc_mean", "law_samples", "mc_paths"});
        RngStream stream(sc.sim.master_seed, streams::law_samples(series_index));
        std::vector<double> grid(201);
        for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = static_cast<double>(g) / 200.0;
        for (double slice : sc.distribution_times) {
          const double t_req = slice * sc.time_unit;
          const std::size_t j = record_index(sim.times, t_req, sc.sim.dt);
          const double t = sim.times[j];
          stats::SampleSet law_set{laws::sample_distribution(s.law->series, model, t, sc.law_samples, stream), {}};
          stats::SampleSet mc_set;
          for (const auto& p : sim.paths)
            if (!p.aborted) mc_set.values.push_back(p.fidelity[j]);
          const stats::Density law_kde = stats::kde(law_set, grid);
          const stats::Density mc_kde = stats::kde(mc_set, grid);
          const std::string name = "distribution_t" + short_double(t) + ".csv";
          CsvWriter csv(dir / name, {"f", "law_density", "mc_density"});
          for (std::size_t g = 0; g < grid.size(); ++g) csv.row({grid[g], law_kde.values[g], mc_kde.values[g]});
          report.files.push_back(dir / name);

          const double d = stats::ks_distance(law_set, mc_set);
          const double crit = stats::ks_critical(1.36, law_set.values.size(), mc_set.values.size());
          ks.row({t, d, crit, stats::summary(law_set).mean, stats::summary(mc_set).mean,
                  static_cast<double>(law_set.values.size()), static_cast<double>(mc_set.values.size())});
          report.checks.push_back({s.label, "ks_distance", t, d, 0.05, d <= 0.05});
        }
        report.files.push_back(dir / "distribution_summary.csv");
      }

      if (sc.kind == ScenarioKind::ApproxOrder) {
        const double T = sc.closure_T > 0.0 ? sc.closure_T : sc.sim.T;
        const double s0 = std::abs(s.law->s0);
        const auto record = static_cast<std::size_t>(std::max(1.0, std::round(0.1 / sc.closure_dt)));
        const auto o1 = approx::integrate_closure(approx::ClosureSystem::pauli(1, s0, model.gamma, model.k), T,
                                                  sc.closure_dt, record);
        const auto o2 = approx::integrate_closure(approx::ClosureSystem::pauli(2, s0, model.gamma, model.k), T,
                                                  sc.closure_dt, record);
        CsvWriter csv(dir / "closure.csv", {"t", "order1", "order2", "exact", "order1_imag", "order2_imag"});
        for (std::size_t j = 0; j < o1.t.size(); ++j)
          csv.row({o1.t[j], o1.fidelity[j], o2.fidelity[j],
                   laws::series_mean_variance(s.law->series, model, o1.t[j]).mean, o1.imag_residue[j],
                   o2.imag_residue[j]});
        report.files.push_back(dir / "closure.csv");
        if (o1.max_imag_residue > 0.0 || o2.max_imag_residue > 0.0)
          log << "  closure imaginary residue: order1 " << o1.max_imag_residue << ", order2 " << o2.max_imag_residue
              << '\n';
      }

      for (std::size_t p = 0; p < sc.trajectories; ++p) {
        const auto& path = sim.paths[p];
        if (path.aborted) continue;
        std::vector<std::string> header{"t"};
        const auto dim = s.phi0.dim();
        for (Eigen::Index i = 0; i < dim; ++i) header.push_back("re_psi" + std::to_string(i));
        for (Eigen::Index i = 0; i < dim; ++i) header.push_back("im_psi" + std::to_string(i));
        header.push_back("X");
        header.push_back("F");
        const std::string name = "trajectory_" + std::to_string(p) + ".csv";
        CsvWriter csv(dir / name, header);
        for (std::size_t j = 0; j < sim.times.size(); ++j) {
          std::vector<double> row{sim.times[j]};
          for (Eigen::Index i = 0; i < dim; ++i) row.push_back(path.states[j](i).real());
          for (Eigen::Index i = 0; i < dim; ++i) row.push_back(path.states[j](i).imag());
          row.push_back(path.x[j]);
          row.push_back(path.fidelity[j]);
          csv.row(row);
        }
        report.files.push_back(dir / name);
      }

      double drift = 0.0;
      for (const auto& p : sim.paths) drift = std::max(drift, p.max_norm_drift);
      nlohmann::json aborts = nlohmann::json::array();
      for (const auto& p : sim.paths)
        if (p.aborted) aborts.push_back(p.diagnostic);
      series_json.push_back({{"label", s.label},
                             {"dir", multi ? s.label : "."},
                             {"series", series_index},
                             {"noise", laws::to_json(model)},
                             {"state", state_spec},
                             {"aborted_paths", sim.aborted},
                             {"abort_diagnostics", aborts},
                             {"max_norm_drift", drift}});
      ++series_index;
    }
  }

  nlohmann::json config_json = nlohmann::json::object();
  for (const auto& [section, body] : to_config(sc))
    for (const auto& [key, value] : body) config_json[section][key] = value;
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& c : report.checks) {
    all_pass = all_pass && c.pass;
    checks.push_back({{"series", c.series},
                      {"metric", c.metric},
                      {"t", c.t},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  }
  const nlohmann::json run_json = {
      {"config", config_json},
      {"seed", sc.sim.master_seed},
      {"series", series_json},
      {"checks", checks},
      {"versions",
       {{"sselab", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__}}},
  };
  std::ofstream(out / "run.json") << run_json.dump(2) << '\n';
  report.files.push_back(out / "run.json");

  for (const auto& c : report.checks)
    if (!c.pass)
      log << "check failed: " << c.series << ' ' << c.metric << " at t=" << c.t << ": " << c.value << " > "
          << c.threshold << '\n';
  report.exit_code = (options.check && !all_pass) ? kExitCheck : kExitOk;
  return report;
}

int run_command(const std::string& target, const RunOptions& options, std::ostream& log) {
  try {
    ConfigMap config;
    if (auto preset = find_preset(target)) {
      std::istringstream in(preset->ini);
      config = parse_ini(in);
    } else {
      config = load_config(target);
    }
    const Scenario sc = parse_scenario(config);
    const RunReport report = run(sc, options, log);
    log << "wrote " << report.files.size() << " files to "
        << (options.out.empty() ? (std::filesystem::path("out") / sc.name) : options.out).string() << '\n';
    return report.exit_code;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace sselab::cli
