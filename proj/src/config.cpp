#include "acfh/config.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace acfh {

std::string to_string(InitialCondition ic) {
  switch (ic) {
    case InitialCondition::sine:
      return "sine";
    case InitialCondition::uniform_random:
      return "uniform_random";
    case InitialCondition::custom_snapshot:
      return "custom_snapshot";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dim",           "L",          "N",           "epsilon",        "theta",        "tau",
      "T",             "initial_condition",         "ic_offset",      "ic_amplitude", "ic_snapshot",
      "seed",          "snapshot_times",            "output_dir",     "rho_policy",   "rho0",
      "alpha",         "gamma",      "nu",          "gamma1",         "gamma2",       "max_iter",
      "carry_multiplier",           "newton_tol",  "ladder",         "reference",    "study_step",
      "rho_factors",   "alphas"};
  return keys;
}

double parse_real(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) return factor;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v * factor;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + raw + "' is not a number");
  }
}

long long parse_integer(const std::string& key, const std::string& raw) {
  const double v = parse_real(key, raw);
  if (std::floor(v) != v) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<long long>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + raw + "' is not an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': '" + raw + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real(key, item));
  }
  return out;
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_real(v[i]);
  }
  return out;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("config key '" + key + "' given twice");
    kv[key] = value;
  }
  return kv;
}

KeyValues parse_json_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  KeyValues kv;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      kv[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      kv[key] = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_unsigned()) {
      kv[key] = std::to_string(value.get<std::uint64_t>());
    } else if (value.is_number_integer()) {
      kv[key] = std::to_string(value.get<std::int64_t>());
    } else if (value.is_number()) {
      kv[key] = format_real(value.get<double>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!item.is_number()) throw ConfigError("JSON config key '" + key + "': list entries must be numbers");
        if (!joined.empty()) joined += ", ";
        joined += format_real(item.get<double>());
      }
      kv[key] = joined;
    } else {
      throw ConfigError("JSON config key '" + key + "' has an unsupported value type");
    }
  }
  return kv;
}

KeyValues parse_config_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
  return parse_key_values(text);
}

RunConfig config_from_key_values(const KeyValues& kv) {
  for (const auto& [key, _] : kv) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  auto get = [&kv](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  int dim = 2;
  double length = 2.0 * std::numbers::pi;
  int n = 64;
  if (auto v = get("dim")) dim = static_cast<int>(parse_integer("dim", *v));
  if (auto v = get("L")) length = parse_real("L", *v);
  if (auto v = get("N")) n = static_cast<int>(parse_integer("N", *v));
  try {
    cfg.params.grid = GridSpec::make(dim, length, n);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (auto v = get("epsilon")) cfg.params.epsilon = parse_real("epsilon", *v);
  if (auto v = get("theta")) cfg.params.theta = parse_real("theta", *v);
  if (auto v = get("tau")) cfg.params.tau = parse_real("tau", *v);
  if (auto v = get("T")) cfg.final_time = parse_real("T", *v);

  if (auto v = get("initial_condition")) {
    const std::string s = trim(*v);
    if (s == "sine") {
      cfg.initial_condition = InitialCondition::sine;
    } else if (s == "uniform_random") {
      cfg.initial_condition = InitialCondition::uniform_random;
    } else if (s == "custom_snapshot") {
      cfg.initial_condition = InitialCondition::custom_snapshot;
    } else {
      throw ConfigError("initial_condition must be sine, uniform_random or custom_snapshot");
    }
  }
  if (auto v = get("ic_offset")) cfg.ic_offset = parse_real("ic_offset", *v);
  if (auto v = get("ic_amplitude")) cfg.ic_amplitude = parse_real("ic_amplitude", *v);
  if (auto v = get("ic_snapshot")) cfg.ic_snapshot = trim(*v);
  if (auto v = get("seed")) cfg.seed = parse_u64("seed", *v);
  if (auto v = get("snapshot_times")) cfg.snapshot_times = parse_list("snapshot_times", *v);
  if (auto v = get("output_dir")) cfg.output_dir = trim(*v);

  if (auto v = get("rho_policy")) {
    try {
      cfg.admm.rho_policy = parse_rho_policy(trim(*v));
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("rho0")) {
    if (trim(*v) == "optimal") {
      cfg.admm.rho0.reset();
    } else {
      cfg.admm.rho0 = parse_real("rho0", *v);
    }
  }
  if (auto v = get("alpha")) cfg.admm.alpha = parse_real("alpha", *v);
  if (auto v = get("gamma")) cfg.admm.gamma = parse_real("gamma", *v);
  if (auto v = get("nu")) cfg.admm.nu = parse_real("nu", *v);
  if (auto v = get("gamma1")) cfg.admm.gamma1 = parse_real("gamma1", *v);
  if (auto v = get("gamma2")) cfg.admm.gamma2 = parse_real("gamma2", *v);
  if (auto v = get("max_iter")) cfg.admm.max_iter = static_cast<int>(parse_integer("max_iter", *v));
  if (auto v = get("carry_multiplier")) cfg.admm.carry_multiplier = parse_bool("carry_multiplier", *v);
  if (auto v = get("newton_tol")) cfg.admm.newton_tol = parse_real("newton_tol", *v);

  if (auto v = get("ladder")) cfg.study.ladder = parse_list("ladder", *v);
  if (auto v = get("reference")) cfg.study.reference = parse_real("reference", *v);
  if (auto v = get("study_step")) cfg.study.step = static_cast<int>(parse_integer("study_step", *v));
  if (auto v = get("rho_factors")) cfg.study.rho_factors = parse_list("rho_factors", *v);
  if (auto v = get("alphas")) cfg.study.alphas = parse_list("alphas", *v);

  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  try {
    params.validate();
    admm.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (!(final_time > 0.0)) throw ConfigError("T must be positive");
  if (final_time < params.tau * (1.0 - 1e-12)) throw ConfigError("T must be at least tau");
  const double m = final_time / params.tau;
  if (std::abs(m - std::round(m)) > 1e-6 * std::max(1.0, m)) throw ConfigError("T must be a multiple of tau");
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= final_time * (1.0 + 1e-12))) throw ConfigError("snapshot_times must lie in [0, T]");
  }
  switch (initial_condition) {
    case InitialCondition::sine:
      if (!(ic_offset - std::abs(ic_amplitude) > 0.0 && ic_offset + std::abs(ic_amplitude) < 1.0)) {
        throw ConfigError("sine initial condition offset +/- amplitude must stay inside (0,1)");
      }
      break;
    case InitialCondition::uniform_random:
      if (!(ic_amplitude >= 0.0 && ic_offset > 0.0 && ic_offset + ic_amplitude < 1.0)) {
        throw ConfigError("random initial condition offset + amplitude * [0,1) must stay inside (0,1)");
      }
      break;
    case InitialCondition::custom_snapshot:
      if (ic_snapshot.empty()) throw ConfigError("custom_snapshot initial condition needs ic_snapshot");
      break;
  }
  if (study.step < 1) throw ConfigError("study_step must be at least 1");
}

int RunConfig::steps() const { return static_cast<int>(std::llround(final_time / params.tau)); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  RunConfig cfg = config_from_key_values(parse_config_text(ss.str()));
  if (cfg.initial_condition == InitialCondition::custom_snapshot && cfg.ic_snapshot.is_relative()) {
    cfg.ic_snapshot = path.parent_path() / cfg.ic_snapshot;
  }
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "dim = " << cfg.params.grid.dim << '\n';
  os << "L = " << format_real(cfg.params.grid.length) << '\n';
  os << "N = " << cfg.params.grid.n << '\n';
  os << "epsilon = " << format_real(cfg.params.epsilon) << '\n';
  os << "theta = " << format_real(cfg.params.theta) << '\n';
  os << "tau = " << format_real(cfg.params.tau) << '\n';
  os << "T = " << format_real(cfg.final_time) << '\n';
  os << "initial_condition = " << to_string(cfg.initial_condition) << '\n';
  os << "ic_offset = " << format_real(cfg.ic_offset) << '\n';
  os << "ic_amplitude = " << format_real(cfg.ic_amplitude) << '\n';
  if (!cfg.ic_snapshot.empty()) os << "ic_snapshot = " << cfg.ic_snapshot.string() << '\n';
  os << "seed = " << cfg.seed << '\n';
  if (!cfg.snapshot_times.empty()) os << "snapshot_times = " << format_list(cfg.snapshot_times) << '\n';
  if (!cfg.output_dir.empty()) os << "output_dir = " << cfg.output_dir.string() << '\n';
  os << "rho_policy = " << to_string(cfg.admm.rho_policy) << '\n';
  os << "rho0 = " << (cfg.admm.rho0 ? format_real(*cfg.admm.rho0) : std::string("optimal")) << '\n';
  os << "alpha = " << format_real(cfg.admm.alpha) << '\n';
  os << "gamma = " << format_real(cfg.admm.gamma) << '\n';
  os << "nu = " << format_real(cfg.admm.nu) << '\n';
  os << "gamma1 = " << format_real(cfg.admm.gamma1) << '\n';
  os << "gamma2 = " << format_real(cfg.admm.gamma2) << '\n';
  os << "max_iter = " << cfg.admm.max_iter << '\n';
  os << "carry_multiplier = " << (cfg.admm.carry_multiplier ? "true" : "false") << '\n';
  os << "newton_tol = " << format_real(cfg.admm.newton_tol) << '\n';
  if (!cfg.study.ladder.empty()) os << "ladder = " << format_list(cfg.study.ladder) << '\n';
  if (cfg.study.reference > 0.0) os << "reference = " << format_real(cfg.study.reference) << '\n';
  os << "study_step = " << cfg.study.step << '\n';
  os << "rho_factors = " << format_list(cfg.study.rho_factors) << '\n';
  os << "alphas = " << format_list(cfg.study.alphas) << '\n';
  return os.str();
}

}  // namespace acfh
