#include "tgf/app/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace tgf::app {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_integer(const std::string& s, json& out) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size()) {
    out = v;
    return true;
  }
  std::uint64_t u = 0;
  auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), u);
  if (ec2 == std::errc() && q == s.data() + s.size()) {
    out = u;
    return true;
  }
  return false;
}

bool parse_double(const std::string& s, json& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

json parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  json v;
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (s == "true") return true;
  if (s == "false") return false;
  if (parse_integer(s, v) || parse_double(s, v)) return v;
  if (s.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      json x;
      if (!parse_integer(item, x) && !parse_double(item, x))
        throw ConfigError("line " + std::to_string(line) + ": list entry '" + item + "' is not a number");
      arr.push_back(x);
    }
    return arr;
  }
  return s;
}

// One config key: where it lives and how it maps onto RunConfig.
struct Key {
  std::string section, name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

std::string where(const std::string& sec, const std::string& key) { return sec + "." + key; }

double as_double(const json& v, const std::string& w) {
  if (!v.is_number()) throw ConfigError(w + " must be a number");
  return v.get<double>();
}
int as_int(const json& v, const std::string& w) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<int>(v.get<double>())))
    return static_cast<int>(v.get<double>());
  throw ConfigError(w + " must be an integer");
}

template <class T>
Key num(const char* sec, const char* name, T RunConfig::*member) {
  return {sec, name, [member](const RunConfig& c) { return json(c.*member); },
          [member, w = where(sec, name)](RunConfig& c, const json& v) {
            if constexpr (std::is_same_v<T, int>) c.*member = as_int(v, w);
            else if constexpr (std::is_same_v<T, bool>) {
              if (!v.is_boolean()) throw ConfigError(w + " must be true or false");
              c.*member = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
              if (!v.is_string()) throw ConfigError(w + " must be a string");
              c.*member = v.get<std::string>();
            } else c.*member = as_double(v, w);
          }};
}

template <class T>
Key custom(const char* sec, const char* name, std::function<T&(RunConfig&)> ref) {
  return {sec, name, [ref](const RunConfig& c) { return json(ref(const_cast<RunConfig&>(c))); },
          [ref, w = where(sec, name)](RunConfig& c, const json& v) {
            if constexpr (std::is_same_v<T, int>) ref(c) = as_int(v, w);
            else if constexpr (std::is_same_v<T, bool>) {
              if (!v.is_boolean()) throw ConfigError(w + " must be true or false");
              ref(c) = v.get<bool>();
            } else ref(c) = as_double(v, w);
          }};
}

Key list(const char* sec, const char* name, std::vector<double> RunConfig::*member) {
  return {sec, name, [member](const RunConfig& c) { return json(c.*member); },
          [member, w = where(sec, name)](RunConfig& c, const json& v) {
            std::vector<double> out;
            if (v.is_number()) out.push_back(v.get<double>());
            else if (v.is_array()) {
              for (const auto& x : v) out.push_back(as_double(x, w));
            } else throw ConfigError(w + " must be a number or a list of numbers");
            c.*member = out;
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = [] {
    std::vector<Key> v;
    // grid.* is handled separately because WaveGrid is built from both keys.
    v.push_back(custom<double>("time", "T", [](RunConfig& c) -> double& { return c.sim.T; }));
    v.push_back(custom<int>("time", "steps", [](RunConfig& c) -> int& { return c.sim.steps; }));
    v.push_back(custom<double>("physics", "nu", [](RunConfig& c) -> double& { return c.sim.params.nu; }));
    v.push_back(custom<double>("physics", "alpha1", [](RunConfig& c) -> double& { return c.sim.params.alpha1; }));
    v.push_back(custom<double>("physics", "alpha2", [](RunConfig& c) -> double& { return c.sim.params.alpha2; }));
    v.push_back(custom<double>("physics", "beta", [](RunConfig& c) -> double& { return c.sim.params.beta; }));
    v.push_back(custom<bool>("physics", "nonlinear", [](RunConfig& c) -> bool& { return c.sim.params.nonlinear; }));
    v.push_back({"noise", "family", [](const RunConfig& c) { return json(to_string(c.sim.model.family)); },
                 [](RunConfig& c, const json& x) {
                   if (!x.is_string()) throw ConfigError("noise.family must be a string");
                   c.sim.model.family = noise_family_from_string(x.get<std::string>());
                 }});
    v.push_back(custom<int>("noise", "K", [](RunConfig& c) -> int& { return c.sim.model.K; }));
    v.push_back(custom<double>("noise", "c0", [](RunConfig& c) -> double& { return c.sim.model.c0; }));
    v.push_back(custom<double>("noise", "decay", [](RunConfig& c) -> double& { return c.sim.model.decay; }));
    v.push_back(custom<double>("noise", "modulation", [](RunConfig& c) -> double& { return c.sim.model.modulation; }));
    v.push_back(custom<double>("noise", "omega", [](RunConfig& c) -> double& { return c.sim.model.omega; }));
    v.push_back({"run", "seed", [](const RunConfig& c) { return json(c.sim.seed); },
                 [](RunConfig& c, const json& x) {
                   if (!x.is_number_integer() || (x.is_number_integer() && !x.is_number_unsigned() && x.get<std::int64_t>() < 0))
                     throw ConfigError("run.seed must be a non-negative integer");
                   c.sim.seed = x.get<std::uint64_t>();
                 }});
    v.push_back(num("run", "samples", &RunConfig::samples));
    v.push_back(custom<int>("run", "workers", [](RunConfig& c) -> int& { return c.sim.workers; }));
    v.push_back(custom<double>("run", "M", [](RunConfig& c) -> double& { return c.sim.M; }));
    v.push_back(custom<double>("run", "p_exp", [](RunConfig& c) -> double& { return c.sim.p_exp; }));
    v.push_back(custom<double>("run", "blowup_factor", [](RunConfig& c) -> double& { return c.sim.blowup_factor; }));
    v.push_back(num("run", "out", &RunConfig::out));
    v.push_back(num("initial", "kind", &RunConfig::initial_kind));
    v.push_back(num("initial", "amplitude", &RunConfig::initial_amplitude));
    v.push_back(num("initial", "slope", &RunConfig::initial_slope));
    v.push_back(num("target", "kind", &RunConfig::target_kind));
    v.push_back(num("target", "amplitude", &RunConfig::target_amplitude));
    v.push_back(num("target", "slope", &RunConfig::target_slope));
    v.push_back({"target", "norm", [](const RunConfig& c) { return json(to_string(c.tracking)); },
                 [](RunConfig& c, const json& x) {
                   if (!x.is_string()) throw ConfigError("target.norm must be a string");
                   c.tracking = tracking_norm_from_string(x.get<std::string>());
                 }});
    v.push_back(num("control", "lambda", &RunConfig::lambda));
    v.push_back(num("control", "radius", &RunConfig::radius));
    v.push_back(num("control", "amplitude", &RunConfig::control_amplitude));
    v.push_back(num("control", "psi_amplitude", &RunConfig::psi_amplitude));
    v.push_back(custom<int>("optimizer", "max_iter", [](RunConfig& c) -> int& { return c.optimizer.max_iter; }));
    v.push_back(custom<double>("optimizer", "tol", [](RunConfig& c) -> double& { return c.optimizer.tol; }));
    v.push_back(custom<double>("optimizer", "armijo", [](RunConfig& c) -> double& { return c.optimizer.armijo; }));
    v.push_back(custom<double>("optimizer", "shrink", [](RunConfig& c) -> double& { return c.optimizer.shrink; }));
    v.push_back(custom<int>("optimizer", "max_backtracks", [](RunConfig& c) -> int& { return c.optimizer.max_backtracks; }));
    v.push_back(custom<double>("optimizer", "initial_step", [](RunConfig& c) -> double& { return c.optimizer.initial_step; }));
    v.push_back(custom<bool>("optimizer", "barzilai_borwein", [](RunConfig& c) -> bool& { return c.optimizer.barzilai_borwein; }));
    v.push_back(num("optimizer", "residual_directions", &RunConfig::residual_directions));
    v.push_back(list("probe", "rhos", &RunConfig::rhos));
    v.push_back(num("probe", "p", &RunConfig::stability_p));
    v.push_back(num("probe", "epsilon", &RunConfig::epsilon));
    v.push_back(list("probe", "gap_scales", &RunConfig::gap_scales));
    v.push_back(num("probe", "stop_rho0", &RunConfig::stop_rho0));
    v.push_back(list("probe", "stop_factors", &RunConfig::stop_factors));
    v.push_back(num("probe", "stop_direction", &RunConfig::stop_direction));
    v.push_back(num("adjoint", "bsde", &RunConfig::bsde));
    v.push_back(num("adjoint", "bsde_samples", &RunConfig::bsde_samples));
    v.push_back(custom<double>("verify", "antisymmetry", [](RunConfig& c) -> double& { return c.identity_tol.antisymmetry; }));
    v.push_back(custom<double>("verify", "curl_cross", [](RunConfig& c) -> double& { return c.identity_tol.curl_cross; }));
    v.push_back(custom<double>("verify", "curl_v_cross", [](RunConfig& c) -> double& { return c.identity_tol.curl_v_cross; }));
    v.push_back(num("verify", "g_star", &RunConfig::g_star_tol));
    v.push_back(num("verify", "duality", &RunConfig::duality_tol));
    v.push_back(num("verify", "gradient", &RunConfig::gradient_tol));
    v.push_back(num("verify", "gradient_rho", &RunConfig::gradient_rho));
    v.push_back(num("verify", "triples", &RunConfig::triples));
    v.push_back(num("verify", "g_star_triples", &RunConfig::g_star_triples));
    v.push_back(num("verify", "gradient_directions", &RunConfig::gradient_directions));
    v.push_back(num("verify", "duality_samples", &RunConfig::duality_samples));
    v.push_back(num("verify", "technical_samples", &RunConfig::technical_samples));
    return v;
  }();
  return k;
}

}  // namespace

json parse_config_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  json out = json::object();
  std::string section;
  std::stringstream ss(text);
  std::string line;
  for (int ln = 1; std::getline(ss, line); ++ln) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(ln) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(ln) + ": empty section name");
      if (!out.contains(section)) out[section] = json::object();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(ln) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(ln) + ": empty key");
    if (section.empty()) throw ConfigError("line " + std::to_string(ln) + ": key '" + key + "' outside any [section]");
    if (out[section].contains(key)) throw ConfigError("line " + std::to_string(ln) + ": duplicate key " + section + "." + key);
    out[section][key] = parse_value(s.substr(eq + 1), ln);
  }
  return out;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be an object of sections");
  RunConfig c;
  int dim = c.sim.grid.dim(), n_max = c.sim.grid.n_max();
  for (const auto& [sec, body] : j.items()) {
    if (!body.is_object()) throw ConfigError("section '" + sec + "' must hold key = value entries");
    for (const auto& [name, value] : body.items()) {
      if (sec == "grid" && name == "dim") {
        dim = as_int(value, "grid.dim");
        continue;
      }
      if (sec == "grid" && name == "n_max") {
        n_max = as_int(value, "grid.n_max");
        continue;
      }
      const auto& ks = keys();
      const auto it = std::find_if(ks.begin(), ks.end(), [&](const Key& k) { return k.section == sec && k.name == name; });
      if (it == ks.end()) throw ConfigError("unknown config key " + where(sec, name));
      it->set(c, value);
    }
  }
  try {
    c.sim.grid = WaveGrid(dim, n_max);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.sim.model.family == NoiseFamily::zero) c.sim.model.K = 0;
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json j = json::object();
  j["grid"]["dim"] = c.sim.grid.dim();
  j["grid"]["n_max"] = c.sim.grid.n_max();
  for (const auto& k : keys()) j[k.section][k.name] = k.get(c);
  return j;
}

std::string to_text(const RunConfig& c) {
  const json j = to_json(c);
  std::ostringstream os;
  bool first = true;
  for (const auto& [sec, body] : j.items()) {
    os << (first ? "" : "\n") << "[" << sec << "]\n";
    first = false;
    for (const auto& [name, value] : body.items()) {
      os << name << " = ";
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) os << (i ? ", " : "") << value[i].dump();
        if (value.size() == 1) os << ",";
      } else {
        os << value.dump();
      }
      os << "\n";
    }
  }
  return os.str();
}

void RunConfig::validate() const {
  sim.validate();
  if (samples < 1) throw ConfigError("run.samples must be >= 1");
  if (initial_kind != "random" && initial_kind != "zero") throw ConfigError("initial.kind must be random or zero");
  if (target_kind != "random" && target_kind != "zero") throw ConfigError("target.kind must be random or zero");
  if (stop_direction != "random" && stop_direction != "initial")
    throw ConfigError("probe.stop_direction must be random or initial");
  if (!(radius > 0.0)) throw ConfigError("control.radius must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("control.lambda must be >= 0");
  if (!(optimizer.tol > 0.0) || optimizer.max_iter < 0) throw ConfigError("optimizer needs tol > 0 and max_iter >= 0");
  if (!(optimizer.shrink > 0.0 && optimizer.shrink < 1.0)) throw ConfigError("optimizer.shrink must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("probe.epsilon must lie in (0, 1]");
  if (!(stability_p >= 1.0)) throw ConfigError("probe.p must be >= 1");
  for (double r : rhos)
    if (!(r > 0.0)) throw ConfigError("probe.rhos entries must be positive");
  if (rhos.empty() || gap_scales.empty() || stop_factors.empty()) throw ConfigError("probe lists must be non-empty");
  if (bsde_samples < 2) throw ConfigError("adjoint.bsde_samples must be >= 2");
  if (residual_directions < 1 || triples < 1 || g_star_triples < 1 || gradient_directions < 1 || duality_samples < 1)
    throw ConfigError("verify and residual counts must be >= 1");
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  j["run"].erase("out");
  j["run"].erase("workers");
  const std::string s = j.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  return rng();
}

}  // namespace tgf::app
