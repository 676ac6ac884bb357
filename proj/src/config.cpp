#include "spde/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "spde/errors.hpp"

namespace spde {

namespace {

enum class Type { number, number_or_auto, number_or_inf, integer, boolean, choice, int_list, text };

struct KeySpec {
  Type type;
  std::vector<std::string> choices;
};

const std::map<std::string, KeySpec>& schema() {
  static const std::map<std::string, KeySpec> s = {
      {"dim", {Type::integer, {}}},
      {"seed", {Type::integer, {}}},
      {"kernel.family", {Type::choice, {"heat", "fractional", "kolmogorov", "gaussian_bound", "mixture"}}},
      {"kernel.variant", {Type::choice, {"exact", "euclidean_bound"}}},
      {"kernel.s_exp", {Type::number, {}}},
      {"kernel.C", {Type::number, {}}},
      {"kernel.c1", {Type::number, {}}},
      {"kernel.c2", {Type::number, {}}},
      {"kernel.block_weights", {Type::int_list, {}}},
      {"kernel.components", {Type::text, {}}},
      {"kernel.time", {Type::number, {}}},
      {"covariance.family", {Type::choice, {"riesz", "white", "sobolev", "custom"}}},
      {"covariance.lambda", {Type::number, {}}},
      {"covariance.k", {Type::number, {}}},
      {"covariance.C", {Type::number, {}}},
      {"covariance.expr", {Type::choice, {"power", "gaussian", "exponential", "rational", "zero"}}},
      {"covariance.amplitude", {Type::number, {}}},
      {"covariance.scale", {Type::number, {}}},
      {"covariance.exponent", {Type::number, {}}},
      {"covariance.origin_exponent", {Type::number, {}}},
      {"covariance.tail_exponent", {Type::number_or_inf, {}}},
      {"check.beta", {Type::number, {}}},
      {"check.beta_search", {Type::boolean, {}}},
      {"check.iota", {Type::number, {}}},
      {"check.target", {Type::number, {}}},
      {"check.horizon", {Type::number_or_inf, {}}},
      {"check.generalized", {Type::choice, {"off", "wave", "symbol", "one"}}},
      {"check.rel_tol", {Type::number, {}}},
      {"check.b_zero", {Type::boolean, {}}},
      {"grid.L", {Type::number, {}}},
      {"grid.N", {Type::integer, {}}},
      {"grid.dt", {Type::number, {}}},
      {"grid.steps", {Type::integer, {}}},
      {"noise.mode", {Type::choice, {"sample", "validate"}}},
      {"noise.replicas", {Type::integer, {}}},
      {"noise.zero_mode", {Type::choice, {"cell_average", "zero"}}},
      {"noise.isometry_replicas", {Type::integer, {}}},
      {"solver.b.kind", {Type::choice, {"zero", "constant", "linear", "sine", "tanh"}}},
      {"solver.b.a", {Type::number, {}}},
      {"solver.b.c", {Type::number, {}}},
      {"solver.b.omega", {Type::number, {}}},
      {"solver.b.lipschitz", {Type::number, {}}},
      {"solver.sigma.kind", {Type::choice, {"zero", "constant", "linear", "sine", "tanh"}}},
      {"solver.sigma.a", {Type::number, {}}},
      {"solver.sigma.c", {Type::number, {}}},
      {"solver.sigma.omega", {Type::number, {}}},
      {"solver.sigma.lipschitz", {Type::number, {}}},
      {"solver.u0.kind", {Type::choice, {"constant", "gaussian", "cosine"}}},
      {"solver.u0.amplitude", {Type::number, {}}},
      {"solver.u0.width", {Type::number, {}}},
      {"solver.u0.mode", {Type::integer, {}}},
      {"solver.p", {Type::number, {}}},
      {"solver.replicas", {Type::integer, {}}},
      {"solver.n_max", {Type::integer, {}}},
      {"solver.tol", {Type::number, {}}},
      {"solver.beta", {Type::number_or_auto, {}}},
      {"solver.iota", {Type::number_or_auto, {}}},
      {"solver.force", {Type::boolean, {}}},
      {"solver.pool_sites", {Type::boolean, {}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, long long& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(text.c_str(), &end, 10);
  return errno == 0 && end == text.c_str() + text.size();
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    out = false;
    return true;
  }
  return false;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

void check_value(const std::string& key, const std::string& value) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError(key, "unknown key");
  const auto& spec = it->second;
  double d = 0.0;
  long long i = 0;
  bool b = false;
  switch (spec.type) {
    case Type::number:
      if (!parse_double(value, d)) throw ConfigError(key, "expected a number, got '" + value + "'");
      break;
    case Type::number_or_auto:
      if (value != "auto" && !parse_double(value, d)) {
        throw ConfigError(key, "expected a number or 'auto', got '" + value + "'");
      }
      break;
    case Type::number_or_inf:
      if (value != "inf" && !parse_double(value, d)) {
        throw ConfigError(key, "expected a number or 'inf', got '" + value + "'");
      }
      break;
    case Type::integer:
      if (!parse_int(value, i)) throw ConfigError(key, "expected an integer, got '" + value + "'");
      break;
    case Type::boolean:
      if (!parse_bool(value, b)) throw ConfigError(key, "expected true or false, got '" + value + "'");
      break;
    case Type::choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        throw ConfigError(key, "'" + value + "' is not one of {" + allowed + "}");
      }
      break;
    case Type::int_list:
      for (const auto& part : split(value, ',')) {
        if (!parse_int(part, i) || i <= 0) {
          throw ConfigError(key, "expected a comma-separated list of positive integers, got '" + value + "'");
        }
      }
      break;
    case Type::text:
      break;
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, spec] : schema()) k.push_back(key);
    return k;
  }();
  return keys;
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  const std::string v = trim(value);
  check_value(k, v);
  values_[k] = v;
}

void Config::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(trim(assignment), "expected key=value");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config c;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number), "expected key = value");
    }
    c.assign(line);
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("config") || !doc["config"].is_object()) {
      throw ConfigError(path + ":config", "manifest has no config object");
    }
    Config c;
    for (const auto& [key, value] : doc["config"].items()) {
      if (!value.is_string()) throw ConfigError(key, "manifest values must be strings");
      c.set(key, value.get<std::string>());
    }
    if (doc.contains("subcommand") && doc["subcommand"].is_string()) {
      c.subcommand_ = doc["subcommand"].get<std::string>();
    }
    return c;
  }
  return from_text(text, path);
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto v = get(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  double d = 0.0;
  if (*v == "inf") return std::numeric_limits<double>::infinity();
  if (!parse_double(*v, d)) throw ConfigError(key, "expected a number, got '" + *v + "'");
  return d;
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
  const auto v = get(key);
  if (!v || *v == "auto") return std::nullopt;
  return get_double(key, 0.0);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  long long i = 0;
  if (!parse_int(*v, i)) throw ConfigError(key, "expected an integer, got '" + *v + "'");
  return i;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  bool b = false;
  if (!parse_bool(*v, b)) throw ConfigError(key, "expected true or false, got '" + *v + "'");
  return b;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  std::vector<int> out;
  const auto v = get(key);
  if (!v) return out;
  for (const auto& part : split(*v, ',')) {
    long long i = 0;
    if (!parse_int(part, i)) throw ConfigError(key, "expected integers");
    out.push_back(static_cast<int>(i));
  }
  return out;
}

std::uint64_t Config::get_seed() const {
  const auto v = get("seed");
  if (!v) throw ConfigError("seed", "a seed is required for stochastic subcommands (--seed or seed = ...)");
  return static_cast<std::uint64_t>(get_int("seed", 0));
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace spde
