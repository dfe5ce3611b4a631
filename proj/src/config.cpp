#include "vlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "vlab/csv.hpp"
#include "vlab/error.hpp"

namespace vlab {

namespace {

enum class Constraint { any, positive, nonnegative };

struct Field {
  std::string key;
  ConfigValue def;
  Constraint rule = Constraint::positive;
};

using Schema = std::vector<Field>;

using I = std::int64_t;
using IL = std::vector<std::int64_t>;
using DL = std::vector<double>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"embed",
       {{"horizons", DL{0.5, 1.0, 2.0}}, {"n_s", I{256}}, {"n_paths", I{1000}}, {"modes", I{8}},
        {"seed", I{1}, Constraint::nonnegative}}},
      {"riesz",
       {{"horizon", 1.0}, {"n_list", IL{128, 256, 512, 1024, 2048}}, {"dense_n", I{1024}},
        {"seed", I{2}, Constraint::nonnegative}}},
      {"diagonal",
       {{"horizon", 1.0}, {"n_list", IL{16, 32, 64, 128}}, {"n_paths", I{10000}},
        {"coeff_preset", std::string("smooth-kernel")}, {"control_preset", std::string("zero")},
        {"x0", 1.0, Constraint::any}, {"seed", I{7}, Constraint::nonnegative}}},
      {"markov",
       {{"horizon", 1.0}, {"n_t", I{128}}, {"n_s", I{128}}, {"basis_size", I{32}},
        {"basis", std::string("cosine")}, {"n_list", IL{1, 2, 4, 8, 16}}, {"n_paths", I{2000}},
        {"coeff_preset", std::string("smooth-kernel")}, {"x0", 1.0, Constraint::any},
        {"seed", I{11}, Constraint::nonnegative}}},
      {"lq",
       {{"phi", std::string("one")}, {"horizon", 0.5}, {"n_grid", I{100}}, {"n_paths", I{100000}},
        {"x0", 1.0, Constraint::any}, {"gains", DL{0.5, 0.625, 0.75, 0.875, 1.0, 1.125, 1.25, 1.375, 1.5}},
        {"seed", I{5}, Constraint::nonnegative}}},
      {"starter",
       {{"horizon", 1.0}, {"n_t", I{1024}}, {"n_s", I{16}}, {"n_paths", I{100000}},
        {"x0", 1.0, Constraint::any}, {"residual_n", IL{64, 128, 256, 512}},
        {"seed", I{42}, Constraint::nonnegative}}},
      {"bsde",
       {{"preset", std::string("quadratic-target")}, {"horizon", 1.0}, {"n_t", I{50}}, {"n_s", I{64}},
        {"n_paths", I{20000}}, {"eval_paths", I{20000}}, {"reg_degree", I{2}}, {"n_controls", I{11}},
        {"sigma0", 0.5}, {"seed", I{3}, Constraint::nonnegative}}},
      {"contract-span",
       {{"betas", DL{0.6, 0.4}}, {"rhos", DL{0.0, 1.0}, Constraint::nonnegative}, {"horizon", 1.0},
        {"n_s_list", IL{32, 64, 128}}, {"n_t", I{64}}, {"n_paths", I{64}}, {"amax", 2.0},
        {"zeta", 1.0, Constraint::any}, {"eps", 0.5}, {"margin", 1e-3},
        {"seed", I{9}, Constraint::nonnegative}}},
      {"contract-target",
       {{"betas", DL{0.6, 0.4}}, {"rhos", DL{0.0, 1.0}, Constraint::nonnegative}, {"horizon", 1.0},
        {"n_t_list", IL{50, 100, 200}}, {"n_paths", I{1000}}, {"amax", 2.0},
        {"zeta", 1.0, Constraint::any}, {"lambda0", 0.0, Constraint::any},
        {"seed", I{13}, Constraint::nonnegative}}},
      {"gram", {{"horizon", 1.0}, {"n_s", I{1024}}, {"n_probes", I{20}}, {"seed", I{0}, Constraint::nonnegative}}},
  };
  return s;
}

const Schema& schema(const std::string& experiment) {
  const auto it = schemas().find(experiment);
  if (it == schemas().end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

const Field& field(const std::string& experiment, const std::string& key) {
  for (const auto& f : schema(experiment)) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown key '" + key + "' for experiment '" + experiment + "'");
}

template <class T>
const T& get(const ExperimentConfig& c, const std::string& key) {
  const auto it = c.values.find(key);
  if (it == c.values.end()) throw ConfigError("missing key '" + key + "'");
  if (const auto* v = std::get_if<T>(&it->second)) return *v;
  throw ConfigError("key '" + key + "' has the wrong type");
}

double as_double(const toml::node& n, const std::string& key) {
  if (auto v = n.value<double>()) return *v;  // also accepts integers
  throw ConfigError("key '" + key + "' must be a number");
}

std::int64_t as_int(const toml::node& n, const std::string& key) {
  if (n.is_integer()) return *n.value<std::int64_t>();
  throw ConfigError("key '" + key + "' must be an integer");
}

ConfigValue from_node(const ConfigValue& like, const toml::node& n, const std::string& key) {
  return std::visit(
      [&](const auto& proto) -> ConfigValue {
        using T = std::decay_t<decltype(proto)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return as_int(n, key);
        } else if constexpr (std::is_same_v<T, double>) {
          return as_double(n, key);
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!n.is_string()) throw ConfigError("key '" + key + "' must be a string");
          return *n.value<std::string>();
        } else {
          const auto* arr = n.as_array();
          if (!arr) throw ConfigError("key '" + key + "' must be an array");
          T out;
          for (const auto& e : *arr) {
            if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
              out.push_back(as_int(e, key));
            } else {
              out.push_back(as_double(e, key));
            }
          }
          return out;
        }
      },
      like);
}

std::string toml_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::string s = format_number(x);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

template <class F>
std::string render(const ConfigValue& v, F number) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return number(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(x);
        } else {
          std::string s = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) s += ", ";
            if constexpr (std::is_same_v<T, std::vector<std::int64_t>>) {
              s += std::to_string(x[i]);
            } else {
              s += number(x[i]);
            }
          }
          return s + "]";
        }
      },
      v);
}

void check_rule(const std::string& key, double x, Constraint rule) {
  if (!std::isfinite(x)) throw ConfigError("parameter '" + key + "' must be finite");
  if (rule == Constraint::positive && !(x > 0)) throw ConfigError("parameter '" + key + "' must be positive");
  if (rule == Constraint::nonnegative && !(x >= 0)) throw ConfigError("parameter '" + key + "' must be >= 0");
}

}  // namespace

std::int64_t ExperimentConfig::integer(const std::string& key) const { return get<std::int64_t>(*this, key); }
double ExperimentConfig::real(const std::string& key) const { return get<double>(*this, key); }
const std::string& ExperimentConfig::text(const std::string& key) const { return get<std::string>(*this, key); }
const std::vector<std::int64_t>& ExperimentConfig::integers(const std::string& key) const {
  return get<std::vector<std::int64_t>>(*this, key);
}
const std::vector<double>& ExperimentConfig::reals(const std::string& key) const {
  return get<std::vector<double>>(*this, key);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"embed", "riesz", "diagonal", "markov", "lq",
                                                 "starter", "bsde", "contract-span",
                                                 "contract-target", "gram"};
  return names;
}

std::string canonical_experiment(const std::string& name) {
  if (name == "markov-approx") return "markov";
  for (const auto& n : experiment_names()) {
    if (n == name) return n;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = canonical_experiment(experiment);
  for (const auto& f : schema(c.experiment)) c.values[f.key] = f.def;
  return c;
}

ExperimentConfig parse_config(const std::string& toml_text, const std::string& experiment) {
  ExperimentConfig c = default_config(experiment);
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  for (auto&& [name, node] : doc) {
    const std::string table(name.str());
    if (!node.is_table()) throw ConfigError("top-level key '" + table + "' must be a table");
    canonical_experiment(table);  // unknown tables are rejected too
  }
  const toml::node* tbl = doc.get(c.experiment);
  if (!tbl && experiment == "markov-approx") tbl = doc.get("markov-approx");
  if (tbl) {
    for (auto&& [k, v] : *tbl->as_table()) {
      const std::string key(k.str());
      const Field& f = field(c.experiment, key);
      c.values[key] = from_node(f.def, v, key);
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment);
}

void override_value(ExperimentConfig& cfg, const std::string& key, const std::string& text) {
  const Field& f = field(cfg.experiment, key);
  std::string doc = "v = ";
  if (std::holds_alternative<std::string>(f.def)) {
    doc += quote(text);
  } else if (std::holds_alternative<std::int64_t>(f.def) || std::holds_alternative<double>(f.def)) {
    doc += text;
  } else {
    // accept both "64,128" and "[64, 128]"
    const auto lead = text.find_first_not_of(" \t");
    doc += (lead != std::string::npos && text[lead] == '[') ? text : "[" + text + "]";
  }
  toml::table t;
  try {
    t = toml::parse(doc);
  } catch (const toml::parse_error&) {
    throw ConfigError("cannot parse value '" + text + "' for '" + key + "'");
  }
  cfg.values[key] = from_node(f.def, *t.get("v"), key);
  validate(cfg);
}

void validate(const ExperimentConfig& cfg) {
  const Schema& s = schema(cfg.experiment);
  for (const auto& [key, _] : cfg.values) field(cfg.experiment, key);
  for (const auto& f : s) {
    const auto it = cfg.values.find(f.key);
    if (it == cfg.values.end()) throw ConfigError("missing key '" + f.key + "'");
    if (it->second.index() != f.def.index()) throw ConfigError("key '" + f.key + "' has the wrong type");
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>) {
            check_rule(f.key, static_cast<double>(x), f.rule);
          } else if constexpr (std::is_same_v<T, std::string>) {
            if (x.empty()) throw ConfigError("parameter '" + f.key + "' must be nonempty");
          } else {
            if (x.empty()) throw ConfigError("parameter '" + f.key + "' must be a nonempty list");
            for (auto e : x) check_rule(f.key, static_cast<double>(e), f.rule);
          }
        },
        it->second);
  }
  // Cross-field constraints.
  if (cfg.experiment == "markov") {
    for (auto n : cfg.integers("n_list")) {
      if (n > cfg.integer("basis_size")) throw ConfigError("parameter 'n_list' exceeds 'basis_size'");
    }
    if (cfg.text("basis") != "cosine" && cfg.text("basis") != "polynomial") {
      throw ConfigError("parameter 'basis' must be cosine or polynomial");
    }
  }
  for (const char* k : {"n_s", "n_t", "n_grid", "dense_n"}) {
    if (cfg.values.count(k) && cfg.integer(k) < 2) throw ConfigError(std::string("parameter '") + k + "' must be >= 2");
  }
  for (const char* k : {"n_list", "n_s_list", "n_t_list", "residual_n"}) {
    if (cfg.values.count(k) && cfg.experiment != "markov") {
      for (auto n : cfg.integers(k)) {
        if (n < 2) throw ConfigError(std::string("parameter '") + k + "' entries must be >= 2");
      }
    }
  }
  if (cfg.values.count("betas") && cfg.reals("betas").size() != cfg.reals("rhos").size()) {
    throw ConfigError("parameters 'betas' and 'rhos' must have equal length");
  }
  if (cfg.values.count("reg_degree") && cfg.integer("reg_degree") > 4) {
    throw ConfigError("parameter 'reg_degree' must be <= 4");
  }
}

std::string to_toml(const ExperimentConfig& cfg) {
  std::string out = "[" + quote(cfg.experiment) + "]\n";
  for (const auto& [k, v] : cfg.values) out += k + " = " + render(v, toml_number) + "\n";
  return out;
}

std::string to_json(const ExperimentConfig& cfg) {
  auto num = [](double x) {
    if (!std::isfinite(x)) return std::string("null");
    return toml_number(x);
  };
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : cfg.values) {
    if (!first) out += ", ";
    first = false;
    out += quote(k) + ": " + render(v, num);
  }
  return out + "}";
}

}  // namespace vlab
