#pragma once

// Experiment configuration: one flat TOML table per experiment, validated
// against a fixed schema (unknown keys and non-positive sizes are rejected).

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace vlab {

using ConfigValue = std::variant<std::int64_t, double, std::string, std::vector<std::int64_t>,
                                 std::vector<double>>;

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, ConfigValue> values;

  std::int64_t integer(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<std::int64_t>& integers(const std::string& key) const;
  const std::vector<double>& reals(const std::string& key) const;
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Canonical experiment names; "markov-approx" is accepted for "markov".
const std::vector<std::string>& experiment_names();
std::string canonical_experiment(const std::string& name);

/// Schema defaults for an experiment.
ExperimentConfig default_config(const std::string& experiment);

/// Reads table [experiment] from a TOML document (missing table == defaults).
ExperimentConfig parse_config(const std::string& toml_text, const std::string& experiment);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);

/// Sets key from a command-line string, with the schema's type.
void override_value(ExperimentConfig& cfg, const std::string& key, const std::string& text);

/// Checks types, positivity and experiment-specific constraints.
void validate(const ExperimentConfig& cfg);

std::string to_toml(const ExperimentConfig& cfg);
/// JSON object text of the values (for the manifest).
std::string to_json(const ExperimentConfig& cfg);

}  // namespace vlab
