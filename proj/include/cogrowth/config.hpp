#pragma once

// Experiment configuration files.
//
//   experiment = drift
//   seed = 7
//   [params]
//   k = 2
//   n = 1000
//
// Keys before the first section header belong to [run]; run keys other than
// the reserved ones are taken as experiment parameters, so a one-line config
// such as `experiment=drift k=2 n=1000 m=100 seed=7` is valid. Several
// whitespace-separated pairs may share a line. `#` starts a comment.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cogrowth {

enum class ParamType { uint, real, text, uint_list, real_list };

struct ParamSpec {
  std::string name;
  ParamType type;
  std::string default_value;
  std::string help;
};

struct ExperimentSchema {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;

  const ParamSpec* find(std::string_view key) const;
};

const std::vector<ExperimentSchema>& experiment_schemas();
/// Throws PreconditionError naming the key path when the experiment is unknown.
const ExperimentSchema& schema_for(const std::string& experiment);

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string format = "json";
  std::string out;  // empty: standard output
  std::optional<std::uint64_t> budget;
  /// Explicitly given parameters in schema order.
  std::vector<std::pair<std::string, std::string>> params;
  /// Directory against which relative `file:` paths resolve; not serialized.
  std::filesystem::path base_dir;

  bool operator==(const ExperimentConfig& o) const {
    return experiment == o.experiment && seed == o.seed && stream == o.stream &&
           format == o.format && out == o.out && budget == o.budget && params == o.params;
  }

  const std::string* param(std::string_view key) const;
  /// Sets or replaces a parameter, keeping schema order. Validates the key.
  void set_param(const std::string& key, const std::string& value);
  /// Applies a `key=value` override, routing reserved keys to the run fields.
  void apply(const std::string& key, const std::string& value);
  /// Every schema parameter, defaults filled in.
  ExperimentConfig with_defaults() const;
};

/// Throws PreconditionError with the key path on syntax errors, unknown
/// sections or keys, and malformed values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize(const ExperimentConfig& c);

/// Typed view of the parameters of a config (defaults applied).
class ParamReader {
 public:
  explicit ParamReader(const ExperimentConfig& c);

  std::uint64_t uint(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<std::uint64_t> uint_list(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;

  /// Throws PreconditionError("params.<key>: <message>").
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  std::filesystem::path resolve(const std::string& path) const;

 private:
  const std::string& raw(const std::string& key) const;
  ExperimentConfig config_;
};

}  // namespace cogrowth
