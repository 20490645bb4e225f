#pragma once

// Experiment runner: validates a config against the preconditions of the
// target operation, runs it and produces a JSON or CSV report.

#include <functional>
#include <string>
#include <vector>

#include "cogrowth/config.hpp"
#include "json.hpp"

namespace cogrowth {

inline constexpr const char* kArtifactVersion = "1";
const char* code_version();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  ExperimentConfig config;  // defaults filled in, effective budget set
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  CsvTable table;
  /// ok | precondition-failed | budget-exhausted | verdict-failed
  std::string status = "ok";
  std::string message;
  double wall_time_s = 0.0;
  int exit_code = 0;
};

struct RunOptions {
  int workers = 1;
  /// Called with the partial report whenever a result block is complete.
  std::function<void(const RunReport&)> on_progress;
};

/// Checks every parameter before any computation. Throws PreconditionError
/// naming the key path.
void validate(const ExperimentConfig& config);

/// Validates, then runs. Errors raised during the run end up in the report
/// (status, message, exit code) together with the results gathered so far.
RunReport run(const ExperimentConfig& config, const RunOptions& options = {});

/// Pretty-printed JSON; `wall_time_s` sits alone on the last field line.
std::string to_json(const RunReport& report);
std::string to_csv(const RunReport& report);
std::string render(const RunReport& report);  // by config.format

}  // namespace cogrowth
