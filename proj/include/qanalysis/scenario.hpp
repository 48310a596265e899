#pragma once

// Scenario configuration, task dispatch and file output for the command-line
// tool. A scenario is one JSON document:
//   {"task": ..., "seed": n, "model": {...}, "output": {"format": ...},
//    "<task>": {task parameters}}
// Every key is checked against the schema and defaults are filled in before
// any work starts. Outputs embed the resolved configuration and the library
// version, and are written through a temporary file and a rename.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qanalysis/models.hpp"

namespace qa {

// "derive", "taylor", "response", "zubarev", "dissipative", "verify-all".
const std::vector<std::string>& scenario_tasks();

// JSON schema of the scenario document.
nlohmann::json scenario_schema();

struct ScenarioConfig {
  std::string task;
  std::uint64_t seed = 0;
  ModelSpec model;
  std::string format = "json";        // json | csv
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  nlohmann::json resolved;             // full document with defaults filled in
  const nlohmann::json& params() const { return resolved.at(task); }
};

struct ScenarioOverrides {
  std::string task;  // required; must agree with "task" in the document if present
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned> threads;
};

// Validates against the schema and fills defaults. ConfigError on any
// unknown key, wrong type, out-of-range value or task mismatch.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const ScenarioOverrides& o);
// Reads the file first; malformed JSON is a ConfigError.
ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& o);

struct ScenarioOutcome {
  int status = 0;  // 0 success, 1 task failure (for verify-all: a criterion failed)
  std::vector<std::filesystem::path> files;
  std::string summary;
};

// Runs the task and writes <out_dir>/<task>.<format>. Module errors are
// rethrown as TaskError with the task name prefixed; no file is left behind.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

std::string library_version();

}  // namespace qa
