#pragma once

// Scenario files: a product of curves, an optional finite group, charge
// parameters, named class sets and an ordered pipeline of checks. Parsing
// type-checks every step up front so that errors point at the offending JSON
// location; running executes the steps in order and stops at the first hard
// failure.

#include "stabforge/charge.hpp"
#include "stabforge/group_action.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stabforge {

/// Schema violation; path is a JSON pointer into the scenario document.
class ScenarioError : public StabforgeError {
 public:
  ScenarioError(std::string path, const std::string& message)
      : StabforgeError((path.empty() ? std::string("/") : path) + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct LiuParams {
  Rational s, t, beta;
  CurveFactor fiber;
};

struct StepOutcome {
  bool pass = true;
  Json result = Json::object();
  Json witness = nullptr;  // set on failure; re-checkable by one module call
};

struct PreparedStep {
  std::string kind;
  std::string path;       // JSON pointer of the step object
  std::string certifies;  // the statement the step checks
  std::function<StepOutcome()> run;
};

struct Scenario {
  std::string name;
  std::string description;
  SpacePtr space;
  std::optional<GroupScenario> group;
  Rational w = 1, b = 0;
  std::optional<LiuParams> liu;
  std::vector<PreparedStep> pipeline;
};

/// Throws ScenarioError on any schema or type error.
Scenario parse_scenario(const Json& document);
/// Reads and parses a file; JSON syntax errors carry the byte offset.
Scenario load_scenario(const std::filesystem::path& file);

struct StepReport {
  std::size_t index = 0;
  std::string step;
  std::string certifies;
  std::string status;  // "pass", "fail", "error", "skipped"
  Json result = nullptr;
  Json witness = nullptr;
  std::string message;
  double elapsed_ms = 0;
};

struct ScenarioReport {
  std::string scenario;
  std::string status;  // "pass", "fail", "error"
  std::vector<StepReport> steps;
  double elapsed_ms = 0;

  bool passed() const { return status == "pass"; }
  int exit_code() const { return passed() ? 0 : 1; }
};

ScenarioReport run_scenario(const Scenario& scenario);
Json report_to_json(const ScenarioReport& report);
std::string report_to_text(const ScenarioReport& report);

// Verification matrix: one row per result the bundled suite certifies.

struct MatrixRow {
  std::string tag;
  std::string name;
  std::string certifies;
  bool pass = false;
  std::size_t checks = 0;
  std::vector<std::string> details;
  double elapsed_ms = 0;
};

std::vector<std::string> matrix_tags();
/// Rows run concurrently on at most worker_limit() threads. An unknown tag
/// throws StabforgeError.
std::vector<MatrixRow> run_matrix(const std::optional<std::string>& only = std::nullopt);
Json matrix_to_json(const std::vector<MatrixRow>& rows);
std::string matrix_to_text(const std::vector<MatrixRow>& rows);

/// STABFORGE_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1). Throws on a malformed value.
std::size_t worker_limit();

/// Runs jobs[i]() for every i on at most `workers` threads. The first
/// exception (by index) is rethrown after all jobs finish.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job);

}  // namespace stabforge
