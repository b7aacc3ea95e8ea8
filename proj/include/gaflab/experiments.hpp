#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gaflab/config.hpp"

namespace gaflab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

struct Artifact {
  std::string name;  // file name inside the experiment directory
  std::string contents;
};

struct Assertion {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Artifact> artifacts;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;  // key: value lines for the report

  bool passed() const noexcept;
};

/// Runs the experiment in memory. `jobs` bounds the threads used across
/// seeds. Throws ConfigError / UnsupportedError for unusable settings.
ExperimentResult execute(const ExperimentConfig& config, int jobs = 1);

/// Plain-text report: config echo, notes, one PASS/FAIL line per assertion,
/// and the overall verdict. Contains no timestamps.
std::string report_text(const ExperimentResult& result);

/// --out beats the config, the config beats GAFLAB_OUT, then "gaflab_out".
std::filesystem::path resolve_output_root(const std::optional<std::string>& flag,
                                          const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::string> out;
  int jobs = 1;
  bool quiet = false;
};

/// Executes, writes artifacts, report.txt and manifest.json into
/// <root>/<kind>/ and returns the exit status (kExit*).
int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

}  // namespace gaflab
