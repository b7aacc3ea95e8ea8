#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaflab/curvature.hpp"
#include "gaflab/optim.hpp"
#include "gaflab/problems.hpp"
#include "gaflab/transforms.hpp"

namespace gaflab {

enum class ExperimentKind { validate, race, saddle, curvature, surface, bound, train, suggest };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

// Builtins, plus "deep_chain" and "mlp".
struct ProblemConfig {
  std::string name = "paper_quadratic";
  BuiltinParams params;
  std::optional<Vector> start;
  std::size_t depth = 10;
  ChainActivation activation = ChainActivation::sigmoid;
  double chain_weight = 1.0;
  double chain_input = 1.0;
  double chain_target = 0.0;
  std::size_t samples = 200;
  std::size_t hidden = 8;
  std::uint64_t data_seed = 0;
};

struct ValidateConfig {
  double half_width = 2.0;
  std::size_t points = 1001;
};

enum class RaceExpectation { faster, tie, none };

struct RaceConfig {
  double target_loss = 1e-8;
  std::size_t max_iters = 100000;
  RaceExpectation expect = RaceExpectation::faster;
};

struct SaddleConfig {
  std::size_t delta = 50;
};

enum class CurvatureExpectation { reduced, increased, none };

struct CurvatureConfig {
  CurvatureExpectation expect = CurvatureExpectation::none;
};

struct BoundConfig {
  double mu = 1.0;
  double mu_g = 1.0;
  double m = 0.0;
  double m_v = 0.0;
  std::size_t steps = 200;
  double loss_star = 0.0;
  // Taken from the region estimate when absent.
  std::optional<double> ell;
  std::optional<double> c;
};

struct SurfaceConfig {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t points = 41;
  double offset = 1.0;
  std::optional<double> ratio_min;  // asserted when set (exclusive)
  std::optional<double> ratio_max;  // asserted when set (exclusive)
};

struct TrainConfig {
  std::size_t epochs = 60;
  double accuracy = 0.9;
};

struct SuggestConfig {
  std::size_t epoch_length = 0;  // 0: one pass over the data
  std::size_t steps = 400;
  double slice_half_width = 0.5;
  std::size_t slice_points = 41;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::validate;
  std::vector<std::uint64_t> seeds{0};
  ProblemConfig problem;
  OptimizerSpec optimizer;  // optimizer.transform is the treatment
  GradientTransform baseline;
  RegionSpec region;
  ValidateConfig validate;
  RaceConfig race;
  SaddleConfig saddle;
  CurvatureConfig curvature;
  BoundConfig bound;
  SurfaceConfig surface;
  TrainConfig train;
  SuggestConfig suggest;
  std::optional<std::string> output_dir;
};

/// Defaults for one experiment kind before any file or flag is applied.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses a JSON document (comments allowed). Throws ConfigError listing every
/// field-level problem. `kind` must be present unless fallback_kind is given;
/// overrides are "section.key=value" strings (nested keys dot-separated) applied on top,
/// where value is read as JSON and falls back to a plain string.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> fallback_kind = std::nullopt,
                              const std::vector<std::string>& overrides = {});

/// Builds the configured problem (and its start point when absent).
Problem make_problem(const ProblemConfig& cfg);
Vector start_point(const ProblemConfig& cfg, const Problem& problem);

/// Canonical JSON echo of the fully-defaulted config.
std::string config_json(const ExperimentConfig& cfg);

}  // namespace gaflab
