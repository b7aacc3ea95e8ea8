#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaflab/problems.hpp"
#include "gaflab/transforms.hpp"

namespace gaflab {

enum class OptimizerKind { gd, sgd, sgdm, adam };
// on_raw_gradient: w <- w - eta * T(grad) (or T(grad) fed to momentum/Adam).
// on_velocity:     v <- mu v - eta grad; w <- w + T(v)   (SGDM only).
enum class Placement { on_raw_gradient, on_velocity };

std::string_view to_string(OptimizerKind kind);
std::string_view to_string(Placement placement);
OptimizerKind parse_optimizer_kind(std::string_view name);
Placement parse_placement(std::string_view name);

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::gd;
  double eta = 0.1;
  double momentum = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 32;
  GradientTransform transform;
  Placement placement = Placement::on_raw_gradient;

  bool stochastic() const noexcept { return kind != OptimizerKind::gd; }

  // Throws ConfigError listing every invalid field.
  void validate() const;
  std::string label() const;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

struct OptimizerState {
  Vector velocity;  // pre-transform velocity (SGDM)
  Vector first_moment;
  Vector second_moment;
  std::uint64_t step_count = 0;

  static OptimizerState zeros(std::size_t dim);
};

struct StepResult {
  Vector w;
  OptimizerState state;
};

/// One optimizer update. Returns the new parameters and state; the inputs are
/// left untouched.
StepResult step(const OptimizerSpec& spec, const OptimizerState& state,
                std::span<const double> w, std::span<const double> grad);

/// In-place form used by run(). Returns false if the update produced a
/// non-finite parameter.
bool step_inplace(const OptimizerSpec& spec, OptimizerState& state, std::span<double> w,
                  std::span<const double> grad);

enum class StopReason { max_iters, stop_loss, diverged };

std::string_view to_string(StopReason r);

struct Trajectory {
  // iterates[k] is w_k; iterates[0] is the starting point.
  std::vector<Vector> iterates;
  std::vector<double> losses;
  // Largest |component| of the raw (pre-transform) gradient used at step k.
  std::vector<double> grad_max_abs;
  std::uint64_t seed = 0;
  OptimizerSpec spec_snapshot;
  StopReason stop = StopReason::max_iters;

  bool diverged() const noexcept { return stop == StopReason::diverged; }
  std::size_t steps() const noexcept { return grad_max_abs.size(); }
  const Vector& final_iterate() const { return iterates.back(); }
  double final_loss() const { return losses.back(); }
};

/// Deterministic seeded run. Stochastic kinds on problems with samples draw
/// mini-batches from per-epoch permutations; all other combinations use the
/// full gradient. Stops on stop_loss, max_iters or a non-finite loss or
/// parameter (flagged as diverged, never thrown).
Trajectory run(const Problem& problem, const OptimizerSpec& spec, std::span<const double> w0,
               std::size_t max_iters, std::optional<double> stop_loss, std::uint64_t seed);

/// One row per iterate: k, loss, max_abs_grad (blank for the final iterate),
/// and w_1..w_n when the dimension is at most 16.
std::string trajectory_csv(const Trajectory& t);
/// key,value listing of the spec snapshot, seed, stop reason and step count.
std::string run_record(const Trajectory& t);

inline constexpr std::size_t kCsvMaxParams = 16;

}  // namespace gaflab
