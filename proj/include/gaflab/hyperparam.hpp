#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaflab/gaf.hpp"
#include "gaflab/optim.hpp"
#include "gaflab/problems.hpp"

namespace gaflab {

struct GradStats {
  std::vector<double> per_epoch_max_abs;
  double global_max_abs = 0.0;
  std::size_t epochs = 0;
};

/// Per-epoch maxima of the trajectory's raw max-|g| channel. The last epoch
/// may be partial.
GradStats record_grad_stats(const Trajectory& trajectory, std::size_t epoch_length);
GradStats record_grad_stats(std::span<const double> grad_max_abs, std::size_t epoch_length);

enum class CurveLabel { type1_flat, type2_sharp, quadric };

std::string_view to_string(CurveLabel label);

struct CurveClass {
  CurveLabel label = CurveLabel::quadric;
  // Weight of the quartic component left over after the best quadratic fit,
  // scaled so that a pure w^4 slice scores 1. Positive: flatter than quadric
  // near the minimum, negative: sharper.
  double evidence = 0.0;
};

inline constexpr double kCurveTolerance = 0.02;
inline constexpr std::size_t kMinSliceSamples = 21;

using SlicePoint = std::pair<double, double>;  // (w, loss)

/// Throws ClassificationError for fewer than 21 samples, unsorted
/// coordinates, or a slice that is not unimodal.
CurveClass classify_curve(std::span<const SlicePoint> slice);

/// Loss along center + s * direction for n values of s in [-half_width, half_width].
std::vector<SlicePoint> loss_slice(const Problem& problem, std::span<const double> center,
                                   std::span<const double> direction, double half_width,
                                   std::size_t n);

/// Uniformly distributed unit vector (normalized Gaussian draw).
Vector random_unit_direction(std::size_t dim, std::uint64_t seed);

/// arctan(0.1, 20), arctan(0.2, 10), then an arctan with alpha = the observed
/// max |g| and beta picked from the curve type. Throws InputError when
/// global_max_abs is not positive and finite.
std::vector<GafSpec> suggest_params(const GradStats& stats, const CurveClass& curve);

std::string grad_stats_csv(const GradStats& stats);
std::string suggestions_csv(std::span<const GafSpec> suggestions);
std::string slice_csv(std::span<const SlicePoint> slice);

}  // namespace gaflab
