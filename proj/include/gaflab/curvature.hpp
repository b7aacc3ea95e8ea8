#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaflab/problems.hpp"
#include "gaflab/transforms.hpp"

namespace gaflab {

// Largest grid (total points) the exhaustive pair estimator accepts.
inline constexpr std::size_t kMaxRegionPoints = 4096;
// Pairs closer than this are coincident and skipped.
inline constexpr double kCoincidentDistance = 1e-12;

/// Regular grid over a box, with optional low/high gradient thresholds that
/// split grid points into segments: low if every |g_n| <= epsilon0, high if
/// every |g_n| > epsilon2.
struct RegionSpec {
  std::vector<std::pair<double, double>> box;
  std::size_t points_per_dim = 21;
  std::optional<double> epsilon0;
  std::optional<double> epsilon2;

  void validate() const;
  std::size_t total_points() const;
  std::vector<Vector> grid_points() const;
  std::string canonical() const;
  std::string hash() const;
};

enum class Segment : std::uint8_t { middle, low, high };

struct CurvatureEstimate {
  double ell = 0.0;   // max secant ratio |g(w) - g(v)| / |w - v|
  double c = 0.0;     // min secant ratio
  double zeta = 0.0;  // ell / c, +inf when c == 0
  std::optional<double> ell_low, ell_high, c_low, c_high;
  std::size_t pair_count = 0;
  std::size_t low_pairs = 0;
  std::size_t high_pairs = 0;
};

/// Points, field values and segment labels, ready for pair enumeration.
struct FieldSamples {
  std::size_t dim = 0;
  std::vector<double> points;  // row-major, dim per point
  std::vector<double> values;
  std::vector<Segment> segments;

  std::size_t size() const noexcept { return segments.size(); }
};

using GradientField = std::function<Vector(std::span<const double>)>;

/// Samples the field on the region grid. Segments come from segment_field
/// (defaults to field itself); pass the untransformed gradient here so that
/// transformed fields are split on the same points.
FieldSamples sample_field(const GradientField& field, const RegionSpec& region,
                          const GradientField& segment_field = {});

/// Exhaustive secant extremes over all unordered non-coincident pairs, with
/// per-segment extremes over pairs whose endpoints share a segment.
/// Throws EstimationError when no admissible pair exists or all secants are 0.
CurvatureEstimate estimate_from_samples(const FieldSamples& samples);

CurvatureEstimate estimate_curvature(const GradientField& field, const RegionSpec& region);

namespace serial {
CurvatureEstimate estimate_from_samples(const FieldSamples& samples);
}  // namespace serial

struct PremiseCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct ConditionReport {
  CurvatureEstimate original;
  CurvatureEstimate transformed;
  double zeta_original = 0.0;
  double zeta_transformed = 0.0;
  bool reduced = false;

  // Pairs inside the low segment: transformed secant strictly larger.
  std::size_t low_pairs_checked = 0;
  std::size_t low_violations = 0;
  // Pairs inside the high segment: transformed secant strictly smaller.
  std::size_t high_pairs_checked = 0;
  std::size_t high_violations = 0;

  std::optional<double> epsilon1;
  std::vector<PremiseCheck> premises;

  bool low_expansion_holds() const noexcept { return low_violations == 0; }
  bool high_contraction_holds() const noexcept { return high_violations == 0; }
  bool premises_ok() const noexcept;
};

/// Estimates the condition number with and without the transform and checks
/// the per-segment secant inequalities. Premise failures are reported in
/// `premises`, never thrown. The region must set epsilon0 and epsilon2.
ConditionReport check_condition_reduction(const Problem& problem, const GradientTransform& t,
                                          const RegionSpec& region);

std::vector<std::string> curvature_csv_header();
std::vector<std::string> curvature_csv_row(const std::string& problem,
                                           const std::string& transform,
                                           const RegionSpec& region,
                                           const CurvatureEstimate& e);

}  // namespace gaflab
