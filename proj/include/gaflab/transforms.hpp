#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gaflab/gaf.hpp"

namespace gaflab {

using Vector = std::vector<double>;

enum class TransformKind { identity, gaf, clip_value, clip_norm };

std::string_view to_string(TransformKind kind);

/// The gradient-vector map every optimizer applies before its update.
class GradientTransform {
 public:
  struct Identity {
    friend bool operator==(const Identity&, const Identity&) = default;
  };
  struct ClipValue {
    double threshold;
    friend bool operator==(const ClipValue&, const ClipValue&) = default;
  };
  struct ClipNorm {
    double threshold;
    friend bool operator==(const ClipNorm&, const ClipNorm&) = default;
  };
  using Variant = std::variant<Identity, GafSpec, ClipValue, ClipNorm>;

  GradientTransform() : variant_(Identity{}) {}

  static GradientTransform identity() { return GradientTransform(); }
  static GradientTransform gaf(GafSpec spec) { return GradientTransform(Variant(spec)); }
  // Thresholds must be positive and finite; ConfigError otherwise.
  static GradientTransform clip_value(double threshold);
  static GradientTransform clip_norm(double threshold);

  TransformKind kind() const noexcept;
  const Variant& variant() const noexcept { return variant_; }
  // Only meaningful for kind() == gaf.
  const GafSpec* gaf_spec() const noexcept { return std::get_if<GafSpec>(&variant_); }
  double threshold() const noexcept;

  /// True when output component i depends only on input component i.
  bool element_wise() const noexcept { return kind() != TransformKind::clip_norm; }

  /// Scalar map for element-wise kinds. Not defined for clip_norm.
  double apply_scalar(double g) const;

  // "identity", "gaf(arctan,0.1,20)", "clip_norm(0.1)".
  std::string label() const;

  friend bool operator==(const GradientTransform&, const GradientTransform&) = default;

 private:
  explicit GradientTransform(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

/// Applies the transform; output has the input's length. Non-finite input
/// components raise InputError. Runs element-wise loops with OpenMP once the
/// vector is long enough to amortise the fork.
Vector apply_transform(const GradientTransform& t, std::span<const double> g);
void apply_transform_inplace(const GradientTransform& t, std::span<double> g);

inline constexpr std::size_t kParallelTransformThreshold = 1 << 15;

namespace serial {
// Straight-line reference used to check the parallel kernel.
Vector apply_transform(const GradientTransform& t, std::span<const double> g);
}  // namespace serial

}  // namespace gaflab
