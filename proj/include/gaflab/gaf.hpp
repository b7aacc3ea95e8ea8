#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaflab {

enum class GafKind { arctan, tanh, log };

std::string_view to_string(GafKind kind);
// Throws ConfigError for unknown names.
GafKind parse_gaf_kind(std::string_view name);

/// Shape of a gradient activation function: kind plus output scale alpha and
/// input scale beta. Construction rejects non-positive or non-finite factors,
/// so every GafSpec in circulation is valid.
class GafSpec {
 public:
  GafSpec(GafKind kind, double alpha, double beta);

  GafKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Slope at the origin. Equal to alpha * beta for all three kinds.
  double gain() const noexcept { return alpha_ * beta_; }

  /// Output ceiling sup |g(x)|; infinite for the log kind.
  double ceiling() const noexcept;

  std::string label() const;

  friend bool operator==(const GafSpec&, const GafSpec&) = default;

 private:
  GafKind kind_;
  double alpha_;
  double beta_;
};

double gaf_eval(const GafSpec& spec, double g);
double gaf_deriv(const GafSpec& spec, double g);
// Throws UndefinedPointError for the log kind at g == 0.
double gaf_second_deriv(const GafSpec& spec, double g);

struct GafViolation {
  double point;
  std::string condition;
};

struct GafValidationReport {
  bool monotone_ok = false;
  bool odd_ok = false;
  // The epsilon beyond which g(x) <= x holds on the grid; absent when the
  // domination check failed.
  std::optional<double> dominated_beyond_epsilon;
  bool curvature_sign_ok = false;
  std::vector<GafViolation> failures;
  // Grid points skipped by the curvature check (the log-type kink at 0).
  std::vector<double> excluded;

  bool all_ok() const noexcept {
    return monotone_ok && odd_ok && dominated_beyond_epsilon.has_value() &&
           curvature_sign_ok;
  }
};

/// Checks the four GAF conditions (monotone, odd, eventually dominated by the
/// identity, x * g''(x) < 0) on a symmetric grid of at least 101 points.
GafValidationReport validate_gaf(const GafSpec& spec,
                                 std::span<const double> grid);

/// Uniform grid of n points over [lo, hi] with exact mirror symmetry when
/// lo == -hi.
std::vector<double> symmetric_grid(double half_width, std::size_t n);

struct Epsilon3Result {
  std::optional<double> value;
  double residual = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
};

inline constexpr double kEpsilon3Tolerance = 1e-12;

/// Positive fixed point of g(x) = x, the amplification threshold: for
/// 0 < |x| < value the GAF enlarges |x|, beyond it the GAF shrinks |x|.
/// Present only when alpha * beta > 1.
Epsilon3Result solve_epsilon3(const GafSpec& spec);

}  // namespace gaflab
