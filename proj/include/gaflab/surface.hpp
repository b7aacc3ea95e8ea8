#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaflab/problems.hpp"
#include "gaflab/transforms.hpp"

namespace gaflab {

enum class SurfacePath {
  separable,  // exact: sum of per-coordinate integrals
  ray,        // line integral along the straight ray from the origin
};

std::string_view to_string(SurfacePath p);

/// Equivalent loss Phi on a tensor grid. values are row-major with the last
/// axis fastest; Phi(origin) = 0.
struct SurfaceGrid {
  std::vector<Vector> axes;
  std::vector<double> values;
  GradientTransform transform_snapshot;
  std::string problem_name;
  SurfacePath path = SurfacePath::separable;

  std::size_t dim() const noexcept { return axes.size(); }
  double at(std::span<const std::size_t> index) const;
  /// Phi along axis k at coordinate x (all other coordinates 0), linearly
  /// interpolated between grid coordinates.
  double along_axis(std::size_t k, double x) const;
};

struct SurfaceOptions {
  double abs_tol = 1e-10;  // per one-dimensional integral
};

inline constexpr std::size_t kMaxSurfaceCells = 1 << 20;

/// Integrates the transformed gradient field back into a potential.
/// Element-wise transforms need a separable problem (UnsupportedError
/// otherwise); clip_norm always uses the ray path. Every axis must contain 0.
SurfaceGrid equivalent_surface(const Problem& problem, const GradientTransform& t,
                               std::vector<Vector> axes, const SurfaceOptions& opts = {});

namespace serial {
SurfaceGrid equivalent_surface(const Problem& problem, const GradientTransform& t,
                               std::vector<Vector> axes, const SurfaceOptions& opts = {});
}  // namespace serial

/// Phi(offset, 0) / Phi(0, offset) on a 2-D surface; 1 means isotropic.
/// Throws DomainError when Phi(0, offset) < 1e-14.
double flatness_ratio(const SurfaceGrid& grid, double offset);

/// n points over [lo, hi] plus 0 if the range straddles it.
Vector axis_with_origin(double lo, double hi, std::size_t n);

/// 1-D: "w1,phi" rows. 2-D: first row "w1\w2" then the w2 coordinates, then
/// one row per w1 coordinate with its values. Higher dimensions: long format.
std::string surface_csv(const SurfaceGrid& grid);
/// surface_<problem>_<transform>_<hash>.csv
std::string surface_file_name(const SurfaceGrid& grid);

}  // namespace gaflab
