#include "gaflab/surface.hpp"

#include <algorithm>
#include <cmath>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/quadrature.hpp"

namespace gaflab {

std::string_view to_string(SurfacePath p) { return p == SurfacePath::ray ? "ray" : "separable"; }

double SurfaceGrid::at(std::span<const std::size_t> index) const {
  if (index.size() != axes.size()) throw InputError("SurfaceGrid::at: wrong index rank");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (index[k] >= axes[k].size()) throw InputError("SurfaceGrid::at: index out of range");
    flat = flat * axes[k].size() + index[k];
  }
  return values[flat];
}

double SurfaceGrid::along_axis(std::size_t k, double x) const {
  if (k >= axes.size()) throw InputError("along_axis: no such axis");
  std::vector<std::size_t> idx(axes.size());
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const auto it = std::find(axes[d].begin(), axes[d].end(), 0.0);
    idx[d] = static_cast<std::size_t>(it - axes[d].begin());
  }
  const Vector& ax = axes[k];
  const auto lo_it = std::lower_bound(ax.begin(), ax.end(), x);
  if (ax.empty() || x < ax.front() || x > ax.back()) {
    throw InputError("along_axis: coordinate outside the axis range");
  }
  const std::size_t j = static_cast<std::size_t>(lo_it - ax.begin());
  idx[k] = j;
  const double v1 = at(idx);
  if (ax[j] == x || j == 0) return v1;
  idx[k] = j - 1;
  const double v0 = at(idx);
  const double f = (x - ax[j - 1]) / (ax[j] - ax[j - 1]);
  return v0 + f * (v1 - v0);
}

namespace {

void check_axes(const Problem& problem, const std::vector<Vector>& axes) {
  if (axes.size() != problem.dim) {
    throw InputError("equivalent_surface: need one axis per problem dimension");
  }
  std::size_t cells = 1;
  for (const Vector& ax : axes) {
    if (ax.empty()) throw InputError("equivalent_surface: empty axis");
    if (!std::is_sorted(ax.begin(), ax.end()) ||
        std::adjacent_find(ax.begin(), ax.end()) != ax.end()) {
      throw InputError("equivalent_surface: axis coordinates must be strictly increasing");
    }
    if (std::find(ax.begin(), ax.end(), 0.0) == ax.end()) {
      throw InputError("equivalent_surface: every axis must contain 0");
    }
    for (double x : ax) {
      if (!std::isfinite(x)) throw InputError("equivalent_surface: non-finite axis coordinate");
    }
    cells *= ax.size();
    if (cells > kMaxSurfaceCells) throw InputError("equivalent_surface: grid too large");
  }
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b, double tol) {
  const QuadratureResult q = integrate_adaptive(f, a, b, tol);
  if (!q.converged) throw EstimationError("equivalent_surface: quadrature did not converge");
  return q.value;
}

// Phi at one separable coordinate: integral of T(l_k'(u)) from 0 to x.
double coordinate_integral(const Problem& p, const GradientTransform& t, std::size_t k, double x,
                           double tol) {
  if (x == 0.0) return 0.0;
  return integrate_or_throw([&](double u) { return t.apply_scalar(p.coordinate_gradient(k, u)); },
                            0.0, x, tol);
}

// Phi(w) = int_0^1 T(grad(s w)) . w ds.
double ray_integral(const Problem& p, const GradientTransform& t, std::span<const double> w,
                    double tol) {
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) return 0.0;
  const Vector target(w.begin(), w.end());
  return integrate_or_throw(
      [&](double s) {
        Vector pt(target.size());
        for (std::size_t i = 0; i < pt.size(); ++i) pt[i] = s * target[i];
        const Vector g = apply_transform(t, p.grad(pt));
        double dot = 0.0;
        for (std::size_t i = 0; i < pt.size(); ++i) dot += g[i] * target[i];
        return dot;
      },
      0.0, 1.0, tol);
}

SurfacePath choose_path(const Problem& problem, const GradientTransform& t) {
  if (!t.element_wise()) return SurfacePath::ray;
  if (!problem.separable()) {
    throw UnsupportedError("equivalent_surface: element-wise transform " + t.label() +
                           " needs a separable problem; " + problem.name + " is not separable");
  }
  return SurfacePath::separable;
}

Vector cell_point(const std::vector<Vector>& axes, std::size_t flat) {
  Vector w(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    w[k] = axes[k][flat % axes[k].size()];
    flat /= axes[k].size();
  }
  return w;
}

std::size_t cell_count(const std::vector<Vector>& axes) {
  std::size_t n = 1;
  for (const Vector& a : axes) n *= a.size();
  return n;
}

// Sums per-axis integrals into cells.
void fill_separable(SurfaceGrid& grid, const std::vector<Vector>& per_axis) {
  const std::size_t n = cell_count(grid.axes);
  grid.values.assign(n, 0.0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rest = flat;
    double sum = 0.0;
    for (std::size_t k = grid.axes.size(); k-- > 0;) {
      sum += per_axis[k][rest % grid.axes[k].size()];
      rest /= grid.axes[k].size();
    }
    grid.values[flat] = sum;
  }
}

SurfaceGrid make_grid(const Problem& problem, const GradientTransform& t,
                      std::vector<Vector> axes, SurfacePath path) {
  SurfaceGrid g;
  g.axes = std::move(axes);
  g.transform_snapshot = t;
  g.problem_name = problem.name;
  g.path = path;
  return g;
}

void check_finite(const SurfaceGrid& g) {
  for (double v : g.values) {
    if (!std::isfinite(v)) throw EstimationError("equivalent_surface: non-finite potential");
  }
}

}  // namespace

SurfaceGrid equivalent_surface(const Problem& problem, const GradientTransform& t,
                               std::vector<Vector> axes, const SurfaceOptions& opts) {
  check_axes(problem, axes);
  const SurfacePath path = choose_path(problem, t);
  SurfaceGrid grid = make_grid(problem, t, std::move(axes), path);

  if (path == SurfacePath::separable) {
    std::vector<Vector> per_axis(grid.dim());
    for (std::size_t k = 0; k < grid.dim(); ++k) {
      const Vector& ax = grid.axes[k];
      per_axis[k].assign(ax.size(), 0.0);
      const auto m = static_cast<std::ptrdiff_t>(ax.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < m; ++i) {
        per_axis[k][i] = coordinate_integral(problem, t, k, ax[i], opts.abs_tol);
      }
    }
    fill_separable(grid, per_axis);
  } else {
    const std::size_t n = cell_count(grid.axes);
    grid.values.assign(n, 0.0);
    const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      const Vector w = cell_point(grid.axes, static_cast<std::size_t>(i));
      grid.values[i] = ray_integral(problem, t, w, opts.abs_tol);
    }
  }
  check_finite(grid);
  return grid;
}

namespace serial {

SurfaceGrid equivalent_surface(const Problem& problem, const GradientTransform& t,
                               std::vector<Vector> axes, const SurfaceOptions& opts) {
  check_axes(problem, axes);
  const SurfacePath path = choose_path(problem, t);
  SurfaceGrid grid = make_grid(problem, t, std::move(axes), path);
  if (path == SurfacePath::separable) {
    std::vector<Vector> per_axis(grid.dim());
    for (std::size_t k = 0; k < grid.dim(); ++k) {
      for (double x : grid.axes[k]) {
        per_axis[k].push_back(coordinate_integral(problem, t, k, x, opts.abs_tol));
      }
    }
    fill_separable(grid, per_axis);
  } else {
    const std::size_t n = cell_count(grid.axes);
    for (std::size_t i = 0; i < n; ++i) {
      grid.values.push_back(ray_integral(problem, t, cell_point(grid.axes, i), opts.abs_tol));
    }
  }
  check_finite(grid);
  return grid;
}

}  // namespace serial

double flatness_ratio(const SurfaceGrid& grid, double offset) {
  if (grid.dim() != 2) throw InputError("flatness_ratio: needs a 2-D surface");
  if (!(offset > 0.0)) throw InputError("flatness_ratio: offset must be positive");
  const double sharp = grid.along_axis(0, offset);
  const double flat = grid.along_axis(1, offset);
  if (std::abs(flat) < 1e-14) {
    throw DomainError("flatness_ratio: Phi(0, offset) vanishes (degenerate surface)");
  }
  return sharp / flat;
}

Vector axis_with_origin(double lo, double hi, std::size_t n) {
  if (!(lo < hi) || n < 2) throw InputError("axis_with_origin: need lo < hi and n >= 2");
  Vector ax(n);
  for (std::size_t i = 0; i < n; ++i) {
    ax[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  ax.back() = hi;
  // Snap near-zero coordinates produced by rounding, then make sure 0 exists.
  for (double& x : ax) {
    if (std::abs(x) < 1e-12 * (hi - lo)) x = 0.0;
  }
  if (lo <= 0.0 && hi >= 0.0 && std::find(ax.begin(), ax.end(), 0.0) == ax.end()) {
    ax.insert(std::upper_bound(ax.begin(), ax.end(), 0.0), 0.0);
  }
  return ax;
}

std::string surface_csv(const SurfaceGrid& grid) {
  if (grid.dim() == 1) {
    CsvTable t({"w1", "phi"});
    for (std::size_t i = 0; i < grid.axes[0].size(); ++i) {
      t.row({csv_field(grid.axes[0][i]), csv_field(grid.values[i])});
    }
    return t.text();
  }
  if (grid.dim() == 2) {
    std::vector<std::string> header{"w1\\w2"};
    for (double x : grid.axes[1]) header.push_back(csv_field(x));
    CsvTable t(header);
    const std::size_t cols = grid.axes[1].size();
    for (std::size_t i = 0; i < grid.axes[0].size(); ++i) {
      std::vector<std::string> row{csv_field(grid.axes[0][i])};
      for (std::size_t j = 0; j < cols; ++j) row.push_back(csv_field(grid.values[i * cols + j]));
      t.row(std::move(row));
    }
    return t.text();
  }
  std::vector<std::string> header;
  for (std::size_t k = 0; k < grid.dim(); ++k) header.push_back("w" + std::to_string(k + 1));
  header.push_back("phi");
  CsvTable t(header);
  for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
    const Vector w = cell_point(grid.axes, flat);
    std::vector<std::string> row;
    for (double x : w) row.push_back(csv_field(x));
    row.push_back(csv_field(grid.values[flat]));
    t.row(std::move(row));
  }
  return t.text();
}

std::string surface_file_name(const SurfaceGrid& grid) {
  std::string key = grid.problem_name + "|" + grid.transform_snapshot.label() + "|" +
                    std::string(to_string(grid.path));
  for (const Vector& ax : grid.axes) {
    key += "|";
    for (double x : ax) key += format_double(x) + ",";
  }
  std::string tlabel;
  for (char c : grid.transform_snapshot.label()) {
    tlabel += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  }
  while (!tlabel.empty() && tlabel.back() == '_') tlabel.pop_back();
  return "surface_" + grid.problem_name + "_" + tlabel + "_" + hex64(fnv1a64(key)).substr(0, 8) +
         ".csv";
}

}  // namespace gaflab
