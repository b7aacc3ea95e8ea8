#include "gaflab/gaf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"

namespace gaflab {

namespace {

void require_finite(double g, const char* what) {
  if (!std::isfinite(g)) {
    throw InputError(std::string(what) + ": argument must be finite");
  }
}

// sech^2(x) without the cancellation of 1 - tanh^2(x), which reaches exactly
// zero for |x| > ~19 and would make a strictly increasing tanh look flat.
double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

std::string_view to_string(GafKind kind) {
  switch (kind) {
    case GafKind::arctan: return "arctan";
    case GafKind::tanh: return "tanh";
    case GafKind::log: return "log";
  }
  return "?";
}

GafKind parse_gaf_kind(std::string_view name) {
  if (name == "arctan") return GafKind::arctan;
  if (name == "tanh") return GafKind::tanh;
  if (name == "log") return GafKind::log;
  throw ConfigError("gaf.kind: unknown GAF kind \"" + std::string(name) +
                    "\" (expected arctan, tanh or log)");
}

GafSpec::GafSpec(GafKind kind, double alpha, double beta)
    : kind_(kind), alpha_(alpha), beta_(beta) {
  std::vector<std::string> issues;
  if (!(std::isfinite(alpha) && alpha > 0.0)) {
    issues.push_back("gaf.alpha: must be positive and finite (got " +
                     format_double(alpha) + ")");
  }
  if (!(std::isfinite(beta) && beta > 0.0)) {
    issues.push_back("gaf.beta: must be positive and finite (got " +
                     format_double(beta) + ")");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

double GafSpec::ceiling() const noexcept {
  switch (kind_) {
    case GafKind::arctan: return alpha_ * std::numbers::pi / 2.0;
    case GafKind::tanh: return alpha_;
    case GafKind::log: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

std::string GafSpec::label() const {
  std::ostringstream os;
  os << to_string(kind_) << '(' << format_double(alpha_) << ','
     << format_double(beta_) << ')';
  return os.str();
}

double gaf_eval(const GafSpec& spec, double g) {
  require_finite(g, "gaf_eval");
  const double a = spec.alpha();
  const double b = spec.beta();
  switch (spec.kind()) {
    case GafKind::arctan: return a * std::atan(b * g);
    case GafKind::tanh: return a * std::tanh(b * g);
    case GafKind::log: {
      // alpha * (ln(relu(bg) + 1) - ln(relu(-bg) + 1)); one term is always 0.
      const double mag = a * std::log1p(b * std::abs(g));
      return g < 0.0 ? -mag : mag;
    }
  }
  return 0.0;
}

double gaf_deriv(const GafSpec& spec, double g) {
  require_finite(g, "gaf_deriv");
  const double a = spec.alpha();
  const double b = spec.beta();
  switch (spec.kind()) {
    case GafKind::arctan: {
      const double bg = b * g;
      return a * b / (1.0 + bg * bg);
    }
    case GafKind::tanh: return a * b * sech2(b * g);
    case GafKind::log: return a * b / (1.0 + b * std::abs(g));
  }
  return 0.0;
}

double gaf_second_deriv(const GafSpec& spec, double g) {
  require_finite(g, "gaf_second_deriv");
  const double a = spec.alpha();
  const double b = spec.beta();
  switch (spec.kind()) {
    case GafKind::arctan: {
      const double q = 1.0 + (b * g) * (b * g);
      return -2.0 * a * b * b * b * g / (q * q);
    }
    case GafKind::tanh: {
      const double bg = b * g;
      return -2.0 * a * b * b * std::tanh(bg) * sech2(bg);
    }
    case GafKind::log: {
      if (g == 0.0) {
        throw UndefinedPointError(
            "gaf_second_deriv: log-type GAF has no second derivative at 0");
      }
      const double q = 1.0 + b * std::abs(g);
      const double mag = a * b * b / (q * q);
      return g > 0.0 ? -mag : mag;
    }
  }
  return 0.0;
}

std::vector<double> symmetric_grid(double half_width, std::size_t n) {
  if (n < 2 || !(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InputError("symmetric_grid: need n >= 2 and a positive half width");
  }
  std::vector<double> grid(n);
  const double step = 2.0 * half_width / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    const double x = -half_width + step * static_cast<double>(i);
    grid[i] = x;
    grid[n - 1 - i] = -x;
  }
  if (n % 2 == 1) grid[n / 2] = 0.0;
  return grid;
}

GafValidationReport validate_gaf(const GafSpec& spec,
                                 std::span<const double> grid) {
  if (grid.size() < 101) {
    throw InputError("validate_gaf: grid needs at least 101 points");
  }
  std::vector<double> sorted(grid.begin(), grid.end());
  for (double g : sorted) require_finite(g, "validate_gaf");
  std::sort(sorted.begin(), sorted.end());
  const double scale = std::max(std::abs(sorted.front()), std::abs(sorted.back()));
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double mirror = sorted[sorted.size() - 1 - i];
    if (std::abs(sorted[i] + mirror) > 1e-12 * std::max(1.0, scale)) {
      throw InputError("validate_gaf: grid is not symmetric about 0");
    }
  }

  GafValidationReport report;
  report.monotone_ok = true;
  report.odd_ok = true;
  report.curvature_sign_ok = true;

  for (double g : sorted) {
    if (!(gaf_deriv(spec, g) > 0.0)) {
      report.monotone_ok = false;
      report.failures.push_back({g, "monotone: derivative not positive"});
    }
    if (std::abs(gaf_eval(spec, -g) + gaf_eval(spec, g)) > 1e-12) {
      report.odd_ok = false;
      report.failures.push_back({g, "odd: g(-x) != -g(x)"});
    }
    if (g == 0.0) {
      if (spec.kind() == GafKind::log) report.excluded.push_back(g);
      continue;
    }
    if (!(g * gaf_second_deriv(spec, g) < 0.0)) {
      report.curvature_sign_ok = false;
      report.failures.push_back({g, "curvature: x * g''(x) not negative"});
    }
  }

  // The tight epsilon is the amplification threshold when it exists, else 0.
  const Epsilon3Result eps3 = solve_epsilon3(spec);
  const double epsilon = eps3.value.value_or(0.0);
  bool dominated = true;
  for (double g : sorted) {
    if (g >= epsilon && gaf_eval(spec, g) > g) {
      dominated = false;
      report.failures.push_back({g, "dominated: g(x) > x beyond epsilon"});
    }
  }
  if (dominated) report.dominated_beyond_epsilon = epsilon;
  return report;
}

Epsilon3Result solve_epsilon3(const GafSpec& spec) {
  const auto f = [&](double x) { return gaf_eval(spec, x) - x; };
  double lo = 1e-9;
  double hi = std::max(10.0, 10.0 / spec.beta());

  Epsilon3Result result;
  if (!(spec.gain() > 1.0)) {
    result.bracket = {lo, hi};
    return result;
  }
  // The log kind is unbounded; widen until the identity overtakes it.
  for (int i = 0; i < 64 && f(hi) > 0.0; ++i) hi *= 2.0;
  result.bracket = {lo, hi};
  if (!(f(lo) > 0.0) || f(hi) > 0.0) return result;

  // f(lo) > 0 >= f(hi) is kept throughout; hi is returned so that every
  // x >= value satisfies g(x) <= x.
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.value = hi;
  result.residual = std::abs(f(hi));
  if (result.residual > kEpsilon3Tolerance) result.value.reset();
  return result;
}

}  // namespace gaflab
