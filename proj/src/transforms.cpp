#include "gaflab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"

namespace gaflab {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void check_threshold(double t, const char* what) {
  if (!(std::isfinite(t) && t > 0.0)) {
    throw ConfigError(std::string("threshold: ") + what +
                      " threshold must be positive and finite (got " +
                      format_double(t) + ")");
  }
}

bool all_finite(std::span<const double> g) {
  bool ok = true;
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for reduction(&& : ok) if (g.size() >= kParallelTransformThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) ok = ok && std::isfinite(g[i]);
  return ok;
}

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::gaf: return "gaf";
    case TransformKind::clip_value: return "clip_value";
    case TransformKind::clip_norm: return "clip_norm";
  }
  return "?";
}

GradientTransform GradientTransform::clip_value(double threshold) {
  check_threshold(threshold, "clip_value");
  return GradientTransform(Variant(ClipValue{threshold}));
}

GradientTransform GradientTransform::clip_norm(double threshold) {
  check_threshold(threshold, "clip_norm");
  return GradientTransform(Variant(ClipNorm{threshold}));
}

TransformKind GradientTransform::kind() const noexcept {
  return std::visit(overloaded{
                        [](const Identity&) { return TransformKind::identity; },
                        [](const GafSpec&) { return TransformKind::gaf; },
                        [](const ClipValue&) { return TransformKind::clip_value; },
                        [](const ClipNorm&) { return TransformKind::clip_norm; },
                    },
                    variant_);
}

double GradientTransform::threshold() const noexcept {
  if (const auto* c = std::get_if<ClipValue>(&variant_)) return c->threshold;
  if (const auto* c = std::get_if<ClipNorm>(&variant_)) return c->threshold;
  return 0.0;
}

double GradientTransform::apply_scalar(double g) const {
  return std::visit(
      overloaded{
          [&](const Identity&) { return g; },
          [&](const GafSpec& s) { return gaf_eval(s, g); },
          [&](const ClipValue& c) { return std::clamp(g, -c.threshold, c.threshold); },
          [&](const ClipNorm&) -> double {
            throw UnsupportedError("clip_norm has no scalar form");
          },
      },
      variant_);
}

std::string GradientTransform::label() const {
  return std::visit(
      overloaded{
          [](const Identity&) { return std::string("identity"); },
          [](const GafSpec& s) {
            return "gaf(" + std::string(to_string(s.kind())) + "," +
                   format_double(s.alpha()) + "," + format_double(s.beta()) + ")";
          },
          [](const ClipValue& c) { return "clip_value(" + format_double(c.threshold) + ")"; },
          [](const ClipNorm& c) { return "clip_norm(" + format_double(c.threshold) + ")"; },
      },
      variant_);
}

void apply_transform_inplace(const GradientTransform& t, std::span<double> g) {
  if (!all_finite(g)) throw InputError("apply_transform: non-finite gradient component");
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  const bool par = g.size() >= kParallelTransformThreshold;

  switch (t.kind()) {
    case TransformKind::identity:
      return;
    case TransformKind::gaf: {
      const GafSpec spec = *t.gaf_spec();
#pragma omp parallel for if (par)
      for (std::ptrdiff_t i = 0; i < n; ++i) g[i] = gaf_eval(spec, g[i]);
      return;
    }
    case TransformKind::clip_value: {
      const double tau = t.threshold();
#pragma omp parallel for if (par)
      for (std::ptrdiff_t i = 0; i < n; ++i) g[i] = std::clamp(g[i], -tau, tau);
      return;
    }
    case TransformKind::clip_norm: {
      const double tau = t.threshold();
      // Fixed blocks summed in order, so the norm does not depend on the
      // thread count.
      constexpr std::ptrdiff_t block = 4096;
      const std::ptrdiff_t blocks = (n + block - 1) / block;
      std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for if (par)
      for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        double acc = 0.0;
        for (std::ptrdiff_t i = b * block; i < std::min(n, (b + 1) * block); ++i) acc += g[i] * g[i];
        partial[static_cast<std::size_t>(b)] = acc;
      }
      double sq = 0.0;
      for (double p : partial) sq += p;
      const double norm = std::sqrt(sq);
      if (!(norm > tau)) return;
      const double scale = tau / norm;
#pragma omp parallel for if (par)
      for (std::ptrdiff_t i = 0; i < n; ++i) g[i] *= scale;
      return;
    }
  }
}

Vector apply_transform(const GradientTransform& t, std::span<const double> g) {
  Vector out(g.begin(), g.end());
  apply_transform_inplace(t, out);
  return out;
}

namespace serial {

Vector apply_transform(const GradientTransform& t, std::span<const double> g) {
  for (double x : g) {
    if (!std::isfinite(x)) throw InputError("apply_transform: non-finite gradient component");
  }
  Vector out(g.begin(), g.end());
  if (t.kind() == TransformKind::clip_norm) {
    double sq = 0.0;
    for (double x : out) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm > t.threshold()) {
      for (double& x : out) x *= t.threshold() / norm;
    }
    return out;
  }
  for (double& x : out) x = t.apply_scalar(x);
  return out;
}

}  // namespace serial

}  // namespace gaflab
