#include "gaflab/hyperparam.hpp"

#include <algorithm>
#include <cmath>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/rng.hpp"

namespace gaflab {

GradStats record_grad_stats(std::span<const double> g, std::size_t epoch_length) {
  if (g.empty()) throw InputError("record_grad_stats: trajectory has no recorded steps");
  if (epoch_length == 0) throw InputError("record_grad_stats: epoch_length must be >= 1");
  GradStats s;
  for (std::size_t i = 0; i < g.size(); i += epoch_length) {
    const std::size_t end = std::min(g.size(), i + epoch_length);
    double m = g[i];
    for (std::size_t j = i + 1; j < end; ++j) m = std::max(m, g[j]);
    s.per_epoch_max_abs.push_back(m);
  }
  s.epochs = s.per_epoch_max_abs.size();
  s.global_max_abs = *std::max_element(s.per_epoch_max_abs.begin(), s.per_epoch_max_abs.end());
  return s;
}

GradStats record_grad_stats(const Trajectory& trajectory, std::size_t epoch_length) {
  return record_grad_stats(trajectory.grad_max_abs, epoch_length);
}

std::string_view to_string(CurveLabel label) {
  switch (label) {
    case CurveLabel::type1_flat: return "type1_flat";
    case CurveLabel::type2_sharp: return "type2_sharp";
    case CurveLabel::quadric: return "quadric";
  }
  return "?";
}

CurveClass classify_curve(std::span<const SlicePoint> slice) {
  if (slice.size() < kMinSliceSamples) {
    throw ClassificationError("classify_curve: need at least 21 samples, got " +
                              std::to_string(slice.size()));
  }
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (!std::isfinite(slice[i].first) || !std::isfinite(slice[i].second)) {
      throw ClassificationError("classify_curve: non-finite sample");
    }
    if (i > 0 && !(slice[i].first > slice[i - 1].first)) {
      throw ClassificationError("classify_curve: coordinates must be strictly increasing");
    }
  }
  const auto min_it = std::min_element(slice.begin(), slice.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
  const std::size_t m = static_cast<std::size_t>(min_it - slice.begin());
  const double w_star = min_it->first;
  const double l_star = min_it->second;
  double y_max = 0.0;
  for (const auto& [w, l] : slice) y_max = std::max(y_max, l - l_star);
  const double slack = 1e-12 * std::max(1.0, y_max);
  for (std::size_t i = 0; i < m; ++i) {
    if (slice[i + 1].second > slice[i].second + slack) {
      throw ClassificationError("classify_curve: slice is not unimodal");
    }
  }
  for (std::size_t i = m; i + 1 < slice.size(); ++i) {
    if (slice[i + 1].second + slack < slice[i].second) {
      throw ClassificationError("classify_curve: slice is not unimodal");
    }
  }
  if (m == 0 || m + 1 == slice.size() || !(y_max > 0.0)) {
    throw ClassificationError("classify_curve: minimum must be interior with rising sides");
  }

  // Best fit a d^2, then the part of d^4 orthogonal to d^2 measures which
  // way the residuals bend.
  double s4 = 0, s6 = 0, s8 = 0, yd2 = 0, yd4 = 0, d_max = 0;
  for (const auto& [w, l] : slice) {
    const double d = w - w_star, d2 = d * d, y = l - l_star;
    s4 += d2 * d2;
    s6 += d2 * d2 * d2;
    s8 += d2 * d2 * d2 * d2;
    yd2 += y * d2;
    yd4 += y * d2 * d2;
    d_max = std::max(d_max, std::abs(d));
  }
  const double a = yd2 / s4;
  const double proj = s6 / s4;
  // u = d^4 - proj d^2, r = y - a d^2; r.u = yd4 - proj yd2 - a (s6 - proj s4).
  const double ru = yd4 - proj * yd2 - a * (s6 - proj * s4);
  const double uu = s8 - 2 * proj * s6 + proj * proj * s4;
  if (!(uu > 0.0)) throw ClassificationError("classify_curve: degenerate sample spacing");
  const double b = ru / uu;

  CurveClass out;
  out.evidence = b * std::pow(d_max, 4) / y_max;
  if (std::abs(out.evidence) <= kCurveTolerance) {
    out.label = CurveLabel::quadric;
  } else {
    out.label = out.evidence > 0 ? CurveLabel::type1_flat : CurveLabel::type2_sharp;
  }
  return out;
}

std::vector<SlicePoint> loss_slice(const Problem& problem, std::span<const double> center,
                                   std::span<const double> direction, double half_width,
                                   std::size_t n) {
  if (center.size() != problem.dim || direction.size() != problem.dim) {
    throw InputError("loss_slice: dimension mismatch");
  }
  if (!(half_width > 0.0) || n < 2) throw InputError("loss_slice: need half_width > 0 and n >= 2");
  std::vector<SlicePoint> out;
  out.reserve(n);
  Vector w(problem.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = -half_width + 2.0 * half_width * static_cast<double>(i) /
                                       static_cast<double>(n - 1);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = center[k] + s * direction[k];
    out.emplace_back(s, problem.loss(w));
  }
  return out;
}

Vector random_unit_direction(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InputError("random_unit_direction: dim must be positive");
  Rng rng(seed);
  Vector v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : v) {
      x = standard_normal(rng);
      n2 += x * x;
    }
  } while (!(n2 > 0.0));
  const double n = std::sqrt(n2);
  for (double& x : v) x /= n;
  return v;
}

std::vector<GafSpec> suggest_params(const GradStats& stats, const CurveClass& curve) {
  const double alpha = stats.global_max_abs;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError("suggest_params: global_max_abs must be positive and finite");
  }
  double beta = 1.0 / alpha;
  switch (curve.label) {
    case CurveLabel::type1_flat: beta = 2.0 / alpha; break;
    case CurveLabel::type2_sharp: beta = 0.9 / alpha; break;
    case CurveLabel::quadric: break;
  }
  return {GafSpec(GafKind::arctan, 0.1, 20.0), GafSpec(GafKind::arctan, 0.2, 10.0),
          GafSpec(GafKind::arctan, alpha, beta)};
}

std::string grad_stats_csv(const GradStats& stats) {
  CsvTable t({"epoch", "max_abs_grad"});
  for (std::size_t i = 0; i < stats.per_epoch_max_abs.size(); ++i) {
    t.row({csv_field(i + 1), csv_field(stats.per_epoch_max_abs[i])});
  }
  return t.text();
}

std::string suggestions_csv(std::span<const GafSpec> suggestions) {
  CsvTable t({"rank", "kind", "alpha", "beta", "alpha_beta"});
  for (std::size_t i = 0; i < suggestions.size(); ++i) {
    const GafSpec& s = suggestions[i];
    t.row({csv_field(i + 1), csv_field(to_string(s.kind())), csv_field(s.alpha()),
           csv_field(s.beta()), csv_field(s.gain())});
  }
  return t.text();
}

std::string slice_csv(std::span<const SlicePoint> slice) {
  CsvTable t({"s", "loss"});
  for (const auto& [s, l] : slice) t.row({csv_field(s), csv_field(l)});
  return t.text();
}

}  // namespace gaflab
