#include "gaflab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"

namespace gaflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Accum {
  double ell = -kInf, c = kInf;
  double ell_low = -kInf, c_low = kInf;
  double ell_high = -kInf, c_high = kInf;
  std::size_t pairs = 0, low_pairs = 0, high_pairs = 0;

  void add(double r, Segment a, Segment b) {
    ell = std::max(ell, r);
    c = std::min(c, r);
    ++pairs;
    if (a != b) return;
    if (a == Segment::low) {
      ell_low = std::max(ell_low, r);
      c_low = std::min(c_low, r);
      ++low_pairs;
    } else if (a == Segment::high) {
      ell_high = std::max(ell_high, r);
      c_high = std::min(c_high, r);
      ++high_pairs;
    }
  }

  void merge(const Accum& o) {
    ell = std::max(ell, o.ell);
    c = std::min(c, o.c);
    ell_low = std::max(ell_low, o.ell_low);
    c_low = std::min(c_low, o.c_low);
    ell_high = std::max(ell_high, o.ell_high);
    c_high = std::min(c_high, o.c_high);
    pairs += o.pairs;
    low_pairs += o.low_pairs;
    high_pairs += o.high_pairs;
  }
};

// Secant ratio of pair (i, j), or a negative value for coincident points.
inline double secant(const FieldSamples& s, std::size_t i, std::size_t j) {
  const std::size_t d = s.dim;
  const double* pi = s.points.data() + i * d;
  const double* pj = s.points.data() + j * d;
  const double* gi = s.values.data() + i * d;
  const double* gj = s.values.data() + j * d;
  double dw2 = 0.0, dg2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double dw = pi[k] - pj[k];
    const double dg = gi[k] - gj[k];
    dw2 += dw * dw;
    dg2 += dg * dg;
  }
  const double dw = std::sqrt(dw2);
  if (dw <= kCoincidentDistance) return -1.0;
  return std::sqrt(dg2) / dw;
}

CurvatureEstimate finish(const Accum& a) {
  if (a.pairs == 0) throw EstimationError("estimate_curvature: no admissible point pairs");
  if (!(a.ell > 0.0)) {
    throw EstimationError("estimate_curvature: every secant is zero (constant field)");
  }
  CurvatureEstimate e;
  e.ell = a.ell;
  e.c = a.c;
  e.zeta = a.c > 0.0 ? a.ell / a.c : kInf;
  e.pair_count = a.pairs;
  e.low_pairs = a.low_pairs;
  e.high_pairs = a.high_pairs;
  if (a.low_pairs) {
    e.ell_low = a.ell_low;
    e.c_low = a.c_low;
  }
  if (a.high_pairs) {
    e.ell_high = a.ell_high;
    e.c_high = a.c_high;
  }
  return e;
}

void check_samples(const FieldSamples& s) {
  if (s.dim == 0 || s.points.size() != s.size() * s.dim || s.values.size() != s.points.size()) {
    throw InputError("estimate_curvature: inconsistent sample arrays");
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) throw InputError("estimate_curvature: field is not finite on the grid");
  }
}

Segment classify(std::span<const double> g, const RegionSpec& region) {
  if (!region.epsilon0 || !region.epsilon2) return Segment::middle;
  double lo = kInf, hi = 0.0;
  for (double x : g) {
    lo = std::min(lo, std::abs(x));
    hi = std::max(hi, std::abs(x));
  }
  if (hi <= *region.epsilon0) return Segment::low;
  if (lo > *region.epsilon2) return Segment::high;
  return Segment::middle;
}

}  // namespace

void RegionSpec::validate() const {
  std::vector<std::string> issues;
  if (box.empty()) issues.push_back("region.box: needs at least one dimension");
  for (const auto& [lo, hi] : box) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      issues.push_back("region.box: each dimension needs finite lo < hi");
      break;
    }
  }
  if (points_per_dim < 2) issues.push_back("region.points_per_dim: need at least 2 points per dimension");
  if (epsilon0.has_value() != epsilon2.has_value()) {
    issues.push_back("region.epsilon0/epsilon2: set both or neither");
  }
  if (epsilon0 && epsilon2 && !(*epsilon0 > 0.0 && *epsilon0 <= *epsilon2)) {
    issues.push_back("region.epsilon0: must satisfy 0 < epsilon0 <= epsilon2");
  }
  if (issues.empty() && total_points() > kMaxRegionPoints) {
    issues.push_back("region.points_per_dim: grid has " + std::to_string(total_points()) +
                     " points, limit is " + std::to_string(kMaxRegionPoints));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::size_t RegionSpec::total_points() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (n > kMaxRegionPoints) return n;
    n *= points_per_dim;
  }
  return n;
}

std::vector<Vector> RegionSpec::grid_points() const {
  validate();
  const std::size_t d = box.size();
  const std::size_t m = points_per_dim;
  std::vector<Vector> axes(d, Vector(m));
  for (std::size_t k = 0; k < d; ++k) {
    const auto [lo, hi] = box[k];
    for (std::size_t i = 0; i < m; ++i) {
      axes[k][i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    }
    axes[k][m - 1] = hi;
  }
  const std::size_t total = total_points();
  std::vector<Vector> pts;
  pts.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vector p(d);
    std::size_t rest = idx;
    for (std::size_t k = d; k-- > 0;) {
      p[k] = axes[k][rest % m];
      rest /= m;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

std::string RegionSpec::canonical() const {
  std::ostringstream os;
  for (const auto& [lo, hi] : box) os << '[' << format_double(lo) << ',' << format_double(hi) << ']';
  os << ";n=" << points_per_dim;
  if (epsilon0) os << ";e0=" << format_double(*epsilon0);
  if (epsilon2) os << ";e2=" << format_double(*epsilon2);
  return os.str();
}

std::string RegionSpec::hash() const { return hex64(fnv1a64(canonical())).substr(0, 12); }

FieldSamples sample_field(const GradientField& field, const RegionSpec& region,
                          const GradientField& segment_field) {
  const std::vector<Vector> pts = region.grid_points();
  FieldSamples s;
  s.dim = region.box.size();
  s.points.reserve(pts.size() * s.dim);
  s.values.reserve(pts.size() * s.dim);
  s.segments.reserve(pts.size());
  for (const Vector& p : pts) {
    const Vector g = field(p);
    if (g.size() != s.dim) throw InputError("sample_field: field dimension mismatch");
    s.points.insert(s.points.end(), p.begin(), p.end());
    s.values.insert(s.values.end(), g.begin(), g.end());
    s.segments.push_back(classify(segment_field ? segment_field(p) : g, region));
  }
  return s;
}

CurvatureEstimate estimate_from_samples(const FieldSamples& s) {
  check_samples(s);
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  Accum total;
#pragma omp parallel
  {
    Accum local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const double r = secant(s, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (r >= 0.0) local.add(r, s.segments[i], s.segments[j]);
      }
    }
#pragma omp critical(gaflab_curvature_merge)
    total.merge(local);
  }
  return finish(total);
}

namespace serial {

CurvatureEstimate estimate_from_samples(const FieldSamples& s) {
  check_samples(s);
  Accum a;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double r = secant(s, i, j);
      if (r >= 0.0) a.add(r, s.segments[i], s.segments[j]);
    }
  }
  return finish(a);
}

}  // namespace serial

CurvatureEstimate estimate_curvature(const GradientField& field, const RegionSpec& region) {
  return estimate_from_samples(sample_field(field, region));
}

bool ConditionReport::premises_ok() const noexcept {
  return std::all_of(premises.begin(), premises.end(), [](const PremiseCheck& p) { return p.ok; });
}

namespace {

// Counts segment pairs that break the expected strict secant ordering.
void check_segment_pairs(const FieldSamples& orig, const FieldSamples& trans, Segment seg,
                         bool expect_larger, std::size_t& checked, std::size_t& violations) {
  const auto n = static_cast<std::ptrdiff_t>(orig.size());
  const std::size_t d = orig.dim;
  std::size_t c = 0, v = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : c, v)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (orig.segments[i] != seg) continue;
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      if (orig.segments[j] != seg) continue;
      double dg = 0.0, dt = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double a = orig.values[i * d + k] - orig.values[j * d + k];
        const double b = trans.values[i * d + k] - trans.values[j * d + k];
        dg += a * a;
        dt += b * b;
      }
      if (dg == 0.0) continue;
      ++c;
      const bool ok = expect_larger ? dt > dg : dt < dg;
      if (!ok) ++v;
    }
  }
  checked = c;
  violations = v;
}

std::string fmt_opt(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string("n/a");
}

}  // namespace

ConditionReport check_condition_reduction(const Problem& problem, const GradientTransform& t,
                                          const RegionSpec& region) {
  region.validate();
  if (!region.epsilon0 || !region.epsilon2) {
    throw InputError("check_condition_reduction: region needs epsilon0 and epsilon2");
  }
  if (region.box.size() != problem.dim) {
    throw InputError("check_condition_reduction: region dimension differs from problem");
  }
  const double e0 = *region.epsilon0;
  const double e2 = *region.epsilon2;

  const FieldSamples orig = sample_field(problem.grad, region);
  FieldSamples trans = orig;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    std::span<const double> g(orig.values.data() + i * orig.dim, orig.dim);
    const Vector tg = apply_transform(t, g);
    std::copy(tg.begin(), tg.end(), trans.values.begin() + static_cast<std::ptrdiff_t>(i * orig.dim));
  }

  ConditionReport r;
  r.original = estimate_from_samples(orig);
  r.transformed = estimate_from_samples(trans);
  r.zeta_original = r.original.zeta;
  r.zeta_transformed = r.transformed.zeta;
  r.reduced = r.zeta_transformed < r.zeta_original;

  check_segment_pairs(orig, trans, Segment::low, true, r.low_pairs_checked, r.low_violations);
  check_segment_pairs(orig, trans, Segment::high, false, r.high_pairs_checked, r.high_violations);

  const auto& o = r.original;
  r.premises.push_back({"lipschitz order: ell_low < ell_high",
                        o.ell_low && o.ell_high && *o.ell_low < *o.ell_high,
                        "ell_low=" + fmt_opt(o.ell_low) + " ell_high=" + fmt_opt(o.ell_high)});
  r.premises.push_back({"convexity order: c_low < c_high",
                        o.c_low && o.c_high && *o.c_low < *o.c_high,
                        "c_low=" + fmt_opt(o.c_low) + " c_high=" + fmt_opt(o.c_high)});

  const GafSpec* spec = t.gaf_spec();
  r.premises.push_back({"transform is a GAF", spec != nullptr, t.label()});
  if (spec) {
    // Slope > 1 on every gradient component sampled in the low segment.
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < orig.size(); ++i) {
      if (orig.segments[i] != Segment::low) continue;
      for (std::size_t k = 0; k < orig.dim; ++k) {
        worst = std::min(worst, gaf_deriv(*spec, orig.values[i * orig.dim + k]));
      }
    }
    const bool any_low = worst < std::numeric_limits<double>::infinity();
    r.premises.push_back({"low segment slope > 1", any_low && worst > 1.0,
                          any_low ? "min slope=" + format_double(worst) : "no low-segment points"});

    constexpr std::size_t kScan = 1001;
    for (std::size_t i = 0; i < kScan; ++i) {
      const double x = e0 + (e2 - e0) * static_cast<double>(i) / static_cast<double>(kScan - 1);
      if (gaf_deriv(*spec, x) <= 1.0) {
        r.epsilon1 = x;
        break;
      }
    }
    r.premises.push_back({"epsilon1 in [epsilon0, epsilon2] with slope <= 1", r.epsilon1.has_value(),
                          "epsilon1=" + fmt_opt(r.epsilon1)});
    const double at_e2 = gaf_eval(*spec, e2);
    r.premises.push_back({"g(epsilon2) <= epsilon2", at_e2 <= e2,
                          "g(epsilon2)=" + format_double(at_e2)});
  }
  return r;
}

std::vector<std::string> curvature_csv_header() {
  return {"problem", "transform", "region", "ell", "c", "zeta",
          "ell_low", "ell_high", "c_low", "c_high", "pairs"};
}

std::vector<std::string> curvature_csv_row(const std::string& problem, const std::string& transform,
                                           const RegionSpec& region, const CurvatureEstimate& e) {
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  return {problem,       transform,      region.hash(),   format_double(e.ell),
          format_double(e.c), format_double(e.zeta), opt(e.ell_low), opt(e.ell_high),
          opt(e.c_low),  opt(e.c_high),  std::to_string(e.pair_count)};
}

}  // namespace gaflab
