#include <cmath>

#include "doctest.h"
#include "gaflab/curvature.hpp"
#include "gaflab/error.hpp"
#include "gaflab/rng.hpp"
#include "oracles.hpp"

using namespace gaflab;

namespace {

const GradientTransform kArctan = GradientTransform::gaf(GafSpec(GafKind::arctan, 0.1, 20.0));

RegionSpec square(double half, std::size_t n) {
  RegionSpec r;
  r.box = {{-half, half}, {-half, half}};
  r.points_per_dim = n;
  return r;
}

RegionSpec quartic_region() {
  RegionSpec r;
  r.box = {{-1.5, 1.5}};
  r.points_per_dim = 301;
  r.epsilon0 = 0.05;
  r.epsilon2 = 0.5;
  return r;
}

GradientField transformed(const Problem& p, const GradientTransform& t) {
  return [p, t](std::span<const double> w) { return apply_transform(t, p.grad(w)); };
}

}  // namespace

TEST_CASE("quadratic secants recover the Hessian eigenvalues") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const CurvatureEstimate e = estimate_curvature(p.grad, square(1.0, 21));
  CHECK(e.ell == doctest::Approx(2.0).epsilon(0.02));
  CHECK(e.c == doctest::Approx(0.4).epsilon(0.02));
  CHECK(e.zeta == doctest::Approx(5.0).epsilon(0.02));
  CHECK(e.zeta == e.ell / e.c);
  CHECK(e.pair_count == 441u * 440u / 2u);
  const Problem q = builtin_problem(BuiltinKind::quadratic, BuiltinParams{3.0, 0.25});
  const CurvatureEstimate eq = estimate_curvature(q.grad, square(1.0, 21));
  CHECK(eq.zeta == doctest::Approx(12.0).epsilon(0.02));
}

TEST_CASE("estimator agrees with a brute-force pair scan") {
  const Problem p = builtin_problem(BuiltinKind::saddle);
  const RegionSpec r = square(0.7, 9);
  const GradientField f = transformed(p, kArctan);
  std::vector<std::vector<double>> pts, vals;
  for (const Vector& w : r.grid_points()) {
    pts.push_back(w);
    vals.push_back(f(w));
  }
  const auto [hi, lo] = oracle::secant_extremes(pts, vals);
  const CurvatureEstimate e = estimate_curvature(f, r);
  CHECK(e.ell == doctest::Approx(hi).epsilon(1e-14));
  CHECK(e.c == doctest::Approx(lo).epsilon(1e-14));
}

TEST_CASE("constant field has no usable secant") {
  const GradientField f = [](std::span<const double>) { return Vector{1.0, -2.0}; };
  CHECK_THROWS_AS(estimate_curvature(f, square(1.0, 5)), EstimationError);
}

TEST_CASE("scaling the field scales ell and c but not zeta") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const CurvatureEstimate e = estimate_curvature(p.grad, square(1.0, 11));
  for (double s : {0.01, 3.0, 1e4}) {
    const GradientField f = [&](std::span<const double> w) {
      Vector g = p.grad(w);
      for (double& x : g) x *= s;
      return g;
    };
    const CurvatureEstimate es = estimate_curvature(f, square(1.0, 11));
    CHECK(es.ell == doctest::Approx(s * e.ell).epsilon(1e-12));
    CHECK(es.c == doctest::Approx(s * e.c).epsilon(1e-12));
    CHECK(std::abs(es.zeta - e.zeta) < 1e-10);
  }
}

TEST_CASE("zero c gives an infinite condition number") {
  // Field constant along w2: pairs differing only in w2 have zero secant.
  const GradientField f = [](std::span<const double> w) { return Vector{w[0], 0.0}; };
  const CurvatureEstimate e = estimate_curvature(f, square(1.0, 5));
  CHECK(e.c == 0.0);
  CHECK(std::isinf(e.zeta));
}

TEST_CASE("arctan reduces the condition number of the quartic well") {
  const Problem p = builtin_problem(BuiltinKind::quartic_well);
  const ConditionReport r = check_condition_reduction(p, kArctan, quartic_region());
  CHECK(r.reduced);
  CHECK(r.zeta_transformed < r.zeta_original);
  CHECK(r.low_pairs_checked > 0);
  CHECK(r.high_pairs_checked > 0);
  CHECK(r.low_expansion_holds());
  CHECK(r.high_contraction_holds());
  CHECK(r.premises_ok());
  for (const PremiseCheck& pc : r.premises) {
    CAPTURE(pc.name);
    CAPTURE(pc.detail);
    CHECK(pc.ok);
  }
  REQUIRE(r.epsilon1.has_value());
  CHECK(*r.epsilon1 >= 0.05);
  CHECK(*r.epsilon1 <= 0.5);
  CHECK(gaf_deriv(GafSpec(GafKind::arctan, 0.1, 20.0), *r.epsilon1) <= 1.0);
  // Shape of the well: low-segment secants are smaller than high-segment ones.
  CHECK(*r.original.ell_low < *r.original.ell_high);
  CHECK(*r.original.c_low < *r.original.c_high);
}

TEST_CASE("identity leaves the condition number alone") {
  const Problem p = builtin_problem(BuiltinKind::quartic_well);
  const ConditionReport r = check_condition_reduction(p, GradientTransform::identity(), quartic_region());
  CHECK(r.zeta_transformed == r.zeta_original);
  CHECK_FALSE(r.reduced);
  CHECK_FALSE(r.premises_ok());
}

TEST_CASE("norm clipping worsens the quadratic") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const CurvatureEstimate e0 = estimate_curvature(p.grad, square(1.0, 21));
  const CurvatureEstimate e1 = estimate_curvature(transformed(p, GradientTransform::clip_norm(0.1)), square(1.0, 21));
  CHECK(e1.zeta > e0.zeta);
}

TEST_CASE("secant expansion in the low band and contraction in the high band") {
  const GafSpec s(GafKind::arctan, 0.1, 20.0);
  const double e0 = 0.02, e2 = 0.5;
  REQUIRE(gaf_deriv(s, e0) > 1.0);
  for (int i = 0; i <= 200; ++i) {
    for (int j = i + 1; j <= 200; ++j) {
      const double a = -e0 + 2 * e0 * i / 200.0, b = -e0 + 2 * e0 * j / 200.0;
      REQUIRE(std::abs(gaf_eval(s, a) - gaf_eval(s, b)) > std::abs(a - b));
      const double c = e2 + 1e-3 + 3.0 * i / 200.0, d = e2 + 1e-3 + 3.0 * j / 200.0;
      REQUIRE(std::abs(gaf_eval(s, c) - gaf_eval(s, d)) < std::abs(c - d));
      REQUIRE(std::abs(gaf_eval(s, -c) - gaf_eval(s, d)) < std::abs(-c - d));
    }
  }
}

TEST_CASE("segments follow the untransformed gradient") {
  const Problem p = builtin_problem(BuiltinKind::quartic_well);
  const FieldSamples s = sample_field(transformed(p, kArctan), quartic_region(), p.grad);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double g = std::pow(s.points[i], 3);
    const Segment want = std::abs(g) <= 0.05 ? Segment::low : (std::abs(g) > 0.5 ? Segment::high : Segment::middle);
    REQUIRE(s.segments[i] == want);
  }
}

TEST_CASE("region validation and identity") {
  RegionSpec r = square(1.0, 21);
  CHECK_NOTHROW(r.validate());
  CHECK(r.total_points() == 441);
  CHECK(r.grid_points().front() == Vector{-1.0, -1.0});
  CHECK(r.grid_points()[1] == Vector{-1.0, -0.9});
  CHECK(r.hash() == square(1.0, 21).hash());
  CHECK(r.hash() != square(1.0, 11).hash());
  CHECK(r.hash().size() == 12);
  RegionSpec big = square(1.0, 65);
  CHECK_THROWS_AS(big.validate(), ConfigError);
  RegionSpec bad = square(1.0, 1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  RegionSpec swapped = square(1.0, 5);
  swapped.epsilon0 = 0.5;
  swapped.epsilon2 = 0.1;
  CHECK_THROWS_AS(swapped.validate(), ConfigError);
  RegionSpec empty;
  CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("csv row layout") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const RegionSpec r = square(1.0, 5);
  const CurvatureEstimate e = estimate_curvature(p.grad, r);
  const auto row = curvature_csv_row("paper_quadratic", "identity", r, e);
  CHECK(row.size() == curvature_csv_header().size());
  CHECK(row[2] == r.hash());
  CHECK(row[6].empty());
}
