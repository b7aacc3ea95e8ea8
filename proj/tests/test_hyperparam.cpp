#include <cmath>

#include "doctest.h"
#include "gaflab/error.hpp"
#include "gaflab/hyperparam.hpp"

using namespace gaflab;

namespace {

template <class F>
std::vector<SlicePoint> sampled(F f, double half, std::size_t n = 41) {
  std::vector<SlicePoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = -half + 2 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    out.emplace_back(w, f(w));
  }
  return out;
}

}  // namespace

TEST_CASE("grad stats examples") {
  const std::vector<double> g{0.3, 0.1, 0.2, 0.05};
  const GradStats s = record_grad_stats(g, 2);
  CHECK(s.per_epoch_max_abs == std::vector<double>{0.3, 0.2});
  CHECK(s.global_max_abs == 0.3);
  CHECK(s.epochs == 2);
  const GradStats one = record_grad_stats(std::vector<double>{0.7}, 5);
  CHECK(one.per_epoch_max_abs == std::vector<double>{0.7});
  CHECK(one.global_max_abs == 0.7);
  const GradStats partial = record_grad_stats(std::vector<double>{0.1, 0.2, 0.9}, 2);
  CHECK(partial.per_epoch_max_abs == std::vector<double>{0.2, 0.9});
  CHECK_THROWS_AS(record_grad_stats(std::vector<double>{}, 2), InputError);
  CHECK_THROWS_AS(record_grad_stats(g, 0), InputError);
}

TEST_CASE("grad stats from a run match the raw channel") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  OptimizerSpec s;
  s.eta = 0.1;
  const Trajectory t = run(p, s, Vector{1, 1}, 10, std::nullopt, 0);
  const GradStats a = record_grad_stats(t, 3);
  const GradStats b = record_grad_stats(t.grad_max_abs, 3);
  CHECK(a.per_epoch_max_abs == b.per_epoch_max_abs);
  CHECK(a.epochs == 4);
  CHECK(a.global_max_abs == 2.0);
}

TEST_CASE("mlp baseline gradient maxima are finite") {
  const SyntheticDataset d = make_dataset(0, 200);
  const Problem p = mlp_problem(d, 8);
  OptimizerSpec s;
  s.kind = OptimizerKind::sgdm;
  s.eta = 0.05;
  s.momentum = 0.9;
  s.batch_size = 20;
  const Trajectory t = run(p, s, mlp_initial_weights(8, 0), 100, std::nullopt, 0);
  const GradStats st = record_grad_stats(t, 10);
  CHECK(st.global_max_abs > 0.0);
  CHECK(std::isfinite(st.global_max_abs));
  CHECK(st.epochs == 10);
}

TEST_CASE("quadratics classify as quadric for any curvature") {
  for (double a : {1e-3, 0.2, 1.0, 7.5, 1e4}) {
    CAPTURE(a);
    const CurveClass c = classify_curve(sampled([a](double w) { return a * w * w; }, 1.0));
    CHECK(c.label == CurveLabel::quadric);
    CHECK(std::abs(c.evidence) < 1e-9);
  }
  const CurveClass shifted = classify_curve(sampled([](double w) { return 3.0 + 2.0 * (w - 0.1) * (w - 0.1); }, 1.0, 43));
  CHECK(shifted.label == CurveLabel::quadric);
}

TEST_CASE("flat and sharp curves") {
  const CurveClass q = classify_curve(sampled([](double w) { return w * w * w * w; }, 1.0));
  CHECK(q.label == CurveLabel::type1_flat);
  CHECK(q.evidence == doctest::Approx(1.0));
  const CurveClass s = classify_curve(sampled([](double w) { return std::pow(std::abs(w), 1.2); }, 1.0));
  CHECK(s.label == CurveLabel::type2_sharp);
  CHECK(s.evidence < -kCurveTolerance);
  const Problem t1 = builtin_problem(BuiltinKind::type1_curve);
  const auto slice = loss_slice(t1, Vector{0.0}, Vector{1.0}, 0.5, 41);
  CHECK(classify_curve(slice).label == CurveLabel::type1_flat);
}

TEST_CASE("classifier rejects bad slices") {
  CHECK_THROWS_AS(classify_curve(sampled([](double w) { return w * w; }, 1.0, 20)), ClassificationError);
  CHECK_THROWS_AS(classify_curve(sampled([](double w) { return std::cos(6 * w); }, 1.0)), ClassificationError);
  CHECK_THROWS_AS(classify_curve(sampled([](double w) { return w; }, 1.0)), ClassificationError);
  CHECK_THROWS_AS(classify_curve(sampled([](double) { return 1.0; }, 1.0)), ClassificationError);
  auto bad = sampled([](double w) { return w * w; }, 1.0);
  std::swap(bad[3], bad[4]);
  CHECK_THROWS_AS(classify_curve(bad), ClassificationError);
  auto nan = sampled([](double w) { return w * w; }, 1.0);
  nan[7].second = NAN;
  CHECK_THROWS_AS(classify_curve(nan), ClassificationError);
}

TEST_CASE("suggestions") {
  GradStats st;
  st.global_max_abs = 0.1;
  st.per_epoch_max_abs = {0.1};
  st.epochs = 1;
  for (CurveLabel l : {CurveLabel::type1_flat, CurveLabel::type2_sharp, CurveLabel::quadric}) {
    const auto s = suggest_params(st, CurveClass{l, 0.0});
    REQUIRE(s.size() == 3);
    CHECK(s[0] == GafSpec(GafKind::arctan, 0.1, 20.0));
    CHECK(s[1] == GafSpec(GafKind::arctan, 0.2, 10.0));
    CHECK(s[2].alpha() == 0.1);
    const double ab = s[2].alpha() * s[2].beta();
    if (l == CurveLabel::type1_flat) CHECK(ab > 1.0);
    if (l == CurveLabel::type2_sharp) CHECK(ab < 1.0);
  }
  for (double m : {1e-6, 0.37, 12.0, 3e5}) {
    st.global_max_abs = m;
    const auto f = suggest_params(st, CurveClass{CurveLabel::type1_flat, 1.0});
    CHECK(f[2].alpha() * f[2].beta() > 1.0);
    const auto s = suggest_params(st, CurveClass{CurveLabel::type2_sharp, -1.0});
    CHECK(s[2].alpha() * s[2].beta() < 1.0);
  }
  st.global_max_abs = 0.0;
  CHECK_THROWS_AS(suggest_params(st, CurveClass{}), InputError);
}

TEST_CASE("slices and directions") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const auto s = loss_slice(p, Vector{0, 0}, Vector{1, 0}, 0.5, 5);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == SlicePoint{-0.5, 0.25});
  CHECK(s[2] == SlicePoint{0.0, 0.0});
  CHECK_THROWS_AS(loss_slice(p, Vector{0}, Vector{1, 0}, 0.5, 5), InputError);
  const Vector d = random_unit_direction(7, 3);
  double n = 0;
  for (double x : d) n += x * x;
  CHECK(n == doctest::Approx(1.0));
  CHECK(random_unit_direction(7, 3) == d);
  CHECK(random_unit_direction(7, 4) != d);
}

TEST_CASE("csv writers") {
  GradStats st;
  st.per_epoch_max_abs = {0.3, 0.2};
  st.global_max_abs = 0.3;
  CHECK(grad_stats_csv(st) == "epoch,max_abs_grad\n1,0.3\n2,0.2\n");
  const std::vector<GafSpec> sg{GafSpec(GafKind::arctan, 0.1, 20.0)};
  CHECK(suggestions_csv(sg) == "rank,kind,alpha,beta,alpha_beta\n1,arctan,0.1,20,2\n");
  const std::vector<SlicePoint> sl{{-1, 1}, {0, 0}};
  CHECK(slice_csv(sl) == "s,loss\n-1,1\n0,0\n");
}
