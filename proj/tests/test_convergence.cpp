#include <cmath>

#include "doctest.h"
#include "gaflab/convergence.hpp"
#include "gaflab/curvature.hpp"
#include "gaflab/error.hpp"

using namespace gaflab;

namespace {

const GradientTransform kArctan = GradientTransform::gaf(GafSpec(GafKind::arctan, 0.1, 20.0));

OptimizerSpec gd(double eta, GradientTransform t = GradientTransform::identity()) {
  OptimizerSpec s;
  s.eta = eta;
  s.transform = t;
  return s;
}

}  // namespace

TEST_CASE("noise model") {
  const SgdNoiseModel n(0.5, 1.5, 0.1, 0.2);
  CHECK(n.m_g() == 0.2 + 1.5 * 1.5);
  CHECK(n.learning_rate(2.0) == doctest::Approx(0.5 / (2.0 * n.m_g())));
  CHECK_THROWS_AS(SgdNoiseModel(0.0, 1.0, 0, 0), DomainError);
  CHECK_THROWS_AS(SgdNoiseModel(2.0, 1.0, 0, 0), DomainError);
  CHECK_THROWS_AS(SgdNoiseModel(1.0, 1.0, -1, 0), DomainError);
  CHECK_THROWS_AS(SgdNoiseModel(1.0, 1.0, 0, -1), DomainError);
  CHECK(SgdNoiseModel::deterministic().m_g() == 1.0);
}

TEST_CASE("gap bound values") {
  const auto det = SgdNoiseModel::deterministic();
  CHECK(sgd_gap_bound(1, 2.0, 0.4, det, 1.2) == 1.2);
  CHECK(sgd_gap_bound(1, 7.0, 0.1, SgdNoiseModel(0.5, 1.0, 0.3, 0.1), 3.25) == 3.25);
  CHECK(sgd_gap_bound(11, 2.0, 0.4, det, 1.2) == doctest::Approx(0.12884901888).epsilon(1e-14));
  CHECK(gap_contraction(2.0, 0.4, det) == doctest::Approx(0.8));
  // With noise the bound tends to M / (2 c M_G).
  const SgdNoiseModel noisy(1.0, 1.0, 0.2, 0.0);
  CHECK(sgd_gap_bound(100000, 2.0, 0.4, noisy, 1.0) == doctest::Approx(0.2 / (2 * 0.4 * 1.0)));
}

TEST_CASE("gap bound decreases as c grows") {
  const auto det = SgdNoiseModel::deterministic();
  for (std::size_t k : {2u, 5u, 50u}) {
    double prev = INFINITY;
    for (double c = 0.1; c <= 2.0; c += 0.1) {
      const double b = sgd_gap_bound(k, 2.0, c, det, 1.0);
      CHECK(b < prev);
      prev = b;
    }
  }
}

TEST_CASE("gap bound premises") {
  const auto det = SgdNoiseModel::deterministic();
  CHECK_THROWS_AS(sgd_gap_bound(0, 2.0, 0.4, det, 1.0), DomainError);
  CHECK_THROWS_AS(sgd_gap_bound(3, 2.0, 3.0, det, 1.0), DomainError);
  CHECK_THROWS_AS(sgd_gap_bound(3, 2.0, 0.0, det, 1.0), DomainError);
}

TEST_CASE("deterministic gd stays under the bound") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const auto det = SgdNoiseModel::deterministic();
  const Trajectory t = run(p, gd(det.learning_rate(2.0)), Vector{1, 1}, 199, std::nullopt, 0);
  REQUIRE(t.losses.size() == 200);
  for (std::size_t k = 1; k <= 200; ++k) {
    REQUIRE(t.losses[k - 1] <= sgd_gap_bound(k, 2.0, 0.4, det, t.losses[0]));
  }
}

TEST_CASE("arctan wins the race near the optimum") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const RaceResult r = race(p, gd(0.1), gd(0.1, kArctan), Vector{0.05, 0.05}, 1e-8, 100000, 0);
  CHECK(r.baseline.status == ArmStatus::converged);
  CHECK(r.treatment.status == ArmStatus::converged);
  CHECK(r.treatment.iterations < r.baseline.iterations);
  CHECK(r.treatment_faster());
  CHECK(r.baseline.iterations == 133);
  CHECK(r.treatment.iterations == 66);
  CHECK(r.baseline.final_loss <= 1e-8);
}

TEST_CASE("identical arms tie") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  const RaceResult r = race(p, gd(0.1), gd(0.1), Vector{0.05, 0.05}, 1e-8, 100000, 0);
  CHECK(r.tie());
  CHECK_FALSE(r.treatment_faster());
  CHECK(r.baseline.iterations == r.treatment.iterations);
}

TEST_CASE("race input checks and divergence") {
  const Problem p = builtin_problem(BuiltinKind::paper_quadratic);
  CHECK_THROWS_AS(race(p, gd(0.1), gd(0.2), Vector{1, 1}, 1e-8, 10, 0), ConfigError);
  CHECK_THROWS_AS(race(p, gd(0.1), gd(0.1), Vector{0, 0}, 1e-8, 10, 0), InputError);
  const RaceResult d = race(p, gd(1.5), gd(1.5), Vector{1, 1}, 1e-8, 100000, 0);
  CHECK(d.baseline.status == ArmStatus::diverged);
  CHECK(d.treatment.status == ArmStatus::diverged);
  const RaceResult ex = race(p, gd(0.001), gd(0.001), Vector{1, 1}, 1e-8, 5, 0);
  CHECK(ex.baseline.status == ArmStatus::exhausted);
}

TEST_CASE("saddle escape") {
  const Problem p = builtin_problem(BuiltinKind::saddle);
  const EscapeResult id = saddle_escape(p, gd(0.01), Vector{0.0, 1e-3}, 50);
  CHECK(std::abs(id.displacement - (std::pow(1.02, 50) - 1.0) * 1e-3) < 1e-9);
  CHECK(std::abs(id.displacement - 0.0016915880290736054) < 1e-15);
  CHECK(id.steps == 50);
  const EscapeResult ga = saddle_escape(p, gd(0.01, kArctan), Vector{0.0, 1e-3}, 50);
  CHECK(ga.displacement > id.displacement);
  CHECK(saddle_escape(p, gd(0.01), Vector{0.0, 1e-3}, 0).displacement == 0.0);
  CHECK(saddle_escape(p, gd(0.01), Vector{0.0, 0.0}, 50).displacement == 0.0);
  CHECK(saddle_escape(p, gd(0.01, kArctan), Vector{0.0, 0.0}, 50).displacement == 0.0);
}

TEST_CASE("per-step escape is never slower while gradients stay below epsilon3") {
  const Problem p = builtin_problem(BuiltinKind::saddle);
  const double e3 = *solve_epsilon3(GafSpec(GafKind::arctan, 0.1, 20.0)).value;
  const Trajectory a = run(p, gd(0.01), Vector{0.0, 1e-3}, 50, std::nullopt, 0);
  const Trajectory b = run(p, gd(0.01, kArctan), Vector{0.0, 1e-3}, 50, std::nullopt, 0);
  for (std::size_t k = 0; k < 50; ++k) {
    if (b.grad_max_abs[k] >= e3) break;
    const double da = std::abs(a.iterates[k + 1][1] - a.iterates[k][1]);
    const double db = std::abs(b.iterates[k + 1][1] - b.iterates[k][1]);
    CHECK(db >= da);
  }
}

TEST_CASE("transformed constants give a smaller contraction factor") {
  const Problem p = builtin_problem(BuiltinKind::quartic_well);
  RegionSpec r;
  r.box = {{-1.5, 1.5}};
  r.points_per_dim = 301;
  r.epsilon0 = 0.05;
  r.epsilon2 = 0.5;
  const ConditionReport rep = check_condition_reduction(p, kArctan, r);
  REQUIRE(rep.premises_ok());
  const auto det = SgdNoiseModel::deterministic();
  const double plain = gap_contraction(rep.original.ell, rep.original.c, det);
  const double with_gaf = gap_contraction(rep.transformed.ell, rep.transformed.c, det);
  CHECK(with_gaf < plain);
}
