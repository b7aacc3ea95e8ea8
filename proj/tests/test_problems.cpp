#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gaflab/error.hpp"
#include "gaflab/problems.hpp"
#include "gaflab/rng.hpp"
#include "oracles.hpp"

using namespace gaflab;

namespace {

double max_abs(const Vector& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Largest component error relative to the gradient's scale.
double gradient_check(const Problem& p, const Vector& w, double h = 1e-6) {
  const Vector g = p.grad(w);
  const Vector fd = oracle::fd_gradient([&](const std::vector<double>& x) { return p.loss(x); }, w, h);
  double err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] - fd[i]));
  return err / std::max(max_abs(g), 1e-8);
}

}  // namespace

TEST_CASE("builtin values at listed points") {
  const Problem q = builtin_problem(BuiltinKind::paper_quadratic);
  CHECK(q.loss(Vector{1, 1}) == doctest::Approx(1.2));
  CHECK(q.grad(Vector{1, 1}) == Vector{2, 0.4});
  const Problem s = builtin_problem("saddle");
  CHECK(s.grad(Vector{0, 0}) == Vector{0, 0});
  const Matrix h = s.hessian(Vector{0, 0});
  CHECK(h(0, 0) == 2.0);
  CHECK(h(1, 1) == -2.0);
  CHECK(h(0, 1) == 0.0);
  const Problem quart = builtin_problem(BuiltinKind::quartic_well);
  CHECK(quart.dim == 1);
  CHECK(quart.grad(Vector{0.5})[0] == 0.125);
  const Matrix hq = q.hessian(Vector{0.3, -0.1});
  CHECK(hq(0, 0) / hq(1, 1) == doctest::Approx(5.0).epsilon(1e-15));
  const Problem g = builtin_problem(BuiltinKind::quadratic, BuiltinParams{3.0, 0.5});
  const Matrix hg = g.hessian(Vector{0, 0});
  CHECK(hg(0, 0) / hg(1, 1) == doctest::Approx(6.0));
  CHECK_THROWS_AS(builtin_problem("rosenbrock"), ConfigError);
}

TEST_CASE("every builtin gradient matches finite differences at 25 random points") {
  Rng rng(99);
  for (auto k : {BuiltinKind::paper_quadratic, BuiltinKind::quadratic, BuiltinKind::quartic_well,
                 BuiltinKind::saddle, BuiltinKind::type1_curve}) {
    const Problem p = builtin_problem(k);
    CAPTURE(p.name);
    CHECK(p.separable());
    for (int i = 0; i < 25; ++i) {
      Vector w(p.dim);
      for (double& x : w) x = uniform(rng, -2, 2);
      REQUIRE(gradient_check(p, w) < 1e-5);
      // Hessian diagonal against differences of the gradient.
      const Matrix h = p.hessian(w);
      for (std::size_t j = 0; j < p.dim; ++j) {
        const double fd = oracle::central_diff([&](double x) { return p.coordinate_gradient(j, x); }, w[j]);
        REQUIRE(std::abs(h(j, j) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("type1 curve is flatter than a parabola near 0 and steeper far away") {
  const Problem p = builtin_problem(BuiltinKind::type1_curve);
  // Curvature at 0 vanishes; far out it grows beyond the parabola through (1, L(1)).
  CHECK(p.hessian(Vector{0.0})(0, 0) == 0.0);
  const double a = p.loss(Vector{1.0});
  CHECK(p.loss(Vector{0.2}) < a * 0.04);
  CHECK(p.loss(Vector{3.0}) > a * 9.0 * 0.5);
}

TEST_CASE("deep chain gradients") {
  const auto zero_in = DeepChainNet::uniform(1, ChainActivation::sigmoid, 1.0, 0.0, 0.0);
  const ChainGradient z = deep_chain_grad(zero_in);
  CHECK(z.first_weight_grad == 0.0);
  CHECK(z.loss == doctest::Approx(0.125));

  double prev = INFINITY;
  for (std::size_t d = 1; d <= 30; ++d) {
    const double g = std::abs(
        deep_chain_grad(DeepChainNet::uniform(d, ChainActivation::sigmoid, 1.0, 1.0, 0.0)).first_weight_grad);
    CHECK(g <= prev);
    prev = g;
  }
  double g5 = 0, g10 = 0, g20 = 0;
  for (auto [d, out] : {std::pair{5, &g5}, std::pair{10, &g10}, std::pair{20, &g20}}) {
    *out = std::abs(deep_chain_grad(DeepChainNet::uniform(d, ChainActivation::sigmoid, 1.0, 1.0, 0.0))
                        .first_weight_grad);
  }
  CHECK(g5 > g10);
  CHECK(g10 > g20);

  const auto exploding = DeepChainNet::uniform(20, ChainActivation::identity, 2.0, 1.0, 0.0);
  const double ge = deep_chain_grad(exploding).first_weight_grad;
  CHECK(ge > 1e5);
  CHECK(ge == std::ldexp(1.0, 39));
}

TEST_CASE("deep chain full gradient matches finite differences") {
  Rng rng(12);
  for (auto act : {ChainActivation::sigmoid, ChainActivation::identity}) {
    DeepChainNet net = DeepChainNet::uniform(6, act, 1.0, 0.7, 0.2);
    for (double& w : net.weights) w = uniform(rng, 0.5, 1.5);
    const Problem p = deep_chain_problem(net);
    CHECK(p.dim == 6);
    CHECK(gradient_check(p, net.weights) < 1e-5);
    CHECK(deep_chain_full_grad(net)[0] == deep_chain_grad(net).first_weight_grad);
  }
  CHECK_THROWS_AS(parse_chain_activation("relu"), ConfigError);
}

TEST_CASE("synthetic dataset") {
  const SyntheticDataset a = make_dataset(5, 200);
  const SyntheticDataset b = make_dataset(5, 200);
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
  CHECK(make_dataset(6, 200).inputs != a.inputs);
  CHECK(a.size() == 200);
  CHECK(std::count(a.labels.begin(), a.labels.end(), 1) == 100);
  double mx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mx += a.labels[i] == 1 ? a.inputs[i][0] : 0.0;
  CHECK(mx / 100 == doctest::Approx(1.0).epsilon(0.2));
  CHECK_THROWS_AS(make_dataset(0, 9), InputError);
  CHECK_THROWS_AS(make_dataset(0, 6), InputError);
  CHECK(dataset_csv(make_dataset(0, 8)).rfind("x1,x2,label\n", 0) == 0);
}

TEST_CASE("mlp gradients match finite differences") {
  const SyntheticDataset data = make_dataset(2, 40);
  Rng rng(17);
  for (std::size_t width : {1u, 4u, 8u, 16u}) {
    const Problem p = mlp_problem(data, width);
    CHECK(p.dim == mlp_param_count(width));
    CHECK(p.stochastic());
    Vector w(p.dim);
    for (double& x : w) x = uniform(rng, -1, 1);
    CHECK(gradient_check(p, w) < 1e-4);
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    const Vector full = p.grad(w);
    const Vector batch = p.batch_grad(w, all);
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(batch[i] == doctest::Approx(full[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mlp_problem(data, 17), ConfigError);
}

TEST_CASE("mlp trained by gd separates the blobs") {
  const SyntheticDataset data = make_dataset(0, 200);
  const Problem p = mlp_problem(data, 8);
  Vector w = mlp_initial_weights(8, 0);
  const double acc0 = mlp_accuracy(data, 8, w);
  for (int k = 0; k < 2000; ++k) {
    const Vector g = p.grad(w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= 0.5 * g[i];
  }
  MESSAGE("accuracy " << acc0 << " -> " << mlp_accuracy(data, 8, w));
  CHECK(mlp_accuracy(data, 8, w) > 0.9);
}
