#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaflab/transforms.hpp"

namespace gaflab {

/// Dense symmetric matrix, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  static Matrix zeros(std::size_t n) { return {n, std::vector<double>(n * n, 0.0)}; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// A differentiable landscape. Immutable once built; all callables are pure.
struct Problem {
  std::string name;
  std::size_t dim = 0;
  std::function<double(std::span<const double>)> loss;
  std::function<Vector(std::span<const double>)> grad;
  // Empty when no closed-form Hessian exists.
  std::function<Matrix(std::span<const double>)> hessian;
  // Set for separable losses L(w) = sum_n l_n(w_n): returns l_n'(u).
  std::function<double(std::size_t, double)> coordinate_gradient;
  // Stochastic problems expose per-sample mini-batches; samples == 0 means
  // the full gradient is the only gradient.
  std::size_t samples = 0;
  std::function<Vector(std::span<const double>, std::span<const std::size_t>)> batch_grad;

  bool separable() const noexcept { return static_cast<bool>(coordinate_gradient); }
  bool stochastic() const noexcept { return samples > 0 && batch_grad; }
};

enum class BuiltinKind { paper_quadratic, quadratic, quartic_well, saddle, type1_curve };

struct BuiltinParams {
  // Hessian eigenvalues of quadratic(lambda1, lambda2) = (l1 w1^2 + l2 w2^2) / 2.
  double lambda1 = 2.0;
  double lambda2 = 0.4;
};

std::string_view to_string(BuiltinKind kind);
// Throws ConfigError for unknown names.
BuiltinKind parse_builtin(std::string_view name);

/// paper_quadratic: w1^2 + 0.2 w2^2. quadratic: (l1 w1^2 + l2 w2^2) / 2.
/// quartic_well: w^4 / 4. saddle: w1^2 - w2^2. type1_curve: w^4 / (1 + w^2),
/// flatter than a parabola near 0 and steepening away from it.
Problem builtin_problem(BuiltinKind kind, const BuiltinParams& params = {});
Problem builtin_problem(std::string_view name, const BuiltinParams& params = {});

// ---------------------------------------------------------------------------
// Deep scalar chains for vanishing / exploding gradients.

enum class ChainActivation { sigmoid, identity };

std::string_view to_string(ChainActivation a);
ChainActivation parse_chain_activation(std::string_view name);

/// y = act(w_D * act(... act(w_1 * input))), loss 0.5 * (y - target)^2.
struct DeepChainNet {
  std::size_t depth = 1;
  ChainActivation activation = ChainActivation::sigmoid;
  std::vector<double> weights;  // one per layer, weights[0] is the first layer
  double input = 1.0;
  double target = 0.0;

  static DeepChainNet uniform(std::size_t depth, ChainActivation act, double weight,
                              double input, double target);
};

struct ChainGradient {
  double loss;
  double first_weight_grad;
};

ChainGradient deep_chain_grad(const DeepChainNet& net);
// Gradient with respect to every layer weight.
Vector deep_chain_full_grad(const DeepChainNet& net);
// Problem over the weight vector, with input and target held fixed.
Problem deep_chain_problem(const DeepChainNet& net);

// ---------------------------------------------------------------------------
// Two-blob classification data and a one-hidden-layer sigmoid MLP.

struct SyntheticDataset {
  std::vector<std::array<double, 2>> inputs;
  std::vector<int> labels;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

/// n/2 points around (-1, -1) labelled 0 and n/2 around (1, 1) labelled 1,
/// isotropic standard deviation 0.5. n must be even and >= 8.
SyntheticDataset make_dataset(std::uint64_t seed, std::size_t n);
std::string dataset_csv(const SyntheticDataset& data);

inline constexpr std::size_t kMaxHiddenWidth = 16;

/// Parameter count of the 2 -> width -> 1 network.
std::size_t mlp_param_count(std::size_t hidden_width);

/// Mean binary cross-entropy over the dataset, exact backprop gradients.
/// Layout: W1 (width x 2, row-major), b1 (width), W2 (width), b2.
Problem mlp_problem(const SyntheticDataset& data, std::size_t hidden_width);
Vector mlp_initial_weights(std::size_t hidden_width, std::uint64_t seed);
double mlp_accuracy(const SyntheticDataset& data, std::size_t hidden_width,
                    std::span<const double> w);

}  // namespace gaflab
