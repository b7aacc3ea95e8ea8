#include "gaflab/problems.hpp"

#include <cmath>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/rng.hpp"

namespace gaflab {

namespace {

void check_dim(std::span<const double> w, std::size_t dim, const std::string& name) {
  if (w.size() != dim) {
    throw InputError(name + ": expected " + std::to_string(dim) +
                     " parameters, got " + std::to_string(w.size()));
  }
}

// Assembles a separable Problem from per-coordinate loss, gradient and
// curvature terms.
Problem separable(std::string name, std::size_t dim,
                  std::function<double(std::size_t, double)> term,
                  std::function<double(std::size_t, double)> slope,
                  std::function<double(std::size_t, double)> curvature) {
  Problem p;
  p.name = name;
  p.dim = dim;
  p.loss = [=](std::span<const double> w) {
    check_dim(w, dim, name);
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += term(i, w[i]);
    return s;
  };
  p.grad = [=](std::span<const double> w) {
    check_dim(w, dim, name);
    Vector g(dim);
    for (std::size_t i = 0; i < dim; ++i) g[i] = slope(i, w[i]);
    return g;
  };
  p.hessian = [=](std::span<const double> w) {
    check_dim(w, dim, name);
    Matrix h = Matrix::zeros(dim);
    for (std::size_t i = 0; i < dim; ++i) h(i, i) = curvature(i, w[i]);
    return h;
  };
  p.coordinate_gradient = slope;
  return p;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

std::string_view to_string(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::paper_quadratic: return "paper_quadratic";
    case BuiltinKind::quadratic: return "quadratic";
    case BuiltinKind::quartic_well: return "quartic_well";
    case BuiltinKind::saddle: return "saddle";
    case BuiltinKind::type1_curve: return "type1_curve";
  }
  return "?";
}

BuiltinKind parse_builtin(std::string_view name) {
  for (auto k : {BuiltinKind::paper_quadratic, BuiltinKind::quadratic,
                 BuiltinKind::quartic_well, BuiltinKind::saddle, BuiltinKind::type1_curve}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("problem.name: unknown problem \"" + std::string(name) + "\"");
}

Problem builtin_problem(std::string_view name, const BuiltinParams& params) {
  return builtin_problem(parse_builtin(name), params);
}

Problem builtin_problem(BuiltinKind kind, const BuiltinParams& params) {
  switch (kind) {
    case BuiltinKind::paper_quadratic: {
      static constexpr double lam[2] = {2.0, 0.4};
      return separable(
          "paper_quadratic", 2,
          [](std::size_t i, double u) { return 0.5 * lam[i] * u * u; },
          [](std::size_t i, double u) { return lam[i] * u; },
          [](std::size_t i, double) { return lam[i]; });
    }
    case BuiltinKind::quadratic: {
      const double l1 = params.lambda1;
      const double l2 = params.lambda2;
      if (!std::isfinite(l1) || !std::isfinite(l2)) {
        throw ConfigError("problem.lambda1/lambda2: must be finite");
      }
      const std::array<double, 2> lam{l1, l2};
      return separable(
          "quadratic", 2,
          [lam](std::size_t i, double u) { return 0.5 * lam[i] * u * u; },
          [lam](std::size_t i, double u) { return lam[i] * u; },
          [lam](std::size_t i, double) { return lam[i]; });
    }
    case BuiltinKind::quartic_well:
      return separable(
          "quartic_well", 1,
          [](std::size_t, double u) { return 0.25 * u * u * u * u; },
          [](std::size_t, double u) { return u * u * u; },
          [](std::size_t, double u) { return 3.0 * u * u; });
    case BuiltinKind::saddle: {
      static constexpr double sign[2] = {1.0, -1.0};
      return separable(
          "saddle", 2,
          [](std::size_t i, double u) { return sign[i] * u * u; },
          [](std::size_t i, double u) { return 2.0 * sign[i] * u; },
          [](std::size_t i, double) { return 2.0 * sign[i]; });
    }
    case BuiltinKind::type1_curve:
      return separable(
          "type1_curve", 1,
          [](std::size_t, double u) {
            const double u2 = u * u;
            return u2 * u2 / (1.0 + u2);
          },
          [](std::size_t, double u) {
            const double u2 = u * u;
            const double q = 1.0 + u2;
            return 2.0 * u * u2 * (u2 + 2.0) / (q * q);
          },
          [](std::size_t, double u) {
            const double u2 = u * u;
            const double q = 1.0 + u2;
            return 2.0 * u2 * (u2 * u2 + 3.0 * u2 + 6.0) / (q * q * q);
          });
  }
  throw ConfigError("problem.name: unknown builtin");
}

// ---------------------------------------------------------------------------

std::string_view to_string(ChainActivation a) {
  return a == ChainActivation::sigmoid ? "sigmoid" : "identity";
}

ChainActivation parse_chain_activation(std::string_view name) {
  if (name == "sigmoid") return ChainActivation::sigmoid;
  if (name == "identity") return ChainActivation::identity;
  throw ConfigError("problem.activation: unknown activation \"" + std::string(name) + "\"");
}

DeepChainNet DeepChainNet::uniform(std::size_t depth, ChainActivation act, double weight,
                                   double input, double target) {
  return DeepChainNet{depth, act, std::vector<double>(depth, weight), input, target};
}

namespace {

struct ChainPass {
  double loss;
  Vector grads;
};

ChainPass chain_pass(const DeepChainNet& net, std::span<const double> weights) {
  if (net.depth == 0 || weights.size() != net.depth) {
    throw InputError("DeepChainNet: need depth >= 1 and one weight per layer");
  }
  const bool sig = net.activation == ChainActivation::sigmoid;
  std::vector<double> h(net.depth + 1), slope(net.depth);
  h[0] = net.input;
  for (std::size_t i = 0; i < net.depth; ++i) {
    const double z = weights[i] * h[i];
    if (sig) {
      h[i + 1] = sigmoid(z);
      slope[i] = h[i + 1] * (1.0 - h[i + 1]);
    } else {
      h[i + 1] = z;
      slope[i] = 1.0;
    }
  }
  const double err = h[net.depth] - net.target;
  ChainPass out{0.5 * err * err, Vector(net.depth)};
  double delta = err;
  for (std::size_t i = net.depth; i-- > 0;) {
    const double dz = delta * slope[i];
    out.grads[i] = dz * h[i];
    delta = dz * weights[i];
  }
  return out;
}

}  // namespace

ChainGradient deep_chain_grad(const DeepChainNet& net) {
  const ChainPass p = chain_pass(net, net.weights);
  return {p.loss, p.grads[0]};
}

Vector deep_chain_full_grad(const DeepChainNet& net) {
  return chain_pass(net, net.weights).grads;
}

Problem deep_chain_problem(const DeepChainNet& net) {
  chain_pass(net, net.weights);
  Problem p;
  p.name = "deep_chain";
  p.dim = net.depth;
  p.loss = [net](std::span<const double> w) { return chain_pass(net, w).loss; };
  p.grad = [net](std::span<const double> w) { return chain_pass(net, w).grads; };
  return p;
}

// ---------------------------------------------------------------------------

SyntheticDataset make_dataset(std::uint64_t seed, std::size_t n) {
  if (n < 8 || n % 2 != 0) {
    throw InputError("make_dataset: n must be even and >= 8 (got " + std::to_string(n) + ")");
  }
  SyntheticDataset data;
  data.seed = seed;
  data.inputs.reserve(n);
  data.labels.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double centre = label == 0 ? -1.0 : 1.0;
    const double x1 = centre + 0.5 * standard_normal(rng);
    const double x2 = centre + 0.5 * standard_normal(rng);
    data.inputs.push_back({x1, x2});
    data.labels.push_back(label);
  }
  return data;
}

std::string dataset_csv(const SyntheticDataset& data) {
  CsvTable t({"x1", "x2", "label"});
  for (std::size_t i = 0; i < data.size(); ++i) {
    t.row({csv_field(data.inputs[i][0]), csv_field(data.inputs[i][1]),
           std::to_string(data.labels[i])});
  }
  return t.text();
}

std::size_t mlp_param_count(std::size_t hidden_width) { return 4 * hidden_width + 1; }

namespace {

void check_width(std::size_t width) {
  if (width == 0 || width > kMaxHiddenWidth) {
    throw ConfigError("problem.hidden_width: must be in [1, " +
                      std::to_string(kMaxHiddenWidth) + "] (got " + std::to_string(width) + ")");
  }
}

// Output logit for one sample; fills hidden activations when h is non-empty.
double mlp_logit(std::span<const double> w, std::size_t width,
                 const std::array<double, 2>& x, std::span<double> h) {
  const double* w1 = w.data();
  const double* b1 = w1 + 2 * width;
  const double* w2 = b1 + width;
  const double b2 = w2[width];
  double z = b2;
  for (std::size_t j = 0; j < width; ++j) {
    const double a = sigmoid(w1[2 * j] * x[0] + w1[2 * j + 1] * x[1] + b1[j]);
    if (!h.empty()) h[j] = a;
    z += w2[j] * a;
  }
  return z;
}

struct MlpEval {
  double loss;
  Vector grad;
};

template <class IndexRange>
MlpEval mlp_eval(const SyntheticDataset& data, std::size_t width, std::span<const double> w,
                 const IndexRange& indices, std::size_t count, bool want_grad) {
  if (w.size() != mlp_param_count(width)) {
    throw InputError("mlp: expected " + std::to_string(mlp_param_count(width)) +
                     " parameters, got " + std::to_string(w.size()));
  }
  MlpEval out{0.0, want_grad ? Vector(w.size(), 0.0) : Vector{}};
  std::array<double, kMaxHiddenWidth> hbuf{};
  std::span<double> h(hbuf.data(), width);
  const double* w2 = w.data() + 3 * width;
  for (std::size_t idx : indices) {
    const auto& x = data.inputs[idx];
    const double y = data.labels[idx];
    const double z = mlp_logit(w, width, x, h);
    out.loss += softplus(z) - y * z;
    if (!want_grad) continue;
    const double dz = sigmoid(z) - y;
    double* g = out.grad.data();
    double* gb1 = g + 2 * width;
    double* gw2 = gb1 + width;
    for (std::size_t j = 0; j < width; ++j) {
      gw2[j] += dz * h[j];
      const double da = dz * w2[j] * h[j] * (1.0 - h[j]);
      g[2 * j] += da * x[0];
      g[2 * j + 1] += da * x[1];
      gb1[j] += da;
    }
    gw2[width] += dz;
  }
  const double inv = 1.0 / static_cast<double>(count);
  out.loss *= inv;
  for (double& v : out.grad) v *= inv;
  return out;
}

struct IotaRange {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() {
      ++i;
      return *this;
    }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

}  // namespace

Problem mlp_problem(const SyntheticDataset& data, std::size_t hidden_width) {
  check_width(hidden_width);
  if (data.size() == 0) throw InputError("mlp_problem: empty dataset");
  Problem p;
  p.name = "mlp";
  p.dim = mlp_param_count(hidden_width);
  p.samples = data.size();
  const std::size_t width = hidden_width;
  p.loss = [data, width](std::span<const double> w) {
    return mlp_eval(data, width, w, IotaRange{data.size()}, data.size(), false).loss;
  };
  p.grad = [data, width](std::span<const double> w) {
    return mlp_eval(data, width, w, IotaRange{data.size()}, data.size(), true).grad;
  };
  p.batch_grad = [data, width](std::span<const double> w, std::span<const std::size_t> idx) {
    if (idx.empty()) throw InputError("mlp: empty mini-batch");
    for (std::size_t i : idx) {
      if (i >= data.size()) throw InputError("mlp: sample index out of range");
    }
    return mlp_eval(data, width, w, idx, idx.size(), true).grad;
  };
  return p;
}

Vector mlp_initial_weights(std::size_t hidden_width, std::uint64_t seed) {
  check_width(hidden_width);
  Rng rng(seed);
  Vector w(mlp_param_count(hidden_width));
  for (double& v : w) v = uniform(rng, -0.5, 0.5);
  return w;
}

double mlp_accuracy(const SyntheticDataset& data, std::size_t hidden_width,
                    std::span<const double> w) {
  check_width(hidden_width);
  if (w.size() != mlp_param_count(hidden_width)) {
    throw InputError("mlp_accuracy: parameter count mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double z = mlp_logit(w, hidden_width, data.inputs[i], {});
    const int pred = z > 0.0 ? 1 : 0;
    if (pred == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace gaflab
