#include "gaflab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/rng.hpp"

namespace gaflab {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::gd: return "gd";
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::sgdm: return "sgdm";
    case OptimizerKind::adam: return "adam";
  }
  return "?";
}

std::string_view to_string(Placement placement) {
  return placement == Placement::on_velocity ? "on_velocity" : "on_raw_gradient";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::stop_loss: return "stop_loss";
    case StopReason::diverged: return "diverged";
  }
  return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (auto k : {OptimizerKind::gd, OptimizerKind::sgd, OptimizerKind::sgdm, OptimizerKind::adam}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("optimizer.kind: unknown optimizer \"" + std::string(name) +
                    "\" (expected gd, sgd, sgdm or adam)");
}

Placement parse_placement(std::string_view name) {
  if (name == "on_raw_gradient") return Placement::on_raw_gradient;
  if (name == "on_velocity") return Placement::on_velocity;
  throw ConfigError("optimizer.placement: unknown placement \"" + std::string(name) +
                    "\" (expected on_raw_gradient or on_velocity)");
}

void OptimizerSpec::validate() const {
  std::vector<std::string> issues;
  auto bad = [&](const std::string& field, const std::string& rule, double v) {
    issues.push_back("optimizer." + field + ": " + rule + " (got " + format_double(v) + ")");
  };
  if (!(std::isfinite(eta) && eta > 0.0)) bad("eta", "must be positive and finite", eta);
  if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum", "must lie in [0, 1)", momentum);
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) bad("adam_beta1", "must lie in (0, 1)", adam_beta1);
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) bad("adam_beta2", "must lie in (0, 1)", adam_beta2);
  if (!(std::isfinite(adam_eps) && adam_eps > 0.0)) bad("adam_eps", "must be positive", adam_eps);
  if (batch_size == 0) issues.push_back("optimizer.batch_size: must be >= 1");
  if (placement == Placement::on_velocity && kind != OptimizerKind::sgdm) {
    issues.push_back("optimizer.placement: on_velocity requires kind = sgdm (got " +
                     std::string(to_string(kind)) + ")");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string OptimizerSpec::label() const {
  std::string s(to_string(kind));
  s += "(eta=" + format_double(eta);
  if (kind == OptimizerKind::sgdm) s += ",momentum=" + format_double(momentum);
  s += "," + transform.label() + "," + std::string(to_string(placement)) + ")";
  return s;
}

OptimizerState OptimizerState::zeros(std::size_t dim) {
  return {Vector(dim, 0.0), Vector(dim, 0.0), Vector(dim, 0.0), 0};
}

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_shapes(const OptimizerState& state, std::size_t n, std::size_t grad_n) {
  if (grad_n != n || state.velocity.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw InputError("step: parameter, gradient and state shapes differ");
  }
}

}  // namespace

bool step_inplace(const OptimizerSpec& spec, OptimizerState& state, std::span<double> w,
                  std::span<const double> grad) {
  const std::size_t n = w.size();
  check_shapes(state, n, grad.size());
  if (spec.placement == Placement::on_velocity && spec.kind != OptimizerKind::sgdm) {
    throw ConfigError("optimizer.placement: on_velocity requires kind = sgdm");
  }
  // A non-finite gradient is divergence, not bad input.
  if (!finite(grad)) {
    ++state.step_count;
    return false;
  }
  const double eta = spec.eta;

  switch (spec.kind) {
    case OptimizerKind::gd:
    case OptimizerKind::sgd: {
      const Vector t = apply_transform(spec.transform, grad);
      for (std::size_t i = 0; i < n; ++i) w[i] -= eta * t[i];
      break;
    }
    case OptimizerKind::sgdm: {
      const double mu = spec.momentum;
      if (spec.placement == Placement::on_velocity) {
        for (std::size_t i = 0; i < n; ++i) state.velocity[i] = mu * state.velocity[i] - eta * grad[i];
        if (!finite(state.velocity)) {
          ++state.step_count;
          return false;
        }
        const Vector t = apply_transform(spec.transform, state.velocity);
        for (std::size_t i = 0; i < n; ++i) w[i] += t[i];
      } else {
        const Vector t = apply_transform(spec.transform, grad);
        for (std::size_t i = 0; i < n; ++i) state.velocity[i] = mu * state.velocity[i] - eta * t[i];
        for (std::size_t i = 0; i < n; ++i) w[i] += state.velocity[i];
      }
      break;
    }
    case OptimizerKind::adam: {
      const Vector t = apply_transform(spec.transform, grad);
      const double b1 = spec.adam_beta1;
      const double b2 = spec.adam_beta2;
      const double k = static_cast<double>(state.step_count + 1);
      const double c1 = 1.0 - std::pow(b1, k);
      const double c2 = 1.0 - std::pow(b2, k);
      for (std::size_t i = 0; i < n; ++i) {
        state.first_moment[i] = b1 * state.first_moment[i] + (1.0 - b1) * t[i];
        state.second_moment[i] = b2 * state.second_moment[i] + (1.0 - b2) * t[i] * t[i];
        const double m_hat = state.first_moment[i] / c1;
        const double v_hat = state.second_moment[i] / c2;
        w[i] -= eta * m_hat / (std::sqrt(v_hat) + spec.adam_eps);
      }
      break;
    }
  }
  ++state.step_count;
  return finite(w);
}

StepResult step(const OptimizerSpec& spec, const OptimizerState& state,
                std::span<const double> w, std::span<const double> grad) {
  StepResult out{Vector(w.begin(), w.end()), state};
  step_inplace(spec, out.state, out.w, grad);
  return out;
}

namespace {

// Walks shuffled epochs of sample indices.
class BatchSampler {
 public:
  BatchSampler(std::size_t samples, std::size_t batch, std::uint64_t seed)
      : order_(samples), batch_(std::min(batch, samples)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    shuffle();
  }

  std::span<const std::size_t> next() {
    if (pos_ + batch_ > order_.size()) {
      shuffle();
      pos_ = 0;
    }
    std::span<const std::size_t> out(order_.data() + pos_, batch_);
    pos_ += batch_;
    return out;
  }

 private:
  void shuffle() {
    for (std::size_t i = order_.size(); i > 1; --i) {
      std::swap(order_[i - 1], order_[bounded(rng_, i)]);
    }
  }

  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t pos_ = 0;
  Rng rng_;
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Trajectory run(const Problem& problem, const OptimizerSpec& spec, std::span<const double> w0,
               std::size_t max_iters, std::optional<double> stop_loss, std::uint64_t seed) {
  spec.validate();
  if (w0.size() != problem.dim) {
    throw InputError("run: w0 has " + std::to_string(w0.size()) + " components, problem " +
                     problem.name + " has dimension " + std::to_string(problem.dim));
  }
  if (max_iters == 0) throw InputError("run: max_iters must be >= 1");

  Trajectory traj;
  traj.seed = seed;
  traj.spec_snapshot = spec;
  Vector w(w0.begin(), w0.end());
  OptimizerState state = OptimizerState::zeros(problem.dim);
  std::optional<BatchSampler> sampler;
  if (spec.stochastic() && problem.stochastic()) {
    sampler.emplace(problem.samples, spec.batch_size, seed);
  }

  double loss = problem.loss(w);
  traj.iterates.push_back(w);
  traj.losses.push_back(loss);
  if (!std::isfinite(loss)) {
    traj.stop = StopReason::diverged;
    return traj;
  }

  for (std::size_t k = 0; k < max_iters; ++k) {
    if (stop_loss && loss <= *stop_loss) {
      traj.stop = StopReason::stop_loss;
      return traj;
    }
    const Vector g = sampler ? problem.batch_grad(w, sampler->next()) : problem.grad(w);
    traj.grad_max_abs.push_back(max_abs(g));
    const bool ok = step_inplace(spec, state, w, g);
    loss = ok ? problem.loss(w) : std::numeric_limits<double>::quiet_NaN();
    traj.iterates.push_back(w);
    traj.losses.push_back(loss);
    if (!ok || !std::isfinite(loss)) {
      traj.stop = StopReason::diverged;
      return traj;
    }
  }
  traj.stop = (stop_loss && loss <= *stop_loss) ? StopReason::stop_loss : StopReason::max_iters;
  return traj;
}

std::string trajectory_csv(const Trajectory& t) {
  const std::size_t dim = t.iterates.empty() ? 0 : t.iterates.front().size();
  const bool with_params = dim <= kCsvMaxParams;
  std::vector<std::string> header{"k", "loss", "max_abs_grad"};
  if (with_params) {
    for (std::size_t i = 0; i < dim; ++i) header.push_back("w" + std::to_string(i + 1));
  }
  CsvTable table(header);
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), csv_field(t.losses[k]),
                                 k < t.grad_max_abs.size() ? csv_field(t.grad_max_abs[k]) : ""};
    if (with_params) {
      for (double v : t.iterates[k]) row.push_back(csv_field(v));
    }
    table.row(std::move(row));
  }
  return table.text();
}

std::string run_record(const Trajectory& t) {
  const OptimizerSpec& s = t.spec_snapshot;
  CsvTable table({"key", "value"});
  table.row({"kind", std::string(to_string(s.kind))})
      .row({"eta", csv_field(s.eta)})
      .row({"momentum", csv_field(s.momentum)})
      .row({"adam_beta1", csv_field(s.adam_beta1)})
      .row({"adam_beta2", csv_field(s.adam_beta2)})
      .row({"adam_eps", csv_field(s.adam_eps)})
      .row({"batch_size", csv_field(s.batch_size)})
      .row({"transform", s.transform.label()})
      .row({"placement", std::string(to_string(s.placement))})
      .row({"seed", std::to_string(t.seed)})
      .row({"steps", csv_field(t.steps())})
      .row({"stop", std::string(to_string(t.stop))})
      .row({"final_loss", csv_field(t.losses.empty() ? 0.0 : t.losses.back())});
  return table.text();
}

}  // namespace gaflab
