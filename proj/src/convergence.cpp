#include "gaflab/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"

namespace gaflab {

SgdNoiseModel::SgdNoiseModel(double mu, double mu_g, double m, double m_v)
    : mu_(mu), mu_g_(mu_g), m_(m), m_v_(m_v), m_g_(m_v + mu_g * mu_g) {
  if (!(mu > 0.0 && std::isfinite(mu))) throw DomainError("noise model: mu must be > 0");
  if (!(mu_g >= mu && std::isfinite(mu_g))) throw DomainError("noise model: mu_g >= mu violated");
  if (!(m >= 0.0 && std::isfinite(m))) throw DomainError("noise model: M >= 0 violated");
  if (!(m_v >= 0.0 && std::isfinite(m_v))) throw DomainError("noise model: M_V >= 0 violated");
}

double gap_contraction(double ell, double c, const SgdNoiseModel& noise) {
  if (!(c > 0.0 && c <= ell && std::isfinite(ell))) {
    throw DomainError("gap bound: 0 < c <= ell violated (ell=" + format_double(ell) +
                      ", c=" + format_double(c) + ")");
  }
  if (!(noise.mu() * noise.mu() <= noise.m_g())) {
    throw DomainError("gap bound: mu^2 <= M_G violated");
  }
  const double rate = c * noise.mu() * noise.mu() / (ell * noise.m_g());
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw DomainError("gap bound: c*mu^2/(ell*M_G) in (0, 1] violated (got " +
                      format_double(rate) + ")");
  }
  return 1.0 - rate;
}

double sgd_gap_bound(std::size_t k, double ell, double c, const SgdNoiseModel& noise,
                     double initial_gap) {
  if (k == 0) throw DomainError("gap bound: k >= 1 violated");
  const double rho = gap_contraction(ell, c, noise);
  const double floor = noise.m() / (2.0 * c * noise.m_g());
  if (k == 1) return initial_gap;
  return std::pow(rho, static_cast<double>(k - 1)) * (initial_gap - floor) + floor;
}

std::string_view to_string(ArmStatus s) {
  switch (s) {
    case ArmStatus::converged: return "converged";
    case ArmStatus::diverged: return "diverged";
    case ArmStatus::exhausted: return "exhausted";
  }
  return "?";
}

bool RaceResult::treatment_faster() const noexcept {
  if (treatment.status != ArmStatus::converged) return false;
  if (baseline.status != ArmStatus::converged) return true;
  return treatment.iterations < baseline.iterations;
}

bool RaceResult::tie() const noexcept {
  return baseline.status == treatment.status && baseline.iterations == treatment.iterations;
}

namespace {

ArmOutcome race_arm(const Problem& problem, const OptimizerSpec& spec, std::span<const double> w0,
                    double target, std::size_t max_iters, std::uint64_t seed) {
  const Trajectory t = run(problem, spec, w0, max_iters, target, seed);
  ArmOutcome out;
  out.final_loss = t.final_loss();
  if (t.stop == StopReason::stop_loss) {
    out.status = ArmStatus::converged;
    out.iterations = t.steps();
  } else if (t.diverged()) {
    out.status = ArmStatus::diverged;
    out.iterations = t.steps();
  } else {
    out.iterations = t.steps();
  }
  return out;
}

}  // namespace

RaceResult race(const Problem& problem, const OptimizerSpec& baseline,
                const OptimizerSpec& treatment, std::span<const double> w0, double target_loss,
                std::size_t max_iters, std::uint64_t seed) {
  if (baseline.kind != treatment.kind || baseline.eta != treatment.eta) {
    throw ConfigError("race: baseline and treatment must share optimizer kind and eta");
  }
  if (problem.loss(w0) <= target_loss) {
    throw InputError("race: starting point already meets the target loss");
  }
  RaceResult r;
  r.target_loss = target_loss;
  r.baseline_spec = baseline;
  r.treatment_spec = treatment;
  r.baseline = race_arm(problem, baseline, w0, target_loss, max_iters, seed);
  r.treatment = race_arm(problem, treatment, w0, target_loss, max_iters, seed);
  return r;
}

EscapeResult saddle_escape(const Problem& problem, const OptimizerSpec& spec,
                           std::span<const double> w_start, std::size_t delta,
                           std::uint64_t seed) {
  if (w_start.size() != problem.dim) throw InputError("saddle_escape: start dimension mismatch");
  EscapeResult out;
  if (delta == 0) return out;
  const Trajectory t = run(problem, spec, w_start, delta, std::nullopt, seed);
  // On divergence the last iterate may be non-finite; measure up to the last
  // finite one.
  std::size_t last = t.iterates.size() - 1;
  if (t.diverged()) {
    while (last > 0 && !std::all_of(t.iterates[last].begin(), t.iterates[last].end(),
                                    [](double x) { return std::isfinite(x); })) {
      --last;
    }
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < problem.dim; ++i) {
    const double d = t.iterates[last][i] - w_start[i];
    sq += d * d;
  }
  out.displacement = std::sqrt(sq);
  out.steps = last;
  out.diverged = t.diverged();
  return out;
}

}  // namespace gaflab
