#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "gaflab/optim.hpp"
#include "gaflab/problems.hpp"

namespace gaflab {

/// Noise constants of the SGD gap bound. m_g = m_v + mu_g^2 is derived, never
/// set directly.
class SgdNoiseModel {
 public:
  // Throws DomainError unless mu_g >= mu > 0, m >= 0 and m_v >= 0.
  SgdNoiseModel(double mu, double mu_g, double m, double m_v);

  // Exact full-batch gradient descent: mu = mu_g = 1, m = m_v = 0.
  static SgdNoiseModel deterministic() { return SgdNoiseModel(1.0, 1.0, 0.0, 0.0); }

  double mu() const noexcept { return mu_; }
  double mu_g() const noexcept { return mu_g_; }
  double m() const noexcept { return m_; }
  double m_v() const noexcept { return m_v_; }
  double m_g() const noexcept { return m_g_; }

  /// Step size the bound assumes: mu / (ell * m_g).
  double learning_rate(double ell) const noexcept { return mu_ / (ell * m_g_); }

 private:
  double mu_, mu_g_, m_, m_v_, m_g_;
};

/// Per-step contraction factor 1 - c mu^2 / (ell m_g).
double gap_contraction(double ell, double c, const SgdNoiseModel& noise);

/// Expected optimality-gap bound after k iterates (k = 1 is the start):
///   (1 - c mu^2/(ell m_g))^(k-1) (gap_1 - m/(2 c m_g)) + m/(2 c m_g).
/// Throws DomainError naming the violated inequality when 0 < c <= ell,
/// mu^2 <= m_g or c mu^2/(ell m_g) in (0, 1] fails.
double sgd_gap_bound(std::size_t k, double ell, double c, const SgdNoiseModel& noise,
                     double initial_gap);

enum class ArmStatus { converged, diverged, exhausted };

std::string_view to_string(ArmStatus s);

struct ArmOutcome {
  ArmStatus status = ArmStatus::exhausted;
  std::size_t iterations = 0;  // steps to reach the target when converged
  double final_loss = 0.0;
};

struct RaceResult {
  ArmOutcome baseline;
  ArmOutcome treatment;
  double target_loss = 0.0;
  OptimizerSpec baseline_spec;
  OptimizerSpec treatment_spec;

  bool treatment_faster() const noexcept;
  bool tie() const noexcept;
};

/// Runs both arms from w0 and reports steps until loss <= target_loss. The
/// specs must agree in kind and eta. Throws InputError if w0 already meets the
/// target.
RaceResult race(const Problem& problem, const OptimizerSpec& baseline,
                const OptimizerSpec& treatment, std::span<const double> w0, double target_loss,
                std::size_t max_iters, std::uint64_t seed);

struct EscapeResult {
  double displacement = 0.0;  // |w_delta - w_0|_2
  std::size_t steps = 0;
  bool diverged = false;
};

EscapeResult saddle_escape(const Problem& problem, const OptimizerSpec& spec,
                           std::span<const double> w_start, std::size_t delta,
                           std::uint64_t seed = 0);

}  // namespace gaflab
