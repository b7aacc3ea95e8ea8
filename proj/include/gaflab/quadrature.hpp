#pragma once

#include <cstddef>
#include <functional>

namespace gaflab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // summed |K15 - G7| over accepted intervals
  std::size_t intervals = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod 7/15 on [a, b] (either orientation) with an absolute
/// tolerance on the whole integral. Each subinterval must meet its share of
/// the tolerance in proportion to its length, so kinks in the integrand only
/// refine locally.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::size_t max_intervals = 20000);

}  // namespace gaflab
