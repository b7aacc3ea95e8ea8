#pragma once

// Reference computations written independently of the library code.

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-12);
  return std::abs(got - want) / scale;
}

// Mixed relative/absolute error for gradients with tiny components.
inline double grad_err(double got, double want, double floor) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> w, double h = 1e-6) {
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w[i];
    w[i] = x + h;
    const double up = f(w);
    w[i] = x - h;
    const double down = f(w);
    w[i] = x;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Root of f on [lo, hi] by TOMS 748, to full double precision.
inline double root(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// Plain bisection, keeping the half where f changes sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// int_0^x alpha * atan(a u) du.
inline double arctan_integral(double alpha, double a, double x) {
  return alpha * (x * std::atan(a * x) - std::log1p(a * a * x * x) / (2.0 * a));
}

struct AdamState {
  std::vector<double> m, v;
  int t = 0;
};

// One textbook Adam step on w with gradient g.
inline std::vector<double> adam_step(AdamState& s, std::vector<double> w, const std::vector<double>& g,
                                     double eta, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8) {
  if (s.m.empty()) {
    s.m.assign(w.size(), 0.0);
    s.v.assign(w.size(), 0.0);
  }
  ++s.t;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.m[i] = b1 * s.m[i] + (1 - b1) * g[i];
    s.v[i] = b2 * s.v[i] + (1 - b2) * g[i] * g[i];
    const double mh = s.m[i] / (1 - std::pow(b1, s.t));
    const double vh = s.v[i] / (1 - std::pow(b2, s.t));
    w[i] -= eta * mh / (std::sqrt(vh) + eps);
  }
  return w;
}

// Exhaustive secant extremes, no segmentation, no parallelism.
inline std::pair<double, double> secant_extremes(const std::vector<std::vector<double>>& pts,
                                                 const std::vector<std::vector<double>>& vals) {
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double dw = 0, dg = 0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        dw += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
        dg += (vals[i][k] - vals[j][k]) * (vals[i][k] - vals[j][k]);
      }
      if (std::sqrt(dw) <= 1e-12) continue;
      const double r = std::sqrt(dg) / std::sqrt(dw);
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
  }
  return {hi, lo};
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle
