#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "vsafe/driver/profile.hpp"

namespace vsafe::analysis {

struct GammaFit {
  double shape = 0.0;
  double scale = 0.0;  ///< seconds
  std::size_t n = 0;
  int iterations = 0;
  bool capped = false;  ///< shape hit shape_max (near-degenerate sample)
  std::string diagnostic;

  double mode() const { return shape >= 1.0 ? (shape - 1.0) * scale : 0.0; }
  double mean() const { return shape * scale; }
};

struct GammaFitOptions {
  std::size_t min_samples = 30;
  double shape_max = 1e4;
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Maximum-likelihood gamma fit. The shape solves log(a) - digamma(a) = s
/// with s = log(mean) - mean(log x); Newton steps that leave the current
/// bracket fall back to bisection.
inline GammaFit fit_gamma(const std::vector<double>& xs, const GammaFitOptions& opt = {}) {
  if (xs.size() < opt.min_samples)
    throw std::invalid_argument("fit_gamma: need at least " + std::to_string(opt.min_samples) +
                                " samples, got " + std::to_string(xs.size()));
  double sum = 0.0, sum_log = 0.0;
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("fit_gamma: samples must be positive and finite");
    sum += x;
    sum_log += std::log(x);
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double s = std::log(mean) - sum_log / n;

  GammaFit fit;
  fit.n = xs.size();
  auto capped = [&] {
    fit.shape = opt.shape_max;
    fit.scale = mean / fit.shape;
    fit.capped = true;
    fit.diagnostic = "sample spread too small: shape capped at " + std::to_string(opt.shape_max);
    return fit;
  };
  if (!(s > 0.0)) return capped();

  auto f = [s](double a) { return std::log(a) - boost::math::digamma(a) - s; };
  // f is strictly decreasing from +inf to 0; f(shape_max) > 0 means the
  // root lies beyond the cap.
  if (f(opt.shape_max) > 0.0) return capped();

  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n;
  double lo = 1e-8, hi = opt.shape_max;
  double a = var > 0.0 ? std::clamp(mean * mean / var, lo * 10.0, hi) : 1.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    fit.iterations = it;
    const double fa = f(a);
    if (fa > 0.0) lo = a;
    else hi = a;
    const double df = 1.0 / a - boost::math::trigamma(a);
    double next = a - fa / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= opt.tolerance * a) {
      a = next;
      break;
    }
    a = next;
  }
  fit.shape = a;
  fit.scale = mean / a;
  return fit;
}

inline double gamma_cdf(double shape, double scale, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(shape, x / scale);
}

/// Fractions of a Gamma(shape, scale) population per behavior class:
/// P(tau < lo), P(lo <= tau <= hi), P(tau > hi).
inline std::array<double, 3> class_ratios(double shape, double scale,
                                          const driver::HeadwayThresholds& th) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("class_ratios: shape and scale must be positive");
  const double p_lo = gamma_cdf(shape, scale, th.aggressive_below);
  const double p_hi = gamma_cdf(shape, scale, th.conservative_above);
  return {p_lo, p_hi - p_lo, 1.0 - p_hi};
}

}  // namespace vsafe::analysis
