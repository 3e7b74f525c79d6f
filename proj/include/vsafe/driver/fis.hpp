#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vsafe/common.hpp"

namespace vsafe::driver {

inline constexpr std::array<const char*, 7> kTermLabels = {"NB", "NM", "NS", "ZE",
                                                           "PS", "PM", "PB"};

/// Triangle with apex at `center`, support [center - left, center + right].
struct TriangularMf {
  std::string label;
  double center = 0.0;
  double left = 0.3;
  double right = 0.3;

  double lo() const { return center - left; }
  double hi() const { return center + right; }

  double operator()(double x) const {
    if (x < center) {
      if (left <= 0.0 || x <= lo()) return 0.0;
      return (x - lo()) / left;
    }
    if (x > center) {
      if (right <= 0.0 || x >= hi()) return 0.0;
      return (hi() - x) / right;
    }
    return 1.0;
  }
};

/// Single-input single-output Mamdani system on normalized [-1, 1] domains.
struct FisConfig {
  std::array<TriangularMf, 7> input_mfs;
  std::array<TriangularMf, 7> output_mfs;
  /// rules[i] is the output term fired by input term i.
  std::array<int, 7> rules = {0, 1, 2, 3, 4, 5, 6};
  /// Acceleration normalization [m/s^2]; 0 means "derive from the profile".
  double norm_scale = 0.0;

  /// Seven symmetric triangles, identity rule table.
  static FisConfig defaults() {
    constexpr std::array<double, 7> centers = {-0.9, -0.55, -0.25, 0.0, 0.25, 0.55, 0.9};
    FisConfig cfg;
    for (std::size_t i = 0; i < 7; ++i) {
      cfg.input_mfs[i] = {kTermLabels[i], centers[i], 0.3, 0.3};
      cfg.output_mfs[i] = cfg.input_mfs[i];
    }
    return cfg;
  }

  /// Mirror-symmetric about zero; makes the inference map odd.
  bool symmetric(double tol = 1e-12) const {
    auto mirrored = [tol](const std::array<TriangularMf, 7>& m) {
      for (std::size_t i = 0; i < 7; ++i) {
        const auto& a = m[i];
        const auto& b = m[6 - i];
        if (std::abs(a.center + b.center) > tol || std::abs(a.left - b.right) > tol ||
            std::abs(a.right - b.left) > tol)
          return false;
      }
      return true;
    };
    if (!mirrored(input_mfs) || !mirrored(output_mfs)) return false;
    for (std::size_t i = 0; i < 7; ++i)
      if (rules[i] != 6 - rules[6 - i]) return false;
    return true;
  }

  void validate(const std::string& path = "/fis") const;
};

namespace detail {

struct Line {
  double slope;
  double intercept;
  double at(double x) const { return slope * x + intercept; }
};

// Exact centroid of max_k min(w_k, mf_k(y)). The aggregate is piecewise
// linear; every kink is a triangle vertex, a clipping point, or a crossing of
// two pieces, so integrating between consecutive candidates is exact.
inline bool centroid_of_clipped(const std::array<TriangularMf, 7>& mfs,
                                const std::array<double, 7>& weight, double& out) {
  std::vector<Line> lines;
  std::vector<double> xs;
  lines.reserve(21);
  xs.reserve(64);
  double lo = 1e300;
  double hi = -1e300;
  for (std::size_t k = 0; k < 7; ++k) {
    const double w = weight[k];
    if (w <= 0.0) continue;
    const auto& m = mfs[k];
    lo = std::min(lo, m.lo());
    hi = std::max(hi, m.hi());
    xs.insert(xs.end(), {m.lo(), m.center, m.hi()});
    lines.push_back({0.0, w});
    if (m.left > 0.0) {
      lines.push_back({1.0 / m.left, -m.lo() / m.left});
      xs.push_back(m.lo() + w * m.left);
    }
    if (m.right > 0.0) {
      lines.push_back({-1.0 / m.right, m.hi() / m.right});
      xs.push_back(m.hi() - w * m.right);
    }
  }
  if (lines.empty()) return false;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double ds = lines[i].slope - lines[j].slope;
      if (std::abs(ds) < 1e-15) continue;
      const double x = (lines[j].intercept - lines[i].intercept) / ds;
      if (x > lo && x < hi) xs.push_back(x);
    }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-14; }),
           xs.end());

  auto aggregate = [&](double y) {
    double mu = 0.0;
    for (std::size_t k = 0; k < 7; ++k)
      if (weight[k] > 0.0) mu = std::max(mu, std::min(weight[k], mfs[k](y)));
    return mu;
  };

  double area = 0.0;
  double moment = 0.0;
  double f0 = aggregate(xs.front());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x0 = xs[i - 1];
    const double x1 = xs[i];
    const double f1 = aggregate(x1);
    const double h = x1 - x0;
    area += 0.5 * h * (f0 + f1);
    moment += h / 6.0 * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1));
    f0 = f1;
  }
  if (!(area > 1e-15)) return false;
  out = moment / area;
  return true;
}

}  // namespace detail

/// Min-implication, max-aggregation, centroid defuzzification. The output
/// universe is the union of the output supports; the centroid is clamped to
/// [-1, 1]. Returns 0 when nothing fires (rejected by validate()).
inline double fis_evaluate(const FisConfig& cfg, double da_norm) {
  const double x = std::clamp(da_norm, -1.0, 1.0);
  std::array<double, 7> weight{};
  for (std::size_t i = 0; i < 7; ++i) {
    const double mu = cfg.input_mfs[i](x);
    auto& w = weight[static_cast<std::size_t>(cfg.rules[i])];
    w = std::max(w, mu);
  }
  double c = 0.0;
  if (!detail::centroid_of_clipped(cfg.output_mfs, weight, c)) return 0.0;
  return std::clamp(c, -1.0, 1.0);
}

inline void FisConfig::validate(const std::string& path) const {
  for (std::size_t i = 0; i < 7; ++i) {
    const auto idx = "/" + std::to_string(i);
    for (const auto* set : {&input_mfs, &output_mfs}) {
      const auto& m = (*set)[i];
      const std::string p = path + (set == &input_mfs ? "/input_mfs" : "/output_mfs") + idx;
      require(m.label == kTermLabels[i], p + "/label",
              std::string("expected ") + kTermLabels[i]);
      require(m.left >= 0.0 && m.right >= 0.0, p, "widths must be >= 0");
      require(m.left + m.right > 0.0, p, "zero-area membership function");
      if (i > 0) require(m.center > (*set)[i - 1].center, p + "/center", "centers must increase");
    }
    require(rules[i] >= 0 && rules[i] < 7, path + "/rules" + idx, "must be in [0, 6]");
  }
  require(std::abs(input_mfs[3].center) < 1e-12, path + "/input_mfs/3/center", "ZE must be at 0");
  require(std::abs(output_mfs[3].center) < 1e-12, path + "/output_mfs/3/center",
          "ZE must be at 0");
  require(norm_scale >= 0.0, path + "/norm_scale", "must be >= 0");
  // Coverage: every input in [-1, 1] must fire some rule with a non-degenerate
  // aggregate.
  for (int k = 0; k <= 2000; ++k) {
    const double x = -1.0 + k * 1e-3;
    std::array<double, 7> weight{};
    bool fired = false;
    for (std::size_t i = 0; i < 7; ++i) {
      const double mu = input_mfs[i](x);
      if (mu > 0.0) fired = true;
      auto& w = weight[static_cast<std::size_t>(rules[i])];
      w = std::max(w, mu);
    }
    double c = 0.0;
    require(fired && detail::centroid_of_clipped(output_mfs, weight, c), path,
            "membership functions leave input " + std::to_string(x) + " uncovered");
  }
}

/// Tabulated input/output curve of a FIS, linearly interpolated. The driver
/// loop evaluates this instead of running inference every physics step.
class FisCurve {
public:
  explicit FisCurve(const FisConfig& cfg, std::size_t points = 2001) : ys_(points) {
    for (std::size_t i = 0; i < points; ++i) ys_[i] = fis_evaluate(cfg, x_at(i));
  }

  double operator()(double da_norm) const {
    const double x = std::clamp(da_norm, -1.0, 1.0);
    const double pos = (x + 1.0) * 0.5 * static_cast<double>(ys_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), ys_.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return ys_[i] + frac * (ys_[i + 1] - ys_[i]);
  }

  std::size_t size() const { return ys_.size(); }
  double x_at(std::size_t i) const {
    return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(ys_.size() - 1);
  }

private:
  std::vector<double> ys_;
};

}  // namespace vsafe::driver
