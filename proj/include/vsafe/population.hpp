#pragma once

#include <array>
#include <cmath>
#include <random>

#include "vsafe/common.hpp"
#include "vsafe/driver/profile.hpp"

namespace vsafe {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Driver population: gamma-distributed desired headway plus per-class
/// comfortable acceleration/deceleration ranges. Arrays are indexed by
/// driver::Behavior.
struct PopulationSpec {
  double gamma_shape = 9.15;
  double gamma_scale = 0.31;  ///< [s]; scale, not rate
  driver::HeadwayThresholds thresholds;
  std::array<double, 3> class_ratios = {0.19, 0.43, 0.38};
  std::array<Range, 3> accel = {{{1.53, 2.75}, {1.43, 2.59}, {1.30, 2.41}}};
  std::array<Range, 3> decel = {{{1.52, 2.73}, {1.43, 2.59}, {1.27, 2.41}}};

  /// Table of the NGSIM I-80 analysis bundled with the project.
  static PopulationSpec ngsim_i80() { return {}; }

  void validate(const std::string& path = "/population") const {
    require(gamma_shape > 0.0 && std::isfinite(gamma_shape), path + "/gamma_shape", "must be > 0");
    require(gamma_scale > 0.0 && std::isfinite(gamma_scale), path + "/gamma_scale", "must be > 0");
    require(thresholds.aggressive_below > 0.0 &&
                thresholds.conservative_above > thresholds.aggressive_below,
            path + "/thresholds", "must be positive and ascending");
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto idx = "/" + std::to_string(i);
      require(class_ratios[i] >= 0.0, path + "/class_ratios" + idx, "must be >= 0");
      sum += class_ratios[i];
      require(accel[i].lo > 0.0 && accel[i].lo <= accel[i].hi, path + "/accel" + idx,
              "need 0 < lo <= hi");
      require(decel[i].lo > 0.0 && decel[i].lo <= decel[i].hi, path + "/decel" + idx,
              "need 0 < lo <= hi");
    }
    require(std::abs(sum - 1.0) <= 1e-9, path + "/class_ratios", "must sum to 1");
  }
};

/// Draw one driver. `base` supplies everything the population does not
/// decide (FIS, PD gains, delays, v0, delta, s0, vision).
template <typename Rng>
driver::DriverProfile sample_driver_profile(Rng& rng, const PopulationSpec& spec,
                                            const driver::DriverProfile& base,
                                            double p_distracted) {
  driver::DriverProfile p = base;
  p.idm.tau_h = std::gamma_distribution<double>(spec.gamma_shape, spec.gamma_scale)(rng);
  p.behavior = driver::classify(p.idm.tau_h, spec.thresholds);
  const auto c = static_cast<std::size_t>(p.behavior);
  p.idm.alpha = std::uniform_real_distribution<double>(spec.accel[c].lo, spec.accel[c].hi)(rng);
  p.idm.beta_c = std::uniform_real_distribution<double>(spec.decel[c].lo, spec.decel[c].hi)(rng);
  p.attention = std::bernoulli_distribution(p_distracted)(rng) ? driver::Attention::Distracted
                                                               : driver::Attention::Cautious;
  return p;
}

}  // namespace vsafe
