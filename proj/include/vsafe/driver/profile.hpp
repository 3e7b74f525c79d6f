#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "vsafe/common.hpp"
#include "vsafe/driver/fis.hpp"
#include "vsafe/driver/idm.hpp"

namespace vsafe::driver {

enum class Behavior { Aggressive = 0, Normal = 1, Conservative = 2 };
enum class Attention { Cautious = 0, Distracted = 1 };

inline constexpr std::array<Behavior, 3> kBehaviors = {Behavior::Aggressive, Behavior::Normal,
                                                       Behavior::Conservative};

inline std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::Aggressive: return "aggressive";
    case Behavior::Normal: return "normal";
    case Behavior::Conservative: return "conservative";
  }
  return "?";
}

inline std::string_view to_string(Attention a) {
  return a == Attention::Cautious ? "cautious" : "distracted";
}

/// Headway thresholds separating the three behavior classes [s].
struct HeadwayThresholds {
  double aggressive_below = 2.0;
  double conservative_above = 3.0;
};

/// tau < 2 aggressive, 2 <= tau <= 3 normal, tau > 3 conservative.
inline Behavior classify(double mean_tau, HeadwayThresholds th = {}) {
  if (mean_tau < th.aggressive_below) return Behavior::Aggressive;
  if (mean_tau <= th.conservative_above) return Behavior::Normal;
  return Behavior::Conservative;
}

struct PdGains {
  double kp = 0.2;
  double kd = 0.05;  ///< [s]
};

struct DriverProfile {
  Behavior behavior = Behavior::Normal;
  Attention attention = Attention::Cautious;
  IdmParams idm;
  FisConfig fis = FisConfig::defaults();
  PdGains pd;
  double reaction_time = 1.4;      ///< perception-reaction delay [s]
  double pedal_switch_time = 0.2;  ///< throttle/brake foot transfer [s]
  double filter_window = 0.3;      ///< acceleration moving-average window [s]
  double vision_range = 120.0;     ///< [m]

  /// norm_scale of the FIS, defaulting to the larger comfortable limit.
  double norm_scale() const {
    return fis.norm_scale > 0.0 ? fis.norm_scale : std::max(idm.alpha, idm.beta_c);
  }

  void validate(const std::string& path = "/driver") const {
    idm.validate(path + "/idm");
    fis.validate(path + "/fis");
    require(pd.kp >= 0.0 && pd.kd >= 0.0, path + "/pd", "gains must be >= 0");
    require(reaction_time > 0.0, path + "/reaction_time", "must be > 0");
    require(pedal_switch_time >= 0.0, path + "/pedal_switch_time", "must be >= 0");
    require(filter_window > 0.0, path + "/filter_window", "must be > 0");
    require(vision_range > 0.0, path + "/vision_range", "must be > 0");
  }
};

/// What the driver perceives at one instant.
struct Percept {
  double t = 0.0;
  bool has_leader = false;
  double gap = 0.0;  ///< only meaningful when has_leader
  double leader_velocity = 0.0;
  double own_velocity = 0.0;
  double own_accel_filtered = 0.0;
  bool warning_active = false;
  bool stale = false;

  std::optional<double> leader_gap() const {
    return has_leader ? std::optional<double>(gap) : std::nullopt;
  }
};

}  // namespace vsafe::driver
