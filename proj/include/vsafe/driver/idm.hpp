#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "vsafe/common.hpp"

namespace vsafe::driver {

/// Intelligent Driver Model parameters.
struct IdmParams {
  double v0 = 30.0;     ///< desired velocity [m/s]
  double delta = 4.0;   ///< acceleration exponent
  double alpha = 2.0;   ///< comfortable acceleration [m/s^2]
  double beta_c = 2.0;  ///< comfortable braking deceleration [m/s^2]
  double s0 = 2.0;      ///< minimum gap [m]
  double tau_h = 1.5;   ///< desired time headway [s]

  void validate(const std::string& path = "/idm") const {
    require(v0 > 0.0, path + "/v0", "must be > 0");
    require(delta >= 1.0, path + "/delta", "must be >= 1");
    require(alpha > 0.0, path + "/alpha", "must be > 0");
    require(beta_c > 0.0, path + "/beta_c", "must be > 0");
    require(s0 >= 0.5, path + "/s0", "must be >= 0.5");
    require(tau_h > 0.0, path + "/tau_h", "must be > 0");
  }
};

/// Desired dynamic gap G(v, dv), floored at zero so that a fast-opening gap
/// never rewards overlap.
inline double desired_gap(const IdmParams& p, double v, double dv) {
  const double g = p.s0 + v * p.tau_h + v * dv / (2.0 * std::sqrt(p.alpha * p.beta_c));
  return std::max(0.0, g);
}

inline double free_road_term(const IdmParams& p, double v) {
  return 1.0 - std::pow(v / p.v0, p.delta);
}

/// Reference acceleration. `dv` is host minus leader velocity; `gap` is the
/// net bumper-to-bumper distance, absent in free flow.
/// Throws std::domain_error for a non-positive gap: that is a collision and
/// must not be fed to the controller.
inline double idm_reference_acceleration(const IdmParams& p, double v, double dv,
                                         std::optional<double> gap) {
  if (!gap) return p.alpha * free_road_term(p, v);
  if (!(*gap > 0.0)) throw std::domain_error("idm: non-positive gap");
  const double ratio = desired_gap(p, v, dv) / *gap;
  return p.alpha * (free_road_term(p, v) - ratio * ratio);
}

/// Steady-state gap for a platoon moving at v (dv = 0, a = 0). Requires v < v0.
inline double equilibrium_gap(const IdmParams& p, double v) {
  const double free = free_road_term(p, v);
  if (!(free > 0.0)) throw std::domain_error("idm: no equilibrium at or above v0");
  return desired_gap(p, v, 0.0) / std::sqrt(free);
}

/// Inverse of equilibrium_gap: the speed a driver settles at when every gap
/// equals `gap`. Zero when gap <= s0.
inline double equilibrium_speed(const IdmParams& p, double gap) {
  if (gap <= p.s0) return 0.0;
  double lo = 0.0;
  double hi = p.v0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (equilibrium_gap(p, mid) < gap) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace vsafe::driver
