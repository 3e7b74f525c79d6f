#pragma once

#include <algorithm>
#include <cmath>

#include "vsafe/common.hpp"

namespace vsafe::mobility {

/// Longitudinal point-mass plant. The brake limit stands in for a 1500 Nm
/// brake torque on a ~1500 kg car with 0.33 m wheels.
struct VehicleParams {
  double length = 4.5;           ///< [m]
  double max_accel = 3.0;        ///< engine limit [m/s^2]
  double max_brake_decel = 8.0;  ///< positive [m/s^2]
  double actuator_tau = 0.2;     ///< first-order pedal lag [s]

  void validate(const std::string& path = "/vehicle") const {
    require(length > 0.0, path + "/length", "must be > 0");
    require(max_accel > 0.0, path + "/max_accel", "must be > 0");
    require(max_brake_decel > 0.0, path + "/max_brake_decel", "must be > 0");
    require(actuator_tau >= 0.0, path + "/actuator_tau", "must be >= 0");
  }
};

struct VehicleState {
  double pos = 0.0;    ///< along the ring, [0, L)
  double vel = 0.0;    ///< >= 0
  double accel = 0.0;  ///< effective acceleration of the last step
  double pedal = 0.0;  ///< [-1, 1]
};

inline double pedal_to_accel(const VehicleParams& p, double u, double v, double a_prev, double dt) {
  const double a_cmd = u >= 0.0 ? u * p.max_accel : u * p.max_brake_decel;
  const double k = p.actuator_tau > 0.0 ? std::min(1.0, dt / p.actuator_tau) : 1.0;
  double a = a_prev + (a_cmd - a_prev) * k;
  if (v <= 0.0 && a < 0.0) a = 0.0;
  return a;
}

/// Semi-implicit Euler step; velocity is clamped at zero and the stored
/// acceleration is the effective one after clamping.
inline VehicleState integrate(VehicleState s, double a, double dt, double track_length) {
  const double v_new = std::max(0.0, s.vel + a * dt);
  s.accel = (v_new - s.vel) / dt;
  s.vel = v_new;
  s.pos = wrap(s.pos + v_new * dt, track_length);
  return s;
}

/// Net bumper-to-bumper gap from host to leader on the ring; <= 0 is overlap.
inline double gap_to_leader(const VehicleState& host, const VehicleState& leader,
                            double leader_len, double track_length) {
  return wrap(leader.pos - host.pos, track_length) - leader_len;
}

}  // namespace vsafe::mobility
