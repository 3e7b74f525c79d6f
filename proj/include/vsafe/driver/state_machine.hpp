#pragma once

#include <limits>
#include <string_view>

#include "vsafe/driver/profile.hpp"

namespace vsafe::driver {

enum class DriverMode { FreeFlow = 0, Following = 1, Emergency = 2 };
enum class PedalSign { Brake = -1, Neutral = 0, Throttle = 1 };

inline std::string_view to_string(DriverMode m) {
  switch (m) {
    case DriverMode::FreeFlow: return "free_flow";
    case DriverMode::Following: return "following";
    case DriverMode::Emergency: return "emergency";
  }
  return "?";
}

struct DriverState {
  DriverMode mode = DriverMode::FreeFlow;
  double mode_entry_time = 0.0;
  PedalSign last_pedal_sign = PedalSign::Neutral;
  /// End of a pending throttle/brake switch; NaN when none is pending.
  double pedal_switch_deadline = std::numeric_limits<double>::quiet_NaN();
  double last_warning_time = -std::numeric_limits<double>::infinity();

  bool switching() const { return pedal_switch_deadline == pedal_switch_deadline; }
};

/// Emergency exit rule: the warning must have been silent this long.
inline constexpr double kEmergencyHoldTime = 2.0;

/// Driving-task state machine. `percept` is the delayed percept whose
/// warning_active flag already carries the emergency reaction latency.
inline DriverState update_driver_state(DriverState state, const Percept& percept,
                                       const DriverProfile& profile, double t,
                                       double hold_time = kEmergencyHoldTime) {
  auto enter = [&](DriverMode m) {
    if (state.mode != m) {
      state.mode = m;
      state.mode_entry_time = t;
    }
  };

  if (percept.warning_active) {
    state.last_warning_time = t;
    enter(DriverMode::Emergency);
    return state;
  }

  const bool leader_visible = percept.has_leader && percept.gap <= profile.vision_range;
  if (state.mode == DriverMode::Emergency) {
    const bool quiet = t - state.last_warning_time >= hold_time - 1e-9;
    const double desired = profile.idm.s0 + percept.own_velocity * profile.idm.tau_h;
    const bool clear = !percept.has_leader || percept.gap > desired;
    if (!(quiet && clear)) return state;
  }
  enter(leader_visible ? DriverMode::Following : DriverMode::FreeFlow);
  return state;
}

}  // namespace vsafe::driver
