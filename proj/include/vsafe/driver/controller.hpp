#pragma once

#include <algorithm>
#include <cmath>

#include "vsafe/driver/fis.hpp"
#include "vsafe/driver/profile.hpp"
#include "vsafe/driver/state_machine.hpp"

namespace vsafe::driver {

/// Pedal magnitudes below this are treated as neutral when deciding whether
/// the foot has to move between pedals.
inline constexpr double kPedalDeadband = 0.02;

inline PedalSign sign_of(double u) {
  if (u > kPedalDeadband) return PedalSign::Throttle;
  if (u < -kPedalDeadband) return PedalSign::Brake;
  return PedalSign::Neutral;
}

/// Fuzzy-PD law: u = FIS(e) + kp*e + kd*de/dt on errors normalized by
/// norm_scale, clamped to [-1, 1]. `fis` maps normalized error to pedal.
template <typename Fis>
double fuzzy_pd_pedal(const Fis& fis, const PdGains& pd, double norm_scale, double a_ref,
                      double a_meas_filtered, double d_err_dt) {
  const double e = (a_ref - a_meas_filtered) / norm_scale;
  const double u = fis(std::clamp(e, -1.0, 1.0)) + pd.kp * e + pd.kd * d_err_dt / norm_scale;
  return std::clamp(u, -1.0, 1.0);
}

/// Foot-transfer latency: a command whose sign opposes the last applied pedal
/// is replaced by 0 until switch_time has elapsed.
inline double apply_pedal_switch(DriverState& state, double u, double t, double switch_time) {
  constexpr double eps = 1e-9;
  const PedalSign s = sign_of(u);
  if (state.switching()) {
    if (t + eps < state.pedal_switch_deadline) return 0.0;
    state.pedal_switch_deadline = std::numeric_limits<double>::quiet_NaN();
    if (s != PedalSign::Neutral) state.last_pedal_sign = s;
    return u;
  }
  if (s == PedalSign::Neutral) return u;
  if (state.last_pedal_sign != PedalSign::Neutral && s != state.last_pedal_sign &&
      switch_time > 0.0) {
    state.pedal_switch_deadline = t + switch_time;
    return 0.0;
  }
  state.last_pedal_sign = s;
  return u;
}

/// Full pedal command for one control step.
template <typename Fis>
double pedal_command(const DriverProfile& profile, const Fis& fis, double a_ref,
                     double a_meas_filtered, double d_err_dt, DriverState& state, double t) {
  const double u = fuzzy_pd_pedal(fis, profile.pd, profile.norm_scale(), a_ref, a_meas_filtered,
                                  d_err_dt);
  return apply_pedal_switch(state, u, t, profile.pedal_switch_time);
}

inline double pedal_command(const DriverProfile& profile, double a_ref, double a_meas_filtered,
                            double d_err_dt, DriverState& state, double t) {
  auto fis = [&](double x) { return fis_evaluate(profile.fis, x); };
  return pedal_command(profile, fis, a_ref, a_meas_filtered, d_err_dt, state, t);
}

/// Emergency braking bypasses the fuzzy path and the switch latency.
inline double emergency_pedal(DriverState& state) {
  state.last_pedal_sign = PedalSign::Brake;
  state.pedal_switch_deadline = std::numeric_limits<double>::quiet_NaN();
  return -1.0;
}

}  // namespace vsafe::driver
