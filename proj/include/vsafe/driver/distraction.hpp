#pragma once

#include <random>

#include "vsafe/driver/profile.hpp"

namespace vsafe::driver {

struct DistractionParams {
  double mean_between = 60.0;  ///< mean attentive time between episodes [s]
  double min_duration = 3.0;   ///< [s]
  double max_duration = 8.0;   ///< [s]

  void validate(const std::string& path = "/distraction") const {
    require(mean_between > 0.0, path + "/mean_between", "must be > 0");
    require(min_duration >= 0.0 && max_duration >= min_duration, path,
            "need 0 <= min_duration <= max_duration");
  }
};

/// Renewal-process state: attentive periods are exponential, episodes uniform.
struct DistractionEpisode {
  bool initialized = false;
  bool active = false;
  double next_start = 0.0;
  double end = 0.0;
  Percept frozen;  ///< percept captured when the current episode began
  double last_active_time = -1e300;
};

enum class PerceptGate { Fresh, Frozen };

/// Advance the distraction process to time t. Cautious drivers never leave
/// the Fresh state and never consume random numbers.
template <typename Rng>
PerceptGate distraction_step(Rng& rng, const DriverProfile& profile,
                             const DistractionParams& params, DistractionEpisode& ep, double t,
                             const Percept& fresh) {
  if (profile.attention != Attention::Distracted) return PerceptGate::Fresh;
  auto next_gap = [&] {
    return std::exponential_distribution<double>(1.0 / params.mean_between)(rng);
  };
  if (!ep.initialized) {
    ep.initialized = true;
    ep.next_start = t + next_gap();
  }
  if (ep.active && t >= ep.end) {
    ep.active = false;
    ep.next_start = t + next_gap();
  }
  if (!ep.active && t >= ep.next_start) {
    ep.active = true;
    ep.end = t + std::uniform_real_distribution<double>(params.min_duration,
                                                        params.max_duration)(rng);
    ep.frozen = fresh;
  }
  if (ep.active) ep.last_active_time = t;
  return ep.active ? PerceptGate::Frozen : PerceptGate::Fresh;
}

/// Apply a gate decision: a frozen percept keeps the leader as it was at
/// episode start while own-vehicle signals and the alert flag stay live.
inline Percept gate_percept(PerceptGate gate, const DistractionEpisode& ep, const Percept& fresh) {
  if (gate == PerceptGate::Fresh) return fresh;
  Percept p = fresh;
  p.has_leader = ep.frozen.has_leader;
  p.gap = ep.frozen.gap;
  p.leader_velocity = ep.frozen.leader_velocity;
  p.stale = true;
  return p;
}

}  // namespace vsafe::driver
