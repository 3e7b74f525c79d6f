#pragma once

#include <memory>
#include <vector>

#include "vsafe/engine/world.hpp"

namespace vsafe::engine {

/// Sampled history of a single follower.
struct FollowerTrace {
  std::vector<double> t;
  std::vector<double> gap;
  std::vector<double> vel;
  std::vector<double> accel;
};

/// Car-following bench: one driver behind a leader that holds a constant
/// speed on an open road. Uses the same driver and vehicle model as the ring
/// simulation. Samples are recorded every `record_every` physics steps.
inline FollowerTrace follow_constant_leader(const ScenarioConfig& cfg,
                                            const driver::DriverProfile& profile,
                                            double leader_speed, double initial_gap,
                                            double initial_speed, double duration,
                                            int record_every = 10) {
  ScenarioConfig c = cfg;
  c.track_length = 1e9;
  Vehicle v;
  v.profile = profile;
  v.fis = std::make_shared<const driver::FisCurve>(profile.fis);
  v.rng.seed(mix_seed(c.seed, kDriverStreamBase));
  v.state.vel = initial_speed;
  reset_driver(c, v);

  const double len = c.vehicle.length;
  const double lead_start = initial_gap + len;
  FollowerTrace tr;
  const auto steps = std::llround(duration / c.dt_physics);
  for (std::int64_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * c.dt_physics;
    const double gap = lead_start + leader_speed * t - v.state.pos - len;
    if (k % record_every == 0) {
      tr.t.push_back(t);
      tr.gap.push_back(gap);
      tr.vel.push_back(v.state.vel);
      tr.accel.push_back(v.state.accel);
    }
    if (k == steps) break;
    driver::Percept p;
    p.t = t;
    p.own_velocity = v.state.vel;
    p.own_accel_filtered = v.accel_filter.value();
    if (gap <= profile.vision_range) {
      p.has_leader = true;
      p.gap = gap;
      p.leader_velocity = leader_speed;
    }
    drive(c, v, p, t);
    move(c, v);
  }
  return tr;
}

}  // namespace vsafe::engine
