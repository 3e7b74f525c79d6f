#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "vsafe/driver/controller.hpp"
#include "vsafe/driver/delay_line.hpp"
#include "vsafe/driver/distraction.hpp"
#include "vsafe/driver/low_pass.hpp"
#include "vsafe/driver/state_machine.hpp"
#include "vsafe/engine/config.hpp"
#include "vsafe/engine/events.hpp"
#include "vsafe/mobility/vehicle.hpp"
#include "vsafe/population.hpp"
#include "vsafe/safety/fcw.hpp"
#include "vsafe/vnet/channel.hpp"
#include "vsafe/vnet/tracker.hpp"

namespace vsafe::engine {

inline constexpr double kNever = -std::numeric_limits<double>::infinity();

enum class VehicleStatus { Active, Crashed, Removed };

// Random stream tags; each consumer owns an independent generator.
enum StreamTag : std::uint64_t {
  kPopulationStream = 1,
  kPlacementStream = 2,
  kChannelStream = 3,
  kCrashStream = 4,
  kDriverStreamBase = 1000,
};

struct Vehicle {
  std::uint32_t id = 0;
  driver::DriverProfile profile;
  std::shared_ptr<const driver::FisCurve> fis;
  mobility::VehicleState state;
  double actuator_accel = 0.0;

  driver::DriverState dstate;
  driver::DelayLine<driver::Percept> percepts;
  driver::DelayLine<bool> alerts;
  driver::MovingAverage accel_filter{0.3, 0.01};
  driver::DistractionEpisode episode;
  std::mt19937_64 rng;
  double prev_error = 0.0;
  bool has_prev_error = false;
  bool alert_now = false;

  VehicleStatus status = VehicleStatus::Active;
  double crash_time = kNever;
  double block_until = 0.0;
  double last_hard_brake = kNever;

  /// Remote-vehicle tracks indexed by sender id.
  std::vector<vnet::Track> tracks;

  bool in_ring() const { return status != VehicleStatus::Removed; }
};

struct PendingWarning {
  safety::WarningEvent event;
  driver::Behavior host_class = driver::Behavior::Normal;
  std::optional<double> min_ttc;
  bool emergency_entered = false;
  bool collided = false;
};

struct World {
  ScenarioConfig cfg;
  std::int64_t k = 0;  ///< completed physics steps
  std::vector<Vehicle> vehicles;
  /// In-ring vehicles in cyclic order of increasing position.
  std::vector<std::uint32_t> ring;
  /// Per vehicle: id of the vehicle ahead, or -1.
  std::vector<std::int64_t> leader;
  std::mt19937_64 channel_rng;
  std::mt19937_64 crash_rng;
  safety::FcwMonitor fcw{safety::FcwConfig{}};
  std::vector<PendingWarning> pending;
  EventLog log;
  std::uint32_t collisions = 0;
  std::uint32_t warnings = 0;

  std::int64_t comms_every = 10;
  std::int64_t safety_every = 10;
  std::int64_t headway_every = 100;

  double t() const { return static_cast<double>(k) * cfg.dt_physics; }
  double length() const { return cfg.vehicle.length; }
};

inline void rebuild_ring(World& w) {
  w.ring.clear();
  for (const auto& v : w.vehicles)
    if (v.in_ring()) w.ring.push_back(v.id);
  std::sort(w.ring.begin(), w.ring.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double pa = w.vehicles[a].state.pos;
    const double pb = w.vehicles[b].state.pos;
    return pa != pb ? pa < pb : a < b;
  });
  std::fill(w.leader.begin(), w.leader.end(), -1);
  if (w.ring.size() < 2) return;
  for (std::size_t i = 0; i < w.ring.size(); ++i)
    w.leader[w.ring[i]] = w.ring[(i + 1) % w.ring.size()];
}

inline double gap_ahead(const World& w, std::uint32_t id) {
  const auto l = w.leader[id];
  if (l < 0) return std::numeric_limits<double>::infinity();
  return mobility::gap_to_leader(w.vehicles[id].state, w.vehicles[static_cast<std::size_t>(l)].state,
                                 w.length(), w.cfg.track_length);
}

/// Clear all per-drive controller memory (used at spawn and respawn).
inline void reset_driver(const ScenarioConfig& cfg, Vehicle& v) {
  v.percepts = driver::DelayLine<driver::Percept>(v.profile.reaction_time);
  v.alerts = driver::DelayLine<bool>(cfg.emergency_reaction);
  v.accel_filter = driver::MovingAverage(v.profile.filter_window, cfg.dt_physics);
  v.dstate = driver::DriverState{};
  v.prev_error = 0.0;
  v.has_prev_error = false;
  v.alert_now = false;
  v.actuator_accel = 0.0;
  v.state.accel = 0.0;
  v.state.pedal = 0.0;
  v.episode.active = false;
  v.episode.initialized = false;
}

/// One control step of the human-driver model: distraction gating, reaction
/// delay, driving-task state machine and pedal command. Sets v.state.pedal.
inline void drive(const ScenarioConfig& cfg, Vehicle& v, const driver::Percept& fresh, double t) {
  const auto gate = driver::distraction_step(v.rng, v.profile, cfg.distraction, v.episode, t, fresh);
  v.percepts.push(t, driver::gate_percept(gate, v.episode, fresh));
  v.alerts.push(t, v.alert_now);
  const auto delayed = v.percepts.at(t);
  const auto alert = v.alerts.at(t);
  driver::Percept seen = delayed.value;
  seen.warning_active = alert.value && !alert.stale;
  seen.stale = seen.stale || delayed.stale;

  v.dstate = driver::update_driver_state(v.dstate, seen, v.profile, t, cfg.emergency_hold);
  double u = 0.0;
  if (v.dstate.mode == driver::DriverMode::Emergency) {
    u = driver::emergency_pedal(v.dstate);
    v.has_prev_error = false;
  } else {
    double a_ref = 0.0;
    if (v.dstate.mode == driver::DriverMode::Following && seen.has_leader) {
      a_ref = seen.gap > 0.0
                  ? driver::idm_reference_acceleration(v.profile.idm, seen.own_velocity,
                                                       seen.own_velocity - seen.leader_velocity,
                                                       seen.gap)
                  : -cfg.vehicle.max_brake_decel;
    } else {
      a_ref = driver::idm_reference_acceleration(v.profile.idm, seen.own_velocity, 0.0,
                                                 std::nullopt);
    }
    const double a_meas = v.accel_filter.value();
    const double err = a_ref - a_meas;
    const double derr = v.has_prev_error ? (err - v.prev_error) / cfg.dt_physics : 0.0;
    v.prev_error = err;
    v.has_prev_error = true;
    u = driver::pedal_command(v.profile, *v.fis, a_ref, a_meas, derr, v.dstate, t);
  }
  v.state.pedal = u;
  if (v.dstate.mode == driver::DriverMode::Emergency || u <= -0.99) v.last_hard_brake = t;
}

/// Apply the pedal through the actuator lag and advance the vehicle by dt.
inline void move(const ScenarioConfig& cfg, Vehicle& v) {
  const double dt = cfg.dt_physics;
  v.actuator_accel =
      mobility::pedal_to_accel(cfg.vehicle, v.state.pedal, v.state.vel, v.actuator_accel, dt);
  v.state = mobility::integrate(v.state, v.actuator_accel, dt, cfg.track_length);
  v.accel_filter.push(v.state.accel);
}

/// Build the initial world: sampled drivers at jittered uniform spacing,
/// each starting at its equilibrium speed for the mean gap.
inline World init_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  World w;
  w.cfg = cfg;
  w.comms_every = cfg.steps_per(1.0 / cfg.channel.tx_rate);
  w.safety_every = cfg.steps_per(cfg.dt_safety);
  w.headway_every = cfg.steps_per(cfg.headway_interval);
  w.channel_rng.seed(mix_seed(cfg.seed ^ cfg.nondeterminism_salt, kChannelStream));
  w.crash_rng.seed(mix_seed(cfg.seed, kCrashStream));
  w.fcw = safety::FcwMonitor(cfg.fcw);

  std::mt19937_64 pop_rng(mix_seed(cfg.seed, kPopulationStream));
  std::mt19937_64 place_rng(mix_seed(cfg.seed, kPlacementStream));
  const auto n = static_cast<std::size_t>(cfg.n_vehicles);
  const double spacing = n > 0 ? cfg.track_length / static_cast<double>(n) : 0.0;
  const double mean_gap = spacing - cfg.vehicle.length;
  if (n > 1)
    require(mean_gap > cfg.driver.idm.s0 * 0.5, "/n_vehicles",
            "infeasible packing: mean gap below half the minimum gap");
  std::uniform_real_distribution<double> jitter(-cfg.init_jitter, cfg.init_jitter);

  auto fis = std::make_shared<const driver::FisCurve>(cfg.driver.fis);
  w.vehicles.resize(n);
  w.leader.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = w.vehicles[i];
    v.id = static_cast<std::uint32_t>(i);
    v.profile = sample_driver_profile(pop_rng, cfg.population, cfg.driver, cfg.p_distracted);
    v.fis = fis;
    v.rng.seed(mix_seed(cfg.seed, kDriverStreamBase + i));
    v.tracks.assign(n, vnet::Track{});
    v.state.pos = wrap(static_cast<double>(i) * spacing + jitter(place_rng) * mean_gap,
                       cfg.track_length);
    const double v_eq = n > 1 ? driver::equilibrium_speed(v.profile.idm, mean_gap)
                              : v.profile.idm.v0 * 0.5;
    v.state.vel = std::min(v.profile.idm.v0, v_eq);
    reset_driver(cfg, v);
  }
  rebuild_ring(w);
  return w;
}

struct Overlap {
  std::uint32_t striker = 0;
  std::uint32_t struck = 0;
};

/// Adjacent pairs whose net gap is <= 0 and whose rear vehicle is still
/// driving, ordered so that a collision further ahead in a chain comes first.
inline std::vector<Overlap> detect_collisions(const World& w) {
  std::vector<Overlap> found;
  for (auto id : w.ring) {
    const auto& v = w.vehicles[id];
    if (v.status != VehicleStatus::Active || w.leader[id] < 0) continue;
    if (gap_ahead(w, id) <= 0.0)
      found.push_back({id, static_cast<std::uint32_t>(w.leader[id])});
  }
  std::vector<Overlap> ordered;
  ordered.reserve(found.size());
  std::vector<bool> done(found.size(), false);
  while (ordered.size() < found.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (done[i]) continue;
      const bool struck_pending = std::any_of(found.begin(), found.end(), [&](const Overlap& o) {
        const auto j = static_cast<std::size_t>(&o - found.data());
        return !done[j] && o.striker == found[i].struck;
      });
      if (struck_pending) continue;
      done[i] = true;
      ordered.push_back(found[i]);
      progressed = true;
    }
    if (!progressed) {  // closed loop of overlaps: fall back to ring order
      for (std::size_t i = 0; i < found.size(); ++i)
        if (!done[i]) {
          done[i] = true;
          ordered.push_back(found[i]);
        }
    }
  }
  return ordered;
}

struct FaultContext {
  driver::Behavior striker_class = driver::Behavior::Normal;
  double striker_last_distracted = kNever;
  bool struck_blocking = false;  ///< struck vehicle already crashed and blocking the lane
  double struck_last_hard_brake = kNever;
};

/// Fault lies with the striker's class. Cause precedence:
/// pileup > distraction > leader hard braking > other.
inline std::pair<driver::Behavior, Cause> attribute_fault(const FaultContext& c, double t,
                                                          double fault_window) {
  const double since = t - fault_window;
  Cause cause = Cause::Other;
  if (c.struck_blocking)
    cause = Cause::Pileup;
  else if (c.striker_last_distracted >= since)
    cause = Cause::Distraction;
  else if (c.struck_last_hard_brake >= since)
    cause = Cause::LeaderHardBraking;
  return {c.striker_class, cause};
}

/// Positive iff the pair did not collide and came close to one within the
/// window (near-crash TTC or an emergency brake by the host).
inline safety::WarningClass classify_warning(const PendingWarning& p, double ttc_near) {
  if (p.collided) return safety::WarningClass::False;
  const bool near_crash = (p.min_ttc && *p.min_ttc <= ttc_near) || p.emergency_entered;
  return near_crash ? safety::WarningClass::Positive : safety::WarningClass::False;
}

namespace detail {

inline void finalize_warning(World& w, PendingWarning& p) {
  p.event.classification = classify_warning(p, w.cfg.ttc_near);
  w.log.emplace_back(WarningRecord{p.event, p.host_class, p.min_ttc});
  ++w.warnings;
}

inline void comms_phase(World& w, double t) {
  std::vector<vnet::Bsm> out;
  out.reserve(w.ring.size());
  for (auto id : w.ring) {
    const auto& s = w.vehicles[id].state;
    out.push_back({id, t, s.pos, s.vel, s.accel});
  }
  const double max_age = w.cfg.max_track_age;
  const auto delivered = vnet::broadcast_step(
      std::span<const vnet::Bsm>(out), w.cfg.channel, w.channel_rng,
      [&](std::size_t r, const vnet::Bsm& m) {
        auto& tr = w.vehicles[w.ring[r]].tracks[m.sender];
        tr = vnet::track_update(tr, m, t, max_age);
      });
  if (w.cfg.log_comms)
    w.log.emplace_back(CommsRecord{t, static_cast<std::uint32_t>(out.size()),
                                   static_cast<std::uint32_t>(delivered)});
}

inline void safety_phase(World& w, double t) {
  const double L = w.cfg.track_length;
  for (auto id : w.ring) {
    auto& v = w.vehicles[id];
    v.alert_now = false;
    if (v.status != VehicleStatus::Active || w.leader[id] < 0) continue;
    const auto threat = static_cast<std::uint32_t>(w.leader[id]);
    const auto& tr = v.tracks[threat];
    if (tr.empty()) continue;
    const auto est = vnet::track_predict(tr, t, w.cfg.max_track_age);
    safety::ThreatView view;
    view.gap = wrap(est.pos - v.state.pos, L) - w.length();
    view.host_vel = v.state.vel;
    view.host_accel = v.state.accel;
    view.lead_vel = est.vel;
    view.lead_accel = est.accel;
    view.stale = est.stale;
    auto d = w.fcw.evaluate(id, threat, view, t);
    v.alert_now = d.alert;
    if (d.event) w.pending.push_back({*d.event, v.profile.behavior, std::nullopt, false, false});
  }

  // Outcome bookkeeping for warnings still inside their window.
  for (auto& p : w.pending) {
    const auto& h = w.vehicles[p.event.host];
    const auto& th = w.vehicles[p.event.threat];
    if (h.dstate.mode == driver::DriverMode::Emergency && h.dstate.mode_entry_time >= p.event.t)
      p.emergency_entered = true;
    if (!h.in_ring() || !th.in_ring()) continue;
    const double gap = mobility::gap_to_leader(h.state, th.state, w.length(), L);
    if (auto ttc = safety::time_to_collision(std::max(0.0, gap), h.state.vel, th.state.vel))
      p.min_ttc = p.min_ttc ? std::min(*p.min_ttc, *ttc) : *ttc;
  }
}

inline void driver_phase(World& w, Vehicle& v, double t) {
  driver::Percept fresh;
  fresh.t = t;
  fresh.own_velocity = v.state.vel;
  fresh.own_accel_filtered = v.accel_filter.value();
  if (w.leader[v.id] >= 0) {
    const double gap = gap_ahead(w, v.id);
    if (gap <= v.profile.vision_range) {
      fresh.has_leader = true;
      fresh.gap = gap;
      fresh.leader_velocity = w.vehicles[static_cast<std::size_t>(w.leader[v.id])].state.vel;
    }
  }
  drive(w.cfg, v, fresh, t);
}

inline void crash(World& w, Vehicle& v, double t) {
  v.status = VehicleStatus::Crashed;
  v.crash_time = t;
  v.block_until =
      t + std::uniform_real_distribution<double>(w.cfg.block_range.lo, w.cfg.block_range.hi)(w.crash_rng);
  v.state.vel = 0.0;
  v.state.accel = 0.0;
  v.state.pedal = 0.0;
  v.actuator_accel = 0.0;
  v.alert_now = false;
}

inline void collision_phase(World& w, double t) {
  for (const auto& o : detect_collisions(w)) {
    auto& striker = w.vehicles[o.striker];
    auto& struck = w.vehicles[o.struck];
    if (striker.status != VehicleStatus::Active) continue;
    FaultContext ctx;
    ctx.striker_class = striker.profile.behavior;
    ctx.striker_last_distracted = striker.episode.last_active_time;
    ctx.struck_blocking = struck.status == VehicleStatus::Crashed;
    ctx.struck_last_hard_brake = struck.last_hard_brake;
    const auto [fault, cause] = attribute_fault(ctx, t, w.cfg.fault_window);
    w.log.emplace_back(
        CollisionEvent{t, o.striker, o.struck, fault, striker.profile.attention, cause});
    ++w.collisions;

    striker.state.pos = wrap(struck.state.pos - w.length(), w.cfg.track_length);
    crash(w, striker, t);
    if (struck.status == VehicleStatus::Active) crash(w, struck, t);

    for (auto& p : w.pending)
      if ((p.event.host == o.striker && p.event.threat == o.struck) ||
          (p.event.host == o.struck && p.event.threat == o.striker))
        p.collided = true;
  }
}

inline bool try_respawn(World& w, Vehicle& v) {
  const double L = w.cfg.track_length;
  const double len = w.length();
  double pos = 0.0;
  double vel = 0.0;
  if (w.ring.empty()) {
    vel = v.profile.idm.v0 * 0.5;
  } else {
    std::uint32_t best = w.ring.front();
    double best_gap = -1.0;
    for (auto id : w.ring) {
      const double g = w.ring.size() == 1 ? L - len : gap_ahead(w, id);
      if (g > best_gap) {
        best_gap = g;
        best = id;
      }
    }
    const auto& follower = w.vehicles[best];
    const double half = 0.5 * (best_gap - len);
    if (!(half >= 2.0 * v.profile.idm.s0 + follower.state.vel)) return false;
    pos = wrap(follower.state.pos + len + half, L);
    const double lead_vel =
        w.ring.size() == 1 ? follower.state.vel
                           : w.vehicles[static_cast<std::size_t>(w.leader[best])].state.vel;
    vel = std::min(lead_vel, driver::equilibrium_speed(v.profile.idm, half));
  }
  v.status = VehicleStatus::Active;
  v.state.pos = pos;
  v.state.vel = vel;
  reset_driver(w.cfg, v);
  return true;
}

inline void lifecycle_phase(World& w, double t, bool safety_tick) {
  bool changed = false;
  for (auto& v : w.vehicles)
    if (v.status == VehicleStatus::Crashed && t >= v.block_until - 1e-9) {
      v.status = VehicleStatus::Removed;
      changed = true;
    }
  if (changed) rebuild_ring(w);
  if (safety_tick) {
    for (auto& v : w.vehicles)
      if (v.status == VehicleStatus::Removed && try_respawn(w, v)) rebuild_ring(w);
  }

  auto it = w.pending.begin();
  for (auto& p : w.pending) {
    if (p.collided || t - p.event.t >= w.cfg.warning_window - 1e-9) {
      finalize_warning(w, p);
    } else {
      *it++ = std::move(p);
    }
  }
  w.pending.erase(it, w.pending.end());
}

inline void headway_phase(World& w, double t) {
  HeadwayRecord rec;
  rec.t = t;
  for (auto id : w.ring) {
    const auto& v = w.vehicles[id];
    if (v.status != VehicleStatus::Active || w.leader[id] < 0) continue;
    if (!(v.state.vel > w.cfg.headway_v_min)) continue;
    if (auto tau = safety::time_headway(gap_ahead(w, id), v.state.vel)) rec.samples.emplace_back(id, *tau);
  }
  std::sort(rec.samples.begin(), rec.samples.end());
  w.log.emplace_back(std::move(rec));
}

}  // namespace detail

/// Advance the world by one physics step. Fixed sub-step order:
/// comms, safety, headway sampling, driver, mobility, collisions, lifecycle.
inline void step(World& w) {
  const double t = w.t();
  if (w.k % w.comms_every == 0) detail::comms_phase(w, t);
  if (w.k % w.safety_every == 0) detail::safety_phase(w, t);
  if (w.k % w.headway_every == 0 && t >= w.cfg.warmup - 1e-9) detail::headway_phase(w, t);

  for (auto id : w.ring) {
    auto& v = w.vehicles[id];
    if (v.status == VehicleStatus::Active) detail::driver_phase(w, v, t);
  }
  for (auto id : w.ring) {
    auto& v = w.vehicles[id];
    if (v.status == VehicleStatus::Active) move(w.cfg, v);
  }

  ++w.k;
  const double t1 = w.t();
  detail::collision_phase(w, t1);
  detail::lifecycle_phase(w, t1, w.k % w.safety_every == 0);
}

/// Close every warning still waiting for its window (end of run).
inline void flush_pending(World& w) {
  for (auto& p : w.pending) detail::finalize_warning(w, p);
  w.pending.clear();
}

}  // namespace vsafe::engine
