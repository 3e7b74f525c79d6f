#pragma once

#include <cmath>
#include <cstdint>

#include "vsafe/common.hpp"
#include "vsafe/driver/distraction.hpp"
#include "vsafe/driver/profile.hpp"
#include "vsafe/mobility/vehicle.hpp"
#include "vsafe/population.hpp"
#include "vsafe/safety/fcw.hpp"
#include "vsafe/vnet/channel.hpp"
#include "vsafe/vnet/tracker.hpp"

namespace vsafe::engine {

struct ScenarioConfig {
  double duration = 900.0;        ///< [s]
  double warmup = 120.0;          ///< excluded from metrics [s]
  int n_vehicles = 150;
  double track_length = 2000.0;   ///< [m]
  double dt_physics = 0.01;       ///< [s]
  double dt_safety = 0.1;         ///< [s]
  std::uint64_t seed = 1;

  vnet::ChannelConfig channel;
  double max_track_age = vnet::kDefaultMaxAge;
  safety::FcwConfig fcw;
  PopulationSpec population;
  double p_distracted = 0.03;
  driver::DistractionParams distraction;
  /// Template for every sampled driver; tau_h, alpha, beta_c and the class
  /// are overwritten by the population draw.
  driver::DriverProfile driver;
  mobility::VehicleParams vehicle;

  double emergency_reaction = 1.3;  ///< warning-to-hard-brake latency [s]
  double emergency_hold = driver::kEmergencyHoldTime;
  Range block_range{10.0, 20.0};    ///< crash blocking duration [s]
  double fault_window = 1.5;        ///< tau_c for fault attribution [s]
  double warning_window = 5.0;      ///< W for warning classification [s]
  double ttc_near = 2.0;            ///< near-crash TTC [s]
  double init_jitter = 0.1;         ///< fraction of the mean net gap

  double headway_interval = 1.0;    ///< sampling period of the headway log [s]
  double headway_v_min = 1.0;       ///< [m/s]
  double headway_bin = 0.5;         ///< histogram bin width [s]
  double headway_max = 10.0;        ///< histogram upper edge [s]
  bool log_comms = true;            ///< per-tick delivery counts in the event log

  /// Test hook for the determinism check: perturbs the channel stream.
  std::uint64_t nondeterminism_salt = 0;

  std::int64_t steps_per(double period) const {
    return static_cast<std::int64_t>(std::llround(period / dt_physics));
  }

  void validate() const {
    require(duration >= 0.0, "/duration", "must be >= 0");
    require(warmup >= 0.0, "/warmup", "must be >= 0");
    require(n_vehicles >= 0, "/n_vehicles", "must be >= 0");
    require(track_length > 0.0, "/track_length", "must be > 0");
    require(dt_physics > 0.0, "/dt_physics", "must be > 0");
    auto multiple = [&](double period) {
      const double k = period / dt_physics;
      return k >= 1.0 - 1e-9 && std::abs(k - std::round(k)) < 1e-6;
    };
    require(multiple(dt_safety), "/dt_safety", "must be a positive multiple of dt_physics");
    channel.validate();
    require(multiple(1.0 / channel.tx_rate), "/channel/tx_rate",
            "transmission period must be a multiple of dt_physics");
    require(max_track_age > 0.0, "/max_track_age", "must be > 0");
    fcw.validate();
    population.validate();
    require(p_distracted >= 0.0 && p_distracted <= 1.0, "/p_distracted", "must be in [0, 1]");
    distraction.validate();
    driver.validate();
    vehicle.validate();
    require(n_vehicles * vehicle.length < track_length, "/n_vehicles",
            "vehicles do not fit on the track");
    require(emergency_reaction >= 0.0, "/emergency_reaction", "must be >= 0");
    require(emergency_hold >= 0.0, "/emergency_hold", "must be >= 0");
    require(block_range.lo >= 0.0 && block_range.lo <= block_range.hi, "/block_range",
            "need 0 <= lo <= hi");
    require(fault_window > 0.0, "/fault_window", "must be > 0");
    require(warning_window > 0.0, "/warning_window", "must be > 0");
    require(ttc_near > 0.0, "/ttc_near", "must be > 0");
    require(init_jitter >= 0.0 && init_jitter < 0.5, "/init_jitter", "must be in [0, 0.5)");
    require(multiple(headway_interval), "/headway_interval",
            "must be a positive multiple of dt_physics");
    require(headway_v_min >= 0.0, "/headway_v_min", "must be >= 0");
    require(headway_bin > 0.0 && headway_max > headway_bin, "/headway_bin",
            "need 0 < headway_bin < headway_max");
  }
};

}  // namespace vsafe::engine
