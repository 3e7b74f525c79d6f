#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vsafe/driver/profile.hpp"
#include "vsafe/safety/fcw.hpp"

namespace vsafe::engine {

enum class Cause { Distraction = 0, LeaderHardBraking = 1, Pileup = 2, Other = 3 };

inline constexpr std::array<Cause, 4> kCauses = {Cause::Distraction, Cause::LeaderHardBraking,
                                                 Cause::Pileup, Cause::Other};

inline std::string_view to_string(Cause c) {
  switch (c) {
    case Cause::Distraction: return "distraction";
    case Cause::LeaderHardBraking: return "leader_hard_braking";
    case Cause::Pileup: return "pileup";
    case Cause::Other: return "other";
  }
  return "?";
}

struct RunHeader {
  std::uint64_t seed = 0;
  safety::FcwKind algorithm = safety::FcwKind::None;
  std::string config_hash;
  int n_vehicles = 0;
  double duration = 0.0;
  double warmup = 0.0;
  double headway_bin = 0.5;
  double headway_max = 10.0;
};

struct DriverRecord {
  std::uint32_t id = 0;
  driver::Behavior behavior = driver::Behavior::Normal;
  driver::Attention attention = driver::Attention::Cautious;
  double tau_h = 0.0;
  double alpha = 0.0;
  double beta_c = 0.0;
};

struct CommsRecord {
  double t = 0.0;
  std::uint32_t sent = 0;
  std::uint32_t delivered = 0;
};

struct HeadwayRecord {
  double t = 0.0;
  std::vector<std::pair<std::uint32_t, double>> samples;  ///< (vehicle, tau)
};

/// A warning after its outcome window closed.
struct WarningRecord {
  safety::WarningEvent event;
  driver::Behavior host_class = driver::Behavior::Normal;
  std::optional<double> min_ttc;
};

struct CollisionEvent {
  double t = 0.0;
  std::uint32_t striker = 0;
  std::uint32_t struck = 0;
  driver::Behavior fault_class = driver::Behavior::Normal;
  driver::Attention striker_attention = driver::Attention::Cautious;
  Cause cause = Cause::Other;
};

struct RunFooter {
  double t_end = 0.0;
  std::uint32_t collisions = 0;
  std::uint32_t warnings = 0;
};

using EventRecord = std::variant<RunHeader, DriverRecord, CommsRecord, HeadwayRecord,
                                 WarningRecord, CollisionEvent, RunFooter>;
using EventLog = std::vector<EventRecord>;

}  // namespace vsafe::engine
