#pragma once

#include <algorithm>
#include <optional>

#include "vsafe/vnet/channel.hpp"

namespace vsafe::vnet {

inline constexpr double kDefaultMaxAge = 1.0;

/// Latest message received from one remote vehicle.
struct Track {
  std::optional<Bsm> last;
  double last_rx = 0.0;
  bool stale = true;

  bool empty() const { return !last.has_value(); }
};

/// Older or duplicate messages are ignored.
inline Track track_update(Track track, const Bsm& bsm, double now,
                          double max_age = kDefaultMaxAge) {
  if (track.last && !(bsm.t > track.last->t)) {
    track.stale = now - track.last_rx > max_age;
    return track;
  }
  track.last = bsm;
  track.last_rx = now;
  track.stale = now - track.last_rx > max_age;
  return track;
}

struct Estimate {
  double pos = 0.0;  ///< unwrapped; callers wrap onto the ring
  double vel = 0.0;
  double accel = 0.0;
  bool stale = false;
};

/// Constant-acceleration dead reckoning from the last message. A decelerating
/// vehicle stops at v = 0 and stays there.
inline Estimate track_predict(const Track& track, double t, double max_age = kDefaultMaxAge) {
  const Bsm& m = *track.last;
  const double dt = std::max(0.0, t - m.t);
  Estimate e;
  e.accel = m.accel;
  e.stale = t - track.last_rx > max_age;
  if (m.accel < 0.0 && m.vel + m.accel * dt < 0.0) {
    const double t_stop = -m.vel / m.accel;
    e.pos = m.pos + m.vel * t_stop + 0.5 * m.accel * t_stop * t_stop;
    e.vel = 0.0;
    e.accel = 0.0;
    return e;
  }
  e.pos = m.pos + m.vel * dt + 0.5 * m.accel * dt * dt;
  e.vel = std::max(0.0, m.vel + m.accel * dt);
  return e;
}

}  // namespace vsafe::vnet
