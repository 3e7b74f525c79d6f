#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "vsafe/common.hpp"
#include "vsafe/safety/threat_metrics.hpp"

namespace vsafe::safety {

enum class FcwKind { None = 0, Camp, NhtsaEarly, NhtsaIntermediate, NhtsaImminent };

inline constexpr std::array<FcwKind, 5> kAllFcwKinds = {
    FcwKind::None, FcwKind::Camp, FcwKind::NhtsaEarly, FcwKind::NhtsaIntermediate,
    FcwKind::NhtsaImminent};

inline std::string_view to_string(FcwKind k) {
  switch (k) {
    case FcwKind::None: return "none";
    case FcwKind::Camp: return "camp";
    case FcwKind::NhtsaEarly: return "nhtsa_early";
    case FcwKind::NhtsaIntermediate: return "nhtsa_intermediate";
    case FcwKind::NhtsaImminent: return "nhtsa_imminent";
  }
  return "?";
}

inline std::string_view display_name(FcwKind k) {
  switch (k) {
    case FcwKind::None: return "No Warning Algorithm";
    case FcwKind::Camp: return "CAMP Logistic Regression";
    case FcwKind::NhtsaEarly: return "NHTSA Early (0.32g)";
    case FcwKind::NhtsaIntermediate: return "NHTSA Intermediate (0.4g)";
    case FcwKind::NhtsaImminent: return "NHTSA Imminent (0.55g)";
  }
  return "?";
}

inline std::optional<FcwKind> parse_fcw_kind(std::string_view s) {
  for (auto k : kAllFcwKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Assumed host deceleration of the NHTSA driver-tuned levels [m/s^2].
inline double nhtsa_decel(FcwKind k) {
  switch (k) {
    case FcwKind::NhtsaEarly: return 0.32 * kGravity;
    case FcwKind::NhtsaIntermediate: return 0.40 * kGravity;
    case FcwKind::NhtsaImminent: return 0.55 * kGravity;
    default: return 0.40 * kGravity;
  }
}

/// Coefficients of the CAMP braking-onset threshold
///   threshold = c0 + c_host_speed * v_h' + c_closing * v_rel' + c_lead_moving * [lead moving]
/// in m/s^2, evaluated on the states projected over the assumed delay.
struct CampCoefficients {
  double c0 = 4.0;
  double c_host_speed = 0.0;
  double c_closing = 0.0877;
  double c_lead_moving = -0.785;
};

struct FcwConfig {
  FcwKind kind = FcwKind::None;
  double assumed_host_decel = 0.40 * kGravity;  ///< NHTSA a_w [m/s^2]
  double assumed_delay = 1.3;                   ///< t_d [s]
  double buffer = 2.0;                          ///< [m]
  double a_min = 0.5;    ///< lead decelerations below this count as steady [m/s^2]
  double v_stop = 0.5;   ///< speeds below this count as stopped [m/s]
  double refractory = 2.0;  ///< per (host, threat) event suppression [s]
  CampCoefficients camp;

  static FcwConfig for_kind(FcwKind k) {
    FcwConfig c;
    c.kind = k;
    c.assumed_host_decel = nhtsa_decel(k);
    return c;
  }

  void validate(const std::string& path = "/fcw") const {
    require(assumed_host_decel > 0.0, path + "/assumed_host_decel", "must be > 0");
    require(assumed_delay >= 0.0, path + "/assumed_delay", "must be >= 0");
    require(buffer >= 0.0, path + "/buffer", "must be >= 0");
    require(a_min >= 0.0, path + "/a_min", "must be >= 0");
    require(v_stop >= 0.0, path + "/v_stop", "must be >= 0");
    require(refractory >= 0.0, path + "/refractory", "must be >= 0");
  }
};

/// NHTSA critical warning range r_w [m]. Warn when the gap is at or below it.
inline double nhtsa_warning_range(double v_h, double v_l, double a_l, const FcwConfig& cfg) {
  const double a_w = cfg.assumed_host_decel;
  const double t_d = cfg.assumed_delay;
  const double v_rel = std::max(0.0, v_h - v_l);
  const double steady = v_rel * t_d + v_rel * v_rel / (2.0 * a_w) + cfg.buffer;
  const double host_stop = v_h * t_d + v_h * v_h / (2.0 * a_w) + cfg.buffer;
  if (v_l < cfg.v_stop) return host_stop;
  if (a_l < -cfg.a_min) {
    // Lead will stop: compare stopping points, but never fall below the
    // steady-closing range.
    return std::max(steady, host_stop - v_l * v_l / (2.0 * std::abs(a_l)));
  }
  return steady;
}

struct CampAssessment {
  double required_decel = 0.0;  ///< +inf when unavoidable
  double projected_gap = 0.0;
  double host_speed = 0.0;      ///< projected
  double closing_speed = 0.0;   ///< projected, >= 0
  bool lead_moving = false;
  bool unavoidable = false;
};

namespace detail {
// Distance covered in time t at constant acceleration, stopping at v = 0.
inline double travel(double v, double a, double t) {
  if (a < 0.0 && v + a * t < 0.0) return v * v / (2.0 * -a);
  return v * t + 0.5 * a * t * t;
}
}  // namespace detail

/// Minimal constant host deceleration that keeps the future gap non-negative,
/// after projecting both vehicles over the assumed delay t_d.
inline CampAssessment camp_required_decel(double gap, double v_h, double a_h, double v_l,
                                          double a_l, double t_d, double v_stop = 0.5) {
  CampAssessment r;
  const double vh = std::max(0.0, v_h + a_h * t_d);
  const double vl = std::max(0.0, v_l + a_l * t_d);
  const double g = gap + detail::travel(v_l, a_l, t_d) - detail::travel(v_h, a_h, t_d);
  r.projected_gap = g;
  r.host_speed = vh;
  r.closing_speed = std::max(0.0, vh - vl);
  r.lead_moving = vl >= v_stop;
  if (!(g > 0.0)) {
    r.unavoidable = true;
    r.required_decel = std::numeric_limits<double>::infinity();
    return r;
  }
  if (!r.lead_moving) {
    r.required_decel = vh * vh / (2.0 * g);
    return r;
  }
  if (a_l >= 0.0) {
    r.required_decel = r.closing_speed * r.closing_speed / (2.0 * g);
    return r;
  }
  // Lead braking at b: either the relative speed vanishes while both still
  // move, or the lead stops first and the host must stop behind it.
  const double b = -a_l;
  const double both_moving = b + r.closing_speed * r.closing_speed / (2.0 * g);
  const double t_match = r.closing_speed / (both_moving - b);
  if (r.closing_speed > 0.0 && t_match <= vl / b) {
    r.required_decel = both_moving;
    return r;
  }
  const double lead_stop = vl * vl / (2.0 * b);
  r.required_decel = std::min(both_moving, vh * vh / (2.0 * (g + lead_stop)));
  return r;
}

inline double camp_threshold(const CampCoefficients& c, const CampAssessment& a) {
  return c.c0 + c.c_host_speed * a.host_speed + c.c_closing * a.closing_speed +
         c.c_lead_moving * (a.lead_moving ? 1.0 : 0.0);
}

/// Tracked view of the threat ahead of the host.
struct ThreatView {
  double gap = 0.0;
  double host_vel = 0.0;
  double host_accel = 0.0;
  double lead_vel = 0.0;
  double lead_accel = 0.0;
  bool stale = false;
};

/// Whether the configured algorithm considers the situation a threat.
inline bool fcw_condition(const FcwConfig& cfg, const ThreatView& v) {
  if (cfg.kind == FcwKind::None) return false;
  if (v.host_vel < cfg.v_stop) return false;
  if (cfg.kind == FcwKind::Camp) {
    const auto a = camp_required_decel(v.gap, v.host_vel, v.host_accel, v.lead_vel, v.lead_accel,
                                       cfg.assumed_delay, cfg.v_stop);
    return a.unavoidable || a.required_decel >= camp_threshold(cfg.camp, a);
  }
  return v.gap <= nhtsa_warning_range(v.host_vel, v.lead_vel, v.lead_accel, cfg);
}

enum class WarningClass { Pending, Positive, False };

inline std::string_view to_string(WarningClass c) {
  switch (c) {
    case WarningClass::Pending: return "pending";
    case WarningClass::Positive: return "positive";
    case WarningClass::False: return "false";
  }
  return "?";
}

struct WarningEvent {
  double t = 0.0;
  std::uint32_t host = 0;
  std::uint32_t threat = 0;
  FcwKind algorithm = FcwKind::None;
  std::optional<double> ttc_at_warning;
  std::optional<double> headway_at_warning;
  ThreatView view;
  WarningClass classification = WarningClass::Pending;
};

struct FcwDecision {
  bool alert = false;
  std::optional<WarningEvent> event;
};

/// Runs one algorithm for every host and de-duplicates warning events per
/// (host, threat) pair within the refractory period.
class FcwMonitor {
public:
  explicit FcwMonitor(FcwConfig cfg) : cfg_(std::move(cfg)) {}

  const FcwConfig& config() const { return cfg_; }

  FcwDecision evaluate(std::uint32_t host, std::uint32_t threat, const ThreatView& view,
                       double t) {
    FcwDecision d;
    d.alert = fcw_condition(cfg_, view);
    if (!d.alert) return d;
    const std::uint64_t key = (std::uint64_t{host} << 32) | threat;
    auto it = last_event_.find(key);
    if (it != last_event_.end() && t - it->second < cfg_.refractory - 1e-9) return d;
    last_event_[key] = t;
    WarningEvent ev;
    ev.t = t;
    ev.host = host;
    ev.threat = threat;
    ev.algorithm = cfg_.kind;
    ev.ttc_at_warning = time_to_collision(view.gap, view.host_vel, view.lead_vel);
    ev.headway_at_warning = time_headway(view.gap, view.host_vel);
    ev.view = view;
    d.event = ev;
    return d;
  }

  void reset() { last_event_.clear(); }

private:
  FcwConfig cfg_;
  std::unordered_map<std::uint64_t, double> last_event_;
};

/// Single-shot form for one host and its tracked leader.
inline FcwDecision evaluate_fcw(FcwMonitor& monitor, std::uint32_t host, std::uint32_t threat,
                                const ThreatView& view, double t) {
  return monitor.evaluate(host, threat, view, t);
}

}  // namespace vsafe::safety
