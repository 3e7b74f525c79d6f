#pragma once

#include <optional>

namespace vsafe::safety {

/// Time to reach a stationary leader; undefined unless the host moves.
inline std::optional<double> time_headway(double gap, double v) {
  if (!(v > 0.0)) return std::nullopt;
  return gap / v;
}

/// Net gap over closing speed; undefined unless the host is closing in.
inline std::optional<double> time_to_collision(double gap, double v_host, double v_lead) {
  const double closing = v_host - v_lead;
  if (!(closing > 0.0)) return std::nullopt;
  return gap / closing;
}

}  // namespace vsafe::safety
