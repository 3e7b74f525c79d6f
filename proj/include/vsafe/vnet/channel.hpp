#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vsafe/common.hpp"

namespace vsafe::vnet {

/// Basic safety message: the sender's kinematic snapshot.
struct Bsm {
  std::uint32_t sender = 0;
  double t = 0.0;
  double pos = 0.0;
  double vel = 0.0;
  double accel = 0.0;
};

struct ChannelConfig {
  double per = 0.3;       ///< packet error rate
  double tx_rate = 10.0;  ///< [Hz]

  void validate(const std::string& path = "/channel") const {
    require(per >= 0.0 && per <= 1.0, path + "/per", "must be in [0, 1]");
    require(tx_rate > 0.0, path + "/tx_rate", "must be > 0");
  }
};

/// Lossy single-hop broadcast. Every sender's message reaches every other
/// receiver independently with probability 1 - per; delivery is immediate.
/// `deliver(receiver_index, bsm)` is called for each surviving copy, in
/// sender-major order, which fixes the random stream consumption.
template <typename Rng, typename Deliver>
std::size_t broadcast_step(std::span<const Bsm> messages, const ChannelConfig& cfg, Rng& rng,
                           Deliver&& deliver) {
  std::bernoulli_distribution lost(cfg.per);
  std::size_t delivered = 0;
  for (std::size_t s = 0; s < messages.size(); ++s) {
    for (std::size_t r = 0; r < messages.size(); ++r) {
      if (r == s) continue;
      if (lost(rng)) continue;
      deliver(r, messages[s]);
      ++delivered;
    }
  }
  return delivered;
}

/// Convenience form: per-receiver inboxes.
template <typename Rng>
std::vector<std::vector<Bsm>> broadcast_step(std::span<const Bsm> messages,
                                             const ChannelConfig& cfg, Rng& rng) {
  std::vector<std::vector<Bsm>> inbox(messages.size());
  broadcast_step(messages, cfg, rng, [&](std::size_t r, const Bsm& m) { inbox[r].push_back(m); });
  return inbox;
}

}  // namespace vsafe::vnet
