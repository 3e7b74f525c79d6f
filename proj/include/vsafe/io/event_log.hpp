#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vsafe/engine/events.hpp"
#include "vsafe/io/json_reader.hpp"

namespace vsafe::io {

namespace detail {

template <typename E, std::size_t N>
E enum_from(const json& v, const std::array<E, N>& all, const std::string& what) {
  const auto s = v.get<std::string>();
  for (auto e : all)
    if (to_string(e) == s) return e;
  throw std::runtime_error("event log: unknown " + what + " '" + s + "'");
}

inline json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline std::optional<double> opt_from(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

inline constexpr std::array<driver::Attention, 2> kAttentions = {driver::Attention::Cautious,
                                                                 driver::Attention::Distracted};
inline constexpr std::array<safety::WarningClass, 3> kWarningClasses = {
    safety::WarningClass::Pending, safety::WarningClass::Positive, safety::WarningClass::False};

}  // namespace detail

inline json record_to_json(const engine::EventRecord& rec) {
  using namespace engine;
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, RunHeader>) {
          return {{"type", "header"},
                  {"seed", e.seed},
                  {"algorithm", std::string(safety::to_string(e.algorithm))},
                  {"config_hash", e.config_hash},
                  {"n_vehicles", e.n_vehicles},
                  {"duration", e.duration},
                  {"warmup", e.warmup},
                  {"headway_bin", e.headway_bin},
                  {"headway_max", e.headway_max}};
        } else if constexpr (std::is_same_v<T, DriverRecord>) {
          return {{"type", "driver"},
                  {"id", e.id},
                  {"class", std::string(driver::to_string(e.behavior))},
                  {"attention", std::string(driver::to_string(e.attention))},
                  {"tau_h", e.tau_h},
                  {"alpha", e.alpha},
                  {"beta_c", e.beta_c}};
        } else if constexpr (std::is_same_v<T, CommsRecord>) {
          return {{"type", "comms"}, {"t", e.t}, {"sent", e.sent}, {"delivered", e.delivered}};
        } else if constexpr (std::is_same_v<T, HeadwayRecord>) {
          json ids = json::array(), taus = json::array();
          for (const auto& [id, tau] : e.samples) {
            ids.push_back(id);
            taus.push_back(tau);
          }
          return {{"type", "headway"}, {"t", e.t}, {"ids", ids}, {"tau", taus}};
        } else if constexpr (std::is_same_v<T, WarningRecord>) {
          const auto& w = e.event;
          return {{"type", "warning"},
                  {"t", w.t},
                  {"host", w.host},
                  {"threat", w.threat},
                  {"algorithm", std::string(safety::to_string(w.algorithm))},
                  {"ttc", detail::opt(w.ttc_at_warning)},
                  {"headway", detail::opt(w.headway_at_warning)},
                  {"view",
                   {w.view.gap, w.view.host_vel, w.view.host_accel, w.view.lead_vel,
                    w.view.lead_accel, w.view.stale}},
                  {"classification", std::string(safety::to_string(w.classification))},
                  {"host_class", std::string(driver::to_string(e.host_class))},
                  {"min_ttc", detail::opt(e.min_ttc)}};
        } else if constexpr (std::is_same_v<T, CollisionEvent>) {
          return {{"type", "collision"},
                  {"t", e.t},
                  {"striker", e.striker},
                  {"struck", e.struck},
                  {"fault_class", std::string(driver::to_string(e.fault_class))},
                  {"attention", std::string(driver::to_string(e.striker_attention))},
                  {"cause", std::string(to_string(e.cause))}};
        } else {
          return {{"type", "footer"},
                  {"t_end", e.t_end},
                  {"collisions", e.collisions},
                  {"warnings", e.warnings}};
        }
      },
      rec);
}

inline engine::EventRecord record_from_json(const json& j) {
  using namespace engine;
  using detail::enum_from;
  const auto type = j.at("type").get<std::string>();
  if (type == "header") {
    RunHeader h;
    h.seed = j.at("seed").get<std::uint64_t>();
    h.algorithm = enum_from(j.at("algorithm"), safety::kAllFcwKinds, "algorithm");
    h.config_hash = j.at("config_hash").get<std::string>();
    h.n_vehicles = j.at("n_vehicles").get<int>();
    h.duration = j.at("duration").get<double>();
    h.warmup = j.at("warmup").get<double>();
    h.headway_bin = j.at("headway_bin").get<double>();
    h.headway_max = j.at("headway_max").get<double>();
    return h;
  }
  if (type == "driver") {
    DriverRecord d;
    d.id = j.at("id").get<std::uint32_t>();
    d.behavior = enum_from(j.at("class"), driver::kBehaviors, "class");
    d.attention = enum_from(j.at("attention"), detail::kAttentions, "attention");
    d.tau_h = j.at("tau_h").get<double>();
    d.alpha = j.at("alpha").get<double>();
    d.beta_c = j.at("beta_c").get<double>();
    return d;
  }
  if (type == "comms")
    return CommsRecord{j.at("t").get<double>(), j.at("sent").get<std::uint32_t>(),
                       j.at("delivered").get<std::uint32_t>()};
  if (type == "headway") {
    HeadwayRecord h;
    h.t = j.at("t").get<double>();
    const auto& ids = j.at("ids");
    const auto& taus = j.at("tau");
    if (ids.size() != taus.size()) throw std::runtime_error("event log: headway ids/tau mismatch");
    for (std::size_t i = 0; i < ids.size(); ++i)
      h.samples.emplace_back(ids[i].get<std::uint32_t>(), taus[i].get<double>());
    return h;
  }
  if (type == "warning") {
    WarningRecord w;
    auto& e = w.event;
    e.t = j.at("t").get<double>();
    e.host = j.at("host").get<std::uint32_t>();
    e.threat = j.at("threat").get<std::uint32_t>();
    e.algorithm = enum_from(j.at("algorithm"), safety::kAllFcwKinds, "algorithm");
    e.ttc_at_warning = detail::opt_from(j.at("ttc"));
    e.headway_at_warning = detail::opt_from(j.at("headway"));
    const auto& v = j.at("view");
    e.view = {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>(),
              v.at(3).get<double>(), v.at(4).get<double>(), v.at(5).get<bool>()};
    e.classification = enum_from(j.at("classification"), detail::kWarningClasses, "classification");
    w.host_class = enum_from(j.at("host_class"), driver::kBehaviors, "class");
    w.min_ttc = detail::opt_from(j.at("min_ttc"));
    return w;
  }
  if (type == "collision") {
    CollisionEvent c;
    c.t = j.at("t").get<double>();
    c.striker = j.at("striker").get<std::uint32_t>();
    c.struck = j.at("struck").get<std::uint32_t>();
    c.fault_class = enum_from(j.at("fault_class"), driver::kBehaviors, "class");
    c.striker_attention = enum_from(j.at("attention"), detail::kAttentions, "attention");
    c.cause = enum_from(j.at("cause"), engine::kCauses, "cause");
    return c;
  }
  if (type == "footer")
    return RunFooter{j.at("t_end").get<double>(), j.at("collisions").get<std::uint32_t>(),
                     j.at("warnings").get<std::uint32_t>()};
  throw std::runtime_error("event log: unknown record type '" + type + "'");
}

/// One JSON object per line. Doubles are printed round-trip exact, so a log
/// read back folds into the same report as the live run.
inline void write_event_log(std::ostream& out, const engine::EventLog& log) {
  for (const auto& rec : log) out << record_to_json(rec).dump() << '\n';
}

inline std::string event_log_string(const engine::EventLog& log) {
  std::ostringstream s;
  write_event_log(s, log);
  return s.str();
}

inline engine::EventLog read_event_log(std::istream& in, const std::string& name = "<stream>") {
  engine::EventLog log;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      log.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(name + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return log;
}

inline engine::EventLog load_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_event_log(in, path);
}

inline void save_event_log(const engine::EventLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_event_log(out, log);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace vsafe::io
