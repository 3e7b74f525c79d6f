#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vsafe/engine/config.hpp"
#include "vsafe/io/json_reader.hpp"

namespace vsafe::io {

// ---- population ----------------------------------------------------------

inline json to_json(const PopulationSpec& p) {
  json j;
  j["gamma_shape"] = p.gamma_shape;
  j["gamma_scale"] = p.gamma_scale;
  j["thresholds"] = {p.thresholds.aggressive_below, p.thresholds.conservative_above};
  for (auto b : driver::kBehaviors) {
    const auto c = static_cast<std::size_t>(b);
    const std::string name(driver::to_string(b));
    j["class_ratios"][name] = p.class_ratios[c];
    j["accel"][name] = {p.accel[c].lo, p.accel[c].hi};
    j["decel"][name] = {p.decel[c].lo, p.decel[c].hi};
  }
  return j;
}

inline PopulationSpec population_from_json(const json& j, const std::string& path = "/population") {
  PopulationSpec p;
  ObjectReader r(j, path);
  r.read("gamma_shape", p.gamma_shape);
  r.read("gamma_scale", p.gamma_scale);
  if (r.has("thresholds")) {
    auto [lo, hi] = read_pair(r.at("thresholds"), r.path("thresholds"));
    p.thresholds = {lo, hi};
  }
  auto per_class = [&](const std::string& key, auto&& assign) {
    r.object(key, [&](ObjectReader& sub) {
      for (auto b : driver::kBehaviors) {
        const std::string name(driver::to_string(b));
        if (sub.has(name)) assign(static_cast<std::size_t>(b), sub.at(name), sub.path(name));
      }
    });
  };
  per_class("class_ratios", [&](std::size_t c, const json& v, const std::string& at) {
    require(v.is_number(), at, "expected a number");
    p.class_ratios[c] = v.get<double>();
  });
  per_class("accel", [&](std::size_t c, const json& v, const std::string& at) {
    auto [lo, hi] = read_pair(v, at);
    p.accel[c] = {lo, hi};
  });
  per_class("decel", [&](std::size_t c, const json& v, const std::string& at) {
    auto [lo, hi] = read_pair(v, at);
    p.decel[c] = {lo, hi};
  });
  r.finish();
  p.validate(path);
  return p;
}

// ---- driver template -----------------------------------------------------

inline json to_json(const driver::TriangularMf& m) {
  return {{"label", m.label}, {"center", m.center}, {"left", m.left}, {"right", m.right}};
}

inline json to_json(const driver::FisConfig& f) {
  json j;
  for (const auto& m : f.input_mfs) j["input_mfs"].push_back(to_json(m));
  for (const auto& m : f.output_mfs) j["output_mfs"].push_back(to_json(m));
  j["rules"] = f.rules;
  j["norm_scale"] = f.norm_scale;
  return j;
}

inline driver::FisConfig fis_from_json(const json& j, const std::string& path) {
  auto f = driver::FisConfig::defaults();
  ObjectReader r(j, path);
  auto mfs = [&](const std::string& key, std::array<driver::TriangularMf, 7>& out) {
    if (!r.has(key)) return;
    const auto& arr = r.at(key);
    require(arr.is_array() && arr.size() == 7, r.path(key), "expected 7 membership functions");
    for (std::size_t i = 0; i < 7; ++i) {
      ObjectReader m(arr[i], r.path(key) + "/" + std::to_string(i));
      m.read("label", out[i].label);
      m.read("center", out[i].center);
      m.read("left", out[i].left);
      m.read("right", out[i].right);
      m.finish();
    }
  };
  mfs("input_mfs", f.input_mfs);
  mfs("output_mfs", f.output_mfs);
  if (r.has("rules")) {
    const auto& arr = r.at("rules");
    require(arr.is_array() && arr.size() == 7, r.path("rules"), "expected 7 rule entries");
    for (std::size_t i = 0; i < 7; ++i) {
      require(arr[i].is_number_integer(), r.path("rules") + "/" + std::to_string(i),
              "expected an integer");
      f.rules[i] = arr[i].get<int>();
    }
  }
  r.read("norm_scale", f.norm_scale);
  r.finish();
  f.validate(path);
  return f;
}

inline json to_json(const driver::DriverProfile& d) {
  return {{"v0", d.idm.v0},
          {"delta", d.idm.delta},
          {"s0", d.idm.s0},
          {"fis", to_json(d.fis)},
          {"pd", {{"kp", d.pd.kp}, {"kd", d.pd.kd}}},
          {"reaction_time", d.reaction_time},
          {"pedal_switch_time", d.pedal_switch_time},
          {"filter_window", d.filter_window},
          {"vision_range", d.vision_range}};
}

inline driver::DriverProfile driver_from_json(const json& j, const std::string& path) {
  driver::DriverProfile d;
  ObjectReader r(j, path);
  r.read("v0", d.idm.v0);
  r.read("delta", d.idm.delta);
  r.read("s0", d.idm.s0);
  if (r.has("fis")) d.fis = fis_from_json(r.at("fis"), r.path("fis"));
  r.object("pd", [&](ObjectReader& s) {
    s.read("kp", d.pd.kp);
    s.read("kd", d.pd.kd);
  });
  r.read("reaction_time", d.reaction_time);
  r.read("pedal_switch_time", d.pedal_switch_time);
  r.read("filter_window", d.filter_window);
  r.read("vision_range", d.vision_range);
  r.finish();
  return d;
}

// ---- fcw -----------------------------------------------------------------

inline json to_json(const safety::FcwConfig& f) {
  return {{"kind", std::string(safety::to_string(f.kind))},
          {"assumed_host_decel", f.assumed_host_decel},
          {"assumed_delay", f.assumed_delay},
          {"buffer", f.buffer},
          {"a_min", f.a_min},
          {"v_stop", f.v_stop},
          {"refractory", f.refractory},
          {"camp_coeffs",
           {{"c0", f.camp.c0},
            {"host_speed", f.camp.c_host_speed},
            {"closing_speed", f.camp.c_closing},
            {"lead_moving", f.camp.c_lead_moving}}}};
}

inline safety::FcwKind kind_from_json(const json& v, const std::string& path) {
  require(v.is_string(), path, "expected an algorithm name");
  auto k = safety::parse_fcw_kind(v.get<std::string>());
  require(k.has_value(), path,
          "unknown algorithm (none, camp, nhtsa_early, nhtsa_intermediate, nhtsa_imminent)");
  return *k;
}

inline safety::FcwConfig fcw_from_json(const json& j, const std::string& path = "/fcw") {
  ObjectReader r(j, path);
  safety::FcwConfig f;
  if (r.has("kind")) f = safety::FcwConfig::for_kind(kind_from_json(r.at("kind"), r.path("kind")));
  r.read("assumed_host_decel", f.assumed_host_decel);
  r.read("assumed_delay", f.assumed_delay);
  r.read("buffer", f.buffer);
  r.read("a_min", f.a_min);
  r.read("v_stop", f.v_stop);
  r.read("refractory", f.refractory);
  r.object("camp_coeffs", [&](ObjectReader& s) {
    s.read("c0", f.camp.c0);
    s.read("host_speed", f.camp.c_host_speed);
    s.read("closing_speed", f.camp.c_closing);
    s.read("lead_moving", f.camp.c_lead_moving);
  });
  r.finish();
  f.validate(path);
  return f;
}

// ---- scenario ------------------------------------------------------------

inline json to_json(const engine::ScenarioConfig& c) {
  json j;
  j["duration"] = c.duration;
  j["warmup"] = c.warmup;
  j["n_vehicles"] = c.n_vehicles;
  j["track_length"] = c.track_length;
  j["dt_physics"] = c.dt_physics;
  j["dt_safety"] = c.dt_safety;
  j["seed"] = c.seed;
  j["channel"] = {{"per", c.channel.per}, {"tx_rate", c.channel.tx_rate}};
  j["max_track_age"] = c.max_track_age;
  j["fcw"] = to_json(c.fcw);
  j["population"] = to_json(c.population);
  j["p_distracted"] = c.p_distracted;
  j["distraction"] = {{"mean_between", c.distraction.mean_between},
                      {"min_duration", c.distraction.min_duration},
                      {"max_duration", c.distraction.max_duration}};
  j["driver"] = to_json(c.driver);
  j["vehicle"] = {{"length", c.vehicle.length},
                  {"max_accel", c.vehicle.max_accel},
                  {"max_brake_decel", c.vehicle.max_brake_decel},
                  {"actuator_tau", c.vehicle.actuator_tau}};
  j["emergency_reaction"] = c.emergency_reaction;
  j["emergency_hold"] = c.emergency_hold;
  j["block_range"] = {c.block_range.lo, c.block_range.hi};
  j["fault_window"] = c.fault_window;
  j["warning_window"] = c.warning_window;
  j["ttc_near"] = c.ttc_near;
  j["init_jitter"] = c.init_jitter;
  j["headway"] = {{"interval", c.headway_interval},
                  {"v_min", c.headway_v_min},
                  {"bin", c.headway_bin},
                  {"max", c.headway_max}};
  j["log_comms"] = c.log_comms;
  return j;
}

/// Scenario config reader. Keys consumed by the caller (experiment-level
/// fields) are passed in `extra` so they are not reported as unknown.
inline engine::ScenarioConfig scenario_from_json(const json& j,
                                                 const std::vector<std::string>& extra = {}) {
  engine::ScenarioConfig c;
  ObjectReader r(j, "");
  for (const auto& k : extra)
    if (r.has(k)) r.at(k);
  r.read("duration", c.duration);
  r.read("warmup", c.warmup);
  r.read("n_vehicles", c.n_vehicles);
  r.read("track_length", c.track_length);
  r.read("dt_physics", c.dt_physics);
  r.read("dt_safety", c.dt_safety);
  r.read("seed", c.seed);
  r.object("channel", [&](ObjectReader& s) {
    s.read("per", c.channel.per);
    s.read("tx_rate", c.channel.tx_rate);
  });
  r.read("max_track_age", c.max_track_age);
  if (r.has("fcw")) c.fcw = fcw_from_json(r.at("fcw"), "/fcw");
  if (r.has("population")) c.population = population_from_json(r.at("population"), "/population");
  r.read("p_distracted", c.p_distracted);
  r.object("distraction", [&](ObjectReader& s) {
    s.read("mean_between", c.distraction.mean_between);
    s.read("min_duration", c.distraction.min_duration);
    s.read("max_duration", c.distraction.max_duration);
  });
  if (r.has("driver")) c.driver = driver_from_json(r.at("driver"), "/driver");
  r.object("vehicle", [&](ObjectReader& s) {
    s.read("length", c.vehicle.length);
    s.read("max_accel", c.vehicle.max_accel);
    s.read("max_brake_decel", c.vehicle.max_brake_decel);
    s.read("actuator_tau", c.vehicle.actuator_tau);
  });
  r.read("emergency_reaction", c.emergency_reaction);
  r.read("emergency_hold", c.emergency_hold);
  if (r.has("block_range")) {
    auto [lo, hi] = read_pair(r.at("block_range"), "/block_range");
    c.block_range = {lo, hi};
  }
  r.read("fault_window", c.fault_window);
  r.read("warning_window", c.warning_window);
  r.read("ttc_near", c.ttc_near);
  r.read("init_jitter", c.init_jitter);
  r.object("headway", [&](ObjectReader& s) {
    s.read("interval", c.headway_interval);
    s.read("v_min", c.headway_v_min);
    s.read("bin", c.headway_bin);
    s.read("max", c.headway_max);
  });
  r.read("log_comms", c.log_comms);
  r.finish();
  c.validate();
  return c;
}

/// A scenario plus the experiment around it: which algorithms to sweep and
/// which seeds to replicate over.
struct Experiment {
  engine::ScenarioConfig scenario;
  std::vector<safety::FcwKind> sweep;  ///< empty: the scenario's own fcw.kind
  std::vector<std::uint64_t> seeds;    ///< empty: the scenario's own seed

  std::vector<safety::FcwKind> algorithms() const {
    return sweep.empty() ? std::vector<safety::FcwKind>{scenario.fcw.kind} : sweep;
  }
};

inline Experiment experiment_from_json(const json& j) {
  Experiment e;
  e.scenario = scenario_from_json(j, {"sweep", "seeds", "description"});
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    require(s.is_array(), "/sweep", "expected an array of algorithm names");
    for (std::size_t i = 0; i < s.size(); ++i)
      e.sweep.push_back(kind_from_json(s[i], "/sweep/" + std::to_string(i)));
  }
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    require(s.is_array(), "/seeds", "expected an array of seeds");
    for (std::size_t i = 0; i < s.size(); ++i) {
      require(s[i].is_number_unsigned(), "/seeds/" + std::to_string(i),
              "expected a non-negative integer");
      e.seeds.push_back(s[i].get<std::uint64_t>());
    }
  }
  if (j.contains("description"))
    require(j.at("description").is_string(), "/description", "expected a string");
  return e;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

inline Experiment load_experiment(const std::string& path) {
  return experiment_from_json(read_json_file(path));
}

inline PopulationSpec load_population(const std::string& path) {
  return population_from_json(read_json_file(path), "");
}

inline void save_population(const PopulationSpec& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(p).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// FNV-1a over the canonical JSON serialization.
inline std::string config_hash(const engine::ScenarioConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xF];
  return s;
}

}  // namespace vsafe::io
