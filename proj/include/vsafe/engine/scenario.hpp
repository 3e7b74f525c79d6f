#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vsafe/engine/metrics.hpp"
#include "vsafe/engine/world.hpp"

namespace vsafe::engine {

struct RunResult {
  MetricsReport report;
  EventLog log;
};

/// Run one scenario to completion. `config_hash` is copied into the header
/// so a log can be matched to the config that produced it.
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::string& config_hash = {}) {
  World w = init_scenario(cfg);
  w.log.emplace_back(RunHeader{cfg.seed, cfg.fcw.kind, config_hash, cfg.n_vehicles, cfg.duration,
                               cfg.warmup, cfg.headway_bin, cfg.headway_max});
  for (const auto& v : w.vehicles)
    w.log.emplace_back(DriverRecord{v.id, v.profile.behavior, v.profile.attention,
                                    v.profile.idm.tau_h, v.profile.idm.alpha,
                                    v.profile.idm.beta_c});
  const auto steps = std::llround(cfg.duration / cfg.dt_physics);
  while (w.k < steps) step(w);
  flush_pending(w);
  w.log.emplace_back(RunFooter{w.t(), w.collisions, w.warnings});
  RunResult r;
  r.report = aggregate_log(w.log);
  r.log = std::move(w.log);
  return r;
}

/// Worker count: VSAFE_THREADS if set, else hardware concurrency.
inline unsigned worker_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VSAFE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Run `cfg` once per seed. Results come back in seed order regardless of
/// scheduling; each run is independent, so the outcome does not depend on
/// the thread count. `on_done` (if given) receives each finished run.
template <typename OnDone>
std::vector<RunResult> run_seeds(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                 const std::string& config_hash, OnDone&& on_done) {
  std::vector<RunResult> out(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        auto c = cfg;
        c.seed = seeds[i];
        out[i] = run_scenario(c, config_hash);
        std::lock_guard lock(mu);
        on_done(out[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n = worker_threads(seeds.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::vector<RunResult> run_seeds(const ScenarioConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::string& config_hash = {}) {
  return run_seeds(cfg, seeds, config_hash, [](const RunResult&) {});
}

inline AggregateReport replicate(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                 const std::string& config_hash = {}) {
  std::vector<MetricsReport> reports;
  for (auto& r : run_seeds(cfg, seeds, config_hash)) reports.push_back(std::move(r.report));
  return aggregate_runs(std::move(reports));
}

/// Seeds 1..n.
inline std::vector<std::uint64_t> seed_range(std::size_t n, std::uint64_t first = 1) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = first + i;
  return s;
}

}  // namespace vsafe::engine
