#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vsafe/analysis/ngsim.hpp"
#include "vsafe/driver/fis.hpp"
#include "vsafe/engine/scenario.hpp"
#include "vsafe/io/config_json.hpp"
#include "vsafe/io/event_log.hpp"
#include "vsafe/io/report.hpp"

namespace vsafe::cli {

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kUsageError = 2 };

/// Bad flags, unreadable inputs and invalid configs all map to kUsageError.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

namespace detail {

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

template <typename F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

inline void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
}

}  // namespace detail

/// "1,5,9" is a seed list; a single bare number n means seeds 1..n.
inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::uint64_t v = 0;
    const auto* b = tok.data();
    auto [p, ec] = std::from_chars(b, b + tok.size(), v);
    if (ec != std::errc() || p != b + tok.size() || tok.empty())
      throw UsageError("bad --seeds value '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty --seeds");
  if (out.size() == 1 && s.find(',') == std::string::npos) {
    if (out[0] == 0) throw UsageError("--seeds count must be >= 1");
    return engine::seed_range(out[0]);
  }
  return out;
}

inline std::string log_name(safety::FcwKind k, std::uint64_t seed) {
  return std::string(safety::to_string(k)) + "_seed" + std::to_string(seed) + ".ndjson";
}

/// report.json, table.txt and the three figure CSVs.
inline void write_reports(const std::vector<engine::AggregateReport>& all, const fs::path& dir) {
  fs::create_directories(dir);
  detail::write_file(dir / "report.json", io::to_json(all).dump(2) + "\n");
  detail::write_file(dir / "table.txt", detail::render([&](auto& o) { io::write_table(o, all); }));
  detail::write_file(dir / "headway_density.csv",
                     detail::render([&](auto& o) { io::write_headway_csv(o, all); }));
  detail::write_file(dir / "headway_at_warning_ecdf.csv",
                     detail::render([&](auto& o) { io::write_headway_at_warning_ecdf(o, all); }));
  detail::write_file(dir / "ttc_at_warning_ecdf.csv",
                     detail::render([&](auto& o) { io::write_ttc_ecdf(o, all); }));
}

/// The scenario with its warning algorithm replaced by `kind`; the NHTSA
/// assumed host deceleration follows the variant.
inline engine::ScenarioConfig with_algorithm(engine::ScenarioConfig cfg, safety::FcwKind kind) {
  if (kind != cfg.fcw.kind) {
    cfg.fcw.kind = kind;
    cfg.fcw.assumed_host_decel = safety::nhtsa_decel(kind);
  }
  return cfg;
}

struct SimulateOptions {
  std::string config;
  std::string seeds;  ///< empty: from the config
  std::string out = "out";
  bool write_logs = true;
};

inline int cmd_simulate(const SimulateOptions& o, std::ostream& log = std::cerr) {
  detail::require_file(o.config);
  auto exp = io::load_experiment(o.config);
  std::vector<std::uint64_t> seeds = !o.seeds.empty() ? parse_seeds(o.seeds)
                                     : !exp.seeds.empty() ? exp.seeds
                                                          : std::vector<std::uint64_t>{exp.scenario.seed};
  const fs::path out(o.out);
  fs::create_directories(out / "logs");
  std::vector<engine::AggregateReport> all;
  for (auto kind : exp.algorithms()) {
    const auto cfg = with_algorithm(exp.scenario, kind);
    const auto hash = io::config_hash(cfg);
    std::vector<engine::MetricsReport> reports;
    auto runs = engine::run_seeds(cfg, seeds, hash, [&](const engine::RunResult& r) {
      log << safety::to_string(kind) << " seed " << r.report.header.seed << ": "
          << r.report.total_collisions() << " collisions, " << r.report.total_warnings()
          << " warnings\n";
    });
    for (auto& r : runs) {
      if (o.write_logs)
        io::save_event_log(r.log, (out / "logs" / log_name(kind, r.report.header.seed)).string());
      reports.push_back(std::move(r.report));
    }
    all.push_back(engine::aggregate_runs(std::move(reports)));
  }
  write_reports(all, out);
  std::cout << detail::render([&](auto& s) { io::write_table(s, all); });
  return kOk;
}

/// Rebuild reports from event logs; a directory argument contributes every
/// *.ndjson file in it (sorted by name).
inline int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".ndjson") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      detail::require_file(in);
      files.push_back(in);
    }
  }
  if (files.empty()) throw UsageError("no event logs found");
  std::vector<engine::MetricsReport> reports;
  for (const auto& f : files) reports.push_back(engine::aggregate_log(io::load_event_log(f)));
  const auto all = io::aggregate_by_algorithm(std::move(reports));
  write_reports(all, out);
  std::cout << detail::render([&](auto& s) { io::write_table(s, all); });
  return kOk;
}

/// FIS transfer curve as CSV: x,y.
inline int cmd_fis_curve(const std::string& config, const std::string& out, int points) {
  driver::FisConfig fis = driver::FisConfig::defaults();
  if (!config.empty()) {
    detail::require_file(config);
    fis = io::load_experiment(config).scenario.driver.fis;
  }
  if (points < 2) throw UsageError("--points must be >= 2");
  std::ostringstream s;
  s.precision(10);
  s << "x,y\n";
  for (int i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * i / (points - 1);
    s << x << ',' << driver::fis_evaluate(fis, x) << '\n';
  }
  if (out.empty() || out == "-") std::cout << s.str();
  else detail::write_file(out, s.str());
  return kOk;
}

struct ValidateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool inject_nondeterminism = false;
};

/// Run the scenario twice and compare the serialized logs line by line.
inline int cmd_validate(const ValidateOptions& o, std::ostream& msg = std::cout) {
  detail::require_file(o.config);
  auto cfg = io::load_experiment(o.config).scenario;
  if (o.seed) cfg.seed = *o.seed;
  const auto hash = io::config_hash(cfg);
  const auto a = io::event_log_string(engine::run_scenario(cfg, hash).log);
  if (o.inject_nondeterminism) cfg.nondeterminism_salt = 0x5eed;
  const auto b = io::event_log_string(engine::run_scenario(cfg, hash).log);
  if (a == b) {
    msg << "deterministic: " << std::count(a.begin(), a.end(), '\n') << " identical records\n";
    return kOk;
  }
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  std::size_t line = 0;
  while (true) {
    ++line;
    const bool ga = static_cast<bool>(std::getline(sa, la));
    const bool gb = static_cast<bool>(std::getline(sb, lb));
    if (!ga || !gb || la != lb) {
      msg << "MISMATCH at record " << line << "\n  run 1: " << (ga ? la : "<end>")
          << "\n  run 2: " << (gb ? lb : "<end>") << '\n';
      break;
    }
  }
  return kAssertionFailed;
}

struct AnalyzeOptions {
  std::string input;
  std::string out = "population.json";
  std::string figures;  ///< optional directory for histogram CSVs
  bool pooled = false;
};

inline int cmd_analyze(const AnalyzeOptions& o, std::ostream& msg = std::cout) {
  detail::require_file(o.input);
  auto tracks = analysis::load_trajectories(o.input);
  analysis::AnalysisOptions opt;
  opt.pooled_fit = o.pooled;
  const auto res = analysis::analyze(tracks, opt);
  io::save_population(res.spec, o.out);
  if (!o.figures.empty()) {
    fs::create_directories(o.figures);
    detail::write_file(fs::path(o.figures) / "headway_histogram.csv", detail::render([&](auto& s) {
                         analysis::write_headway_histogram(s, res.drivers);
                       }));
    analysis::smooth_tracks(tracks, opt.smooth_window);
    detail::write_file(fs::path(o.figures) / "accel_ecdf.csv", detail::render([&](auto& s) {
                         analysis::write_accel_ecdf(s, tracks, res.drivers, opt.thresholds);
                       }));
  }
  msg << "vehicles: " << res.vehicles << ", drivers with valid headway: " << res.drivers.size()
      << '\n'
      << "gamma fit: shape " << res.fit.shape << ", scale " << res.fit.scale << " s (mode "
      << res.fit.mode() << " s)\n";
  if (res.fit.capped) msg << "warning: " << res.fit.diagnostic << '\n';
  for (auto b : driver::kBehaviors) {
    const auto c = static_cast<std::size_t>(b);
    msg << "  " << driver::to_string(b) << ": ratio " << res.spec.class_ratios[c] << " (observed "
        << res.empirical_ratios[c] << "), accel [" << res.spec.accel[c].lo << ", "
        << res.spec.accel[c].hi << "], decel [" << res.spec.decel[c].lo << ", "
        << res.spec.decel[c].hi << "]\n";
  }
  for (const auto& w : res.ranges.warnings) msg << "warning: " << w << '\n';
  msg << "wrote " << o.out << '\n';
  return kOk;
}

}  // namespace vsafe::cli
