#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "vsafe/engine/metrics.hpp"
#include "vsafe/io/json_reader.hpp"

namespace vsafe::io {

namespace detail {

inline json stat_json(const engine::Stat& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

inline json histogram_json(const engine::Histogram& h) {
  return {{"bin_width", h.bin_width}, {"max", h.max}, {"counts", h.counts}, {"overflow", h.overflow}};
}

inline std::string fixed(double x, int prec = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

}  // namespace detail

inline json to_json(const engine::MetricsReport& r) {
  json j;
  j["seed"] = r.header.seed;
  j["algorithm"] = std::string(safety::to_string(r.header.algorithm));
  j["config_hash"] = r.header.config_hash;
  for (auto b : driver::kBehaviors) {
    const auto c = static_cast<std::size_t>(b);
    const std::string name(driver::to_string(b));
    j["drivers"][name] = {{"cautious", r.drivers[c][0]}, {"distracted", r.drivers[c][1]}};
    json causes;
    for (auto k : engine::kCauses)
      causes[std::string(engine::to_string(k))] = r.collisions[c].by_cause[static_cast<std::size_t>(k)];
    j["collisions"][name] = {{"total", r.collisions[c].total}, {"by_cause", causes}};
    j["warnings"][name] = {{"total", r.warnings[c].total},
                           {"positive", r.warnings[c].positive},
                           {"ratio", r.warnings[c].ratio()}};
  }
  j["total_collisions"] = r.total_collisions();
  j["total_warnings"] = r.total_warnings();
  j["headway"] = detail::histogram_json(r.headway);
  j["headway_samples"] = r.headway.total();
  j["bsm"] = {{"sent", r.bsm_sent}, {"delivered", r.bsm_delivered}};
  return j;
}

inline json to_json(const engine::AggregateReport& a) {
  json j;
  j["algorithm"] = std::string(safety::to_string(a.algorithm));
  j["seeds"] = a.seeds;
  j["total_collisions"] = detail::stat_json(a.total_collisions);
  for (auto b : driver::kBehaviors) {
    const auto c = static_cast<std::size_t>(b);
    const std::string name(driver::to_string(b));
    json causes;
    for (auto k : engine::kCauses)
      causes[std::string(engine::to_string(k))] =
          detail::stat_json(a.causes[c][static_cast<std::size_t>(k)]);
    j["collisions"][name] = {{"total", detail::stat_json(a.collisions[c])}, {"by_cause", causes}};
    j["warnings"][name] = {{"total", detail::stat_json(a.warnings[c])},
                           {"positive", detail::stat_json(a.positives[c])},
                           {"ratio", a.positive_ratio[c]}};
  }
  j["headway"] = detail::histogram_json(a.headway);
  j["headway_mode_lo"] = a.headway.total() ? json(a.headway.mode_lo()) : json(nullptr);
  auto pct = [](const std::vector<double>& xs) -> json {
    if (xs.empty()) return nullptr;
    return {{"p50", engine::percentile(xs, 0.5)}, {"p90", engine::percentile(xs, 0.9)},
            {"n", xs.size()}};
  };
  j["ttc_at_warning"] = pct(a.ttc_at_warning);
  j["headway_at_warning"] = pct(a.headway_at_warning);
  json runs = json::array();
  for (const auto& r : a.runs) runs.push_back(to_json(r));
  j["runs"] = runs;
  return j;
}

inline json to_json(const std::vector<engine::AggregateReport>& all) {
  json j = json::array();
  for (const auto& a : all) j.push_back(to_json(a));
  return j;
}

/// Crash and warning statistics, one row per algorithm and one column group
/// per behavior class. Cells are means over seeds.
inline void write_table(std::ostream& out, const std::vector<engine::AggregateReport>& all) {
  const std::vector<std::string> cols = {"Total", "Distr.", "LeadHB", "Pileup", "Other",
                                         "Warn",  "Pos.",   "Ratio"};
  std::size_t name_w = 10;
  for (const auto& a : all) name_w = std::max(name_w, safety::display_name(a.algorithm).size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  const std::size_t cw = 7;
  std::string line1(name_w, ' '), line2 = std::string(name_w - 9, ' ') + "Algorithm";
  for (auto b : driver::kBehaviors) {
    std::string title(driver::to_string(b));
    title[0] = static_cast<char>(std::toupper(title[0]));
    const std::size_t group_w = cols.size() * (cw + 1);
    const std::size_t left = (group_w - title.size()) / 2;
    line1 += " |" + std::string(left, ' ') + title + std::string(group_w - left - title.size(), ' ');
    line2 += " |";
    for (const auto& c : cols) line2 += " " + pad(c, cw);
  }
  out << line1 << '\n' << line2 << '\n' << std::string(line2.size(), '-') << '\n';
  for (const auto& a : all) {
    std::string row = pad(std::string(safety::display_name(a.algorithm)), name_w);
    for (std::size_t c = 0; c < 3; ++c) {
      row += " |";
      row += " " + pad(detail::fixed(a.collisions[c].mean), cw);
      for (auto k : engine::kCauses)
        row += " " + pad(detail::fixed(a.causes[c][static_cast<std::size_t>(k)].mean), cw);
      row += " " + pad(detail::fixed(a.warnings[c].mean), cw);
      row += " " + pad(detail::fixed(a.positives[c].mean), cw);
      row += " " + pad(detail::fixed(100.0 * a.positive_ratio[c], 1) + "%", cw);
    }
    out << row << '\n';
  }
  out << '\n';
  for (const auto& a : all)
    out << pad(std::string(safety::display_name(a.algorithm)), name_w) << ": total collisions "
        << detail::fixed(a.total_collisions.mean, 2) << " +/- "
        << detail::fixed(a.total_collisions.stddev, 2) << " over " << a.seeds.size() << " seed(s)\n";
}

/// Pooled headway count density: algorithm,bin_lo,bin_hi,count,density.
inline void write_headway_csv(std::ostream& out, const std::vector<engine::AggregateReport>& all) {
  out << "algorithm,bin_lo,bin_hi,count,density\n";
  for (const auto& a : all) {
    const auto& h = a.headway;
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      out << safety::to_string(a.algorithm) << ',' << static_cast<double>(i) * h.bin_width << ','
          << static_cast<double>(i + 1) * h.bin_width << ',' << h.counts[i] << ','
          << h.density(i) << '\n';
  }
}

/// Empirical CDF per algorithm: algorithm,value,cdf.
template <typename Get>
void write_ecdf_csv(std::ostream& out, const std::vector<engine::AggregateReport>& all, Get get) {
  out << "algorithm,value,cdf\n";
  for (const auto& a : all) {
    auto xs = get(a);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << safety::to_string(a.algorithm) << ',' << xs[i] << ','
          << static_cast<double>(i + 1) / static_cast<double>(xs.size()) << '\n';
  }
}

inline void write_ttc_ecdf(std::ostream& out, const std::vector<engine::AggregateReport>& all) {
  write_ecdf_csv(out, all, [](const engine::AggregateReport& a) { return a.ttc_at_warning; });
}

inline void write_headway_at_warning_ecdf(std::ostream& out,
                                          const std::vector<engine::AggregateReport>& all) {
  write_ecdf_csv(out, all, [](const engine::AggregateReport& a) { return a.headway_at_warning; });
}

/// Group per-run reports by algorithm (in the canonical algorithm order)
/// and aggregate each group.
inline std::vector<engine::AggregateReport> aggregate_by_algorithm(
    std::vector<engine::MetricsReport> runs) {
  std::map<safety::FcwKind, std::vector<engine::MetricsReport>> groups;
  for (auto& r : runs) groups[r.header.algorithm].push_back(std::move(r));
  std::vector<engine::AggregateReport> out;
  for (auto k : safety::kAllFcwKinds)
    if (auto it = groups.find(k); it != groups.end()) out.push_back(engine::aggregate_runs(std::move(it->second)));
  return out;
}

}  // namespace vsafe::io
