#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "vsafe/engine/events.hpp"

namespace vsafe::engine {

/// Fixed-width histogram on [0, max); samples at or beyond max go to
/// `overflow`, so total() always equals the number of samples added.
struct Histogram {
  double bin_width = 0.5;
  double max = 10.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;

  Histogram() = default;
  Histogram(double width, double upper)
      : bin_width(width), max(upper),
        counts(static_cast<std::size_t>(std::llround(upper / width)), 0) {}

  void add(double x, std::uint64_t n = 1) {
    if (x < 0.0) x = 0.0;
    const auto i = static_cast<std::size_t>(std::floor(x / bin_width));
    if (i >= counts.size()) overflow += n;
    else counts[i] += n;
  }

  void merge(const Histogram& o) {
    if (counts.empty()) *this = Histogram(o.bin_width, o.max);
    for (std::size_t i = 0; i < counts.size() && i < o.counts.size(); ++i) counts[i] += o.counts[i];
    overflow += o.overflow;
  }

  std::uint64_t total() const {
    std::uint64_t s = overflow;
    for (auto c : counts) s += c;
    return s;
  }

  /// Count density of bin i: samples per second of headway.
  double density(std::size_t i) const { return static_cast<double>(counts[i]) / bin_width; }

  /// Left edge of the fullest bin (first one on ties).
  double mode_lo() const {
    const auto it = std::max_element(counts.begin(), counts.end());
    return static_cast<double>(it - counts.begin()) * bin_width;
  }
};

struct CollisionCell {
  std::uint32_t total = 0;
  std::array<std::uint32_t, 4> by_cause{};
};

struct WarningCell {
  std::uint32_t total = 0;
  std::uint32_t positive = 0;
  double ratio() const { return total ? static_cast<double>(positive) / total : 0.0; }
};

/// Outcome of one run (one seed, one algorithm). Arrays are indexed by
/// driver::Behavior; only events at or after warm-up are counted.
struct MetricsReport {
  RunHeader header;
  std::array<std::array<std::uint32_t, 2>, 3> drivers{};  ///< [class][attention]
  std::array<CollisionCell, 3> collisions{};
  std::array<WarningCell, 3> warnings{};
  Histogram headway;
  std::array<Histogram, 3> headway_by_class;
  std::vector<double> ttc_at_warning;
  std::vector<double> headway_at_warning;
  std::uint64_t bsm_sent = 0;
  std::uint64_t bsm_delivered = 0;

  std::uint32_t total_collisions() const {
    std::uint32_t s = 0;
    for (const auto& c : collisions) s += c.total;
    return s;
  }
  std::uint32_t total_warnings() const {
    std::uint32_t s = 0;
    for (const auto& c : warnings) s += c.total;
    return s;
  }
};

/// Fold an event log into a report. The same routine serves live runs and
/// logs read back from disk.
inline MetricsReport aggregate_log(const EventLog& log) {
  MetricsReport r;
  std::unordered_map<std::uint32_t, driver::Behavior> cls;
  double warmup = 0.0;
  for (const auto& rec : log) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, RunHeader>) {
            r.header = e;
            warmup = e.warmup;
            r.headway = Histogram(e.headway_bin, e.headway_max);
            for (auto& h : r.headway_by_class) h = Histogram(e.headway_bin, e.headway_max);
          } else if constexpr (std::is_same_v<T, DriverRecord>) {
            cls[e.id] = e.behavior;
            ++r.drivers[static_cast<std::size_t>(e.behavior)][static_cast<std::size_t>(e.attention)];
          } else if constexpr (std::is_same_v<T, CommsRecord>) {
            r.bsm_sent += static_cast<std::uint64_t>(e.sent) * (e.sent ? e.sent - 1 : 0);
            r.bsm_delivered += e.delivered;
          } else if constexpr (std::is_same_v<T, HeadwayRecord>) {
            if (e.t < warmup - 1e-9) return;
            for (const auto& [id, tau] : e.samples) {
              r.headway.add(tau);
              if (auto it = cls.find(id); it != cls.end())
                r.headway_by_class[static_cast<std::size_t>(it->second)].add(tau);
            }
          } else if constexpr (std::is_same_v<T, WarningRecord>) {
            if (e.event.t < warmup - 1e-9) return;
            auto& cell = r.warnings[static_cast<std::size_t>(e.host_class)];
            ++cell.total;
            if (e.event.classification == safety::WarningClass::Positive) ++cell.positive;
            if (e.event.ttc_at_warning) r.ttc_at_warning.push_back(*e.event.ttc_at_warning);
            if (e.event.headway_at_warning)
              r.headway_at_warning.push_back(*e.event.headway_at_warning);
          } else if constexpr (std::is_same_v<T, CollisionEvent>) {
            if (e.t < warmup - 1e-9) return;
            auto& cell = r.collisions[static_cast<std::size_t>(e.fault_class)];
            ++cell.total;
            ++cell.by_cause[static_cast<std::size_t>(e.cause)];
          }
        },
        rec);
  }
  return r;
}

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

inline Stat mean_stddev(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

/// Linear-interpolated (type 7) percentile, q in [0, 1].
inline double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// Replicated statistics for one algorithm across seeds.
struct AggregateReport {
  safety::FcwKind algorithm = safety::FcwKind::None;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsReport> runs;

  Stat total_collisions;
  std::array<Stat, 3> collisions;                 ///< per class
  std::array<std::array<Stat, 4>, 3> causes;      ///< per class, per cause
  std::array<Stat, 3> warnings;
  std::array<Stat, 3> positives;
  std::array<double, 3> positive_ratio{};         ///< pooled over runs
  Histogram headway;
  std::array<Histogram, 3> headway_by_class;
  std::vector<double> ttc_at_warning;
  std::vector<double> headway_at_warning;
};

/// Order-independent merge: runs are sorted by seed before folding.
inline AggregateReport aggregate_runs(std::vector<MetricsReport> runs) {
  std::sort(runs.begin(), runs.end(),
            [](const auto& a, const auto& b) { return a.header.seed < b.header.seed; });
  AggregateReport a;
  if (!runs.empty()) a.algorithm = runs.front().header.algorithm;
  auto collect = [&](auto f) {
    std::vector<double> xs;
    for (const auto& r : runs) xs.push_back(static_cast<double>(f(r)));
    return mean_stddev(xs);
  };
  a.total_collisions = collect([](const MetricsReport& r) { return r.total_collisions(); });
  for (std::size_t c = 0; c < 3; ++c) {
    a.collisions[c] = collect([c](const MetricsReport& r) { return r.collisions[c].total; });
    for (std::size_t k = 0; k < 4; ++k)
      a.causes[c][k] = collect([c, k](const MetricsReport& r) { return r.collisions[c].by_cause[k]; });
    a.warnings[c] = collect([c](const MetricsReport& r) { return r.warnings[c].total; });
    a.positives[c] = collect([c](const MetricsReport& r) { return r.warnings[c].positive; });
    WarningCell pooled;
    for (const auto& r : runs) {
      pooled.total += r.warnings[c].total;
      pooled.positive += r.warnings[c].positive;
    }
    a.positive_ratio[c] = pooled.ratio();
  }
  for (const auto& r : runs) {
    a.seeds.push_back(r.header.seed);
    a.headway.merge(r.headway);
    for (std::size_t c = 0; c < 3; ++c) a.headway_by_class[c].merge(r.headway_by_class[c]);
    a.ttc_at_warning.insert(a.ttc_at_warning.end(), r.ttc_at_warning.begin(), r.ttc_at_warning.end());
    a.headway_at_warning.insert(a.headway_at_warning.end(), r.headway_at_warning.begin(),
                                r.headway_at_warning.end());
  }
  a.runs = std::move(runs);
  return a;
}

}  // namespace vsafe::engine
