#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vsafe/analysis/gamma.hpp"
#include "vsafe/engine/metrics.hpp"
#include "vsafe/population.hpp"

namespace vsafe::analysis {

inline constexpr double kFeetToMeters = 0.3048;
inline constexpr double kFrameDt = 0.1;

struct TrajectoryRecord {
  std::uint32_t vehicle_id = 0;
  std::int64_t frame = 0;
  double t = 0.0;       ///< s
  double pos = 0.0;     ///< m along the lane
  double vel = 0.0;     ///< m/s
  double accel = 0.0;   ///< m/s^2
  double length = 0.0;  ///< m
  std::uint32_t preceding_id = 0;  ///< 0 = none
};

/// Records of one vehicle, sorted by frame.
struct VehicleTrack {
  std::uint32_t id = 0;
  std::vector<TrajectoryRecord> frames;
};

using Trajectories = std::vector<VehicleTrack>;  ///< sorted by vehicle id

class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace detail

/// Read an NGSIM-layout CSV (header row with the standard column names,
/// imperial units). Only Vehicle_ID, Frame_ID, Local_Y, v_Length, v_Vel,
/// v_Acc and Preceding are used; everything else is ignored.
inline Trajectories read_trajectories(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line).empty())
    throw DataError(name + ": empty file");
  const char sep = line.find(',') != std::string::npos ? ',' : (line.find('\t') != std::string::npos ? '\t' : ',');
  const auto header = detail::split(line, sep);
  auto column = [&](std::string_view key) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (detail::trim(header[i]) == key) return i;
    throw DataError(name + ": missing column '" + std::string(key) + "'");
  };
  const auto c_id = column("Vehicle_ID"), c_frame = column("Frame_ID"), c_y = column("Local_Y"),
             c_len = column("v_Length"), c_vel = column("v_Vel"), c_acc = column("v_Acc"),
             c_prec = column("Preceding");
  const auto need = std::max({c_id, c_frame, c_y, c_len, c_vel, c_acc, c_prec}) + 1;

  std::map<std::uint32_t, VehicleTrack> by_id;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, sep);
    auto bad = [&](const std::string& what) {
      return DataError(name + ": row " + std::to_string(row) + ": " + what);
    };
    if (f.size() < need) throw bad("expected at least " + std::to_string(need) + " fields");
    TrajectoryRecord r;
    double y, len, vel, acc;
    std::int64_t prec;
    if (!detail::parse_number(f[c_id], r.vehicle_id)) throw bad("bad Vehicle_ID");
    if (!detail::parse_number(f[c_frame], r.frame)) throw bad("bad Frame_ID");
    if (!detail::parse_number(f[c_y], y)) throw bad("bad Local_Y");
    if (!detail::parse_number(f[c_len], len)) throw bad("bad v_Length");
    if (!detail::parse_number(f[c_vel], vel)) throw bad("bad v_Vel");
    if (!detail::parse_number(f[c_acc], acc)) throw bad("bad v_Acc");
    if (!detail::parse_number(f[c_prec], prec) || prec < 0) throw bad("bad Preceding");
    r.t = static_cast<double>(r.frame) * kFrameDt;
    r.pos = y * kFeetToMeters;
    r.length = len * kFeetToMeters;
    r.vel = vel * kFeetToMeters;
    r.accel = acc * kFeetToMeters;
    r.preceding_id = static_cast<std::uint32_t>(prec);
    auto& track = by_id[r.vehicle_id];
    track.id = r.vehicle_id;
    track.frames.push_back(r);
  }
  if (by_id.empty()) throw DataError(name + ": no data rows");

  Trajectories out;
  out.reserve(by_id.size());
  for (auto& [id, track] : by_id) {
    std::sort(track.frames.begin(), track.frames.end(),
              [](const auto& a, const auto& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < track.frames.size(); ++i)
      if (track.frames[i].frame == track.frames[i - 1].frame)
        throw DataError(name + ": vehicle " + std::to_string(id) + " has duplicate frame " +
                        std::to_string(track.frames[i].frame));
    out.push_back(std::move(track));
  }
  return out;
}

inline Trajectories load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trajectories(in, path);
}

/// Centered moving average over round(window/dt) samples, bumped to the
/// next odd count; edges average over the part of the window that exists.
inline std::vector<double> smooth(const std::vector<double>& xs, double window, double dt) {
  if (!(window >= dt - 1e-12)) throw std::invalid_argument("smooth: window must be >= dt");
  auto n = static_cast<std::size_t>(std::llround(window / dt));
  if (n % 2 == 0) ++n;
  const std::size_t half = n / 2;
  std::vector<double> prefix(xs.size() + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) prefix[i + 1] = prefix[i] + xs[i];
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(xs.size(), i + half + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

/// Smooth velocity and acceleration of every track in place.
inline void smooth_tracks(Trajectories& tracks, double window = 0.5) {
  for (auto& tr : tracks) {
    std::vector<double> v, a;
    v.reserve(tr.frames.size());
    a.reserve(tr.frames.size());
    for (const auto& r : tr.frames) {
      v.push_back(r.vel);
      a.push_back(r.accel);
    }
    v = smooth(v, window, kFrameDt);
    a = smooth(a, window, kFrameDt);
    for (std::size_t i = 0; i < tr.frames.size(); ++i) {
      tr.frames[i].vel = v[i];
      tr.frames[i].accel = a[i];
    }
  }
}

struct HeadwayOptions {
  double v_min = 1.0;        ///< m/s
  std::size_t n_min = 50;    ///< valid frames per driver
};

struct DriverHeadways {
  std::uint32_t id = 0;
  std::vector<double> taus;
  double mean = 0.0;
};

/// Time headway per frame against the preceding vehicle at the same frame,
/// for every driver with enough valid frames.
inline std::vector<DriverHeadways> per_driver_headways(const Trajectories& tracks,
                                                       const HeadwayOptions& opt = {}) {
  std::unordered_map<std::uint32_t, const VehicleTrack*> index;
  for (const auto& tr : tracks) index[tr.id] = &tr;
  auto frame_of = [](const VehicleTrack& tr, std::int64_t frame) -> const TrajectoryRecord* {
    auto it = std::lower_bound(tr.frames.begin(), tr.frames.end(), frame,
                               [](const TrajectoryRecord& r, std::int64_t f) { return r.frame < f; });
    return it != tr.frames.end() && it->frame == frame ? &*it : nullptr;
  };
  std::vector<DriverHeadways> out;
  for (const auto& tr : tracks) {
    DriverHeadways d;
    d.id = tr.id;
    for (const auto& r : tr.frames) {
      if (r.preceding_id == 0 || !(r.vel > opt.v_min)) continue;
      auto it = index.find(r.preceding_id);
      if (it == index.end()) continue;
      const auto* lead = frame_of(*it->second, r.frame);
      if (!lead) continue;
      const double gap = lead->pos - r.pos - lead->length;
      if (!(gap > 0.0)) continue;
      d.taus.push_back(gap / r.vel);
    }
    if (d.taus.size() < opt.n_min) continue;
    double s = 0.0;
    for (double x : d.taus) s += x;
    d.mean = s / static_cast<double>(d.taus.size());
    out.push_back(std::move(d));
  }
  return out;
}

struct AccelRanges {
  std::array<Range, 3> accel{};
  std::array<Range, 3> decel{};
  std::array<std::size_t, 3> accel_samples{};
  std::array<std::size_t, 3> decel_samples{};
  std::vector<std::string> warnings;
};

/// [p70, p90] of positive accelerations and of |negative accelerations|,
/// pooled per class. `cls` maps vehicle id to its class.
inline AccelRanges accel_percentiles(const Trajectories& tracks,
                                     const std::unordered_map<std::uint32_t, driver::Behavior>& cls,
                                     std::size_t min_samples = 100) {
  std::array<std::vector<double>, 3> pos, neg;
  for (const auto& tr : tracks) {
    auto it = cls.find(tr.id);
    if (it == cls.end()) continue;
    const auto c = static_cast<std::size_t>(it->second);
    for (const auto& r : tr.frames) {
      if (r.accel > 0.0) pos[c].push_back(r.accel);
      else if (r.accel < 0.0) neg[c].push_back(-r.accel);
    }
  }
  AccelRanges out;
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string name(driver::to_string(static_cast<driver::Behavior>(c)));
    auto range = [&](const std::vector<double>& xs, const char* what) -> Range {
      if (xs.size() < min_samples)
        out.warnings.push_back(name + ": only " + std::to_string(xs.size()) + " " + what +
                               " samples");
      if (xs.empty()) return {0.0, 0.0};
      return {engine::percentile(xs, 0.7), engine::percentile(xs, 0.9)};
    };
    out.accel[c] = range(pos[c], "acceleration");
    out.decel[c] = range(neg[c], "deceleration");
    out.accel_samples[c] = pos[c].size();
    out.decel_samples[c] = neg[c].size();
  }
  return out;
}

struct AnalysisResult {
  std::size_t vehicles = 0;
  std::vector<DriverHeadways> drivers;
  GammaFit fit;
  std::array<double, 3> empirical_ratios{};  ///< share of classified drivers
  std::array<std::size_t, 3> class_counts{};
  AccelRanges ranges;
  PopulationSpec spec;
};

struct AnalysisOptions {
  double smooth_window = 0.5;
  HeadwayOptions headway;
  driver::HeadwayThresholds thresholds;
  bool pooled_fit = false;  ///< fit per-frame headways instead of per-driver means
};

/// The full pipeline: smooth, headways, classify, fit, ratios, percentiles.
inline AnalysisResult analyze(Trajectories tracks, const AnalysisOptions& opt = {}) {
  AnalysisResult res;
  res.vehicles = tracks.size();
  smooth_tracks(tracks, opt.smooth_window);
  res.drivers = per_driver_headways(tracks, opt.headway);

  std::unordered_map<std::uint32_t, driver::Behavior> cls;
  std::vector<double> sample;
  for (const auto& d : res.drivers) {
    const auto c = driver::classify(d.mean, opt.thresholds);
    cls[d.id] = c;
    ++res.class_counts[static_cast<std::size_t>(c)];
    if (opt.pooled_fit) sample.insert(sample.end(), d.taus.begin(), d.taus.end());
    else sample.push_back(d.mean);
  }
  if (!res.drivers.empty())
    for (std::size_t c = 0; c < 3; ++c)
      res.empirical_ratios[c] =
          static_cast<double>(res.class_counts[c]) / static_cast<double>(res.drivers.size());

  res.fit = fit_gamma(sample);
  res.ranges = accel_percentiles(tracks, cls);
  res.spec.gamma_shape = res.fit.shape;
  res.spec.gamma_scale = res.fit.scale;
  res.spec.thresholds = opt.thresholds;
  res.spec.class_ratios = class_ratios(res.fit.shape, res.fit.scale, opt.thresholds);
  res.spec.accel = res.ranges.accel;
  res.spec.decel = res.ranges.decel;
  return res;
}

/// Histogram of per-driver mean headways as CSV: bin_lo,bin_hi,count,density.
inline void write_headway_histogram(std::ostream& out, const std::vector<DriverHeadways>& drivers,
                                    double bin = 0.25, double max = 8.0) {
  engine::Histogram h(bin, max);
  for (const auto& d : drivers) h.add(d.mean);
  out << "bin_lo,bin_hi,count,density\n";
  const double n = static_cast<double>(std::max<std::uint64_t>(1, h.total()));
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << i * bin << ',' << (i + 1) * bin << ',' << h.counts[i] << ','
        << static_cast<double>(h.counts[i]) / (n * bin) << '\n';
}

/// ECDF points of smoothed accelerations per class: class,sign,value,cdf.
inline void write_accel_ecdf(std::ostream& out, const Trajectories& tracks,
                             const std::vector<DriverHeadways>& drivers,
                             const driver::HeadwayThresholds& th = {}) {
  std::unordered_map<std::uint32_t, driver::Behavior> cls;
  for (const auto& d : drivers) cls[d.id] = driver::classify(d.mean, th);
  std::array<std::vector<double>, 3> pos, neg;
  for (const auto& tr : tracks) {
    auto it = cls.find(tr.id);
    if (it == cls.end()) continue;
    for (const auto& r : tr.frames) {
      auto& dst = r.accel >= 0.0 ? pos : neg;
      dst[static_cast<std::size_t>(it->second)].push_back(std::abs(r.accel));
    }
  }
  out << "class,kind,value,cdf\n";
  auto dump = [&](std::vector<double>& xs, std::size_t c, const char* kind) {
    std::sort(xs.begin(), xs.end());
    // Thin long series to at most ~1000 points.
    const std::size_t stride = std::max<std::size_t>(1, xs.size() / 1000);
    for (std::size_t i = 0; i < xs.size(); i += stride)
      out << driver::to_string(static_cast<driver::Behavior>(c)) << ',' << kind << ',' << xs[i]
          << ',' << static_cast<double>(i + 1) / static_cast<double>(xs.size()) << '\n';
  };
  for (std::size_t c = 0; c < 3; ++c) {
    dump(pos[c], c, "accel");
    dump(neg[c], c, "decel");
  }
}

}  // namespace vsafe::analysis
