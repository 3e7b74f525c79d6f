#pragma once

#include <deque>
#include <stdexcept>
#include <utility>

namespace vsafe::driver {

/// Time-stamped FIFO that replays its input a fixed latency later.
///
/// A query at time t returns the newest sample with timestamp <= t - delay.
/// Before any sample is that old (warm-up) the earliest sample is returned and
/// flagged stale. Queries must be non-decreasing in t; samples no longer
/// reachable are discarded, so the buffer holds about delay/dt + 1 entries.
template <typename T>
class DelayLine {
public:
  struct Sample {
    double t = 0.0;
    T value{};
    bool stale = false;
  };

  explicit DelayLine(double delay = 0.0) : delay_(delay) {
    if (delay < 0.0) throw std::invalid_argument("delay line: negative delay");
  }

  double delay() const { return delay_; }
  bool empty() const { return buf_.empty(); }
  std::size_t size() const { return buf_.size(); }
  void clear() { buf_.clear(); }

  void push(double t, T value) {
    if (!buf_.empty() && !(t > buf_.back().first))
      throw std::invalid_argument("delay line: timestamps must strictly increase");
    buf_.emplace_back(t, std::move(value));
  }

  Sample at(double t) {
    if (buf_.empty()) throw std::logic_error("delay line: empty");
    const double target = t - delay_ + kEps;
    if (buf_.front().first > target) return {buf_.front().first, buf_.front().second, true};
    while (buf_.size() > 1 && buf_[1].first <= target) buf_.pop_front();
    return {buf_.front().first, buf_.front().second, false};
  }

private:
  static constexpr double kEps = 1e-9;
  double delay_;
  std::deque<std::pair<double, T>> buf_;
};

}  // namespace vsafe::driver
