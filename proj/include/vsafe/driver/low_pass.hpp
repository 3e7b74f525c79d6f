#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace vsafe::driver {

inline std::size_t window_samples(double window, double dt) {
  if (!(window > 0.0) || !(dt > 0.0)) throw std::invalid_argument("low_pass: window and dt must be > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(window / dt + 1e-9)));
}

/// Mean of the trailing `window` seconds of a uniformly sampled history.
inline double low_pass(double window, std::span<const double> history, double dt) {
  if (history.empty()) throw std::invalid_argument("low_pass: empty history");
  const std::size_t n = std::min(window_samples(window, dt), history.size());
  double sum = 0.0;
  for (std::size_t i = history.size() - n; i < history.size(); ++i) sum += history[i];
  return sum / static_cast<double>(n);
}

/// Streaming form of low_pass over a ring buffer.
class MovingAverage {
public:
  MovingAverage(double window, double dt) : buf_(window_samples(window, dt), 0.0) {}

  double push(double x) {
    if (count_ == buf_.size()) sum_ -= buf_[head_];
    else ++count_;
    buf_[head_] = x;
    sum_ += x;
    head_ = (head_ + 1) % buf_.size();
    if (++since_resum_ == 4096) resum();
    return value();
  }

  double value() const { return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_); }

  void reset() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    sum_ = 0.0;
    count_ = head_ = since_resum_ = 0;
  }

private:
  void resum() {
    since_resum_ = 0;
    sum_ = 0.0;
    for (std::size_t i = 0; i < count_; ++i) sum_ += buf_[(head_ + buf_.size() - 1 - i) % buf_.size()];
  }

  std::vector<double> buf_;
  double sum_ = 0.0;
  std::size_t count_ = 0;
  std::size_t head_ = 0;
  std::size_t since_resum_ = 0;
};

}  // namespace vsafe::driver
