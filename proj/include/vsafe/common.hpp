#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vsafe {

inline constexpr double kGravity = 9.81;

/// Raised when a configuration or input document violates its schema.
/// `path` is a JSON-pointer-like location of the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

inline void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

/// splitmix64 finalizer, used to derive independent generator seeds from a
/// scenario seed and a stream tag.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Wrap x into [0, period).
inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace vsafe
