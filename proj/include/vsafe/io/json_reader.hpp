#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "vsafe/common.hpp"

namespace vsafe::io {

using nlohmann::json;

/// Strict reader over one JSON object: optional keys keep their defaults,
/// type mismatches and unknown keys raise ConfigError with the field path.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j.is_object(), path_.empty() ? "/" : path_, "expected an object");
  }

  std::string path(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    require(v.is_number(), path(key), "expected a number");
    out = v.get<double>();
  }

  void read(const std::string& key, int& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    require(v.is_number_integer(), path(key), "expected an integer");
    out = v.get<int>();
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
            path(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    require(v.is_boolean(), path(key), "expected a boolean");
    out = v.get<bool>();
  }

  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    require(v.is_string(), path(key), "expected a string");
    out = v.get<std::string>();
  }

  /// Nested object handled by `f(ObjectReader&)`.
  template <typename F>
  void object(const std::string& key, F&& f) {
    if (!has(key)) return;
    ObjectReader sub(at(key), path(key));
    f(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require(seen_.count(it.key()) > 0, path(it.key()), "unknown field");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

/// [lo, hi] pair.
inline std::pair<double, double> read_pair(const json& v, const std::string& path) {
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), path,
          "expected [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace vsafe::io
