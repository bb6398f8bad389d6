#pragma once

// Experiment configuration: a flat map of dotted keys to text values.
//
// Text form is one "key = value" per line with '#' comments; JSON input is flattened, so
// {"growth": {"family": "log"}} becomes growth.family = log. The canonical form lists keys in
// sorted order, and its FNV-1a digest is the configuration hash.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wreathwalk/growth.hpp"

namespace wreathwalk {

class Config {
 public:
  static Config parse_text(std::string_view text);
  static Config parse_json(std::string_view text);
  /// JSON when the first non-blank character is '{', key = value text otherwise.
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  // Typed getters throw ConfigError naming the field on malformed or out-of-range values.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback, std::int64_t min_value = INT64_MIN) const;
  std::int64_t require_int(const std::string& key, std::int64_t min_value = INT64_MIN) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback,
                                         std::int64_t min_value = INT64_MIN) const;

  std::string canonical() const;
  /// Digest of the canonical form with the given command name prepended; keys under
  /// "output." do not take part.
  std::uint64_t hash(std::string_view command) const;

 private:
  std::map<std::string, std::string> values_;
};

std::string hex_digest(std::uint64_t h);

/// growth.family (log | logpower | loglog), growth.alpha, growth.scale.
GrowthSpec growth_spec_from(const Config& config);

/// Synthesized profile with max_level N (config key N, default 2^16).
BranchingProfile profile_from(const Config& config);

}  // namespace wreathwalk
