#pragma once

// Command results: a table of formatted rows plus named verdicts, serializable to JSON and
// CSV, and cached on disk under the configuration hash.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wreathwalk {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ResultEnvelope {
  std::string command;
  std::string config_hash;
  std::string version = kArtifactVersion;
  double wall_time = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  void add_row(std::vector<std::string> row);
  void add_verdict(std::string name, bool pass, std::string detail = {});
};

/// 17 significant digits, "." decimal point regardless of locale.
std::string format_real(double x);
std::string format_int(std::int64_t x);

std::string to_json(const ResultEnvelope& env);
ResultEnvelope envelope_from_json(const std::string& text);

/// Digest of everything except the wall time.
std::uint64_t envelope_digest(const ResultEnvelope& env);

void write_csv(std::ostream& out, const ResultEnvelope& env);

/// Cache directory: $WREATHWALK_CACHE_DIR, else ".wreathwalk-cache" in the working directory.
std::string cache_directory();

/// Cached envelope for the hash, or nothing when absent, corrupt, or written by another version.
std::optional<ResultEnvelope> load_cached(const std::string& dir, const std::string& config_hash);
void store_cached(const std::string& dir, const ResultEnvelope& env);

}  // namespace wreathwalk
