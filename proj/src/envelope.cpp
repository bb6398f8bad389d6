#include "wreathwalk/envelope.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "wreathwalk/error.hpp"
#include "wreathwalk/hash.hpp"

namespace wreathwalk {

namespace {

constexpr std::string_view kCacheTag = "wreathwalk-result";

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

bool ResultEnvelope::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

void ResultEnvelope::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InternalError("row width does not match the column count");
  rows.push_back(std::move(row));
}

void ResultEnvelope::add_verdict(std::string name, bool pass, std::string detail) {
  verdicts.push_back({std::move(name), pass, std::move(detail)});
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // snprintf honours LC_NUMERIC; force the decimal point
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

std::string format_int(std::int64_t x) { return std::to_string(x); }

std::string to_json(const ResultEnvelope& env) {
  nlohmann::json j;
  j["command"] = env.command;
  j["config_hash"] = env.config_hash;
  j["version"] = env.version;
  j["wall_time"] = env.wall_time;
  j["columns"] = env.columns;
  j["rows"] = env.rows;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : env.verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return j.dump(2);
}

ResultEnvelope envelope_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ResultEnvelope env;
    env.command = j.at("command").get<std::string>();
    env.config_hash = j.at("config_hash").get<std::string>();
    env.version = j.at("version").get<std::string>();
    env.wall_time = j.at("wall_time").get<double>();
    env.columns = j.at("columns").get<std::vector<std::string>>();
    env.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    for (const auto& v : j.at("verdicts"))
      env.verdicts.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>(), v.at("detail").get<std::string>()});
    for (const auto& row : env.rows)
      if (row.size() != env.columns.size()) throw ValidationError("result row width does not match the columns");
    return env;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed result envelope: ") + e.what());
  }
}

std::uint64_t envelope_digest(const ResultEnvelope& env) {
  ResultEnvelope copy = env;
  copy.wall_time = 0;
  return fnv1a(to_json(copy));
}

void write_csv(std::ostream& out, const ResultEnvelope& env) {
  for (std::size_t i = 0; i < env.columns.size(); ++i) out << (i ? "," : "") << csv_cell(env.columns[i]);
  out << "\n";
  for (const auto& row : env.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << "\n";
  }
}

std::string cache_directory() {
  if (const char* dir = std::getenv("WREATHWALK_CACHE_DIR"); dir && *dir) return dir;
  return ".wreathwalk-cache";
}

std::optional<ResultEnvelope> load_cached(const std::string& dir, const std::string& config_hash) {
  std::ifstream in(std::filesystem::path(dir) / (config_hash + ".json"));
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  // header: tag, version, hash, payload digest
  std::istringstream hs(header);
  std::string tag, version, hash, payload_digest;
  hs >> tag >> version >> hash >> payload_digest;
  if (tag != kCacheTag || version != kArtifactVersion || hash != config_hash) return std::nullopt;
  std::ostringstream body;
  body << in.rdbuf();
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(fnv1a(body.str())));
  if (payload_digest != digest) return std::nullopt;
  try {
    auto env = envelope_from_json(body.str());
    if (env.config_hash != config_hash || env.version != kArtifactVersion) return std::nullopt;
    return env;
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

void store_cached(const std::string& dir, const ResultEnvelope& env) {
  std::filesystem::create_directories(dir);
  const std::string body = to_json(env);
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(fnv1a(body)));
  const auto path = std::filesystem::path(dir) / (env.config_hash + ".json");
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp);
    out << kCacheTag << ' ' << env.version << ' ' << env.config_hash << ' ' << digest << '\n' << body;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wreathwalk
