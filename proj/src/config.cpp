#include "wreathwalk/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wreathwalk/error.hpp"
#include "wreathwalk/hash.hpp"

namespace wreathwalk {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
  });
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!item.is_primitive()) throw ConfigError("nested arrays and objects inside lists are not supported");
      out += (out.empty() ? "" : ",") + json_scalar(item);
    }
    return out;
  }
  throw ConfigError("unsupported JSON value " + v.dump());
}

void flatten(const nlohmann::json& node, const std::string& prefix, Config& out) {
  for (const auto& [key, value] : node.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, full, out);
    } else if (!value.is_null()) {
      out.set(full, json_scalar(value));
    }
  }
}

[[noreturn]] void bad_field(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("field '" + key + "': expected " + expected + ", got '" + value + "'");
}

std::int64_t parse_int(const std::string& key, const std::string& text, std::int64_t min_value) {
  std::int64_t v = 0;
  std::string s = text;
  // accept 2^k as a convenience for sizes
  if (auto caret = s.find('^'); caret != std::string::npos) {
    std::int64_t base = 0, exp = 0;
    auto r1 = std::from_chars(s.data(), s.data() + caret, base);
    auto r2 = std::from_chars(s.data() + caret + 1, s.data() + s.size(), exp);
    if (r1.ec != std::errc{} || r1.ptr != s.data() + caret || r2.ec != std::errc{} || r2.ptr != s.data() + s.size() ||
        base < 2 || exp < 0 || exp * std::log2(static_cast<double>(base)) >= 62)
      bad_field(key, text, "an integer");
    v = 1;
    for (std::int64_t i = 0; i < exp; ++i) v *= base;
  } else {
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) bad_field(key, text, "an integer");
  }
  if (v < min_value) bad_field(key, text, "an integer >= " + std::to_string(min_value));
  return v;
}

}  // namespace

Config Config::parse_text(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    if (!valid_key(key)) throw ConfigError("line " + std::to_string(number) + ": invalid key '" + key + "'");
    if (c.has(key)) throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    c.set(key, trim(std::string_view(stripped).substr(eq + 1)));
  }
  return c;
}

Config Config::parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  Config c;
  flatten(doc, "", c);
  return c;
}

Config Config::parse(std::string_view text) {
  const std::string t = trim(text);
  return !t.empty() && t.front() == '{' ? parse_json(t) : parse_text(text);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  if (value.find('\n') != std::string::npos) throw ConfigError("field '" + key + "': value spans lines");
  values_[key] = trim(value);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback, std::int64_t min_value) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_int(key, it->second, min_value);
}

std::int64_t Config::require_int(const std::string& key, std::int64_t min_value) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("field '" + key + "' is required");
  return parse_int(key, it->second, min_value);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) bad_field(key, s, "a finite number");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  bad_field(key, it->second, "true or false");
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback,
                                               std::int64_t min_value) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::int64_t> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_int(key, trim(item), min_value));
  if (out.empty()) bad_field(key, it->second, "a comma-separated list of integers");
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash(std::string_view command) const {
  std::uint64_t h = fnv1a(command);
  h = fnv1a(std::string_view("\n"), h);
  for (const auto& [k, v] : values_) {
    if (k.rfind("output.", 0) == 0) continue;
    h = fnv1a(k + " = " + v + "\n", h);
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GrowthSpec growth_spec_from(const Config& config) {
  const std::string family = config.get_string("growth.family", "log");
  const double scale = config.get_double("growth.scale", 1.0);
  if (!(scale > 0)) bad_field("growth.scale", config.get_string("growth.scale", ""), "a positive number");
  if (family == "log") return GrowthSpec::log(scale);
  if (family == "loglog") return GrowthSpec::log_log(scale);
  if (family == "logpower") {
    const double alpha = config.get_double("growth.alpha", 0.5);
    if (!(alpha > 0 && alpha <= 1))
      bad_field("growth.alpha", config.get_string("growth.alpha", ""), "a number in (0, 1]");
    return GrowthSpec::log_power(alpha, scale);
  }
  bad_field("growth.family", family, "log, logpower or loglog");
}

BranchingProfile profile_from(const Config& config) {
  const std::int64_t N = config.get_int("N", std::int64_t{1} << 16, 2);
  if (N > (std::int64_t{1} << 30)) bad_field("N", config.get_string("N", ""), "at most 2^30");
  return synthesize_branching(growth_spec_from(config), N);
}

}  // namespace wreathwalk
