#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wreathwalk/commands.hpp"
#include "wreathwalk/config.hpp"
#include "wreathwalk/envelope.hpp"
#include "wreathwalk/error.hpp"

using namespace wreathwalk;

namespace {

void print_table(std::ostream& out, const ResultEnvelope& env) {
  std::vector<std::size_t> width(env.columns.size());
  for (std::size_t i = 0; i < env.columns.size(); ++i) width[i] = env.columns[i].size();
  for (const auto& row : env.rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], std::min<std::size_t>(row[i].size(), 60));
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::string cell = cells[i].size() > 60 ? cells[i].substr(0, 57) + "..." : cells[i];
      out << (i ? "  " : "") << cell << std::string(width[i] - cell.size(), ' ');
    }
    out << "\n";
  };
  line(env.columns);
  for (const auto& row : env.rows) line(row);
  out << "\n";
  for (const auto& v : env.verdicts)
    out << (v.pass ? "PASS  " : "FAIL  ") << v.name << (v.detail.empty() ? "" : " (" + v.detail + ")") << "\n";
  out << "config " << env.config_hash << ", version " << env.version << ", " << env.wall_time << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resistance, harmonic-function and random-walk experiments on lamplighters over tree groups"};
  std::vector<std::string> words;
  std::string config_path, output_path, format = "table";
  std::vector<std::string> overrides;
  bool no_cache = false, list = false;
  app.add_option("command", words, "command and optional subcommand, e.g. 'walk clock'")->expected(0, 2);
  app.add_option("-c,--config", config_path, "key = value or JSON config file");
  app.add_option("-s,--set", overrides, "override a config field, key=value (repeatable)");
  app.add_option("-f,--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("-o,--output", output_path, "write the result here instead of stdout");
  app.add_flag("--no-cache", no_cache, "always recompute");
  app.add_flag("--list", list, "list commands");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (list) {
    for (const auto& name : command_names()) std::cout << name << "\n";
    return 0;
  }
  if (words.empty()) {
    std::cerr << "error: no command given (see --list)\n";
    return 2;
  }
  std::string command = words[0];
  for (std::size_t i = 1; i < words.size(); ++i) command += " " + words[i];

  ResultEnvelope env;
  try {
    Config config = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const auto outcome = run_cached(command, config, no_cache ? std::string{} : cache_directory());
    env = outcome.envelope;
    std::cerr << (outcome.from_cache ? "cache hit " : "computed ") << env.config_hash << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path, std::ios::trunc);
    if (!file) {
      std::cerr << "configuration error: cannot write '" << output_path << "'\n";
      return 2;
    }
  }
  std::ostream& out = output_path.empty() ? std::cout : file;
  if (format == "csv") {
    write_csv(out, env);
  } else if (format == "json") {
    out << to_json(env) << "\n";
  } else {
    print_table(out, env);
  }
  return env.all_pass() ? 0 : 1;
}
