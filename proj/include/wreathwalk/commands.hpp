#pragma once

// Batch commands: each maps a configuration to a ResultEnvelope. Stochastic commands are
// deterministic given the configuration, which must carry a seed.

#include <string>
#include <vector>

#include "wreathwalk/config.hpp"
#include "wreathwalk/envelope.hpp"

namespace wreathwalk {

/// "synth", "res", "potential", "harmonic-check", "walk hitting", ..., "bubble limits", "report".
const std::vector<std::string>& command_names();

/// Runs without the cache. Throws ConfigError for unknown commands or bad fields.
ResultEnvelope run_command(const std::string& command, const Config& config);

struct RunOutcome {
  ResultEnvelope envelope;
  bool from_cache = false;
};

/// Serves the envelope from dir when a valid entry for (command, config) exists; otherwise
/// runs the command and stores the result. An empty dir disables the cache; configs with
/// output.* keys always run.
RunOutcome run_cached(const std::string& command, const Config& config, const std::string& dir);

}  // namespace wreathwalk
