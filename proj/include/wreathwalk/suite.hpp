#pragma once

// The numbered desk-scale checks, shared by the `report` command and the acceptance binary.
// Each check runs on the standard presets and returns one verdict with a short detail line.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wreathwalk/growth.hpp"

namespace wreathwalk {

struct Preset {
  std::string name;
  GrowthSpec spec;
};

/// Log, LogPower(1/2), LogPower(1).
std::vector<Preset> standard_presets();

/// Depth to which presets are synthesized for the network and walk checks.
inline constexpr std::int64_t kPresetDepth = std::int64_t{1} << 16;

BranchingProfile preset_profile(const Preset& preset, std::int64_t N = kPresetDepth);

struct SuiteOptions {
  bool quick = false;  // fewer trials and radii, for smoke runs
  std::uint64_t seed = 20240601;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  std::map<std::string, double> measured;  // values worth freezing or inspecting
};

inline constexpr int kCriterionCount = 14;

/// Regression bands frozen from the first validated full run.
struct FrozenBands {
  // res_exact / analytic_resistance_sum over m in 16..512, per preset
  std::map<std::string, std::pair<double, double>> resistance_ratio;
  double exit_oscillation = 0;     // max over presets and s of the exit-site oscillation
  double entropy_sqrt_n = 0;       // max of H_n / sqrt(n)
};
const FrozenBands& frozen_bands();

CriterionResult run_criterion(int id, const SuiteOptions& options);

}  // namespace wreathwalk
