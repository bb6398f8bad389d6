#pragma once

// Seeded Monte Carlo engines. Trajectory i always draws from Stream(seed, i), so every
// estimate is a pure function of (parameters, seed).
//
// The exponential clock with mean r^2 is replaced by its discrete memoryless analogue: before
// each step the clock fires independently with probability 1 / (1 + r^2), so the number of
// steps taken before it fires is geometric with mean exactly r^2.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wreathwalk/growth.hpp"
#include "wreathwalk/network.hpp"
#include "wreathwalk/tree.hpp"

namespace wreathwalk {

struct WalkStats {
  std::int64_t trials = 0;
  double mean = 0;
  double std_error = 0;  // sample std / sqrt(trials)
  double q50 = 0, q90 = 0, q99 = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
};

/// Summary of a sample; quantiles by the nearest-rank rule.
WalkStats summarize(std::vector<double> values, std::uint64_t seed);

inline double clock_probability(std::int64_t r) { return 1.0 / (1.0 + static_cast<double>(r) * static_cast<double>(r)); }

/// Hitting time of the root by simple random walk on the induced ball B_T(o, r), started
/// uniformly on the sphere of radius r.
WalkStats simulate_hitting(const BranchingProfile& profile, std::int64_t r, std::int64_t trials, std::uint64_t seed);

struct ProbabilityEstimate {
  double estimate = 0;
  double std_error = 0;  // binomial
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
};

/// P(tau_target > clock) for simple random walk on T x Z from start.
ProbabilityEstimate simulate_clock(const BranchingProfile& profile, const ProductVertex& start,
                                   const ProductVertex& target, std::int64_t r, std::int64_t trials,
                                   std::uint64_t seed);

struct ExitEstimate {
  WalkStats stats;              // of a(o) - a(X at exit), over walks that exit before returning to o
  std::int64_t escapes = 0;
  double escape_probability = 0;
  double resistance = 0;        // Res(s) of the ball in F, from the field's network
  double oscillation = 0;       // max / min of a(o) - a over the exit sites that were hit
};

/// Walk from the origin of F with steps proportional to edge weight until it returns to o or
/// reaches the ball sphere of radius s. The field must cover radius >= 2s.
ExitEstimate simulate_exit_potential(const BranchingProfile& profile, const PotentialField<double>& field,
                                     std::int64_t s, std::int64_t trials, std::uint64_t seed);

struct CouplingEstimate {
  ProbabilityEstimate failure;             // P(clock fires before the walks couple)
  std::vector<std::int64_t> attempts_tail; // [k] = runs with >= k failed coupling attempts
  double decay_rate = 0;                   // -slope of ln(tail fraction) against k
  double decay_r2 = 0;                     // coefficient of determination of that fit
};

/// Probability that one lazy step taken at o couples the two walks.
double coupling_success_probability(const BranchingProfile& profile);

/// Lamp coupling of two lazy switch-or-move walks that differ in the lamp at v.
CouplingEstimate simulate_coupling(const BranchingProfile& profile, const ProductVertex& v, std::int64_t r,
                                   std::int64_t trials, std::uint64_t seed);

struct OccupationRow {
  std::int64_t level = 0;
  double expected = 0;  // stationary mass of the level
  double observed = 0;
};

struct OccupationCheck {
  std::vector<OccupationRow> rows;
  double chi2 = 0;            // with the step count as sample size; steps are correlated
  double max_rel_error = 0;
};

/// Level occupation of one long simple random walk on B_T(o, r) against degree-proportional weights.
OccupationCheck occupation_check(const BranchingProfile& profile, std::int64_t r, std::int64_t steps,
                                 std::uint64_t seed);

/// Least-squares slope and intercept of y on x, with R^2.
struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wreathwalk
