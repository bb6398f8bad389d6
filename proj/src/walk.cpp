#include "wreathwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wreathwalk/error.hpp"
#include "wreathwalk/group.hpp"
#include "wreathwalk/rng.hpp"

namespace wreathwalk {

namespace {

void require_trials(std::int64_t trials) {
  if (trials < 100) throw ValidationError("need at least 100 trials, got " + std::to_string(trials));
}

[[noreturn]] void depth_exhausted(const BranchingProfile& profile) {
  throw RangeError("walk reached the profile depth " + std::to_string(profile.max_level()) +
                   "; synthesize the profile with a larger max_level");
}

std::int64_t tree_distance(const BranchingProfile& profile, TreeVertex u, TreeVertex v) {
  std::int64_t d = 0;
  while (u.level > v.level) u = parent(profile, u), ++d;
  while (v.level > u.level) v = parent(profile, v), ++d;
  while (u != v) u = parent(profile, u), v = parent(profile, v), d += 2;
  return d;
}

ProbabilityEstimate binomial(std::int64_t successes, std::int64_t trials, std::uint64_t seed) {
  ProbabilityEstimate out;
  out.trials = trials;
  out.successes = successes;
  out.seed = seed;
  out.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

}  // namespace

WalkStats summarize(std::vector<double> values, std::uint64_t seed) {
  WalkStats s;
  s.trials = static_cast<std::int64_t>(values.size());
  s.seed = seed;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  std::sort(values.begin(), values.end());
  auto rank = [&](double p) {
    const auto k = static_cast<std::size_t>(std::ceil(p * n));
    return values[std::min(values.size(), std::max<std::size_t>(k, 1)) - 1];
  };
  s.q50 = rank(0.5);
  s.q90 = rank(0.9);
  s.q99 = rank(0.99);
  return s;
}

WalkStats simulate_hitting(const BranchingProfile& profile, std::int64_t r, std::int64_t trials, std::uint64_t seed) {
  if (r < 1 || r > profile.max_level())
    throw RangeError("hitting radius " + std::to_string(r) + " must lie in [1, max_level]");
  require_trials(trials);
  std::vector<double> times(static_cast<std::size_t>(trials));
  parallel_for(times.size(), [&](std::size_t i) {
    Stream rng(seed, i);
    TreeVertex v = vertex_at(profile, r, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(profile.ell(r)))));
    std::int64_t t = 0;
    while (v.level > 0) {
      if (v.level == r) {
        // children of the sphere lie outside the induced ball
        v = parent(profile, v);
      } else {
        const Neighborhood nb = neighbors(profile, v);
        v = nb[rng.below(nb.size())].to;
      }
      ++t;
    }
    times[i] = static_cast<double>(t);
  });
  WalkStats s = summarize(std::move(times), seed);
  s.params = {{"r", static_cast<double>(r)}};
  return s;
}

ProbabilityEstimate simulate_clock(const BranchingProfile& profile, const ProductVertex& start,
                                   const ProductVertex& target, std::int64_t r, std::int64_t trials,
                                   std::uint64_t seed) {
  require_trials(trials);
  if (!is_valid(profile, start.t) || !is_valid(profile, target.t)) throw RangeError("clock endpoints outside the profile");
  const std::int64_t d = tree_distance(profile, start.t, target.t) + std::abs(start.z - target.z);
  if (r <= d && !(start == target))
    throw RangeError("clock radius " + std::to_string(r) + " must exceed d(start, target) = " + std::to_string(d));
  const double fire = clock_probability(r);
  std::vector<char> escaped(static_cast<std::size_t>(trials), 0);
  parallel_for(escaped.size(), [&](std::size_t i) {
    Stream rng(seed, i);
    ProductVertex x = start;
    for (;;) {
      if (x == target) return;
      if (rng.bernoulli(fire)) {
        escaped[i] = 1;
        return;
      }
      if (x.t.level >= profile.max_level()) depth_exhausted(profile);
      const Neighborhood nb = neighbors(profile, x.t);
      const auto k = rng.below(nb.size() + 2);
      if (k < nb.size()) {
        x.t = nb[k].to;
      } else {
        x.z += k == nb.size() ? 1 : -1;
      }
    }
  });
  std::int64_t successes = 0;
  for (char e : escaped) successes += e;
  auto out = binomial(successes, trials, seed);
  out.params = {{"r", static_cast<double>(r)}, {"fire_probability", fire}};
  return out;
}

ExitEstimate simulate_exit_potential(const BranchingProfile& profile, const PotentialField<double>& field,
                                     std::int64_t s, std::int64_t trials, std::uint64_t seed) {
  require_trials(trials);
  if (field.metric != Metric::Ball) throw ValidationError("exit potential needs a ball-metric field");
  if (field.profile_digest != profile.digest()) throw ValidationError("field was solved for a different profile");
  if (s < 1 || 2 * s > field.radius)
    throw RangeError("exit radius " + std::to_string(s) + " needs field radius >= " + std::to_string(2 * s));

  struct Exit {
    std::int64_t n = -1, z = 0;
  };
  std::vector<Exit> exits(static_cast<std::size_t>(trials));
  parallel_for(exits.size(), [&](std::size_t i) {
    Stream rng(seed, i);
    std::int64_t n = 0, z = 0;
    do {
      const auto left = n > 0 ? static_cast<double>(profile.ell(n)) : 0.0;
      const auto right = static_cast<double>(profile.ell(n + 1));
      const auto vertical = static_cast<double>(profile.ell(n));
      const double u = rng.uniform() * (left + right + 2 * vertical);
      if (u < left) {
        --n;
      } else if (u < left + right) {
        ++n;
      } else if (u < left + right + vertical) {
        ++z;
      } else {
        --z;
      }
    } while ((n != 0 || z != 0) && n + std::abs(z) < s);
    if (n != 0 || z != 0) exits[i] = {n, std::abs(z)};
  });

  ExitEstimate out;
  const double a0 = field.origin_value();
  std::vector<double> drops;
  std::vector<char> hit(static_cast<std::size_t>(s) + 1, 0);
  for (const auto& e : exits) {
    if (e.n < 0) continue;
    drops.push_back(a0 - field.value(e.n, e.z));
    hit[static_cast<std::size_t>(e.n)] = 1;
  }
  out.escapes = static_cast<std::int64_t>(drops.size());
  out.escape_probability = static_cast<double>(out.escapes) / static_cast<double>(trials);
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 0; n <= s; ++n) {
    if (!hit[static_cast<std::size_t>(n)]) continue;
    const double drop = a0 - field.value(n, s - n);
    hi = std::max(hi, drop);
    lo = std::min(lo, drop);
  }
  out.oscillation = out.escapes > 0 ? hi / lo : 0.0;
  out.stats = summarize(std::move(drops), seed);
  out.stats.params = {{"s", static_cast<double>(s)}, {"field_radius", static_cast<double>(field.radius)}};
  const FlattenedNetwork<double> net(profile, s, s);
  out.resistance = effective_resistance(net, s, std::max(field.tol, 1e-14));
  return out;
}

double coupling_success_probability(const BranchingProfile& profile) {
  return 1.0 / static_cast<double>(switch_or_move_generators(profile).size());
}

CouplingEstimate simulate_coupling(const BranchingProfile& profile, const ProductVertex& v, std::int64_t r,
                                   std::int64_t trials, std::uint64_t seed) {
  require_trials(trials);
  if (r < 2) throw RangeError("coupling radius must be >= 2");
  if (!is_valid(profile, v.t) || v.t.level >= profile.max_level()) throw RangeError("lamp site outside the profile");
  const auto gens = switch_or_move_generators(profile);
  const double k = static_cast<double>(gens.size());
  const double fire = clock_probability(r);
  // Lazy step: hold 1/2, each generator 1/(2k). At a visit of v.R_t to o the switch of one walk
  // is matched with the hold of the other, in both directions: mass 1/k couples the walks. The
  // remaining hold mass 1/2 - 1/(2k) is taken jointly, so each walk keeps its lazy law.
  // The lamps never influence the coupling time, so only the tracked point v.R_t is simulated.
  const double success = 1.0 / k;
  const double joint_hold = 0.5 - 0.5 / k;

  struct Run {
    bool failed = false;
    std::int64_t attempts = 0;
  };
  std::vector<Run> runs(static_cast<std::size_t>(trials));
  parallel_for(runs.size(), [&](std::size_t i) {
    Stream rng(seed, i);
    ProductVertex p = v;
    Run run;
    for (;;) {
      if (rng.bernoulli(fire)) {
        run.failed = true;
        break;
      }
      double u = rng.uniform();
      if (p == kOrigin) {
        if (u < success) break;
        if (u < success + joint_hold) {
          ++run.attempts;
          continue;
        }
        ++run.attempts;
        // the switch was used up by the coupling: rescale onto the moves only
        u = 0.5 + 0.5 / k + (u - success - joint_hold);
      }
      if (u < 0.5) continue;
      const auto g = static_cast<std::size_t>((u - 0.5) * 2.0 * k);
      const Generator& s = gens[std::min(g, gens.size() - 1)];
      if (s.kind == Generator::Kind::Move) {
        if (p.t.level >= profile.max_level()) depth_exhausted(profile);
        p.t = apply_letter(profile, p.t, s.letter);
      } else if (s.kind == Generator::Kind::Shift) {
        p.z += s.step;
      }
    }
    runs[i] = run;
  });

  CouplingEstimate out;
  std::int64_t failures = 0, most = 0;
  for (const auto& run : runs) {
    failures += run.failed;
    most = std::max(most, run.attempts);
  }
  out.failure = binomial(failures, trials, seed);
  out.failure.params = {{"r", static_cast<double>(r)}, {"success_probability", success}};
  out.attempts_tail.assign(static_cast<std::size_t>(most) + 1, 0);
  for (const auto& run : runs)
    for (std::int64_t j = 0; j <= run.attempts; ++j) ++out.attempts_tail[static_cast<std::size_t>(j)];

  std::vector<double> xs, ys;
  for (std::size_t j = 1; j < out.attempts_tail.size(); ++j) {
    if (out.attempts_tail[j] < 30) break;
    xs.push_back(static_cast<double>(j));
    ys.push_back(std::log(static_cast<double>(out.attempts_tail[j]) / static_cast<double>(trials)));
  }
  if (xs.size() >= 2) {
    const LinearFit fit = fit_line(xs, ys);
    out.decay_rate = -fit.slope;
    out.decay_r2 = fit.r2;
  }
  return out;
}

OccupationCheck occupation_check(const BranchingProfile& profile, std::int64_t r, std::int64_t steps,
                                 std::uint64_t seed) {
  if (r < 1 || r > profile.max_level()) throw RangeError("occupation radius must lie in [1, max_level]");
  if (steps < 1) throw ValidationError("occupation_check needs steps >= 1");
  std::vector<double> mass(static_cast<std::size_t>(r) + 1);
  double total = 0.0;
  for (std::int64_t n = 0; n <= r; ++n) {
    const int degree = (n > 0 ? 1 : 0) + (n < r ? child_count(profile, n) : 0);
    mass[static_cast<std::size_t>(n)] = static_cast<double>(profile.ell(n)) * degree;
    total += mass[static_cast<std::size_t>(n)];
  }
  std::vector<std::int64_t> visits(static_cast<std::size_t>(r) + 1, 0);
  Stream rng(seed, 0);
  TreeVertex v = kRoot;
  for (std::int64_t t = 0; t < steps; ++t) {
    if (v.level == r) {
      v = parent(profile, v);
    } else {
      const Neighborhood nb = neighbors(profile, v);
      v = nb[rng.below(nb.size())].to;
    }
    ++visits[static_cast<std::size_t>(v.level)];
  }
  OccupationCheck out;
  const auto N = static_cast<double>(steps);
  for (std::int64_t n = 0; n <= r; ++n) {
    const double expected = mass[static_cast<std::size_t>(n)] / total;
    const double observed = static_cast<double>(visits[static_cast<std::size_t>(n)]) / N;
    out.rows.push_back({n, expected, observed});
    out.chi2 += (observed - expected) * (observed - expected) * N / expected;
    out.max_rel_error = std::max(out.max_rel_error, std::abs(observed - expected) / expected);
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit_line needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw ValidationError("fit_line needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace wreathwalk
