#include "wreathwalk/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "wreathwalk/bubble.hpp"
#include "wreathwalk/error.hpp"
#include "wreathwalk/group.hpp"
#include "wreathwalk/harmonic.hpp"
#include "wreathwalk/network.hpp"
#include "wreathwalk/schreier.hpp"
#include "wreathwalk/suite.hpp"
#include "wreathwalk/tree.hpp"
#include "wreathwalk/walk.hpp"

namespace wreathwalk {

namespace {

using Runner = std::function<void(const Config&, ResultEnvelope&)>;

std::string fr(double x) { return format_real(x); }
std::string fi(std::int64_t x) { return format_int(x); }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  return out;
}

std::uint64_t seed_of(const Config& c) { return static_cast<std::uint64_t>(c.require_int("seed", 0)); }

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

double ball_resistance(const BranchingProfile& p, std::int64_t r, double tol) {
  const FlattenedNetwork<double> net(p, r, r);
  return effective_resistance(net, r, tol);
}

Metric metric_from(const Config& c, const std::string& key) {
  const std::string m = c.get_string(key, "ball");
  if (m == "ball") return Metric::Ball;
  if (m == "square") return Metric::Square;
  throw ConfigError("field '" + key + "': expected ball or square, got '" + m + "'");
}

// --- growth and network --------------------------------------------------------------------

void synth(const Config& c, ResultEnvelope& env) {
  const GrowthSpec spec = growth_spec_from(c);
  const BranchingProfile p = profile_from(c);
  env.columns = {"n", "ell"};
  env.add_row({"1", fi(p.ell(1))});
  for (std::int64_t b : p.branch_levels())
    if (b + 1 <= p.max_level()) env.add_row({fi(b + 1), fi(p.ell(b + 1))});
  env.add_row({fi(p.max_level()), fi(p.ell(p.max_level()))});
  for (const auto& check : validate_profile(p).checks) env.add_verdict(check.name, check.passed, check.detail);
  if (spec.family == GrowthFamily::LogPower) {
    const double ratio = analytic_resistance_sum(p, p.max_level()) / spec.f(static_cast<double>(p.max_level()));
    env.add_verdict("resistance sum / f(N) in [0.2, 5]", ratio >= 0.2 && ratio <= 5, "ratio " + fr(ratio));
  }
  if (c.has("output.profile")) {
    auto out = open_output(c.get_string("output.profile", ""));
    write_profile_csv(out, p);
  }
}

void res(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto ms = c.get_int_list("res.m", {4, 8, 16, 32, 64}, 1);
  const double tol = c.get_double("tol", 1e-10);
  env.columns = {"m", "res_exact", "lower", "upper", "analytic", "ratio", "iterations"};
  std::vector<double> ratios;
  bool bracket = true;
  for (const auto& row : resistance_report(p, ms, tol)) {
    env.add_row({fi(row.m), fr(row.res_exact), fr(row.lower), fr(row.upper), fr(row.analytic), fr(row.ratio),
                 fi(row.iterations)});
    bracket = bracket && row.lower <= row.res_exact + 1e-8 && row.res_exact <= row.upper + 1e-8;
    ratios.push_back(row.ratio);
  }
  env.add_verdict("shorting bound <= Res <= flow bound", bracket);
  env.add_verdict("ratio spread <= 50", spread(ratios) <= 50, "spread " + fr(spread(ratios)));
}

void potential(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const std::int64_t r = c.get_int("potential.radius", 32, 1);
  const Metric metric = metric_from(c, "potential.metric");
  const std::string norm_name = c.get_string("potential.normalization", "minus-half");
  if (norm_name != "minus-half" && norm_name != "origin-zero")
    throw ConfigError("field 'potential.normalization': expected minus-half or origin-zero, got '" + norm_name + "'");
  const auto norm = norm_name == "minus-half" ? Normalization::OriginMinusHalf : Normalization::OriginZero;
  const double tol = c.get_double("tol", 1e-12);
  const std::int64_t probe = std::min(c.get_int("potential.probe", 8, 0), r);
  const FlattenedNetwork<double> net(p, r, r);
  const auto field = solve_potential(net, r, metric, norm, tol);
  env.columns = {"n", "z", "value"};
  for (std::int64_t n = 0; n <= probe; ++n)
    for (std::int64_t z = 0; metric_radius(metric, n, z) <= probe; ++z) env.add_row({fi(n), fi(z), fr(field.value(n, z))});
  env.add_verdict("solver residual <= 10 tol", field.residual <= 10 * tol, "residual " + fr(field.residual));
  env.add_verdict("resistance positive", field.resistance > 0, "Res " + fr(field.resistance));
  if (c.has("output.field")) write_potential_cache(c.get_string("output.field", ""), field);
}

// --- harmonic and walks --------------------------------------------------------------------

void harmonic_check(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const double tol = c.get_double("tol", 1e-12);
  const std::uint64_t seed = seed_of(c);
  const auto radii = c.get_int_list("harmonic.rho", {4, 8, 16, 32}, 1);
  const std::int64_t radius = c.get_int("harmonic.radius", 2 * *std::max_element(radii.begin(), radii.end()) + 6, 3);
  const auto ev = HarmonicEvaluator::solve(p, radius, tol);
  double worst = 0;
  for (const auto& row : harmonicity_sample(ev, c.get_int("harmonic.samples", 1000, 1), seed))
    worst = std::max(worst, std::abs(row.residual));
  env.columns = {"rho", "samples", "max_abs_h", "min_abs_h", "resistance", "ratio", "oscillation"};
  std::vector<double> ratios;
  bool flips = true, far = true;
  for (const auto& row : growth_envelope_check(ev, radii, c.get_int("harmonic.sphere_samples", 400, 1), seed)) {
    env.add_row({fi(row.rho), fi(row.samples), fr(row.max_abs_h), fr(row.min_abs_h), fr(row.resistance), fr(row.ratio),
                 fr(row.oscillation)});
    ratios.push_back(row.ratio);
    flips = flips && row.sign_flip_exact;
    far = far && row.far_lamps_exact;
  }
  env.add_verdict("max |Laplacian h| <= 10 tol", worst <= 10 * tol, "max " + fr(worst));
  env.add_verdict("o-lamp toggle flips the sign exactly", flips);
  env.add_verdict("other lamps leave h unchanged", far);
  env.add_verdict("envelope ratio spread <= 10", spread(ratios) <= 10, "spread " + fr(spread(ratios)));
}

void walk_hitting(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto rs = c.get_int_list("walk.r", {8, 16, 32, 64}, 1);
  const std::int64_t trials = c.get_int("trials", 10000, 100);
  const std::uint64_t seed = seed_of(c);
  env.columns = {"r", "mean", "std_error", "q50", "q90", "q99"};
  std::vector<double> xs, ys;
  for (std::int64_t r : rs) {
    const auto s = simulate_hitting(p, r, trials, seed + static_cast<std::uint64_t>(r));
    env.add_row({fi(r), fr(s.mean), fr(s.std_error), fr(s.q50), fr(s.q90), fr(s.q99)});
    xs.push_back(std::log(static_cast<double>(r)));
    ys.push_back(std::log(s.mean));
  }
  if (rs.size() >= 2) {
    const double slope = fit_line(xs, ys).slope;
    env.add_verdict("log-log slope in [1.7, 2.3]", slope >= 1.7 && slope <= 2.3, "slope " + fr(slope));
  }
}

void walk_clock(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto rs = c.get_int_list("walk.r", {8, 16, 32, 64}, 2);
  const std::int64_t trials = c.get_int("trials", 100000, 100);
  const std::uint64_t seed = seed_of(c);
  env.columns = {"r", "escape", "std_error", "resistance", "escape_times_resistance"};
  std::vector<double> products;
  for (std::int64_t r : rs) {
    const auto est =
        simulate_clock(p, ProductVertex{vertex_at(p, 1, 0), 0}, kOrigin, r, trials, seed + static_cast<std::uint64_t>(r));
    const double res_r = ball_resistance(p, r, 1e-12);
    products.push_back(est.estimate * res_r);
    env.add_row({fi(r), fr(est.estimate), fr(est.std_error), fr(res_r), fr(products.back())});
  }
  env.add_verdict("escape * Res spread <= 10", spread(products) <= 10, "spread " + fr(spread(products)));
}

void walk_exit(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto ss = c.get_int_list("walk.s", {4, 8, 16}, 1);
  const std::int64_t trials = c.get_int("trials", 100000, 100);
  const std::uint64_t seed = seed_of(c);
  const std::int64_t radius = 2 * *std::max_element(ss.begin(), ss.end());
  const FlattenedNetwork<double> net(p, radius + 8, radius + 8);
  const auto field = solve_potential(net, radius, Metric::Ball, Normalization::OriginMinusHalf, 1e-12);
  env.columns = {"s", "mean_drop", "std_error", "resistance", "escape_probability", "oscillation"};
  bool within = true;
  for (std::int64_t s : ss) {
    const auto e = simulate_exit_potential(p, field, s, trials, seed + static_cast<std::uint64_t>(s));
    env.add_row({fi(s), fr(e.stats.mean), fr(e.stats.std_error), fr(e.resistance), fr(e.escape_probability),
                 fr(e.oscillation)});
    within = within && std::abs(e.stats.mean - e.resistance) <= 3 * e.stats.std_error;
  }
  env.add_verdict("mean exit drop within 3 stderr of Res(s)", within);
}

void walk_coupling(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto rs = c.get_int_list("walk.r", {8, 16, 32, 64}, 2);
  const std::int64_t trials = c.get_int("trials", 50000, 100);
  const std::uint64_t seed = seed_of(c);
  env.columns = {"r", "failure", "std_error", "resistance", "failure_times_resistance", "decay_rate", "decay_r2"};
  std::vector<double> products;
  double min_r2 = 1;
  for (std::int64_t r : rs) {
    const auto est = simulate_coupling(p, kOrigin, r, trials, seed + static_cast<std::uint64_t>(r));
    const double res_r = ball_resistance(p, r, 1e-12);
    products.push_back(est.failure.estimate * res_r);
    min_r2 = std::min(min_r2, est.decay_r2);
    env.add_row({fi(r), fr(est.failure.estimate), fr(est.failure.std_error), fr(res_r), fr(products.back()),
                 fr(est.decay_rate), fr(est.decay_r2)});
  }
  env.add_verdict("failure * Res spread <= 10", spread(products) <= 10, "spread " + fr(spread(products)));
  env.add_verdict("log-linear decay fit R^2 >= 0.9", min_r2 >= 0.9, "min R^2 " + fr(min_r2));
}

// --- group -----------------------------------------------------------------------------------

void entropy(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto ns = c.get_int_list("entropy.n", {64, 128, 256, 512, 1024}, 0);
  const std::int64_t samples = c.get_int("trials", 100000, 100);
  const std::int64_t depth_cap = c.get_int("entropy.depth_cap", 4, 0);
  const std::uint64_t seed = seed_of(c);
  env.columns = {"n", "entropy", "std_error", "distinct", "entropy_over_sqrt_n"};
  double worst = 0;
  for (std::int64_t n : ns) {
    const auto e = entropy_estimate(p, n, samples, depth_cap, seed + static_cast<std::uint64_t>(n));
    const double ratio = n > 0 ? e.entropy / std::sqrt(static_cast<double>(n)) : 0.0;
    worst = std::max(worst, ratio);
    env.add_row({fi(n), fr(e.entropy), fr(e.std_error), fi(e.distinct), fr(ratio)});
  }
  env.add_verdict("H_n / sqrt(n) <= frozen bound", worst <= frozen_bands().entropy_sqrt_n,
                  "max " + fr(worst) + ", bound " + fr(frozen_bands().entropy_sqrt_n));
}

void balls(const Config& c, ResultEnvelope& env) {
  const BranchingProfile p = profile_from(c);
  const auto rs = c.get_int_list("balls.r", {1, 2, 4, 8, 16, 32}, 0);
  const auto levels = p.branch_levels();
  const std::int64_t last = levels.empty() ? 0 : levels.back();
  env.columns = {"r", "scan_depth", "types", "bound"};
  bool ok = true;
  for (std::int64_t r : rs) {
    const std::int64_t scan = c.get_int("balls.scan_depth", std::min(p.max_level() - r, last + 2 * r + 4), 0);
    const auto catalog = count_ball_types(p, static_cast<int>(r), scan);
    const std::int64_t bound = ball_type_bound(p, static_cast<int>(r));
    ok = ok && static_cast<std::int64_t>(catalog.count()) <= bound;
    env.add_row({fi(r), fi(scan), fi(static_cast<std::int64_t>(catalog.count())), fi(bound)});
    if (c.has("output.catalog") && r == rs.back()) {
      auto out = open_output(c.get_string("output.catalog", ""));
      out << catalog_json(catalog) << "\n";
    }
  }
  env.add_verdict("ball types <= counting bound", ok);
}

// --- bubble ----------------------------------------------------------------------------------

ThetaGraph theta_from(const Config& c) {
  const auto levels = c.get_int_list("bubble.levels", {1, 3, 7, 15, 31, 63}, 0);
  std::vector<int> degrees;
  for (auto d : c.get_int_list("bubble.degrees", {}, 0)) degrees.push_back(static_cast<int>(d));
  const auto generations = c.get_int("bubble.generations", static_cast<std::int64_t>(levels.size()) - 1, 0);
  return build_theta(levels, degrees, static_cast<int>(generations));
}

void bubble_build(const Config& c, ResultEnvelope& env) {
  const ThetaGraph theta = theta_from(c);
  env.columns = {"generation", "bubbles", "bubble_length", "cycles", "cycle_length"};
  for (int g = 0; g <= theta.generations; ++g) {
    std::int64_t bubbles = 0, length = 0, cycles = 0, cycle_length = 0;
    for (std::size_t b = 0; b < theta.bubble_length.size(); ++b)
      if (theta.bubble_generation[b] == g) {
        ++bubbles;
        length = theta.bubble_length[b];
      }
    if (g >= 1) {
      cycle_length = theta.degrees.empty() ? 3 : theta.degrees[static_cast<std::size_t>(g - 1)];
      for (std::int64_t b = 0; b < static_cast<std::int64_t>(theta.bubble_length.size()); ++b)
        if (theta.bubble_generation[static_cast<std::size_t>(b)] == g - 1) ++cycles;
    }
    env.add_row({fi(g), fi(bubbles), fi(length), fi(cycles), fi(cycle_length)});
  }
  const auto check = check_theta(theta);
  env.add_verdict("alpha is a permutation", check.alpha_bijective);
  env.add_verdict("beta is a permutation", check.beta_bijective);
  env.add_verdict("alpha orbits are the bubbles", check.alpha_orbits_are_bubbles);
  env.add_verdict("beta orbits are the branching cycles", check.beta_orbits_are_cycles);
  env.add_verdict("each vertex lies on exactly one bubble", check.gluing_ok);
  if (c.has("output.edges")) {
    auto out = open_output(c.get_string("output.edges", ""));
    write_edge_list(out, theta_schreier(theta));
  }
}

void bubble_quotient(const Config& c, ResultEnvelope& env) {
  const BubbleWord w = BubbleWord::parse(c.get_string("bubble.word", ""));
  const std::int64_t modulus = c.get_int("bubble.modulus", 0, 0);
  const LampShift q = wreath_quotient(w, modulus);
  env.columns = {"kind", "position", "value"};
  env.add_row({"shift", "", fi(q.shift)});
  for (const auto& [pos, value] : q.lamps) env.add_row({"lamp", fi(pos), fi(value)});
  if (c.get_bool("bubble.kernel", false)) {
    const ThetaGraph theta = theta_from(c);
    const auto moduli = c.get_int_list("bubble.moduli", {2, 3, 4, 5}, 2);
    const auto report = kernel_support_check(theta, w, moduli);
    env.add_verdict("word lies in the kernel", report.in_kernel);
    env.add_verdict("support radius <= 2 |word|", report.contained(),
                    "support " + fi(report.support_radius) + ", bound " + fi(report.bound) + ", moved " +
                        fi(report.moved) + ", excluded " + fi(report.excluded));
  }
}

void bubble_limits(const Config& c, ResultEnvelope& env) {
  LimitSpec spec;
  spec.kind = parse_limit_kind(c.get_string("bubble.kind", "T_hat"));
  spec.n = static_cast<int>(c.get_int("bubble.n", 3, 2));
  spec.window = c.get_int("bubble.window", 10, 1);
  spec.parity = static_cast<int>(c.get_int("bubble.parity", 1, 0));
  const std::int64_t r_max = c.get_int("bubble.radius", 5, 0);
  const bool tree = spec.kind == LimitKind::TBar || spec.kind == LimitKind::THat;
  SchreierGraph base;
  if (tree) {
    const auto levels = c.get_int_list("bubble.tree_levels", {7, 15, 31}, 0);
    const std::int64_t depth = c.get_int("bubble.depth", 50, 1);
    const BranchingProfile p(levels, depth + 1);
    spec.letters = static_cast<int>(generator_letters(p).size());
    base = tree_schreier(p, depth);
  } else {
    base = theta_schreier(theta_from(c));
  }
  const SchreierGraph limit = limit_graph(spec);
  env.columns = {"r", "checked", "missing", "base_balls"};
  bool ok = true;
  for (std::int64_t r = 0; r <= r_max; ++r) {
    const auto report = ball_containment(limit, base, static_cast<int>(r));
    env.add_row({fi(r), fi(report.checked), fi(report.missing), fi(report.base_balls)});
    ok = ok && report.ok();
  }
  env.add_verdict("every limit ball occurs in the base graph", ok, limit.name + " in " + base.name);
  if (c.has("output.edges")) {
    auto out = open_output(c.get_string("output.edges", ""));
    write_edge_list(out, limit);
  }
}

// --- report ----------------------------------------------------------------------------------

void report(const Config& c, ResultEnvelope& env) {
  SuiteOptions options;
  options.quick = c.get_bool("report.quick", true);
  options.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(options.seed), 0));
  std::vector<std::int64_t> all;
  for (int i = 1; i <= kCriterionCount; ++i) all.push_back(i);
  env.columns = {"check", "title", "verdict", "seconds", "detail"};
  for (std::int64_t id : c.get_int_list("report.checks", all, 1)) {
    if (id > kCriterionCount) throw ConfigError("field 'report.checks': no check numbered " + fi(id));
    const auto r = run_criterion(static_cast<int>(id), options);
    env.add_row({fi(id), r.title, r.pass ? "PASS" : "FAIL", fr(r.seconds), r.detail});
    env.add_verdict("check " + fi(id) + ": " + r.title, r.pass, r.detail);
  }
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"synth", synth},
      {"res", res},
      {"potential", potential},
      {"harmonic-check", harmonic_check},
      {"walk hitting", walk_hitting},
      {"walk clock", walk_clock},
      {"walk exit", walk_exit},
      {"walk coupling", walk_coupling},
      {"entropy", entropy},
      {"balls", balls},
      {"bubble build", bubble_build},
      {"bubble quotient", bubble_quotient},
      {"bubble limits", bubble_limits},
      {"report", report},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : runners()) out.push_back(name);
    return out;
  }();
  return names;
}

ResultEnvelope run_command(const std::string& command, const Config& config) {
  const auto it = runners().find(command);
  if (it == runners().end()) throw ConfigError("unknown command '" + command + "'");
  ResultEnvelope env;
  env.command = command;
  env.config_hash = hex_digest(config.hash(command));
  const auto start = std::chrono::steady_clock::now();
  it->second(config, env);
  env.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return env;
}

RunOutcome run_cached(const std::string& command, const Config& config, const std::string& dir) {
  if (!runners().count(command)) throw ConfigError("unknown command '" + command + "'");
  const std::string hash = hex_digest(config.hash(command));
  // output files are side effects, so a run that asks for them is never served from the cache
  bool writes_files = false;
  for (const auto& [key, value] : config.entries()) writes_files = writes_files || key.rfind("output.", 0) == 0;
  if (!dir.empty() && !writes_files) {
    if (auto hit = load_cached(dir, hash); hit && hit->command == command) return {std::move(*hit), true};
  }
  RunOutcome out{run_command(command, config), false};
  if (!dir.empty()) store_cached(dir, out.envelope);
  return out;
}

}  // namespace wreathwalk
