// One PASS/FAIL line per numbered check. Library checks come from the shared suite; the
// oracle halves (dense elimination, exact chains, the dihedral entropy recursion) are added
// here so that the library never sees the test-only oracles.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oracles/chain_oracle.hpp"
#include "oracles/dihedral_oracle.hpp"
#include "oracles/network_oracle.hpp"
#include "wreathwalk/group.hpp"
#include "wreathwalk/network.hpp"
#include "wreathwalk/suite.hpp"
#include "wreathwalk/walk.hpp"

using namespace wreathwalk;

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

void add(CriterionResult& r, bool pass, const std::string& detail) {
  r.pass = r.pass && pass;
  std::string d = detail;
  if (d.size() >= 2 && d.compare(d.size() - 2, 2, "; ") == 0) d.resize(d.size() - 2);
  r.detail += "; " + d;
}

// F balls of radius <= 3 against dense elimination, for the presets and a denser profile.
void dense_network_oracle(CriterionResult& r) {
  double worst = 0;
  std::vector<BranchingProfile> profiles{BranchingProfile({1, 3, 7}, 40), BranchingProfile({0, 2}, 40, {4, 5})};
  for (const auto& preset : standard_presets()) profiles.push_back(preset_profile(preset).truncated(40));
  for (const auto& p : profiles) {
    for (std::int64_t m = 1; m <= 3; ++m) {
      const FlattenedNetwork<double> net(p, m, m);
      worst = std::max(worst, std::abs(effective_resistance(net, m, 1e-13) -
                                       static_cast<double>(oracle::flattened_resistance(p, m, Metric::Ball))));
      worst = std::max(worst, std::abs(effective_resistance_square(net, m, 1e-13) -
                                       static_cast<double>(oracle::flattened_resistance(p, m, Metric::Square))));
    }
    for (std::int64_t m = 1; m <= 4; ++m)
      worst = std::max(worst, std::abs(product_ball_resistance(p, m, Metric::Square) -
                                       static_cast<double>(oracle::product_resistance(p, m, Metric::Square))));
  }
  add(r, worst <= 1e-10, "dense elimination max diff " + fmt(worst));
}

void hitting_oracle(CriterionResult& r, std::uint64_t seed) {
  bool ok = true;
  std::string detail;
  for (const auto& preset : standard_presets()) {
    const auto p = preset_profile(preset);
    const std::vector<int> children{child_count(p, 0), child_count(p, 1)};
    const double exact = static_cast<double>(oracle::mean_hitting_time(children, 2));
    const auto est = simulate_hitting(p, 2, 100000, seed);
    const double z = std::abs(est.mean - exact) / est.std_error;
    ok = ok && z <= 3;
    detail += preset.name + " r=2 " + fmt(est.mean) + " vs exact " + fmt(exact) + "; ";
  }
  add(r, ok, detail);
}

void clock_oracle(CriterionResult& r, std::uint64_t seed) {
  const auto ray = preset_profile(standard_presets()[0]);
  const auto est = simulate_clock(ray, ProductVertex{vertex_at(ray, 1, 0), 0}, kOrigin, 4, 400000, seed);
  const double exact = static_cast<double>(oracle::ray_clock_escape(1.0L / 17.0L, 1, 0));
  add(r, std::abs(est.estimate - exact) <= 3 * est.std_error,
      "ray r=4 killed chain " + fmt(exact) + " vs " + fmt(est.estimate) + " +- " + fmt(est.std_error));
}

void entropy_oracle(CriterionResult& r) {
  bool ok = true;
  int compared = 0;
  double worst = 0;
  for (const auto& [key, value] : r.measured) {
    // ray entries are reported under the Log preset's name
    if (key.rfind("Log=", 0) != 0 || key.find(".H") == std::string::npos) continue;
    const auto n = std::stoi(key.substr(key.find(".H") + 2));
    const double se = r.measured.at(key.substr(0, key.find(".H")) + ".se" + std::to_string(n));
    const double z = std::abs(value - static_cast<double>(oracle::dihedral_walk_entropy(n))) / se;
    worst = std::max(worst, z);
    ok = ok && z <= 3;
    ++compared;
  }
  add(r, ok && compared > 0,
      "ray entropy vs exact recursion at " + std::to_string(compared) + " lengths, max " + fmt(worst) + " stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numbered desk-scale checks"};
  bool quick = false, dump = false;
  std::vector<int> only;
  app.add_flag("--quick", quick, "fewer trials and radii");
  app.add_flag("--dump", dump, "print measured values");
  app.add_option("--only", only, "check numbers to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  SuiteOptions options;
  options.quick = quick;
  std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  double total = 0;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!selected.empty() && !selected.count(id)) continue;
    auto r = run_criterion(id, options);
    const auto t0 = std::chrono::steady_clock::now();
    if (id == 3) dense_network_oracle(r);
    if (id == 6) hitting_oracle(r, options.seed);
    if (id == 7) clock_oracle(r, options.seed);
    if (id == 11) entropy_oracle(r);
    r.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += r.seconds;
    failures += !r.pass;
    std::printf("%s  C%02d %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", id, r.title.c_str(), r.detail.c_str(), r.seconds);
    if (dump)
      for (const auto& [k, v] : r.measured) std::printf("      %s = %.10g\n", k.c_str(), v);
    std::fflush(stdout);
  }
  std::printf("%d failed, total %.1f s\n", failures, total);
  return failures == 0 ? 0 : 1;
}
