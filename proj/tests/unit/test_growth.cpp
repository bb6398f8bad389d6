#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles/growth_oracle.hpp"
#include "wreathwalk/error.hpp"
#include "wreathwalk/growth.hpp"

using namespace wreathwalk;
namespace cn = wreathwalk::check_names;

TEST_CASE("eval_w2 of the log family is 1") {
  const auto spec = GrowthSpec::log();
  for (std::int64_t n : {1, 2, 3, 17, 1000, 123456}) CHECK(eval_w2(spec, n) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eval_w2 of logpower(1/2) matches the unpruned minimum") {
  const auto spec = GrowthSpec::log_power(0.5);
  CHECK(eval_w2(spec, 4096) == doctest::Approx(6.105003248719641).epsilon(1e-13));
  const auto fp = oracle::log_power_fprime(0.5L);
  for (std::int64_t n : {1, 2, 5, 64, 1000, 4096, 99999, 1 << 20}) {
    CHECK(eval_w2(spec, n) == doctest::Approx(static_cast<double>(oracle::w2_brute(fp, n))).epsilon(1e-12));
  }
}

TEST_CASE("eval_w2 rejects degenerate derivatives") {
  GrowthTable flat{{1.0, 2.0, 1e9}, {1.0, 2.0, 2.0}, {1.0, 0.0, 0.0}};
  const auto spec = GrowthSpec::custom(flat);
  CHECK_THROWS_AS(eval_w2(spec, 64), EvaluationError);
  CHECK_THROWS_AS(eval_w2(GrowthSpec::log(), 0), RangeError);
  try {
    eval_w2(spec, 64);
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("n=64") != std::string::npos);
  }
}

TEST_CASE("custom table beyond its range is an evaluation error") {
  GrowthTable t{{1.0, 10.0}, {1.0, 1.0 + std::log(10.0)}, {1.0, 0.1}};
  CHECK_THROWS_AS(eval_w2(GrowthSpec::custom(t), 1000), EvaluationError);
}

TEST_CASE("log preset synthesizes a ray") {
  const auto p = synthesize_branching(GrowthSpec::log(), 1000);
  CHECK(p.branch_levels().empty());
  for (std::int64_t n = 0; n <= 1000; ++n) CHECK(p.ell(n) == 1);
  CHECK(validate_profile(p).all_passed());
}

TEST_CASE("synthesis matches the unpruned reference") {
  SUBCASE("logpower(1/2)") {
    const auto p = synthesize_branching(GrowthSpec::log_power(0.5), 1 << 14);
    const auto ref = oracle::branch_levels_brute(oracle::log_power_fprime(0.5L), 1 << 14);
    CHECK(std::vector<std::int64_t>(p.branch_levels().begin(), p.branch_levels().end()) == ref);
    CHECK(ref == std::vector<std::int64_t>{1, 20});
  }
  SUBCASE("logpower(1/3)") {
    const auto p = synthesize_branching(GrowthSpec::log_power(1.0 / 3.0), 1 << 12);
    const auto ref = oracle::branch_levels_brute(oracle::log_power_fprime(1.0L / 3.0L), 1 << 12);
    CHECK(std::vector<std::int64_t>(p.branch_levels().begin(), p.branch_levels().end()) == ref);
  }
}

TEST_CASE("synthesized presets pass validation") {
  for (const auto& spec : {GrowthSpec::log(), GrowthSpec::log_power(0.5), GrowthSpec::log_power(1.0),
                           GrowthSpec::log_log(), GrowthSpec::log_power(0.5, 4.0)}) {
    const auto p = synthesize_branching(spec, 1 << 20);
    const auto report = validate_profile(p);
    for (const auto& c : report.checks) {
      INFO(spec.name() << ": " << c.name << " " << c.detail);
      CHECK(c.passed);
    }
  }
}

TEST_CASE("scaling f changes ell by a bounded factor") {
  const auto base = synthesize_branching(GrowthSpec::log_power(0.5), 1 << 16);
  const auto scaled = synthesize_branching(GrowthSpec::log_power(0.5, 4.0), 1 << 16);
  for (std::int64_t n = 1; n <= (1 << 16); n += 7) {
    const double ratio = static_cast<double>(base.ell(n)) / static_cast<double>(scaled.ell(n));
    CHECK(ratio <= 4.0 * 2.0);
    CHECK(ratio >= 1.0 / (4.0 * 2.0));
  }
}

TEST_CASE("validate_growth rejects increasing x f'") {
  GrowthTable t{{1.0, 2.0, 4.0, 8.0}, {1.0, 1.5, 3.0, 6.0}, {0.5, 0.5, 0.75, 0.75}};
  CHECK_THROWS_AS(validate_growth(GrowthSpec::custom(t), 8), ValidationError);
  CHECK_THROWS_AS(synthesize_branching(GrowthSpec::custom(t), 7), ValidationError);
}

TEST_CASE("analytic resistance sum") {
  const auto ray = BranchingProfile::ray(100);
  CHECK(analytic_resistance_sum(ray, 10) == doctest::Approx(2.9289682539682538).epsilon(1e-15));
  CHECK(analytic_resistance_sum(ray, 0) == 0.0);
  const BranchingProfile p({1, 5}, 200);
  CHECK(analytic_resistance_sum(p, 1) == doctest::Approx(1.0 / p.ell(1)));
  double direct = 0.0;
  for (int n = 1; n <= 200; ++n) direct += 1.0 / (n * static_cast<double>(p.ell(n)));
  CHECK(analytic_resistance_sum(p, 200) == doctest::Approx(direct).epsilon(1e-14));
  CHECK_THROWS_AS(analytic_resistance_sum(p, 201), RangeError);

  const auto big = BranchingProfile::ray(1 << 20);
  double sum = 0.0;
  for (int n = 1; n <= (1 << 20); ++n) sum += 1.0 / n;
  CHECK(analytic_resistance_sum(big, 1 << 20) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("analytic sum grows without bound and tracks f") {
  const auto spec = GrowthSpec::log_power(0.5);
  const auto p = synthesize_branching(spec, 1 << 20);
  double prev = 0.0;
  for (std::int64_t N = 16; N <= (1 << 20); N *= 2) {
    const double s = analytic_resistance_sum(p, N);
    CHECK(s > prev);
    prev = s;
  }
  const double ratio16 = analytic_resistance_sum(p, 1 << 16) / spec.f(1 << 16);
  CHECK(ratio16 >= 0.2);
  CHECK(ratio16 <= 5.0);
}

TEST_CASE("validate_profile flags the documented failures") {
  const BranchingProfile sep({4, 7}, 20);
  CHECK_FALSE(sep.branch_levels().empty());
  const auto r1 = validate_profile(sep);
  REQUIRE(r1.find(cn::kSeparation) != nullptr);
  CHECK_FALSE(r1.find(cn::kSeparation)->passed);

  // ell(3) = 1 and ell(6) = 4
  const BranchingProfile dbl({3, 5}, 10);
  CHECK(dbl.ell(3) == 1);
  CHECK(dbl.ell(6) == 4);
  const auto r2 = validate_profile(dbl);
  CHECK_FALSE(r2.find(cn::kDoubling)->passed);
  CHECK(r2.find(cn::kDoubling)->detail.find("3") != std::string::npos);

  CHECK(validate_profile(BranchingProfile::ray(500)).all_passed());
}

TEST_CASE("profile construction validates its input") {
  CHECK_THROWS_AS(BranchingProfile({3, 3}, 10), ValidationError);
  CHECK_THROWS_AS(BranchingProfile({11}, 10), ValidationError);
  CHECK_THROWS_AS(BranchingProfile({0, 1}, 10), ValidationError);
  CHECK_THROWS_AS(BranchingProfile({1, 4}, 10, {3, 2}), ValidationError);
  CHECK_THROWS_AS(BranchingProfile({1}, 10, {3, 3}), ValidationError);
  const BranchingProfile p({2, 5}, 20, {4, 3});
  CHECK(p.ell(2) == 1);
  CHECK(p.ell(3) == 3);
  CHECK(p.ell(6) == 6);
  CHECK(p.branch_index(5) == 1);
  CHECK(p.branch_index(4) == -1);
  CHECK_THROWS_AS(p.ell(22), RangeError);
}

TEST_CASE("profile CSV round trip") {
  const BranchingProfile p({1, 20, 50}, 120, {3, 4, 3});
  std::stringstream ss;
  write_profile_csv(ss, p);
  const auto back = read_profile_csv(ss);
  CHECK(back == p);
  CHECK(back.digest() == p.digest());

  std::stringstream bad("# {\"branch_levels\":[2],\"max_level\":5}\nn,ell\n1,1\n2,1\n3,4\n");
  CHECK_THROWS_AS(read_profile_csv(bad), ValidationError);
}
