#include <doctest.h>

#include "oracles/chain_oracle.hpp"
#include "wreathwalk/error.hpp"
#include "wreathwalk/group.hpp"
#include "wreathwalk/walk.hpp"

using namespace wreathwalk;

namespace {

std::vector<int> children_of(const BranchingProfile& p, int r) {
  std::vector<int> out;
  for (int n = 0; n <= r; ++n) out.push_back(child_count(p, n));
  return out;
}

}  // namespace

TEST_CASE("summary statistics") {
  const auto s = summarize({4, 1, 3, 2, 5, 6, 7, 8, 9, 10}, 3);
  CHECK(s.trials == 10);
  CHECK(s.mean == doctest::Approx(5.5));
  CHECK(s.std_error == doctest::Approx(std::sqrt(55.0 / 6.0) / std::sqrt(10.0)));
  CHECK(s.q50 == 5);
  CHECK(s.q90 == 9);
  CHECK(s.q99 == 10);
  const auto fit = fit_line({1, 2, 3}, {3, 5, 7});
  CHECK(fit.slope == doctest::Approx(2));
  CHECK(fit.intercept == doctest::Approx(1));
  CHECK(fit.r2 == doctest::Approx(1));
}

TEST_CASE("hitting times") {
  const auto ray = BranchingProfile::ray(200);
  const auto one = simulate_hitting(ray, 1, 1000, 1);
  CHECK(one.mean == 1.0);
  CHECK(one.q99 == 1.0);
  const auto two = simulate_hitting(ray, 2, 100000, 2);
  CHECK(oracle::mean_hitting_time(children_of(ray, 2), 2) == 4.0L);
  CHECK(std::abs(two.mean - 4.0) <= 3 * two.std_error);

  const BranchingProfile p({1, 4, 11}, 200);
  for (int r : {5, 12}) {
    const auto s = simulate_hitting(p, r, 20000, 3);
    const double exact = static_cast<double>(oracle::mean_hitting_time(children_of(p, r), r));
    INFO("r = " << r << ": " << s.mean << " +- " << s.std_error << " vs " << exact);
    CHECK(std::abs(s.mean - exact) <= 3.5 * s.std_error);
    CHECK(s.q50 <= s.q90);
    CHECK(s.q90 <= s.q99);
  }
  const auto again = simulate_hitting(p, 12, 20000, 3);
  CHECK(again.mean == simulate_hitting(p, 12, 20000, 3).mean);
  CHECK_THROWS_AS(simulate_hitting(ray, 2, 99, 1), ValidationError);
  CHECK_THROWS_AS(simulate_hitting(ray, 201, 100, 1), RangeError);
}

TEST_CASE("hitting time exponent on the ray") {
  const auto ray = BranchingProfile::ray(200);
  std::vector<double> xs, ys;
  for (int r : {4, 8, 16, 32}) {
    xs.push_back(std::log(r));
    ys.push_back(std::log(simulate_hitting(ray, r, 2000, 9).mean));
  }
  const double slope = fit_line(xs, ys).slope;
  CHECK(slope >= 1.7);
  CHECK(slope <= 2.3);
}

TEST_CASE("clock escape matches the killed chain") {
  const auto ray = BranchingProfile::ray(400);
  const ProductVertex start{vertex_at(ray, 1, 0), 0};
  CHECK(clock_probability(4) == doctest::Approx(1.0 / 17.0));
  const auto est = simulate_clock(ray, start, kOrigin, 4, 400000, 11);
  const double exact = static_cast<double>(oracle::ray_clock_escape(1.0L / 17.0L, 1, 0));
  INFO(est.estimate << " +- " << est.std_error << " vs " << exact);
  CHECK(std::abs(est.estimate - exact) <= 3 * est.std_error);

  const auto vertical = simulate_clock(ray, ProductVertex{kRoot, 1}, kOrigin, 4, 400000, 12);
  const double exact_v = static_cast<double>(oracle::ray_clock_escape(1.0L / 17.0L, 0, 1));
  CHECK(std::abs(vertical.estimate - exact_v) <= 3 * vertical.std_error);

  CHECK(simulate_clock(ray, kOrigin, kOrigin, 4, 100, 1).estimate == 0.0);
  CHECK_THROWS_AS(simulate_clock(ray, ProductVertex{kRoot, 5}, kOrigin, 4, 100, 1), RangeError);
}

TEST_CASE("exit potential identity") {
  const auto ray = BranchingProfile::ray(100);
  const FlattenedNetwork<double> net(ray, 40, 40);
  const auto field = solve_potential(net, 32, Metric::Ball, Normalization::OriginZero, 1e-12);
  const auto s1 = simulate_exit_potential(ray, field, 1, 30000, 1);
  CHECK(s1.escape_probability == 1.0);
  CHECK(s1.resistance == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(s1.stats.mean - 1.0 / 3.0) <= 3 * s1.stats.std_error);

  const BranchingProfile p({1, 4, 11}, 100);
  const FlattenedNetwork<double> pnet(p, 40, 40);
  const auto pfield = solve_potential(pnet, 32, Metric::Ball, Normalization::OriginMinusHalf, 1e-12);
  for (int s : {4, 8, 16}) {
    const auto e = simulate_exit_potential(p, pfield, s, 100000, 5);
    INFO("s = " << s << ": " << e.stats.mean << " +- " << e.stats.std_error << " vs " << e.resistance);
    CHECK(std::abs(e.stats.mean - e.resistance) <= 3 * e.stats.std_error);
    const double p_escape = 1.0 / (3.0 * e.resistance);
    CHECK(std::abs(e.escape_probability - p_escape) <= 3 * std::sqrt(p_escape * (1 - p_escape) / 100000));
    CHECK(e.oscillation >= 1.0);
  }
  CHECK_THROWS_AS(simulate_exit_potential(p, pfield, 17, 1000, 1), RangeError);
  CHECK_THROWS_AS(simulate_exit_potential(ray, pfield, 4, 1000, 1), ValidationError);
}

TEST_CASE("coupling matches the killed chain") {
  const auto ray = BranchingProfile::ray(400);
  CHECK(coupling_success_probability(ray) == doctest::Approx(1.0 / 6.0));
  for (auto v : {kOrigin, ProductVertex{vertex_at(ray, 2, 0), 1}}) {
    const auto est = simulate_coupling(ray, v, 4, 200000, 21);
    const double exact = static_cast<double>(
        oracle::ray_coupling_failure(1.0L / 17.0L, static_cast<int>(v.t.level), static_cast<int>(v.z)));
    INFO(est.failure.estimate << " +- " << est.failure.std_error << " vs " << exact);
    CHECK(std::abs(est.failure.estimate - exact) <= 3 * est.failure.std_error);
  }
  const auto big = simulate_coupling(ray, kOrigin, 64, 20000, 22);
  CHECK(big.failure.estimate < 0.5);
  CHECK(big.decay_rate > 0.05);
  CHECK(big.decay_r2 > 0.9);
  CHECK(big.attempts_tail[0] == 20000);
  for (std::size_t k = 1; k < big.attempts_tail.size(); ++k) CHECK(big.attempts_tail[k] <= big.attempts_tail[k - 1]);
  CHECK_THROWS_AS(simulate_coupling(ray, kOrigin, 1, 1000, 1), RangeError);
}

TEST_CASE("stationary occupation") {
  const BranchingProfile p({1, 4}, 50);
  const auto check = occupation_check(p, 8, 1000000, 4);
  CHECK(check.rows.size() == 9);
  double total = 0;
  for (const auto& row : check.rows) total += row.expected;
  CHECK(total == doctest::Approx(1.0));
  CHECK(check.max_rel_error <= 0.05);
}
