#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "oracles/dense_oracle.hpp"
#include "oracles/network_oracle.hpp"
#include "oracles/tree_oracle.hpp"
#include "wreathwalk/growth.hpp"
#include "wreathwalk/network.hpp"

using namespace wreathwalk;

namespace {

std::vector<BranchingProfile> small_profiles() {
  return {BranchingProfile::ray(80), BranchingProfile({1, 4, 11}, 80), BranchingProfile({2, 6, 20}, 80, {4, 3, 5}),
          BranchingProfile({0, 3, 9}, 80)};
}

// Brute-force count of T x Z edges between S_{n-1} and S_n, S_k = {max(|t|, |z|) = k}.
std::int64_t shell_oracle(const BranchingProfile& p, std::int64_t n) {
  const auto t = oracle::build_tree(std::vector<std::int64_t>(p.branch_levels().begin(), p.branch_levels().end()),
                                    std::vector<int>(p.degrees().begin(), p.degrees().end()), n + 1);
  auto shell = [&](int v, std::int64_t z) { return std::max<std::int64_t>(t.level[static_cast<std::size_t>(v)], std::abs(z)); };
  std::int64_t count = 0;
  for (int v = 0; v < static_cast<int>(t.level.size()); ++v) {
    for (std::int64_t z = -n - 1; z <= n + 1; ++z) {
      auto crosses = [&](int w, std::int64_t z2) {
        const auto a = shell(v, z), b = shell(w, z2);
        return (a == n - 1 && b == n) || (a == n && b == n - 1);
      };
      for (auto [w, colour] : t.adj[static_cast<std::size_t>(v)]) {
        (void)colour;
        if (w > v && crosses(w, z)) ++count;
      }
      if (crosses(v, z + 1)) ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("flattened network weights") {
  const FlattenedNetwork<double> ray(BranchingProfile::ray(20), 10, 10);
  CHECK(ray.vertex_count() == 11 * 21);
  for (std::int64_t d = 1; d <= 10; ++d) {
    CHECK(ray.horizontal_weight(d) == 1.0);
    CHECK(ray.vertical_weight(d) == 1.0);
  }
  const BranchingProfile p({4, 11}, 30);
  const FlattenedNetwork<double> net(p, 20, 20);
  CHECK(net.horizontal_weight(4) == 1.0);
  CHECK(net.horizontal_weight(5) == 2.0);
  CHECK(net.vertex_weight(7, 3) == 2 * 2.0 + 2.0 + 2.0);
  CHECK(net.vertex_weight(4, 0) == 2 * 1.0 + 1.0 + 2.0);
  CHECK_THROWS_AS(FlattenedNetwork<double>(p, 31, 10), RangeError);
  CHECK_THROWS_AS(FlattenedNetwork<double>(p, 30, 30, 100), RangeError);
}

TEST_CASE("radius one") {
  const FlattenedNetwork<double> ray(BranchingProfile::ray(10), 5, 5);
  // the root has one tree neighbour and two vertical ones
  CHECK(effective_resistance(ray, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const FlattenedNetwork<double> root_branch(BranchingProfile({0, 3}, 10), 5, 5);
  CHECK(effective_resistance(root_branch, 1) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("small radii agree with dense elimination") {
  for (const auto& p : small_profiles()) {
    const FlattenedNetwork<double> net(p, 10, 10);
    const FlattenedNetwork<long double> net_ld(p, 10, 10);
    for (std::int64_t r = 1; r <= 3; ++r) {
      for (Metric metric : {Metric::Ball, Metric::Square}) {
        const double expected = static_cast<double>(oracle::flattened_resistance(p, r, metric));
        const double got = solve_potential(net, r, metric, Normalization::OriginZero, 1e-14).resistance;
        CHECK(std::abs(got - expected) <= 1e-10);
        const long double got_ld = solve_potential(net_ld, r, metric, Normalization::OriginZero, 1e-16L).resistance;
        CHECK(std::abs(static_cast<double>(got_ld) - expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("flattened resistance equals the explicit product ball") {
  for (const auto& p : small_profiles()) {
    const FlattenedNetwork<double> net(p, 10, 10);
    for (std::int64_t m = 1; m <= 8; ++m) {
      for (Metric metric : {Metric::Ball, Metric::Square}) {
        const double flat = solve_potential(net, m, metric, Normalization::OriginZero, 1e-14).resistance;
        const double explicit_ball = product_ball_resistance(p, m, metric);
        CHECK(std::abs(flat - explicit_ball) <= 1e-10);
        if (m <= 5) CHECK(std::abs(flat - static_cast<double>(oracle::product_resistance(p, m, metric))) <= 1e-10);
      }
    }
  }
}

TEST_CASE("field invariants") {
  const BranchingProfile p({1, 20}, 100);
  const FlattenedNetwork<double> net(p, 40, 40);
  const auto field = solve_potential(net, 30, Metric::Ball, Normalization::OriginZero, 1e-12);
  CHECK(field.origin_value() == 0.0);
  CHECK(field.boundary_value == doctest::Approx(-field.resistance).epsilon(1e-15));
  CHECK(field_laplacian(net, field, 0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  double worst = 0.0;
  for (std::int64_t n = 0; n < 30; ++n)
    for (std::int64_t z = -(29 - n); z <= 29 - n; ++z)
      if (n != 0 || z != 0) worst = std::max(worst, std::abs(field_laplacian(net, field, n, z)));
  CHECK(worst <= 1e-10);
  for (std::int64_t n = 0; n <= 30; ++n)
    for (std::int64_t z = 0; n + z <= 30; ++z) CHECK(field.value(n, z) == field.value(n, -z));
  CHECK_THROWS_AS(field.value(20, 11), RangeError);

  const auto half = solve_potential(net, 30, Metric::Ball, Normalization::OriginMinusHalf, 1e-12);
  CHECK(half.origin_value() == doctest::Approx(-0.5));
  CHECK(half.value(7, 3) - field.value(7, 3) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("resistance is monotone and stable under the tolerance") {
  const BranchingProfile p({1, 20}, 200);
  const FlattenedNetwork<double> net(p, 100, 100);
  double prev = 0.0;
  for (std::int64_t r = 1; r <= 64; r = r < 8 ? r + 1 : 2 * r) {
    const double res = effective_resistance(net, r);
    CHECK(res > prev);
    prev = res;
  }
  const double a = effective_resistance(net, 64, 1e-10);
  const double b = effective_resistance(net, 64, 2e-10);
  CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("shell edge counts") {
  const auto ray = BranchingProfile::ray(40);
  CHECK(shell_edge_count(ray, 1) == 3);
  CHECK(shorting_lower_bound(ray, 1) == doctest::Approx(1.0 / 3.0));
  for (const auto& p : small_profiles()) {
    for (std::int64_t n = 1; n <= 12; ++n) {
      CHECK(shell_edge_count(p, n) == shell_oracle(p, n));
      std::int64_t closed_form = (2 * n + 1) * p.ell(n);
      for (std::int64_t k = 1; k <= n; ++k) closed_form += 2 * p.ell(k);
      CHECK(shell_edge_count(p, n) <= closed_form + 2);
    }
  }
}

TEST_CASE("staircase paths hug the segment") {
  for (std::int64_t m : {1, 5, 16, 33}) {
    for (std::int64_t k = -m; k <= m; ++k) {
      const auto path = staircase_path(m, k);
      CHECK(path.front() == std::pair<std::int64_t, std::int64_t>{0, 0});
      const auto [n_end, z_end] = path.back();
      CHECK(std::max(n_end, std::abs(z_end)) == m);
      for (std::size_t i = 0; i < path.size(); ++i) {
        const auto [n, z] = path[i];
        if (i + 1 < path.size()) CHECK(std::max(n, std::abs(z)) < m);
        const double dist = std::abs(static_cast<double>(k * n - m * z)) / std::hypot(static_cast<double>(k), static_cast<double>(m));
        CHECK(dist <= 1.0);
      }
    }
  }
}

TEST_CASE("flow and shorting bracket the square resistance") {
  CHECK(flow_upper_bound(BranchingProfile::ray(10), 1).energy == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& p : {BranchingProfile::ray(80), BranchingProfile({1, 4, 11, 25}, 80), BranchingProfile({2, 6, 20}, 80, {4, 3, 5})}) {
    const FlattenedNetwork<double> net(p, 40, 40);
    for (std::int64_t m : {1, 2, 4, 8, 16, 32}) {
      const double exact = effective_resistance_square(net, m);
      CHECK(shorting_lower_bound(p, m) <= exact + 1e-8);
      CHECK(exact <= flow_upper_bound(p, m).energy + 1e-8);
    }
  }
}

TEST_CASE("resistance report on the ray grows like log m") {
  const auto ray = BranchingProfile::ray(300);
  const auto rows = resistance_report(ray, {8, 16, 32, 64, 128, 256});
  double prev = 0.0;
  for (const auto& row : rows) {
    const double per_log = row.res_exact / std::log(static_cast<double>(row.m));
    CHECK(per_log >= 0.1);
    CHECK(per_log <= 2.0);
    CHECK(row.res_exact > prev);
    CHECK(row.lower <= row.res_exact);
    CHECK(row.res_exact <= row.upper);
    prev = row.res_exact;
  }
}

TEST_CASE("subsequence witness") {
  const auto ray = BranchingProfile::ray(1 << 20);
  const auto rows = subsequence_candidates(ray, 1 << 20);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.accepted);
    CHECK(row.sum_r3 >= row.sum_r);
  }
  CHECK(subsequence_witness(ray, 1 << 20) == std::vector<std::int64_t>{2, 8});
  CHECK_THROWS_AS(subsequence_witness(ray, (1 << 20) + 1), RangeError);
}

TEST_CASE("potential cache round trip and corruption") {
  const BranchingProfile p({1, 20}, 100);
  const FlattenedNetwork<double> net(p, 30, 30);
  const auto field = solve_potential(net, 20, Metric::Ball, Normalization::OriginMinusHalf, 1e-10);
  const auto dir = std::filesystem::temp_directory_path() / "wreathwalk_cache_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "field.bin").string();
  write_potential_cache(path, field);
  auto back = read_potential_cache(path, p.digest(), 20, Metric::Ball, Normalization::OriginMinusHalf, 1e-10);
  REQUIRE(back.has_value());
  CHECK(back->values == field.values);
  CHECK(back->resistance == field.resistance);
  CHECK_FALSE(read_potential_cache(path, p.digest(), 21, Metric::Ball, Normalization::OriginMinusHalf, 1e-10));
  CHECK_FALSE(read_potential_cache(path, p.digest() ^ 1, 20, Metric::Ball, Normalization::OriginMinusHalf, 1e-10));
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(2);
    f.put('X');
  }
  CHECK_FALSE(read_potential_cache(path, p.digest(), 20, Metric::Ball, Normalization::OriginMinusHalf, 1e-10));
  std::filesystem::remove_all(dir);
}
