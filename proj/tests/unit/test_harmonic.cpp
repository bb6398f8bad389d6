#include <doctest.h>

#include <map>

#include "oracles/dense_oracle.hpp"
#include "oracles/tree_oracle.hpp"
#include "wreathwalk/harmonic.hpp"

using namespace wreathwalk;

namespace {

// Unit-current potential on the explicit T x Z ball {level + |z| <= R}, plus the colour walk
// that locates o.w in the explicit tree.
struct ExplicitBall {
  oracle::ExplicitTree tree;
  std::map<std::pair<int, std::int64_t>, int> id;
  std::vector<long double> u;

  ExplicitBall(const BranchingProfile& p, std::int64_t R) {
    tree = oracle::build_tree(std::vector<std::int64_t>(p.branch_levels().begin(), p.branch_levels().end()),
                              std::vector<int>(p.degrees().begin(), p.degrees().end()), R);
    for (int v = 0; v < static_cast<int>(tree.level.size()); ++v)
      for (std::int64_t z = -R; z <= R; ++z)
        if (tree.level[static_cast<std::size_t>(v)] + std::abs(z) <= R) id[{v, z}] = static_cast<int>(id.size());
    oracle::WeightedGraph g;
    g.vertices = static_cast<int>(id.size());
    std::vector<bool> grounded(id.size(), false);
    for (const auto& [key, i] : id) {
      const auto [v, z] = key;
      grounded[static_cast<std::size_t>(i)] = tree.level[static_cast<std::size_t>(v)] + std::abs(z) == R;
      for (auto [w, colour] : tree.adj[static_cast<std::size_t>(v)]) {
        (void)colour;
        auto it = id.find({w, z});
        if (w > v && it != id.end()) g.add(i, it->second, 1.0L);
      }
      auto up = id.find({v, z + 1});
      if (up != id.end()) g.add(i, up->second, 1.0L);
    }
    u = oracle::dense_potential(g, id.at({0, 0}), grounded);
  }

  long double h(const WreathElement& x) const {
    int v = 0;
    for (Color c : x.word.letters)
      for (auto [w, colour] : tree.adj[static_cast<std::size_t>(v)])
        if (colour == c.code) {
          v = w;
          break;
        }
    const long double a = u[static_cast<std::size_t>(id.at({v, x.word.zshift}))] - u[static_cast<std::size_t>(id.at({0, 0}))] - 0.5L;
    return x.lamp_at_origin() ? -a : a;
  }
};

}  // namespace

TEST_CASE("values at the identity") {
  const BranchingProfile p({1, 4}, 60);
  const auto ev = HarmonicEvaluator::solve(p, 20);
  CHECK(ev.safe_radius() == 18);
  WreathElement e;
  CHECK(harmonic_value(ev, e) == doctest::Approx(-0.5).epsilon(1e-15));
  e.lamps.insert(kOrigin);
  CHECK(harmonic_value(ev, e) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(wreath_laplacian(ev, WreathElement{})) <= 10 * ev.field().tol);
}

TEST_CASE("evaluator agrees with the explicit ball potential") {
  for (const auto& p : {BranchingProfile::ray(40), BranchingProfile({1, 4}, 40), BranchingProfile({0, 3, 6}, 40, {3, 4, 3})}) {
    const ExplicitBall oracle_ball(p, 8);
    const auto ev = HarmonicEvaluator::solve(p, 8, 1e-14);
    Stream rng(31, 0);
    for (int trial = 0; trial < 500; ++trial) {
      const WreathElement x = random_element(p, rng, 1 + static_cast<std::int64_t>(rng.below(6)));
      CHECK(std::abs(harmonic_value(ev, x) - static_cast<double>(oracle_ball.h(x))) <= 1e-10);
    }
  }
}

TEST_CASE("harmonicity at random admissible elements") {
  for (const auto& p : {BranchingProfile::ray(200), BranchingProfile({1, 4, 11, 25}, 200),
                        BranchingProfile({2, 6, 20}, 200, {4, 3, 5})}) {
    const auto ev = HarmonicEvaluator::solve(p, 64, 1e-12);
    const auto rows = harmonicity_sample(ev, 1000, 7);
    REQUIRE(rows.size() == 1000);
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, std::abs(row.residual));
    CHECK(worst <= 10 * ev.field().tol);
    CHECK(rows[0].level == 0);
    CHECK(rows[0].z == 0);
    const auto again = harmonicity_sample(ev, 1000, 7);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(again[i].digest == rows[i].digest);
      CHECK(again[i].h == rows[i].h);
    }
  }
}

TEST_CASE("h sees the lamps only at o") {
  const BranchingProfile p({1, 4, 11}, 100);
  const auto ev = HarmonicEvaluator::solve(p, 30);
  Stream rng(2, 0);
  for (int trial = 0; trial < 500; ++trial) {
    WreathElement x = random_element(p, rng, 10);
    const double h = harmonic_value(ev, x);
    WreathElement y = x;
    const ProductVertex q{vertex_at(p, 3, 0), 2};
    if (!y.lamps.erase(q)) y.lamps.insert(q);
    CHECK(harmonic_value(ev, y) == h);
    if (!y.lamps.erase(kOrigin)) y.lamps.insert(kOrigin);
    CHECK(harmonic_value(ev, y) == -h);
  }
}

TEST_CASE("word_to reaches its target") {
  const BranchingProfile p({1, 4, 11}, 100, {3, 5, 3});
  Stream rng(4, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::int64_t>(rng.below(40));
    const ProductVertex target{vertex_at(p, n, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p.ell(n))))),
                               static_cast<std::int64_t>(rng.below(21)) - 10};
    const Word w = word_to(p, target);
    CHECK(w.length() == static_cast<std::size_t>(n));
    CHECK(act_product(p, w, kOrigin) == target);
  }
}

TEST_CASE("evaluator guards") {
  const BranchingProfile p({1, 4}, 60);
  const auto ev = HarmonicEvaluator::solve(p, 10);
  WreathElement x;
  x.word.zshift = 9;
  CHECK_THROWS_AS(harmonic_value(ev, x), RangeError);
  x.word.zshift = 8;
  CHECK(harmonic_value(ev, x) < 0);
  CHECK_THROWS_AS(wreath_laplacian(ev, x), RangeError);

  const FlattenedNetwork<double> net(p, 10, 10);
  const HarmonicEvaluator shifted(p, solve_potential(net, 10, Metric::Ball, Normalization::OriginZero, 1e-12));
  CHECK(shifted.field().origin_value() == doctest::Approx(-0.5));
  CHECK(shifted.field().value(3, 2) == doctest::Approx(ev.field().value(3, 2)).epsilon(1e-9));
  CHECK_THROWS_AS(HarmonicEvaluator(p, solve_potential(net, 10, Metric::Square, Normalization::OriginZero, 1e-12)),
                  ValidationError);
  CHECK_THROWS_AS(HarmonicEvaluator(BranchingProfile::ray(60), ev.field()), ValidationError);
}

TEST_CASE("growth envelope") {
  const BranchingProfile p({1, 4, 11, 25, 60}, 300);
  const auto ev = HarmonicEvaluator::solve(p, 130);
  const auto rows = growth_envelope_check(ev, {4, 8, 16, 32}, 400, 5);
  REQUIRE(rows.size() == 4);
  double lo = 1e300, hi = 0;
  for (const auto& row : rows) {
    CHECK(row.sign_flip_exact);
    CHECK(row.far_lamps_exact);
    CHECK(row.oscillation >= 1.0);
    CHECK(row.max_abs_h > 0.5);
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  CHECK(hi / lo <= 10.0);
  CHECK_THROWS_AS(growth_envelope_check(ev, {129}, 10, 5), RangeError);
}

TEST_CASE("doubling the field radius") {
  const auto rows = doubling_convergence(BranchingProfile::ray(300), {8, 16, 32, 64}, 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].max_change < rows[i - 1].max_change);
}
