#include <doctest.h>

#include "oracles/dihedral_oracle.hpp"
#include "wreathwalk/error.hpp"
#include "wreathwalk/group.hpp"
#include "wreathwalk/rng.hpp"

using namespace wreathwalk;

namespace {

Word random_word(Stream& rng, const std::vector<Color>& letters, std::size_t length) {
  Word w;
  for (std::size_t i = 0; i < length; ++i) w.letters.push_back(letters[rng.below(letters.size())]);
  return w;
}

TreeVertex random_vertex(const BranchingProfile& p, Stream& rng, std::int64_t max_level) {
  const auto level = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_level) + 1));
  return vertex_at(p, level, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p.ell(level)))));
}

}  // namespace

TEST_CASE("word parsing") {
  CHECK(Word::parse("ab").letters == std::vector<Color>{Color::azure(), Color::bordeaux()});
  CHECK(Word::parse("c_1 c2 c").letters ==
        std::vector<Color>{Color::chartreuse(1), Color::chartreuse(2), Color::chartreuse(1)});
  CHECK(Word::parse("abtt T").zshift == 1);
  for (const char* text : {"abcab", "c2 ab c3 c", "aTTb"}) CHECK(Word::parse(Word::parse(text).str()) == Word::parse(text));
  CHECK_THROWS_AS(Word::parse("abx"), ValidationError);
  CHECK_THROWS_AS(Word::parse("c0"), ValidationError);
}

TEST_CASE("act_word basics on a ray") {
  const auto ray = BranchingProfile::ray(40);
  const TreeVertex v{5, 0};
  CHECK(act_word(ray, Word::parse("aa"), v) == v);
  CHECK(act_word(ray, Word{}, v) == v);
  CHECK(act_word(ray, Word::parse("ab"), v).level == 3);
  CHECK(act_word(ray, Word::parse("ba"), v).level == 7);
  CHECK_THROWS_AS(act_word(ray, Word::parse("ab"), TreeVertex{39, 0}), RangeError);
}

TEST_CASE("ray action is the folded dihedral action") {
  const auto ray = BranchingProfile::ray(400);
  Stream rng(3, 0);
  const std::vector<Color> letters{Color::azure(), Color::bordeaux(), Color::chartreuse(1)};
  for (int trial = 0; trial < 2000; ++trial) {
    const Word w = random_word(rng, letters, 1 + rng.below(40));
    const std::int64_t level = static_cast<std::int64_t>(rng.below(300));
    std::int64_t x = oracle::fold(level);
    for (Color c : w.letters) {
      if (c == Color::azure()) x = -x - 1;
      if (c == Color::bordeaux()) x = -x;
    }
    CHECK(act_word(ray, w, TreeVertex{level, 0}).level == oracle::unfold(x));
  }
}

TEST_CASE("act_product") {
  const auto ray = BranchingProfile::ray(20);
  const ProductVertex p{TreeVertex{4, 0}, 2};
  Word shift3;
  shift3.zshift = 3;
  CHECK(act_product(ray, Word{}, p) == p);
  CHECK(act_product(ray, shift3, p) == ProductVertex{TreeVertex{4, 0}, 5});
  Word aT = Word::parse("aT");
  CHECK(act_product(ray, aT, ProductVertex{TreeVertex{1, 0}, 0}) == ProductVertex{kRoot, -1});
}

TEST_CASE("right action law") {
  const BranchingProfile p({1, 20, 50}, 200, {3, 4, 3});
  const auto letters = generator_letters(p);
  CHECK(letters.size() == 4);
  Stream rng(5, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const Word u = random_word(rng, letters, rng.below(30));
    const Word v = random_word(rng, letters, rng.below(30));
    const TreeVertex x = random_vertex(p, rng, 130);
    CHECK(act_word(p, u * v, x) == act_word(p, v, act_word(p, u, x)));
  }
}

TEST_CASE("equal_on_ball") {
  const auto ray = BranchingProfile::ray(40);
  CHECK_FALSE(equal_on_ball(ray, Word::parse("ab"), Word::parse("ba"), 10));
  CHECK(equal_on_ball(ray, Word::parse("abc"), Word::parse("abc"), 10));
  CHECK(equal_on_ball(ray, Word::parse("aa"), Word{}, 10));
  CHECK(equal_on_ball(ray, Word::parse("c"), Word{}, 10));
  const BranchingProfile p({1, 5}, 40);
  CHECK_FALSE(equal_on_ball(p, Word::parse("c"), Word{}, 10));
  CHECK_THROWS_AS(equal_on_ball(ray, Word::parse("ab"), Word{}, 39), RangeError);
}

TEST_CASE("dihedral image") {
  CHECK(dihedral_image(Word::parse("a")) == DihedralElement{-1, 0});
  CHECK(dihedral_image(Word::parse("c1")) == DihedralElement{1, 0});
  Word abk;
  for (int k = 1; k <= 1000; ++k) {
    abk = abk * Word::parse("ab");
    const auto img = dihedral_image(abk);
    CHECK(img.eps == 1);
    CHECK(img.k == -k);
    CHECK_FALSE(img.is_identity());
  }
  Stream rng(8, 0);
  const std::vector<Color> letters{Color::azure(), Color::bordeaux(), Color::chartreuse(1), Color::chartreuse(2)};
  for (int trial = 0; trial < 10000; ++trial) {
    const Word u = random_word(rng, letters, rng.below(50));
    const Word v = random_word(rng, letters, rng.below(50));
    CHECK(dihedral_image(u * v) == compose(dihedral_image(u), dihedral_image(v)));
  }
}

TEST_CASE("ray triviality coincides with trivial dihedral image") {
  const auto ray = BranchingProfile::ray(80);
  Stream rng(9, 0);
  const std::vector<Color> letters{Color::azure(), Color::bordeaux(), Color::chartreuse(1)};
  int trivial = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const Word w = random_word(rng, letters, 2 * rng.below(6));
    const bool on_ray = equal_on_ball(ray, w, Word{}, 20);
    CHECK(on_ray == dihedral_image(w).is_identity());
    trivial += on_ray;
  }
  CHECK(trivial > 100);
}

TEST_CASE("words trivial on a large ball have trivial dihedral image") {
  const BranchingProfile p({1, 4, 11, 25}, 200);
  const auto letters = generator_letters(p);
  Stream rng(10, 0);
  int accepted = 0, nontrivially_reduced = 0;
  for (int trial = 0; accepted < 1000 && trial < 2000000; ++trial) {
    // half of the candidates are powers of short words, which reach relations such as (ac)^4
    Word w;
    if (rng.below(2) == 0) {
      w = random_word(rng, letters, 2 + 2 * rng.below(7));
    } else {
      const Word u = random_word(rng, letters, 2 + rng.below(3));
      for (auto k = 2 + rng.below(11); k > 0; --k) w = w * u;
    }
    const auto D = static_cast<std::int64_t>(2 * w.length() + 50);
    // cheap pre-filter on the root orbit before the full ball test
    if (act_word(p, w, kRoot) != kRoot) continue;
    if (!equal_on_ball(p, w, Word{}, D)) continue;
    ++accepted;
    CHECK(dihedral_image(w).is_identity());
    bool reducible = false;
    for (std::size_t i = 1; i < w.letters.size(); ++i) reducible |= w.letters[i] == w.letters[i - 1];
    nontrivially_reduced += !reducible;
  }
  CHECK(accepted == 1000);
  CHECK(nontrivially_reduced > 0);
}

TEST_CASE("switch-or-move generators") {
  const BranchingProfile p({1, 20}, 100);
  const auto gens = switch_or_move_generators(p);
  CHECK(gens.size() == 6);

  WreathElement e;
  const auto once = wreath_apply_generator(p, e, Generator::toggle());
  CHECK(once.lamps == std::set<ProductVertex>{kOrigin});
  CHECK(once.word == Word{});
  CHECK(wreath_apply_generator(p, once, Generator::toggle()) == e);

  Stream rng(12, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    WreathElement x;
    const int steps = static_cast<int>(rng.below(30));
    for (int s = 0; s < steps; ++s) wreath_apply_generator_inplace(p, x, gens[rng.below(gens.size())]);
    for (const auto& g : gens) {
      if (g.kind == Generator::Kind::Shift) continue;
      CHECK(wreath_apply_generator(p, wreath_apply_generator(p, x, g), g) == x);
    }
    // lamp-position correctness: a single switch after pure moves lights o.(g,m)^{-1}
    WreathElement y;
    y.word = x.word;
    y = wreath_apply_generator(p, y, Generator::toggle());
    REQUIRE(y.lamps.size() == 1);
    CHECK(act_product(p, x.word, *y.lamps.begin()) == kOrigin);
  }
}

TEST_CASE("entropy estimate") {
  const auto ray = BranchingProfile::ray(400);
  const auto zero = entropy_estimate(ray, 0, 1000, 4, 1);
  CHECK(zero.entropy == 0.0);
  CHECK_THROWS_AS(entropy_estimate(ray, 10, 99, 4, 1), ValidationError);
  CHECK_THROWS_AS(entropy_estimate(ray, 397, 1000, 4, 1), RangeError);

  const auto est = entropy_estimate(ray, 256, 100000, 4, 2024);
  const double exact = static_cast<double>(oracle::dihedral_walk_entropy(256));
  INFO("estimate " << est.entropy << " +- " << est.std_error << ", exact " << exact);
  CHECK(std::abs(est.entropy - exact) <= 3.0 * est.std_error);
  CHECK(est.std_error > 0.0);

  const auto again = entropy_estimate(ray, 256, 100000, 4, 2024);
  CHECK(again.entropy == est.entropy);
  CHECK(again.std_error == est.std_error);
}
