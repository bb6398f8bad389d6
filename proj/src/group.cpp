#include "wreathwalk/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "wreathwalk/error.hpp"
#include "wreathwalk/rng.hpp"

namespace wreathwalk {

// --- words -------------------------------------------------------------------------------

Word Word::parse(std::string_view text) {
  Word w;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw ValidationError("cannot parse word '" + std::string(text) + "': " + why + " at offset " + std::to_string(i));
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '.' || ch == ',') {
      ++i;
    } else if (ch == 'a') {
      w.letters.push_back(Color::azure());
      ++i;
    } else if (ch == 'b') {
      w.letters.push_back(Color::bordeaux());
      ++i;
    } else if (ch == 'c') {
      ++i;
      if (i < text.size() && text[i] == '_') ++i;
      int j = 0;
      bool digits = false;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        j = 10 * j + (text[i] - '0');
        digits = true;
        ++i;
        if (j > 1000) fail("chartreuse index too large");
      }
      if (!digits) j = 1;
      if (j < 1) fail("chartreuse index must be >= 1");
      w.letters.push_back(Color::chartreuse(j));
    } else if (ch == 't') {
      ++w.zshift;
      ++i;
    } else if (ch == 'T') {
      --w.zshift;
      ++i;
    } else {
      fail(std::string("unexpected '") + ch + "'");
    }
  }
  return w;
}

std::string Word::str() const {
  std::string out;
  for (Color c : letters) {
    if (c.is_chartreuse() && c.chartreuse_index() > 1) {
      out += "c" + std::to_string(c.chartreuse_index()) + " ";
    } else {
      out += c.is_chartreuse() ? "c" : c.name();
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (zshift > 0) out += std::string(static_cast<std::size_t>(zshift), 't');
  if (zshift < 0) out += std::string(static_cast<std::size_t>(-zshift), 'T');
  return out;
}

Word Word::inverse() const {
  Word w;
  w.letters.assign(letters.rbegin(), letters.rend());
  w.zshift = -zshift;
  return w;
}

Word operator*(const Word& u, const Word& v) {
  Word w = u;
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  w.zshift += v.zshift;
  return w;
}

std::vector<Color> generator_letters(const BranchingProfile& profile) {
  const int d = std::max(3, profile.max_degree());
  std::vector<Color> out{Color::azure(), Color::bordeaux()};
  for (int j = 1; j <= d - 2; ++j) out.push_back(Color::chartreuse(j));
  return out;
}

TreeVertex act_word(const BranchingProfile& profile, const Word& w, const TreeVertex& v) {
  if (v.level < 0 || v.level + static_cast<std::int64_t>(w.length()) > profile.max_level()) {
    throw RangeError("word of length " + std::to_string(w.length()) + " at level " + std::to_string(v.level) +
                     " needs max_level >= " + std::to_string(v.level + static_cast<std::int64_t>(w.length())));
  }
  TreeVertex x = v;
  for (Color c : w.letters) x = apply_letter(profile, x, c);
  return x;
}

ProductVertex act_product(const BranchingProfile& profile, const Word& w, const ProductVertex& p) {
  return {act_word(profile, w, p.t), p.z + w.zshift};
}

bool equal_on_ball(const BranchingProfile& profile, const Word& w1, const Word& w2, std::int64_t D) {
  const auto longest = static_cast<std::int64_t>(std::max(w1.length(), w2.length()));
  if (D < 0 || D + longest > profile.max_level())
    throw RangeError("equal_on_ball needs max_level >= " + std::to_string(D + longest));
  if (w1.zshift != w2.zshift) return false;
  for (std::int64_t level = 0; level <= D; ++level) {
    for (std::int64_t i = 0; i < profile.ell(level); ++i) {
      const TreeVertex v = vertex_at(profile, level, i);
      if (act_word(profile, w1, v) != act_word(profile, w2, v)) return false;
    }
  }
  return true;
}

// --- wreath product ----------------------------------------------------------------------

std::string Generator::name() const {
  switch (kind) {
    case Kind::Switch: return "switch";
    case Kind::Move: return letter.name();
    case Kind::Shift: return step > 0 ? "t" : "T";
  }
  return "?";
}

std::vector<Generator> switch_or_move_generators(const BranchingProfile& profile) {
  std::vector<Generator> out{Generator::toggle()};
  for (Color c : generator_letters(profile)) out.push_back(Generator::move(c));
  out.push_back(Generator::shift(1));
  out.push_back(Generator::shift(-1));
  return out;
}

ProductVertex switch_position(const BranchingProfile& profile, const Word& w) {
  return act_product(profile, w.inverse(), kOrigin);
}

void wreath_apply_generator_inplace(const BranchingProfile& profile, WreathElement& x, const Generator& s) {
  switch (s.kind) {
    case Generator::Kind::Switch: {
      const ProductVertex p = switch_position(profile, x.word);
      if (!x.lamps.erase(p)) x.lamps.insert(p);
      break;
    }
    case Generator::Kind::Move:
      if (!x.word.letters.empty() && x.word.letters.back() == s.letter) {
        x.word.letters.pop_back();
      } else {
        x.word.letters.push_back(s.letter);
      }
      break;
    case Generator::Kind::Shift: x.word.zshift += s.step; break;
  }
}

WreathElement wreath_apply_generator(const BranchingProfile& profile, const WreathElement& x, const Generator& s) {
  WreathElement y = x;
  wreath_apply_generator_inplace(profile, y, s);
  return y;
}

// --- dihedral quotient -------------------------------------------------------------------

DihedralElement dihedral_image(Color letter) {
  if (letter == Color::azure()) return {-1, 0};
  if (letter == Color::bordeaux()) return {-1, 1};
  return {1, 0};
}

DihedralElement dihedral_image(const Word& w) {
  DihedralElement out;
  for (Color c : w.letters) out = compose(out, dihedral_image(c));
  return out;
}

// --- entropy -----------------------------------------------------------------------------

namespace {

double plug_in_entropy(const std::vector<std::int64_t>& counts, std::int64_t total) {
  double h = 0.0;
  const double inv = 1.0 / static_cast<double>(total);
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) * inv;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

EntropyEstimate entropy_estimate(const BranchingProfile& profile, std::int64_t n, std::int64_t samples,
                                 std::int64_t depth_cap, std::uint64_t seed) {
  if (samples < 100) throw ValidationError("entropy_estimate needs at least 100 samples");
  if (n < 0 || depth_cap < 0) throw RangeError("entropy_estimate needs n >= 0 and depth_cap >= 0");
  if (depth_cap + n > profile.max_level())
    throw RangeError("entropy_estimate needs max_level >= depth_cap + n = " + std::to_string(depth_cap + n));

  EntropyEstimate est{0.0, 0.0, n, samples, depth_cap, 1, seed};
  if (n == 0) return est;

  std::vector<TreeVertex> ball_vertices;
  for (std::int64_t level = 0; level <= depth_cap; ++level)
    for (std::int64_t i = 0; i < profile.ell(level); ++i) ball_vertices.push_back(vertex_at(profile, level, i));
  const auto letters = generator_letters(profile);
  const std::size_t key_size = ball_vertices.size() * sizeof(TreeVertex);

  std::vector<std::string> keys(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    Stream rng(seed, i);
    std::vector<Color> word(static_cast<std::size_t>(n));
    for (auto& c : word) c = letters[rng.below(letters.size())];
    std::vector<TreeVertex> images = ball_vertices;
    for (auto& x : images)
      for (Color c : word) x = apply_letter(profile, x, c);
    std::string key(key_size, '\0');
    for (std::size_t j = 0; j < images.size(); ++j) {
      std::memcpy(key.data() + j * sizeof(TreeVertex), &images[j].level, sizeof(std::int64_t));
      std::memcpy(key.data() + j * sizeof(TreeVertex) + sizeof(std::int64_t), &images[j].path, sizeof(std::uint64_t));
    }
    keys[i] = std::move(key);
  });

  std::unordered_map<std::string, std::int64_t> ids;
  std::vector<std::int64_t> label(static_cast<std::size_t>(samples));
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(std::move(keys[i]), static_cast<std::int64_t>(counts.size()));
    if (inserted) counts.push_back(0);
    ++counts[static_cast<std::size_t>(it->second)];
    label[i] = it->second;
  }
  est.distinct = static_cast<std::int64_t>(counts.size());
  est.entropy = plug_in_entropy(counts, samples);

  std::vector<double> boot(kBootstrapResamples);
  std::vector<std::int64_t> resampled(counts.size());
  for (int b = 0; b < kBootstrapResamples; ++b) {
    Stream rng(seed ^ 0xB0075742A9ULL, static_cast<std::uint64_t>(b));
    std::fill(resampled.begin(), resampled.end(), 0);
    for (std::int64_t j = 0; j < samples; ++j)
      ++resampled[static_cast<std::size_t>(label[rng.below(static_cast<std::uint64_t>(samples))])];
    boot[static_cast<std::size_t>(b)] = plug_in_entropy(resampled, samples);
  }
  double mean = 0.0;
  for (double h : boot) mean += h;
  mean /= kBootstrapResamples;
  double var = 0.0;
  for (double h : boot) var += (h - mean) * (h - mean);
  est.std_error = std::sqrt(var / (kBootstrapResamples - 1));
  return est;
}

}  // namespace wreathwalk
