#pragma once

// Words in the involutions a, b, c_j, the right action of G x Z on T x Z, the lamplighter
// group H = Z/2 wr_{T x Z} (G x Z) with switch-or-move generators, and the dihedral quotient.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wreathwalk/tree.hpp"

namespace wreathwalk {

/// Element of G x Z given as a word in the involutions plus a Z shift.
struct Word {
  std::vector<Color> letters;
  std::int64_t zshift = 0;

  /// Letters a, b, c (= c1), c<j> or c_<j>; t and T add +1 and -1 to the shift. Whitespace is ignored.
  static Word parse(std::string_view text);
  std::string str() const;
  std::size_t length() const { return letters.size(); }
  Word inverse() const;

  friend Word operator*(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;
};

/// Letters {a, b, c_1, ..., c_{d-2}} where d is the largest branch degree (at least 3).
std::vector<Color> generator_letters(const BranchingProfile& profile);

/// Right action on T, letters applied left to right. Throws RangeError unless
/// v.level + |w| <= max_level.
TreeVertex act_word(const BranchingProfile& profile, const Word& w, const TreeVertex& v);

/// (t, z).(g, m) = (t.g, z + m).
ProductVertex act_product(const BranchingProfile& profile, const Word& w, const ProductVertex& p);

/// Whether w1 and w2 act identically (including the shift) on all vertices of level <= D.
bool equal_on_ball(const BranchingProfile& profile, const Word& w1, const Word& w2, std::int64_t D);

inline constexpr ProductVertex kOrigin{};

/// (omega, g, m): finitely supported lamp set over T x Z and an element of G x Z.
struct WreathElement {
  std::set<ProductVertex> lamps;
  Word word;

  bool lamp_at_origin() const { return lamps.count(kOrigin) != 0; }
  friend bool operator==(const WreathElement&, const WreathElement&) = default;
};

struct Generator {
  enum class Kind { Switch, Move, Shift };
  Kind kind = Kind::Switch;
  Color letter{};
  int step = 0;

  static Generator toggle() { return {Kind::Switch, {}, 0}; }
  static Generator move(Color c) { return {Kind::Move, c, 0}; }
  static Generator shift(int s) { return {Kind::Shift, {}, s}; }
  std::string name() const;
};

/// Switch, then a move for every letter of generator_letters, then shifts +1 and -1.
std::vector<Generator> switch_or_move_generators(const BranchingProfile& profile);

/// o.(g, m)^{-1}: the position whose lamp the switch generator toggles.
ProductVertex switch_position(const BranchingProfile& profile, const Word& w);

/// x * s.
WreathElement wreath_apply_generator(const BranchingProfile& profile, const WreathElement& x, const Generator& s);
void wreath_apply_generator_inplace(const BranchingProfile& profile, WreathElement& x, const Generator& s);

/// Affine map x -> eps x + k of Z.
struct DihedralElement {
  int eps = 1;
  std::int64_t k = 0;

  std::int64_t operator()(std::int64_t x) const { return eps * x + k; }
  bool is_identity() const { return eps == 1 && k == 0; }
  friend DihedralElement compose(const DihedralElement& f, const DihedralElement& g) {
    return {f.eps * g.eps, f.eps * g.k + f.k};
  }
  friend bool operator==(const DihedralElement&, const DihedralElement&) = default;
};

/// a -> x -> -x, b -> x -> 1 - x, c_j -> identity; image(w1 ... wn) = image(w1) o ... o image(wn).
DihedralElement dihedral_image(const Word& w);
DihedralElement dihedral_image(Color letter);

struct EntropyEstimate {
  double entropy = 0.0;  // nats
  double std_error = 0.0;
  std::int64_t n = 0;
  std::int64_t samples = 0;
  std::int64_t depth_cap = 0;
  std::int64_t distinct = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kBootstrapResamples = 200;

/// Plug-in entropy of the law of a uniform length-n word over generator_letters, where words
/// are identified by their action on the vertices of level <= depth_cap.
EntropyEstimate entropy_estimate(const BranchingProfile& profile, std::int64_t n, std::int64_t samples,
                                 std::int64_t depth_cap, std::uint64_t seed);

}  // namespace wreathwalk
