#pragma once

// The graph Theta and the bubble group generated by alpha and beta, their quotients onto
// C wr Z, and the limit Schreier graphs of T and Theta.
//
// Theta is built generation by generation. Bubble 0 hangs from the root, has length 2 b_1 and
// carries the root at position 0. A branching cycle of generation i has length d_i: its
// position 0 is the bottom (position L) of the parent bubble and position j >= 1 is the top
// (position 0) of its j-th child bubble, of length 2 (b_{i+1} - b_i). alpha advances every
// bubble by one position, beta every branching cycle. The bottoms of the last generation of
// bubbles are frontier vertices: their branching cycles are not built and beta fixes them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wreathwalk/group.hpp"
#include "wreathwalk/schreier.hpp"
#include "wreathwalk/rng.hpp"

namespace wreathwalk {

struct ThetaVertex {
  std::int64_t bubble = 0;
  std::int64_t bubble_pos = 0;
  std::int64_t cycle = -1;  // -1 when the vertex lies on no branching cycle
  std::int64_t cycle_pos = 0;
  bool frontier = false;
};

struct ThetaGraph {
  std::vector<std::int64_t> branch_levels;
  std::vector<int> degrees;
  int generations = 0;
  std::vector<ThetaVertex> vertices;
  std::vector<std::int64_t> alpha, beta;       // permutations of the vertex set
  std::vector<std::int64_t> alpha_inv, beta_inv;
  std::vector<std::int64_t> bubble_length;     // per bubble
  std::vector<int> bubble_generation;
  std::vector<std::int64_t> cycle_length;      // per branching cycle
  std::vector<std::vector<std::int64_t>> bubble_vertices, cycle_vertices;

  std::int64_t size() const { return static_cast<std::int64_t>(vertices.size()); }
};

/// Materializes branching cycles of generations 1..generations and the bubbles above and
/// below them. Needs generations + 1 branch levels (the last one sizes the frontier bubbles),
/// b_1 >= 1 and every d_i >= 3.
ThetaGraph build_theta(const std::vector<std::int64_t>& branch_levels, const std::vector<int>& degrees,
                       int generations, std::int64_t vertex_cap = std::int64_t{1} << 24);

struct ThetaCheck {
  bool alpha_bijective = false, beta_bijective = false;
  bool alpha_orbits_are_bubbles = false, beta_orbits_are_cycles = false;
  bool gluing_ok = false;  // each branching-cycle vertex lies on exactly one bubble
  bool ok() const {
    return alpha_bijective && beta_bijective && alpha_orbits_are_bubbles && beta_orbits_are_cycles && gluing_ok;
  }
};

ThetaCheck check_theta(const ThetaGraph& theta);

/// Word in alpha, beta and their inverses; letter codes 0 = alpha, 1 = beta, 2 = alpha^-1, 3 = beta^-1.
struct BubbleWord {
  std::vector<std::uint8_t> letters;

  /// ASCII spelling: a = alpha, b = beta, A = alpha^-1, B = beta^-1; whitespace ignored.
  static BubbleWord parse(std::string_view text);
  std::string str() const;
  BubbleWord inverse() const;
  std::size_t length() const { return letters.size(); }
  friend BubbleWord operator*(const BubbleWord& u, const BubbleWord& v);
  friend bool operator==(const BubbleWord&, const BubbleWord&) = default;
};

/// v.w under the right action of the bubble group on Theta.
std::int64_t act_theta(const ThetaGraph& theta, const BubbleWord& w, std::int64_t v);

/// Element of C wr Z with C = Z/nZ (modulus n >= 2) or Z (modulus 0): lamps over Z and a shift.
/// Product: (f, s)(g, t) = (f + g(. + s), s + t).
struct LampShift {
  std::int64_t modulus = 0;
  std::int64_t shift = 0;
  std::map<std::int64_t, std::int64_t> lamps;  // nonzero values only, reduced mod n

  bool is_identity() const { return shift == 0 && lamps.empty(); }
  friend bool operator==(const LampShift&, const LampShift&) = default;
};

LampShift compose(const LampShift& x, const LampShift& y);

/// Image under alpha -> shift +1, beta -> lamp +1 at 0; modulus 0 means C = Z.
LampShift wreath_quotient(const BubbleWord& w, std::int64_t modulus);

struct KernelReport {
  bool in_kernel = false;            // trivial image for every tested modulus and for Z
  std::vector<std::int64_t> nontrivial_moduli;  // 0 stands for Z
  std::int64_t word_length = 0;
  std::int64_t moved = 0;            // vertices moved, among those with a complete |w|-ball
  std::int64_t support_radius = -1;  // largest root distance of a moved vertex; -1 if none
  std::int64_t bound = 0;            // 2 |w|
  std::int64_t excluded = 0;         // vertices within |w| of the frontier, not assessed
  int generations = 0;
  bool contained() const { return support_radius <= bound; }
};

KernelReport kernel_support_check(const ThetaGraph& theta, const BubbleWord& w, const std::vector<std::int64_t>& moduli);

/// [u beta^e u^-1, v beta^f v^-1] with random u, v of length <= max_conjugator: trivial in every C wr Z.
BubbleWord random_kernel_word(Stream& rng, int max_conjugator);

// --- Schreier graphs -----------------------------------------------------------------------

/// T materialized to the given depth with generators generator_letters(profile).
SchreierGraph tree_schreier(const BranchingProfile& profile, std::int64_t depth);

/// Theta with generators alpha, beta; beta is unknown (kOutside) at frontier vertices.
SchreierGraph theta_schreier(const ThetaGraph& theta);

enum class LimitKind { TBar, THat, ThetaBar, ThetaHat, ThetaBarInf };

std::string to_string(LimitKind kind);
LimitKind parse_limit_kind(std::string_view text);

struct LimitSpec {
  LimitKind kind = LimitKind::THat;
  int n = 3;              // branching degree for TBar and ThetaBar
  std::int64_t window = 10;
  int parity = 1;         // TBar: parity of the branch level it models
  int letters = 3;        // TBar/THat: number of tree letters (a, b, c_1, ...)
};

/// The limit graph restricted to a window of the given radius around its centre (the root).
SchreierGraph limit_graph(const LimitSpec& spec);

/// Vertex of a T-limit along the principal child ray at the given distance from the centre;
/// for THat the vertex at that signed offset.
std::int64_t tree_limit_ray_vertex(const LimitSpec& spec, std::int64_t distance);

/// Image in D_infinity read off the action on T-bar_n: the letters of the geodesic from a
/// vertex far along the principal ray to its image, mapped by dihedral_image.
DihedralElement dihedral_image_via_tbar(const Word& w, int n, int letters, int parity);

}  // namespace wreathwalk
