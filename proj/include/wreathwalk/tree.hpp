#pragma once

// The spherically symmetric tree T of a branching profile, its edge colouring, and
// rooted coloured balls.
//
// Colouring: the edge from depth d-1 to depth d is azure when d is odd and bordeaux when
// d is even, except that the non-principal children of a branch point get chartreuse
// edges c_1, c_2, ... in child order.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wreathwalk/growth.hpp"

namespace wreathwalk {

/// Edge colour, also used as a generator letter. code 0 = a (azure), 1 = b (bordeaux),
/// j + 1 = c_j (chartreuse j).
struct Color {
  int code = 0;

  static constexpr Color azure() { return {0}; }
  static constexpr Color bordeaux() { return {1}; }
  static constexpr Color chartreuse(int j) { return {j + 1}; }

  bool is_chartreuse() const { return code >= 2; }
  int chartreuse_index() const { return code - 1; }
  std::string name() const;

  friend constexpr auto operator<=>(Color, Color) = default;
};

/// Colour of the non-chartreuse edge joining depth d-1 to depth d.
constexpr Color depth_color(std::int64_t d) { return (d & 1) ? Color::azure() : Color::bordeaux(); }

/// A vertex of T: its level and the packed child choices made at the branch points above it.
struct TreeVertex {
  std::int64_t level = 0;
  std::uint64_t path = 0;

  friend constexpr auto operator<=>(const TreeVertex&, const TreeVertex&) = default;
};

struct ProductVertex {
  TreeVertex t;
  std::int64_t z = 0;

  friend constexpr auto operator<=>(const ProductVertex&, const ProductVertex&) = default;
};

struct Edge {
  TreeVertex to;
  Color color;
};

/// Incident edges of one vertex, held inline.
class Neighborhood {
 public:
  void push(TreeVertex v, Color c) { items_[size_++] = {v, c}; }
  const Edge* begin() const { return items_.data(); }
  const Edge* end() const { return items_.data() + size_; }
  std::size_t size() const { return size_; }
  const Edge& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::array<Edge, 17> items_{};
  std::size_t size_ = 0;
};

inline constexpr TreeVertex kRoot{};

/// Child choice made at branch i along v's path (0 = principal child).
int choice_at(const BranchingProfile& profile, const TreeVertex& v, std::size_t i);

/// Number of children of a vertex at this level.
int child_count(const BranchingProfile& profile, std::int64_t level);

/// Child with the given choice; choice must be < child_count.
TreeVertex child(const BranchingProfile& profile, const TreeVertex& v, int choice);

/// Parent of v; v.level > 0.
TreeVertex parent(const BranchingProfile& profile, const TreeVertex& v);

/// Colour of the edge from v to its parent; v.level > 0.
Color parent_color(const BranchingProfile& profile, const TreeVertex& v);

/// Whether v is a well-formed vertex at a level within [0, max_level].
bool is_valid(const BranchingProfile& profile, const TreeVertex& v);

/// Parent edge first (if any), then children in choice order. Throws RangeError beyond max_level.
Neighborhood neighbors(const BranchingProfile& profile, const TreeVertex& v);

/// Endpoint of the letter-coloured edge at v, or v itself when there is none.
TreeVertex apply_letter(const BranchingProfile& profile, const TreeVertex& v, Color letter);

/// Mixed-radix index of v among the ell(level) vertices of its level, and its inverse.
std::int64_t vertex_index(const BranchingProfile& profile, const TreeVertex& v);
TreeVertex vertex_at(const BranchingProfile& profile, std::int64_t level, std::int64_t index);

/// Rooted coloured ball in BFS order; entry 0 is the centre.
struct ColoredBall {
  std::vector<TreeVertex> vertices;
  std::vector<int> parent;     // index of the BFS parent, -1 for the centre
  std::vector<Color> color;    // colour of the edge to the BFS parent
  std::vector<int> distance;
  int radius = 0;
};

ColoredBall ball(const BranchingProfile& profile, const TreeVertex& v, int r);

/// Canonical code of a rooted coloured tree: equal iff rooted colour-isomorphic.
std::string canonical_code(const ColoredBall& b);

struct BallTypeEntry {
  std::string code;
  std::int64_t multiplicity = 0;
  TreeVertex witness;
};

struct BallCatalog {
  int radius = 0;
  std::int64_t scan_depth = 0;
  std::vector<BallTypeEntry> entries;  // sorted by code
  std::size_t count() const { return entries.size(); }
};

/// Distinct ball types of radius r centred at vertices of level <= scan_depth.
BallCatalog count_ball_types(const BranchingProfile& profile, int r, std::int64_t scan_depth);

/// Catalog as JSON text (code in hex, multiplicity, witness vertex).
std::string catalog_json(const BallCatalog& catalog);

/// Upper bound 2 + 12r + 12 + sum_{n <= 5r} ell(n) on the number of ball types.
std::int64_t ball_type_bound(const BranchingProfile& profile, int r);

}  // namespace wreathwalk
