#pragma once

// Finite windows of labelled Schreier graphs and rooted-ball comparison.
//
// act[g][v] is the image of v under generator g, or kOutside when the image lies beyond the
// materialized window. Involutive generators (the letters of T) label unoriented edges;
// the others (alpha, beta on Theta) are oriented and are also followed backwards.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wreathwalk {

inline constexpr std::int64_t kOutside = -1;

struct SchreierGraph {
  std::string name;
  std::vector<std::string> labels;
  std::vector<bool> involution;
  std::vector<std::vector<std::int64_t>> act;
  std::int64_t root = 0;

  std::int64_t size() const { return act.empty() ? 0 : static_cast<std::int64_t>(act[0].size()); }
  std::size_t generator_count() const { return labels.size(); }

  /// Appends a generator; images start as fixed points.
  std::size_t add_generator(const std::string& label, bool is_involution, std::int64_t vertices);
};

/// Inverse images for each oriented generator (kOutside where unknown); empty for involutions.
std::vector<std::vector<std::int64_t>> inverse_actions(const SchreierGraph& g);

/// Canonical code of the rooted labelled ball of radius r at v, or an empty string when the
/// ball reaches beyond the window. Equal codes <=> isomorphic rooted labelled balls.
std::string ball_code(const SchreierGraph& g, const std::vector<std::vector<std::int64_t>>& inverse, std::int64_t v,
                      int r);

struct ContainmentReport {
  std::string limit, base;
  int radius = 0;
  std::int64_t checked = 0;   // limit vertices with a complete ball
  std::int64_t missing = 0;   // of those, balls not found in the base
  std::int64_t base_balls = 0;
  std::int64_t example_missing = kOutside;
  bool ok() const { return checked > 0 && missing == 0; }
};

/// Whether every complete r-ball of `limit` occurs as a complete r-ball of `base`.
/// Both graphs must use the same generator list.
ContainmentReport ball_containment(const SchreierGraph& limit, const SchreierGraph& base, int r);

/// Graph distance from the root (edges followed in both directions); -1 when unreachable.
std::vector<std::int64_t> root_distances(const SchreierGraph& g);

/// One line per edge, "src dst label orient"; loops are omitted, unoriented edges listed once.
void write_edge_list(std::ostream& out, const SchreierGraph& g);

}  // namespace wreathwalk
