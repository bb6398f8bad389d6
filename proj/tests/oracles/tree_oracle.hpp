#pragma once

// Explicit adjacency-list tree built level by level, and ball-type counting by pairwise
// isomorphism tests. Colours are distinct at every vertex, so an isomorphism of rooted
// coloured trees is forced edge by edge.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

struct ExplicitTree {
  std::vector<std::int64_t> level;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour, colour code)
};

inline ExplicitTree build_tree(const std::vector<std::int64_t>& branch_levels, const std::vector<int>& degrees,
                               std::int64_t depth) {
  ExplicitTree t;
  t.level.push_back(0);
  t.adj.emplace_back();
  std::vector<int> frontier{0};
  for (std::int64_t n = 0; n < depth; ++n) {
    int children = 1;
    for (std::size_t i = 0; i < branch_levels.size(); ++i)
      if (branch_levels[i] == n) children = (degrees.empty() ? 3 : degrees[i]) - 1;
    std::vector<int> next;
    for (int v : frontier) {
      for (int j = 0; j < children; ++j) {
        const int u = static_cast<int>(t.level.size());
        t.level.push_back(n + 1);
        t.adj.emplace_back();
        const int colour = j == 0 ? static_cast<int>((n + 1) % 2 == 1 ? 0 : 1) : j + 1;
        t.adj[static_cast<std::size_t>(v)].push_back({u, colour});
        t.adj[static_cast<std::size_t>(u)].push_back({v, colour});
        next.push_back(u);
      }
    }
    frontier = std::move(next);
  }
  return t;
}

inline bool rooted_iso(const ExplicitTree& t, int u, int pu, int v, int pv, int depth) {
  if (depth == 0) return true;
  std::map<int, int> cu, cv;
  for (auto [w, c] : t.adj[static_cast<std::size_t>(u)])
    if (w != pu) cu[c] = w;
  for (auto [w, c] : t.adj[static_cast<std::size_t>(v)])
    if (w != pv) cv[c] = w;
  if (cu.size() != cv.size()) return false;
  for (auto [c, w] : cu) {
    auto it = cv.find(c);
    if (it == cv.end() || !rooted_iso(t, w, u, it->second, v, depth - 1)) return false;
  }
  return true;
}

/// Number of ball types of radius r over vertices with level <= scan_depth.
inline int count_types(const ExplicitTree& t, int r, std::int64_t scan_depth) {
  std::vector<int> reps;
  for (int v = 0; v < static_cast<int>(t.level.size()); ++v) {
    if (t.level[static_cast<std::size_t>(v)] > scan_depth) continue;
    bool found = false;
    for (int w : reps) {
      if (rooted_iso(t, v, -1, w, -1, r)) {
        found = true;
        break;
      }
    }
    if (!found) reps.push_back(v);
  }
  return static_cast<int>(reps.size());
}

}  // namespace oracle
