#include "wreathwalk/schreier.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "wreathwalk/error.hpp"

namespace wreathwalk {

std::size_t SchreierGraph::add_generator(const std::string& label, bool is_involution, std::int64_t vertices) {
  labels.push_back(label);
  involution.push_back(is_involution);
  std::vector<std::int64_t> identity(static_cast<std::size_t>(vertices));
  for (std::int64_t v = 0; v < vertices; ++v) identity[static_cast<std::size_t>(v)] = v;
  act.push_back(std::move(identity));
  return labels.size() - 1;
}

std::vector<std::vector<std::int64_t>> inverse_actions(const SchreierGraph& g) {
  std::vector<std::vector<std::int64_t>> inv(g.generator_count());
  for (std::size_t k = 0; k < g.generator_count(); ++k) {
    if (g.involution[k]) continue;
    inv[k].assign(static_cast<std::size_t>(g.size()), kOutside);
    for (std::int64_t v = 0; v < g.size(); ++v) {
      const std::int64_t w = g.act[k][static_cast<std::size_t>(v)];
      if (w != kOutside) inv[k][static_cast<std::size_t>(w)] = v;
    }
  }
  return inv;
}

namespace {

// Moves in a fixed order: each generator forwards, then oriented generators backwards.
template <class F>
void for_each_move(const SchreierGraph& g, const std::vector<std::vector<std::int64_t>>& inverse, std::int64_t v,
                   F&& f) {
  for (std::size_t k = 0; k < g.generator_count(); ++k) f(g.act[k][static_cast<std::size_t>(v)]);
  for (std::size_t k = 0; k < g.generator_count(); ++k)
    if (!g.involution[k]) f(inverse[k][static_cast<std::size_t>(v)]);
}

}  // namespace

std::string ball_code(const SchreierGraph& g, const std::vector<std::vector<std::int64_t>>& inverse, std::int64_t v,
                      int r) {
  std::unordered_map<std::int64_t, std::int32_t> id;
  std::vector<std::int64_t> order{v};
  std::vector<int> dist{0};
  id[v] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool complete = true;
    for_each_move(g, inverse, order[i], [&](std::int64_t w) {
      if (w == kOutside) {
        complete = false;
        return;
      }
      if (dist[i] < r && id.emplace(w, static_cast<std::int32_t>(order.size())).second) {
        order.push_back(w);
        dist.push_back(dist[i] + 1);
      }
    });
    if (!complete) return {};
  }
  std::string code;
  code.reserve(order.size() * (2 * g.generator_count()) * 4);
  for (std::int64_t u : order) {
    for_each_move(g, inverse, u, [&](std::int64_t w) {
      auto it = id.find(w);
      const std::int32_t target = it == id.end() ? -1 : it->second;
      code.append(reinterpret_cast<const char*>(&target), sizeof target);
    });
  }
  return code;
}

ContainmentReport ball_containment(const SchreierGraph& limit, const SchreierGraph& base, int r) {
  if (limit.labels != base.labels || limit.involution != base.involution)
    throw ValidationError("graphs " + limit.name + " and " + base.name + " use different generators");
  if (r < 0) throw RangeError("ball radius must be >= 0");
  ContainmentReport report;
  report.limit = limit.name;
  report.base = base.name;
  report.radius = r;
  const auto base_inv = inverse_actions(base);
  std::unordered_set<std::string> seen;
  for (std::int64_t v = 0; v < base.size(); ++v) {
    std::string code = ball_code(base, base_inv, v, r);
    if (!code.empty()) seen.insert(std::move(code));
  }
  report.base_balls = static_cast<std::int64_t>(seen.size());
  const auto limit_inv = inverse_actions(limit);
  for (std::int64_t v = 0; v < limit.size(); ++v) {
    const std::string code = ball_code(limit, limit_inv, v, r);
    if (code.empty()) continue;
    ++report.checked;
    if (!seen.count(code)) {
      if (report.missing == 0) report.example_missing = v;
      ++report.missing;
    }
  }
  return report;
}

std::vector<std::int64_t> root_distances(const SchreierGraph& g) {
  const auto inverse = inverse_actions(g);
  std::vector<std::int64_t> dist(static_cast<std::size_t>(g.size()), -1);
  std::deque<std::int64_t> queue{g.root};
  dist[static_cast<std::size_t>(g.root)] = 0;
  while (!queue.empty()) {
    const std::int64_t v = queue.front();
    queue.pop_front();
    for_each_move(g, inverse, v, [&](std::int64_t w) {
      if (w != kOutside && dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
    });
  }
  return dist;
}

void write_edge_list(std::ostream& out, const SchreierGraph& g) {
  for (std::size_t k = 0; k < g.generator_count(); ++k) {
    for (std::int64_t v = 0; v < g.size(); ++v) {
      const std::int64_t w = g.act[k][static_cast<std::size_t>(v)];
      if (w == kOutside || w == v) continue;
      if (g.involution[k] && w < v) continue;
      out << v << ' ' << w << ' ' << g.labels[k] << ' ' << (g.involution[k] ? 0 : 1) << '\n';
    }
  }
}

}  // namespace wreathwalk
