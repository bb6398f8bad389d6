#include "wreathwalk/tree.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "wreathwalk/error.hpp"

namespace wreathwalk {

namespace {

void require_level(const BranchingProfile& profile, const TreeVertex& v) {
  if (v.level < 0 || v.level > profile.max_level()) {
    throw RangeError("vertex at level " + std::to_string(v.level) + " outside materialized depth " +
                     std::to_string(profile.max_level()));
  }
}

std::uint64_t field_mask(unsigned width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

}  // namespace

std::string Color::name() const {
  if (code == 0) return "a";
  if (code == 1) return "b";
  return "c" + std::to_string(chartreuse_index());
}

int choice_at(const BranchingProfile& profile, const TreeVertex& v, std::size_t i) {
  return static_cast<int>((v.path >> profile.choice_offset(i)) & field_mask(profile.choice_width(i)));
}

int child_count(const BranchingProfile& profile, std::int64_t level) {
  const int bi = profile.branch_index(level);
  return bi < 0 ? 1 : profile.degree(static_cast<std::size_t>(bi)) - 1;
}

TreeVertex child(const BranchingProfile& profile, const TreeVertex& v, int choice) {
  const int bi = profile.branch_index(v.level);
  if (bi < 0) return {v.level + 1, v.path};
  return {v.level + 1, v.path | (static_cast<std::uint64_t>(choice) << profile.choice_offset(static_cast<std::size_t>(bi)))};
}

TreeVertex parent(const BranchingProfile& profile, const TreeVertex& v) {
  const int bi = profile.branch_index(v.level - 1);
  if (bi < 0) return {v.level - 1, v.path};
  const auto i = static_cast<std::size_t>(bi);
  return {v.level - 1, v.path & ~(field_mask(profile.choice_width(i)) << profile.choice_offset(i))};
}

Color parent_color(const BranchingProfile& profile, const TreeVertex& v) {
  const int bi = profile.branch_index(v.level - 1);
  if (bi >= 0) {
    const int c = choice_at(profile, v, static_cast<std::size_t>(bi));
    if (c > 0) return Color::chartreuse(c);
  }
  return depth_color(v.level);
}

bool is_valid(const BranchingProfile& profile, const TreeVertex& v) {
  if (v.level < 0 || v.level > profile.max_level()) return false;
  const std::size_t k = profile.branches_below(v.level);
  for (std::size_t i = 0; i < k; ++i)
    if (choice_at(profile, v, i) > profile.degree(i) - 2) return false;
  const unsigned used = k == 0 ? 0 : profile.choice_offset(k - 1) + profile.choice_width(k - 1);
  return used >= 64 || (v.path >> used) == 0;
}

Neighborhood neighbors(const BranchingProfile& profile, const TreeVertex& v) {
  require_level(profile, v);
  Neighborhood out;
  if (v.level > 0) out.push(parent(profile, v), parent_color(profile, v));
  const int children = child_count(profile, v.level);
  out.push(child(profile, v, 0), depth_color(v.level + 1));
  for (int j = 1; j < children; ++j) out.push(child(profile, v, j), Color::chartreuse(j));
  return out;
}

TreeVertex apply_letter(const BranchingProfile& profile, const TreeVertex& v, Color letter) {
  require_level(profile, v);
  if (v.level > 0 && parent_color(profile, v) == letter) return parent(profile, v);
  if (letter == depth_color(v.level + 1)) return child(profile, v, 0);
  if (letter.is_chartreuse() && letter.chartreuse_index() < child_count(profile, v.level))
    return child(profile, v, letter.chartreuse_index());
  return v;
}

std::int64_t vertex_index(const BranchingProfile& profile, const TreeVertex& v) {
  const std::size_t k = profile.branches_below(v.level);
  std::int64_t index = 0, stride = 1;
  for (std::size_t i = 0; i < k; ++i) {
    index += choice_at(profile, v, i) * stride;
    stride *= profile.degree(i) - 1;
  }
  return index;
}

TreeVertex vertex_at(const BranchingProfile& profile, std::int64_t level, std::int64_t index) {
  if (level < 0 || level > profile.max_level() + 1 || index < 0 || index >= profile.ell(level))
    throw RangeError("no vertex " + std::to_string(index) + " at level " + std::to_string(level));
  const std::size_t k = profile.branches_below(level);
  TreeVertex v{level, 0};
  for (std::size_t i = 0; i < k; ++i) {
    const int radix = profile.degree(i) - 1;
    v.path |= static_cast<std::uint64_t>(index % radix) << profile.choice_offset(i);
    index /= radix;
  }
  return v;
}

ColoredBall ball(const BranchingProfile& profile, const TreeVertex& v, int r) {
  if (r < 0) throw RangeError("ball radius must be non-negative");
  if (v.level < 0 || v.level + r > profile.max_level()) {
    throw RangeError("ball of radius " + std::to_string(r) + " at level " + std::to_string(v.level) +
                     " needs max_level >= " + std::to_string(v.level + r));
  }
  ColoredBall b;
  b.radius = r;
  b.vertices.push_back(v);
  b.parent.push_back(-1);
  b.color.push_back(Color{});
  b.distance.push_back(0);
  for (std::size_t head = 0; head < b.vertices.size(); ++head) {
    if (b.distance[head] == r) continue;
    const TreeVertex u = b.vertices[head];
    const int from = b.parent[head];
    for (const Edge& e : neighbors(profile, u)) {
      if (from >= 0 && e.to == b.vertices[static_cast<std::size_t>(from)]) continue;
      b.vertices.push_back(e.to);
      b.parent.push_back(static_cast<int>(head));
      b.color.push_back(e.color);
      b.distance.push_back(b.distance[head] + 1);
    }
  }
  return b;
}

std::string canonical_code(const ColoredBall& b) {
  const std::size_t n = b.vertices.size();
  std::vector<std::vector<std::string>> items(n);
  std::vector<std::string> code(n);
  for (std::size_t i = n; i-- > 0;) {
    auto& own = items[i];
    std::sort(own.begin(), own.end());
    std::string c = "(";
    for (auto& s : own) c += s;
    c += ")";
    code[i] = std::move(c);
    own.clear();
    if (b.parent[i] >= 0) {
      std::string item(1, static_cast<char>('A' + b.color[i].code));
      item += code[i];
      items[static_cast<std::size_t>(b.parent[i])].push_back(std::move(item));
    }
  }
  return "R" + code[0];
}

BallCatalog count_ball_types(const BranchingProfile& profile, int r, std::int64_t scan_depth) {
  if (scan_depth < 0 || scan_depth + r > profile.max_level()) {
    throw RangeError("ball scan to depth " + std::to_string(scan_depth) + " with radius " + std::to_string(r) +
                     " needs max_level >= " + std::to_string(scan_depth + r));
  }
  std::map<std::string, BallTypeEntry> seen;
  for (std::int64_t level = 0; level <= scan_depth; ++level) {
    const std::int64_t count = profile.ell(level);
    for (std::int64_t idx = 0; idx < count; ++idx) {
      const TreeVertex v = vertex_at(profile, level, idx);
      auto code = canonical_code(ball(profile, v, r));
      auto [it, inserted] = seen.try_emplace(code);
      if (inserted) {
        it->second.code = std::move(code);
        it->second.witness = v;
      }
      ++it->second.multiplicity;
    }
  }
  BallCatalog catalog;
  catalog.radius = r;
  catalog.scan_depth = scan_depth;
  for (auto& [code, entry] : seen) catalog.entries.push_back(std::move(entry));
  return catalog;
}

std::string catalog_json(const BallCatalog& catalog) {
  nlohmann::json out;
  out["radius"] = catalog.radius;
  out["scan_depth"] = catalog.scan_depth;
  out["count"] = catalog.count();
  auto& types = out["types"] = nlohmann::json::array();
  static const char* hex = "0123456789abcdef";
  for (const auto& e : catalog.entries) {
    std::string h;
    for (unsigned char ch : e.code) {
      h += hex[ch >> 4];
      h += hex[ch & 15];
    }
    types.push_back({{"code", h}, {"multiplicity", e.multiplicity},
                     {"witness", {{"level", e.witness.level}, {"path", e.witness.path}}}});
  }
  return out.dump();
}

std::int64_t ball_type_bound(const BranchingProfile& profile, int r) {
  std::int64_t volume = 0;
  const std::int64_t top = std::min<std::int64_t>(5 * static_cast<std::int64_t>(r), profile.max_level());
  for (std::int64_t n = 0; n <= top; ++n) volume += profile.ell(n);
  return 2 + 12 * static_cast<std::int64_t>(r) + 12 + volume;
}

}  // namespace wreathwalk
