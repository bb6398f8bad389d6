#include "wreathwalk/bubble.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "wreathwalk/error.hpp"
#include "wreathwalk/tree.hpp"

namespace wreathwalk {

// --- Theta ---------------------------------------------------------------------------------

ThetaGraph build_theta(const std::vector<std::int64_t>& branch_levels, const std::vector<int>& degrees,
                       int generations, std::int64_t vertex_cap) {
  if (generations < 0) throw RangeError("generations must be >= 0");
  if (static_cast<int>(branch_levels.size()) < generations + 1)
    throw RangeError("building " + std::to_string(generations) + " generations needs " +
                     std::to_string(generations + 1) + " branch levels, have " + std::to_string(branch_levels.size()));
  if (branch_levels[0] < 1) throw ValidationError("the bubble graph needs b_1 >= 1");
  for (std::size_t i = 1; i < branch_levels.size(); ++i)
    if (branch_levels[i] <= branch_levels[i - 1]) throw ValidationError("branch levels must be strictly increasing");
  auto degree = [&](int i) {  // generation i >= 1
    return degrees.empty() ? 3 : degrees[static_cast<std::size_t>(i - 1)];
  };
  if (!degrees.empty() && static_cast<int>(degrees.size()) < generations)
    throw RangeError("degree sequence shorter than the number of generations");
  for (int i = 1; i <= generations; ++i)
    if (degree(i) < 3)
      throw ValidationError("branching degree d_" + std::to_string(i) + " = " + std::to_string(degree(i)) +
                            " must be >= 3");

  ThetaGraph th;
  th.branch_levels = branch_levels;
  th.degrees = degrees;
  th.generations = generations;
  auto new_vertex = [&]() {
    if (th.size() >= vertex_cap) throw RangeError("Theta exceeds the vertex cap " + std::to_string(vertex_cap));
    const std::int64_t id = th.size();
    th.vertices.emplace_back();
    th.alpha.push_back(id);
    th.beta.push_back(id);
    return id;
  };
  auto new_bubble = [&](std::int64_t top, std::int64_t half, int generation) {
    const std::int64_t b = static_cast<std::int64_t>(th.bubble_length.size());
    th.bubble_length.push_back(2 * half);
    th.bubble_generation.push_back(generation);
    std::vector<std::int64_t> ring{top};
    for (std::int64_t p = 1; p < 2 * half; ++p) ring.push_back(new_vertex());
    for (std::int64_t p = 0; p < 2 * half; ++p) {
      auto& meta = th.vertices[static_cast<std::size_t>(ring[static_cast<std::size_t>(p)])];
      meta.bubble = b;
      meta.bubble_pos = p;
      th.alpha[static_cast<std::size_t>(ring[static_cast<std::size_t>(p)])] =
          ring[static_cast<std::size_t>((p + 1) % (2 * half))];
    }
    th.bubble_vertices.push_back(std::move(ring));
    return b;
  };

  std::vector<std::int64_t> current{new_bubble(new_vertex(), branch_levels[0], 0)};
  for (int i = 1; i <= generations; ++i) {
    const std::int64_t half = branch_levels[static_cast<std::size_t>(i)] - branch_levels[static_cast<std::size_t>(i - 1)];
    std::vector<std::int64_t> next;
    for (std::int64_t parent_bubble : current) {
      const int d = degree(i);
      const std::int64_t c = static_cast<std::int64_t>(th.cycle_length.size());
      th.cycle_length.push_back(d);
      const auto& parent_ring = th.bubble_vertices[static_cast<std::size_t>(parent_bubble)];
      std::vector<std::int64_t> ring{parent_ring[parent_ring.size() / 2]};
      for (int j = 1; j < d; ++j) ring.push_back(new_vertex());
      for (int j = 0; j < d; ++j) {
        auto& meta = th.vertices[static_cast<std::size_t>(ring[static_cast<std::size_t>(j)])];
        meta.cycle = c;
        meta.cycle_pos = j;
        th.beta[static_cast<std::size_t>(ring[static_cast<std::size_t>(j)])] = ring[static_cast<std::size_t>((j + 1) % d)];
      }
      th.cycle_vertices.push_back(ring);
      for (int j = 1; j < d; ++j) next.push_back(new_bubble(ring[static_cast<std::size_t>(j)], half, i));
    }
    current = std::move(next);
  }
  for (std::int64_t b : current) {
    const auto& ring = th.bubble_vertices[static_cast<std::size_t>(b)];
    th.vertices[static_cast<std::size_t>(ring[ring.size() / 2])].frontier = true;
  }
  th.alpha_inv.assign(th.alpha.size(), 0);
  th.beta_inv.assign(th.beta.size(), 0);
  for (std::int64_t v = 0; v < th.size(); ++v) {
    th.alpha_inv[static_cast<std::size_t>(th.alpha[static_cast<std::size_t>(v)])] = v;
    th.beta_inv[static_cast<std::size_t>(th.beta[static_cast<std::size_t>(v)])] = v;
  }
  return th;
}

namespace {

bool is_permutation_of_size(const std::vector<std::int64_t>& p) {
  std::vector<char> hit(p.size(), 0);
  for (std::int64_t w : p) {
    if (w < 0 || w >= static_cast<std::int64_t>(p.size()) || hit[static_cast<std::size_t>(w)]) return false;
    hit[static_cast<std::size_t>(w)] = 1;
  }
  return true;
}

// Every listed ring is an orbit of perm in ring order, and every vertex off the rings is fixed.
bool orbits_match(const std::vector<std::int64_t>& perm, const std::vector<std::vector<std::int64_t>>& rings) {
  std::vector<char> on_ring(perm.size(), 0);
  for (const auto& ring : rings) {
    for (std::size_t p = 0; p < ring.size(); ++p) {
      if (perm[static_cast<std::size_t>(ring[p])] != ring[(p + 1) % ring.size()]) return false;
      if (on_ring[static_cast<std::size_t>(ring[p])]) return false;
      on_ring[static_cast<std::size_t>(ring[p])] = 1;
    }
  }
  for (std::size_t v = 0; v < perm.size(); ++v)
    if (!on_ring[v] && perm[v] != static_cast<std::int64_t>(v)) return false;
  return true;
}

}  // namespace

ThetaCheck check_theta(const ThetaGraph& theta) {
  ThetaCheck c;
  c.alpha_bijective = is_permutation_of_size(theta.alpha);
  c.beta_bijective = is_permutation_of_size(theta.beta);
  c.alpha_orbits_are_bubbles = c.alpha_bijective && orbits_match(theta.alpha, theta.bubble_vertices);
  c.beta_orbits_are_cycles = c.beta_bijective && orbits_match(theta.beta, theta.cycle_vertices);
  for (std::size_t b = 0; b < theta.bubble_vertices.size(); ++b)
    c.alpha_orbits_are_bubbles = c.alpha_orbits_are_bubbles &&
                                 static_cast<std::int64_t>(theta.bubble_vertices[b].size()) == theta.bubble_length[b];
  for (std::size_t k = 0; k < theta.cycle_vertices.size(); ++k)
    c.beta_orbits_are_cycles = c.beta_orbits_are_cycles &&
                               static_cast<std::int64_t>(theta.cycle_vertices[k].size()) == theta.cycle_length[k];
  std::vector<int> bubbles_at(static_cast<std::size_t>(theta.size()), 0);
  for (const auto& ring : theta.bubble_vertices)
    for (std::int64_t v : ring) ++bubbles_at[static_cast<std::size_t>(v)];
  c.gluing_ok = true;
  for (std::int64_t v = 0; v < theta.size(); ++v) c.gluing_ok = c.gluing_ok && bubbles_at[static_cast<std::size_t>(v)] == 1;
  return c;
}

// --- words and quotients -------------------------------------------------------------------

BubbleWord BubbleWord::parse(std::string_view text) {
  BubbleWord w;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '.' || ch == ',') continue;
    switch (ch) {
      case 'a': w.letters.push_back(0); break;
      case 'b': w.letters.push_back(1); break;
      case 'A': w.letters.push_back(2); break;
      case 'B': w.letters.push_back(3); break;
      default:
        throw ValidationError("cannot parse bubble word '" + std::string(text) + "': unexpected '" + std::string(1, ch) +
                              "' at offset " + std::to_string(i));
    }
  }
  return w;
}

std::string BubbleWord::str() const {
  static constexpr char kNames[4] = {'a', 'b', 'A', 'B'};
  std::string out;
  for (auto c : letters) out += kNames[c];
  return out;
}

BubbleWord BubbleWord::inverse() const {
  BubbleWord w;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(static_cast<std::uint8_t>((*it + 2) % 4));
  return w;
}

BubbleWord operator*(const BubbleWord& u, const BubbleWord& v) {
  BubbleWord w = u;
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  return w;
}

std::int64_t act_theta(const ThetaGraph& theta, const BubbleWord& w, std::int64_t v) {
  if (v < 0 || v >= theta.size()) throw RangeError("no vertex " + std::to_string(v) + " in Theta");
  for (auto c : w.letters) {
    const auto i = static_cast<std::size_t>(v);
    switch (c) {
      case 0: v = theta.alpha[i]; break;
      case 1: v = theta.beta[i]; break;
      case 2: v = theta.alpha_inv[i]; break;
      default: v = theta.beta_inv[i]; break;
    }
  }
  return v;
}

namespace {

std::int64_t reduce(std::int64_t value, std::int64_t modulus) {
  if (modulus == 0) return value;
  value %= modulus;
  return value < 0 ? value + modulus : value;
}

void require_modulus(std::int64_t modulus) {
  if (modulus < 0 || modulus == 1) throw ValidationError("lamp modulus must be 0 (for Z) or >= 2");
}

void add_lamp(LampShift& x, std::int64_t position, std::int64_t value) {
  const std::int64_t v = reduce(x.lamps[position] + value, x.modulus);
  if (v == 0) {
    x.lamps.erase(position);
  } else {
    x.lamps[position] = v;
  }
}

}  // namespace

LampShift compose(const LampShift& x, const LampShift& y) {
  if (x.modulus != y.modulus) throw ValidationError("cannot compose lamp-shift elements with different moduli");
  LampShift out = x;
  for (const auto& [position, value] : y.lamps) add_lamp(out, position - x.shift, value);
  out.shift = x.shift + y.shift;
  return out;
}

LampShift wreath_quotient(const BubbleWord& w, std::int64_t modulus) {
  require_modulus(modulus);
  LampShift x;
  x.modulus = modulus;
  for (auto c : w.letters) {
    // right multiplication by a generator: beta^{+-1} adds at -shift, alpha^{+-1} moves the shift
    switch (c) {
      case 0: ++x.shift; break;
      case 1: add_lamp(x, -x.shift, 1); break;
      case 2: --x.shift; break;
      default: add_lamp(x, -x.shift, -1); break;
    }
  }
  return x;
}

namespace {

std::vector<std::int64_t> theta_distances(const ThetaGraph& theta, const std::vector<std::int64_t>& sources) {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(theta.size()), -1);
  std::deque<std::int64_t> queue;
  for (std::int64_t s : sources) {
    dist[static_cast<std::size_t>(s)] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const std::int64_t v = queue.front();
    queue.pop_front();
    const auto i = static_cast<std::size_t>(v);
    for (std::int64_t w : {theta.alpha[i], theta.beta[i], theta.alpha_inv[i], theta.beta_inv[i]}) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[i] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

KernelReport kernel_support_check(const ThetaGraph& theta, const BubbleWord& w,
                                  const std::vector<std::int64_t>& moduli) {
  KernelReport report;
  report.word_length = static_cast<std::int64_t>(w.length());
  report.bound = 2 * report.word_length;
  report.generations = theta.generations;
  std::vector<std::int64_t> all = moduli;
  all.push_back(0);
  for (std::int64_t m : all)
    if (!wreath_quotient(w, m).is_identity()) report.nontrivial_moduli.push_back(m);
  report.in_kernel = report.nontrivial_moduli.empty();

  std::vector<std::int64_t> frontier;
  for (std::int64_t v = 0; v < theta.size(); ++v)
    if (theta.vertices[static_cast<std::size_t>(v)].frontier) frontier.push_back(v);
  const auto from_root = theta_distances(theta, {0});
  const auto from_frontier = theta_distances(theta, frontier);
  for (std::int64_t v = 0; v < theta.size(); ++v) {
    const auto i = static_cast<std::size_t>(v);
    if (from_frontier[i] >= 0 && from_frontier[i] <= report.word_length) {
      ++report.excluded;
      continue;
    }
    if (act_theta(theta, w, v) != v) {
      ++report.moved;
      report.support_radius = std::max(report.support_radius, from_root[i]);
    }
  }
  return report;
}

BubbleWord random_kernel_word(Stream& rng, int max_conjugator) {
  auto conjugate = [&]() {
    BubbleWord u;
    const auto len = rng.below(static_cast<std::uint64_t>(max_conjugator) + 1);
    for (std::uint64_t i = 0; i < len; ++i) u.letters.push_back(static_cast<std::uint8_t>(rng.below(4)));
    BubbleWord core;
    const std::uint8_t beta = rng.below(2) == 0 ? 1 : 3;
    for (auto e = 1 + rng.below(2); e > 0; --e) core.letters.push_back(beta);
    return u * core * u.inverse();
  };
  const BubbleWord x = conjugate(), y = conjugate();
  return x * y * x.inverse() * y.inverse();
}

// --- Schreier graphs -----------------------------------------------------------------------

SchreierGraph tree_schreier(const BranchingProfile& profile, std::int64_t depth) {
  if (depth < 0 || depth >= profile.max_level()) throw RangeError("tree window depth must lie in [0, max_level)");
  std::vector<std::int64_t> offset{0};
  for (std::int64_t n = 0; n <= depth; ++n) {
    offset.push_back(offset.back() + profile.ell(n));
    if (offset.back() > (std::int64_t{1} << 24)) throw RangeError("tree window too large");
  }
  SchreierGraph g;
  g.name = "T";
  const std::int64_t count = offset.back();
  const auto letters = generator_letters(profile);
  for (Color c : letters) g.add_generator(c.name(), true, count);
  for (std::int64_t n = 0; n <= depth; ++n) {
    for (std::int64_t i = 0; i < profile.ell(n); ++i) {
      const TreeVertex v = vertex_at(profile, n, i);
      for (std::size_t k = 0; k < letters.size(); ++k) {
        const TreeVertex w = apply_letter(profile, v, letters[k]);
        g.act[k][static_cast<std::size_t>(offset[static_cast<std::size_t>(n)] + i)] =
            w.level > depth ? kOutside : offset[static_cast<std::size_t>(w.level)] + vertex_index(profile, w);
      }
    }
  }
  return g;
}

SchreierGraph theta_schreier(const ThetaGraph& theta) {
  SchreierGraph g;
  g.name = "Theta";
  g.add_generator("alpha", false, theta.size());
  g.add_generator("beta", false, theta.size());
  g.act[0] = theta.alpha;
  g.act[1] = theta.beta;
  for (std::int64_t v = 0; v < theta.size(); ++v)
    if (theta.vertices[static_cast<std::size_t>(v)].frontier) g.act[1][static_cast<std::size_t>(v)] = kOutside;
  return g;
}

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::TBar: return "T_bar";
    case LimitKind::THat: return "T_hat";
    case LimitKind::ThetaBar: return "Theta_bar";
    case LimitKind::ThetaHat: return "Theta_hat";
    case LimitKind::ThetaBarInf: return "Theta_bar_inf";
  }
  return "?";
}

LimitKind parse_limit_kind(std::string_view text) {
  for (LimitKind k : {LimitKind::TBar, LimitKind::THat, LimitKind::ThetaBar, LimitKind::ThetaHat, LimitKind::ThetaBarInf})
    if (to_string(k) == text) return k;
  throw ValidationError("unknown limit graph kind '" + std::string(text) +
                        "' (expected T_bar, T_hat, Theta_bar, Theta_hat or Theta_bar_inf)");
}

namespace {

SchreierGraph tree_letters_graph(const std::string& name, int letters, std::int64_t count) {
  if (letters < 2) throw ValidationError("tree limit graphs need at least the letters a and b");
  SchreierGraph g;
  g.name = name;
  g.add_generator(Color::azure().name(), true, count);
  g.add_generator(Color::bordeaux().name(), true, count);
  for (int j = 1; j <= letters - 2; ++j) g.add_generator(Color::chartreuse(j).name(), true, count);
  return g;
}

void link(SchreierGraph& g, int colour, std::int64_t u, std::int64_t v) {
  g.act[static_cast<std::size_t>(colour)][static_cast<std::size_t>(u)] = v;
  g.act[static_cast<std::size_t>(colour)][static_cast<std::size_t>(v)] = u;
}

}  // namespace

SchreierGraph limit_graph(const LimitSpec& spec) {
  const std::int64_t W = spec.window;
  if (W < 1) throw RangeError("limit graph window must be >= 1");
  // depth colour of the k-th edge; the base level only matters through its parity
  const std::int64_t base = 2 * W + 2 + (spec.parity & 1);
  auto colour = [](std::int64_t depth) { return depth_color(depth).code; };

  switch (spec.kind) {
    case LimitKind::THat: {
      auto g = tree_letters_graph("T_hat", spec.letters, 2 * W + 1);
      g.root = W;
      for (std::int64_t x = -W; x < W; ++x) link(g, colour(base + x + 1), x + W, x + 1 + W);
      g.act[static_cast<std::size_t>(colour(base + W + 1))][static_cast<std::size_t>(2 * W)] = kOutside;
      g.act[static_cast<std::size_t>(colour(base - W))][0] = kOutside;
      return g;
    }
    case LimitKind::TBar: {
      if (spec.n < 3 || spec.n - 2 > spec.letters - 2)
        throw ValidationError("T_bar(" + std::to_string(spec.n) + ") needs n >= 3 and " + std::to_string(spec.n - 2) +
                              " chartreuse letters");
      auto g = tree_letters_graph("T_bar(" + std::to_string(spec.n) + ")", spec.letters, 1 + spec.n * W);
      g.root = 0;
      auto at = [&](int ray, std::int64_t k) { return k == 0 ? 0 : 1 + ray * W + (k - 1); };
      for (int ray = 0; ray < spec.n; ++ray) {
        auto edge_colour = [&](std::int64_t k) {
          if (ray == 0) return colour(base - k + 1);
          if (ray >= 2 && k == 1) return Color::chartreuse(ray - 1).code;
          return colour(base + k);
        };
        for (std::int64_t k = 1; k <= W; ++k) link(g, edge_colour(k), at(ray, k - 1), at(ray, k));
        g.act[static_cast<std::size_t>(edge_colour(W + 1))][static_cast<std::size_t>(at(ray, W))] = kOutside;
      }
      return g;
    }
    case LimitKind::ThetaHat:
    case LimitKind::ThetaBar:
    case LimitKind::ThetaBarInf: {
      const bool infinite = spec.kind == LimitKind::ThetaBarInf;
      const std::int64_t lines = spec.kind == LimitKind::ThetaHat ? 1 : infinite ? 2 * W + 1 : spec.n;
      if (spec.kind == LimitKind::ThetaBar && spec.n < 2) throw ValidationError("Theta_bar(n) needs n >= 2");
      SchreierGraph g;
      g.name = spec.kind == LimitKind::ThetaBar ? "Theta_bar(" + std::to_string(spec.n) + ")" : to_string(spec.kind);
      const std::int64_t count = lines * (2 * W + 1);
      g.add_generator("alpha", false, count);
      g.add_generator("beta", false, count);
      auto at = [&](std::int64_t line, std::int64_t y) { return line * (2 * W + 1) + y + W; };
      for (std::int64_t j = 0; j < lines; ++j) {
        for (std::int64_t y = -W; y <= W; ++y) g.act[0][static_cast<std::size_t>(at(j, y))] = y < W ? at(j, y + 1) : kOutside;
        if (spec.kind == LimitKind::ThetaBar) {
          g.act[1][static_cast<std::size_t>(at(j, 0))] = at((j + 1) % lines, 0);
        } else if (infinite) {
          g.act[1][static_cast<std::size_t>(at(j, 0))] = j + 1 < lines ? at(j + 1, 0) : kOutside;
        }
      }
      g.root = at(infinite ? W : 0, 0);
      return g;
    }
  }
  throw InternalError("unhandled limit kind");
}

std::int64_t tree_limit_ray_vertex(const LimitSpec& spec, std::int64_t distance) {
  if (spec.kind == LimitKind::THat) {
    if (distance < -spec.window || distance > spec.window) throw RangeError("offset outside the window");
    return spec.window + distance;
  }
  if (spec.kind != LimitKind::TBar) throw ValidationError("ray vertices exist only on tree limit graphs");
  if (distance < 0 || distance > spec.window) throw RangeError("distance outside the window");
  return distance == 0 ? 0 : 1 + spec.window + (distance - 1);
}

DihedralElement dihedral_image_via_tbar(const Word& w, int n, int letters, int parity) {
  const auto len = static_cast<std::int64_t>(w.length());
  LimitSpec spec{LimitKind::TBar, n, 2 * len + 4, parity, letters};
  const SchreierGraph g = limit_graph(spec);
  const std::int64_t start = len + 2;
  std::int64_t v = tree_limit_ray_vertex(spec, start);
  for (Color c : w.letters) {
    if (c.code >= letters) throw ValidationError("word uses letter " + c.name() + " beyond the generator list");
    v = g.act[static_cast<std::size_t>(c.code)][static_cast<std::size_t>(v)];
  }
  // v stayed on the principal ray, within len of start; read off the geodesic letters
  const std::int64_t end = v - tree_limit_ray_vertex(spec, 1) + 1;
  if (v < tree_limit_ray_vertex(spec, 1) || v > tree_limit_ray_vertex(spec, spec.window))
    throw InternalError("orbit left the principal ray");
  Word path;
  const std::int64_t step = end > start ? 1 : -1;
  for (std::int64_t k = start; k != end; k += step) {
    const std::int64_t from = tree_limit_ray_vertex(spec, k), to = tree_limit_ray_vertex(spec, k + step);
    for (std::size_t c = 0; c < g.generator_count(); ++c) {
      if (g.act[c][static_cast<std::size_t>(from)] == to) {
        path.letters.push_back(Color{static_cast<int>(c)});
        break;
      }
    }
  }
  return dihedral_image(path);
}

}  // namespace wreathwalk
