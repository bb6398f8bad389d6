#include "wreathwalk/network.hpp"

#include <Eigen/SparseCholesky>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <tuple>

#include "wreathwalk/hash.hpp"
#include "wreathwalk/tree.hpp"

namespace wreathwalk {

std::string to_string(Metric m) { return m == Metric::Ball ? "ball" : "square"; }

std::string to_string(Normalization n) { return n == Normalization::OriginZero ? "origin_zero" : "origin_minus_half"; }

// --- shorting ----------------------------------------------------------------------------

std::int64_t shell_edge_count(const BranchingProfile& profile, std::int64_t n) {
  if (n < 1 || n > profile.max_level() + 1) throw RangeError("shell index " + std::to_string(n) + " out of range");
  // tree edges from level n-1 to level n at |z| <= n-1, plus vertical edges from |z| = n-1 to |z| = n
  std::int64_t count = (2 * n - 1) * profile.ell(n);
  for (std::int64_t k = 0; k < n; ++k) count += 2 * profile.ell(k);
  return count;
}

double shorting_lower_bound(const BranchingProfile& profile, std::int64_t m) {
  if (m < 1 || m > profile.max_level()) throw RangeError("shorting bound needs 1 <= m <= max_level");
  double total = 0.0;
  std::int64_t inner = 0;  // 2 sum_{k<n} ell(k)
  for (std::int64_t n = 1; n <= m; ++n) {
    inner += 2 * profile.ell(n - 1);
    total += 1.0 / static_cast<double>((2 * n - 1) * profile.ell(n) + inner);
  }
  return total;
}

// --- flow --------------------------------------------------------------------------------

std::vector<std::pair<std::int64_t, std::int64_t>> staircase_path(std::int64_t m, std::int64_t k) {
  if (m < 1 || k < -m || k > m) throw RangeError("staircase target outside [-m, m]");
  const std::int64_t K = k < 0 ? -k : k;
  const std::int64_t sign = k < 0 ? -1 : 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> pts{{0, 0}};
  std::int64_t n = 0, z = 0;
  while (std::max(n, z) < m) {
    bool horizontal;
    if (z == K) {
      horizontal = true;
    } else {
      // distance to the line z = K n / m, scaled by sqrt(K^2 + m^2); ties step horizontally
      const std::int64_t dh = std::abs(K * (n + 1) - m * z);
      const std::int64_t dv = std::abs(K * n - m * (z + 1));
      horizontal = dh <= dv;
    }
    if (horizontal) {
      ++n;
    } else {
      ++z;
    }
    pts.push_back({n, sign * z});
  }
  return pts;
}

FlowBound flow_upper_bound(const BranchingProfile& profile, std::int64_t m) {
  if (m < 1 || m > profile.max_level()) throw RangeError("flow bound needs 1 <= m <= max_level");
  // edge key (n, z, dir): dir 0 = (n, z)->(n+1, z), dir 1 = (n, z)->(n, z+1); value = signed path count
  std::map<std::tuple<std::int64_t, std::int64_t, int>, std::int64_t> flow;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> divergence;
  for (std::int64_t k = -m; k <= m; ++k) {
    const auto pts = staircase_path(m, k);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const auto [n0, z0] = pts[i - 1];
      const auto [n1, z1] = pts[i];
      if (n1 == n0 + 1 && z1 == z0) {
        ++flow[{n0, z0, 0}];
      } else if (n1 == n0 && z1 == z0 + 1) {
        ++flow[{n0, z0, 1}];
      } else if (n1 == n0 && z1 == z0 - 1) {
        --flow[{n0, z1, 1}];
      } else {
        throw InternalError("staircase path makes a non-unit step");
      }
      ++divergence[pts[i - 1]];
      --divergence[pts[i]];
    }
  }
  const std::int64_t paths = 2 * m + 1;
  std::int64_t absorbed = 0;
  for (const auto& [p, div] : divergence) {
    const bool source = p.first == 0 && p.second == 0;
    const bool target = std::max(p.first, std::abs(p.second)) == m;
    if (source) {
      if (div != paths) throw InternalError("flow leaves the origin with the wrong mass");
    } else if (target) {
      if (div > 0) throw InternalError("flow leaves the target set");
      absorbed -= div;
    } else if (div != 0) {
      throw InternalError("flow is not conserved at (" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")");
    }
  }
  if (absorbed != paths) throw InternalError("flow does not reach the target set with unit mass");

  FlowBound out;
  out.paths = paths;
  const double scale = 1.0 / static_cast<double>(paths * paths);
  for (const auto& [key, count] : flow) {
    if (count == 0) continue;
    const auto [n, z, dir] = key;
    const double w = static_cast<double>(dir == 0 ? profile.ell(n + 1) : profile.ell(n));
    out.energy += static_cast<double>(count * count) * scale / w;
    ++out.edges_used;
  }
  return out;
}

// --- explicit T x Z ball -----------------------------------------------------------------

double product_ball_resistance(const BranchingProfile& profile, std::int64_t m, Metric metric) {
  if (m < 1 || m > profile.max_level()) throw RangeError("product ball needs 1 <= m <= max_level");
  std::vector<std::int64_t> offset(static_cast<std::size_t>(m) + 2, 0);
  for (std::int64_t n = 0; n <= m; ++n) offset[static_cast<std::size_t>(n) + 1] = offset[static_cast<std::size_t>(n)] + profile.ell(n);
  const std::int64_t heights = 2 * m + 1;
  const std::int64_t slots = offset.back() * heights;
  if (slots > (std::int64_t{1} << 24)) throw RangeError("explicit product ball too large");

  auto slot = [&](const TreeVertex& t, std::int64_t z) {
    return (offset[static_cast<std::size_t>(t.level)] + vertex_index(profile, t)) * heights + (z + m);
  };
  std::vector<int> index(static_cast<std::size_t>(slots), -1);
  int unknowns = 0;
  std::vector<std::pair<TreeVertex, std::int64_t>> interior;
  for (std::int64_t n = 0; n < m; ++n) {
    for (std::int64_t i = 0; i < profile.ell(n); ++i) {
      const TreeVertex t = vertex_at(profile, n, i);
      for (std::int64_t z = -m; z <= m; ++z) {
        if (metric_radius(metric, n, z) >= m) continue;
        index[static_cast<std::size_t>(slot(t, z))] = unknowns++;
        interior.push_back({t, z});
      }
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& [t, z] : interior) {
    const int i = index[static_cast<std::size_t>(slot(t, z))];
    double diag = 0.0;
    auto link = [&](const TreeVertex& t2, std::int64_t z2) {
      diag += 1.0;
      if (metric_radius(metric, t2.level, z2) < m) entries.emplace_back(i, index[static_cast<std::size_t>(slot(t2, z2))], -1.0);
    };
    for (const Edge& e : neighbors(profile, t)) link(e.to, z);
    link(t, z + 1);
    link(t, z - 1);
    entries.emplace_back(i, i, diag);
  }
  Eigen::SparseMatrix<double> L(unknowns, unknowns);
  L.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  const int origin = index[static_cast<std::size_t>(slot(kRoot, 0))];
  rhs(origin) = 1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("factorization of the product ball Laplacian failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  return x(origin);
}

// --- reports -----------------------------------------------------------------------------

std::vector<ResistanceRow> resistance_report(const BranchingProfile& profile, const std::vector<std::int64_t>& m_list,
                                             double tol) {
  std::vector<ResistanceRow> rows;
  for (std::int64_t m : m_list) {
    const FlattenedNetwork<double> net(profile, m, m);
    const auto field = solve_potential(net, m, Metric::Square, Normalization::OriginZero, tol);
    ResistanceRow row;
    row.m = m;
    row.res_exact = field.resistance;
    row.iterations = field.iterations;
    row.lower = shorting_lower_bound(profile, m);
    row.upper = flow_upper_bound(profile, m).energy;
    row.analytic = analytic_resistance_sum(profile, m);
    row.ratio = row.res_exact / row.analytic;
    rows.push_back(row);
  }
  return rows;
}

std::vector<WitnessRow> subsequence_candidates(const BranchingProfile& profile, std::int64_t big_N) {
  if (big_N > profile.max_level())
    throw RangeError("subsequence witness needs max_level >= " + std::to_string(big_N));
  std::vector<WitnessRow> rows;
  std::int64_t exponent = 1;  // r = 2^(3^k)
  for (int k = 0; 3 * exponent < 63 && (std::int64_t{1} << (3 * exponent)) <= big_N; ++k, exponent *= 3) {
    WitnessRow row;
    row.k = k;
    row.r = std::int64_t{1} << exponent;
    row.sum_r = analytic_resistance_sum(profile, row.r);
    row.sum_r3 = analytic_resistance_sum(profile, std::int64_t{1} << (3 * exponent));
    row.accepted = row.sum_r3 <= 4.0 * row.sum_r;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::int64_t> subsequence_witness(const BranchingProfile& profile, std::int64_t big_N) {
  std::vector<std::int64_t> out;
  for (const auto& row : subsequence_candidates(profile, big_N))
    if (row.accepted) out.push_back(row.r);
  return out;
}

// --- cache -------------------------------------------------------------------------------

namespace {

constexpr char kCacheMagic[8] = {'W', 'W', 'P', 'O', 'T', 'F', 'L', 'D'};
constexpr std::uint32_t kCacheVersion = 1;

struct CacheHeader {
  char magic[8];
  std::uint32_t version;
  std::uint32_t metric;
  std::uint32_t normalization;
  std::uint32_t reserved;
  std::uint64_t digest;
  std::int64_t radius;
  double tol;
  double resistance;
  double boundary_value;
  double residual;
  std::int64_t iterations;
  std::uint64_t count;
  std::uint64_t payload_hash;
};

}  // namespace

void write_potential_cache(const std::string& path, const PotentialField<double>& field) {
  CacheHeader h{};
  std::memcpy(h.magic, kCacheMagic, sizeof(kCacheMagic));
  h.version = kCacheVersion;
  h.metric = static_cast<std::uint32_t>(field.metric);
  h.normalization = static_cast<std::uint32_t>(field.normalization);
  h.digest = field.profile_digest;
  h.radius = field.radius;
  h.tol = field.tol;
  h.resistance = field.resistance;
  h.boundary_value = field.boundary_value;
  h.residual = field.residual;
  h.iterations = field.iterations;
  h.count = field.values.size();
  h.payload_hash = fnv1a_bytes(field.values.data(), field.values.size() * sizeof(double));
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write potential cache " + tmp);
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    if (!out) throw Error("cannot write potential cache " + tmp);
  }
  std::rename(tmp.c_str(), path.c_str());
}

std::optional<PotentialField<double>> read_potential_cache(const std::string& path, std::uint64_t profile_digest,
                                                           std::int64_t radius, Metric metric,
                                                           Normalization normalization, double tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  CacheHeader h{};
  if (!in.read(reinterpret_cast<char*>(&h), sizeof(h))) return std::nullopt;
  if (std::memcmp(h.magic, kCacheMagic, sizeof(kCacheMagic)) != 0 || h.version != kCacheVersion) return std::nullopt;
  if (h.digest != profile_digest || h.radius != radius || h.metric != static_cast<std::uint32_t>(metric) ||
      h.normalization != static_cast<std::uint32_t>(normalization) || h.tol != tol)
    return std::nullopt;
  const auto expected = static_cast<std::uint64_t>((radius + 1) * (radius + 1));
  if (h.count != expected) return std::nullopt;
  PotentialField<double> field;
  field.values.resize(h.count);
  if (!in.read(reinterpret_cast<char*>(field.values.data()), static_cast<std::streamsize>(h.count * sizeof(double))))
    return std::nullopt;
  if (fnv1a_bytes(field.values.data(), field.values.size() * sizeof(double)) != h.payload_hash) return std::nullopt;
  field.radius = radius;
  field.metric = metric;
  field.normalization = normalization;
  field.tol = tol;
  field.profile_digest = profile_digest;
  field.resistance = h.resistance;
  field.boundary_value = h.boundary_value;
  field.residual = h.residual;
  field.iterations = h.iterations;
  return field;
}

}  // namespace wreathwalk
