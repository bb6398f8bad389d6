#pragma once

// The flattened network F of T x Z: vertex (n, z) stands for the ell(n) vertices of T x Z at
// tree level n and height z, and each F-edge carries the number of T x Z edges over it as
// its conductance.
//
//   (n-1, z) -- (n, z)   weight ell(n)
//   (n, z) -- (n, z+1)   weight ell(n)
//
// Potentials are spherically symmetric in z, so the solver works on z >= 0 only: an edge
// (n, z)-(n, z') with z, z' > 0 and every vertical edge count twice, horizontal edges at
// z = 0 once. That is the Galerkin restriction of the Laplacian to even functions, which
// keeps the system symmetric positive definite.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "wreathwalk/error.hpp"
#include "wreathwalk/growth.hpp"

namespace wreathwalk {

enum class Metric { Ball, Square };
enum class Normalization { OriginZero, OriginMinusHalf };

std::string to_string(Metric m);
std::string to_string(Normalization n);

/// Radius of (n, z) in the chosen metric: n + |z| or max(n, |z|).
inline std::int64_t metric_radius(Metric metric, std::int64_t n, std::int64_t z) {
  const std::int64_t az = z < 0 ? -z : z;
  return metric == Metric::Ball ? n + az : (n > az ? n : az);
}

inline constexpr std::int64_t kDefaultVertexCap = std::int64_t{1} << 26;

template <class Scalar = double>
class FlattenedNetwork {
 public:
  FlattenedNetwork(const BranchingProfile& profile, std::int64_t N, std::int64_t M,
                   std::int64_t vertex_cap = kDefaultVertexCap)
      : N_(N), M_(M), digest_(profile.digest()) {
    if (N < 1 || M < 1) throw RangeError("flattened network needs N >= 1 and M >= 1");
    if (N > profile.max_level())
      throw RangeError("flattened network depth " + std::to_string(N) + " exceeds max_level " +
                       std::to_string(profile.max_level()));
    if ((N + 1) > vertex_cap / (2 * M + 1))
      throw RangeError("flattened network with " + std::to_string(N + 1) + " x " + std::to_string(2 * M + 1) +
                       " vertices exceeds the vertex cap " + std::to_string(vertex_cap));
    ell_.reserve(static_cast<std::size_t>(N) + 2);
    for (std::int64_t n = 0; n <= N + 1; ++n) ell_.push_back(profile.ell(n));
  }

  std::int64_t N() const { return N_; }
  std::int64_t M() const { return M_; }
  std::int64_t vertex_count() const { return (N_ + 1) * (2 * M_ + 1); }
  std::uint64_t profile_digest() const { return digest_; }
  std::int64_t ell(std::int64_t n) const { return ell_[static_cast<std::size_t>(n)]; }

  /// Weight of (d-1, z) -- (d, z).
  Scalar horizontal_weight(std::int64_t d) const { return static_cast<Scalar>(ell(d)); }
  /// Weight of (n, z) -- (n, z+1).
  Scalar vertical_weight(std::int64_t n) const { return static_cast<Scalar>(ell(n)); }

  /// Sum of the weights of the edges at (n, z) that lie inside the network.
  Scalar vertex_weight(std::int64_t n, std::int64_t z) const {
    Scalar m = 0;
    if (n > 0) m += horizontal_weight(n);
    if (n < N_) m += horizontal_weight(n + 1);
    if (z > -M_) m += vertical_weight(n);
    if (z < M_) m += vertical_weight(n);
    return m;
  }

 private:
  std::int64_t N_, M_;
  std::uint64_t digest_;
  std::vector<std::int64_t> ell_;
};

/// Solution of the Dirichlet problem with unit current from the origin into the fused sphere
/// {rho = radius}. Stored for z >= 0; value(n, z) = value(n, -z).
template <class Scalar = double>
struct PotentialField {
  std::int64_t radius = 0;
  Metric metric = Metric::Ball;
  Normalization normalization = Normalization::OriginZero;
  Scalar tol = 0;
  std::uint64_t profile_digest = 0;
  Scalar resistance = 0;      // value(origin) - value(sphere)
  Scalar boundary_value = 0;
  Scalar residual = 0;        // relative residual reported by the solver
  std::int64_t iterations = 0;
  std::vector<Scalar> values;  // (radius + 1) x (radius + 1), row n, column |z|

  bool contains(std::int64_t n, std::int64_t z) const {
    return n >= 0 && metric_radius(metric, n, z) <= radius;
  }
  Scalar value(std::int64_t n, std::int64_t z) const {
    if (!contains(n, z)) {
      throw RangeError("potential at (" + std::to_string(n) + ", " + std::to_string(z) + ") outside radius " +
                       std::to_string(radius));
    }
    const std::int64_t az = z < 0 ? -z : z;
    return values[static_cast<std::size_t>(n * (radius + 1) + az)];
  }
  Scalar origin_value() const { return values[0]; }
};

template <class Scalar>
PotentialField<Scalar> solve_potential(const FlattenedNetwork<Scalar>& net, std::int64_t r, Metric metric,
                                       Normalization normalization, Scalar tol) {
  if (r < 1 || r > net.N() || r > net.M())
    throw RangeError("solve radius " + std::to_string(r) + " must lie in [1, min(N, M)]");
  if (!(tol > 0)) throw RangeError("solver tolerance must be positive");

  const std::int64_t width = r + 1;
  std::vector<int> index(static_cast<std::size_t>(width * width), -1);
  int unknowns = 0;
  for (std::int64_t n = 0; n < width; ++n)
    for (std::int64_t z = 0; z < width; ++z)
      if (metric_radius(metric, n, z) < r) index[static_cast<std::size_t>(n * width + z)] = unknowns++;

  using Triplet = Eigen::Triplet<Scalar>;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(unknowns) * 5);
  for (std::int64_t n = 0; n < width; ++n) {
    for (std::int64_t z = 0; z < width; ++z) {
      const int i = index[static_cast<std::size_t>(n * width + z)];
      if (i < 0) continue;
      Scalar diag = 0;
      auto link = [&](std::int64_t n2, std::int64_t z2, Scalar w) {
        diag += w;
        if (n2 < width && z2 < width) {
          const int j = index[static_cast<std::size_t>(n2 * width + z2)];
          if (j >= 0) entries.emplace_back(i, j, -w);
        }
      };
      const Scalar fold = z > 0 ? Scalar(2) : Scalar(1);
      if (n > 0) link(n - 1, z, fold * net.horizontal_weight(n));
      link(n + 1, z, fold * net.horizontal_weight(n + 1));
      link(n, z + 1, Scalar(2) * net.vertical_weight(n));
      if (z > 0) link(n, z - 1, Scalar(2) * net.vertical_weight(n));
      entries.emplace_back(i, i, diag);
    }
  }
  Eigen::SparseMatrix<Scalar> L(unknowns, unknowns);
  L.setFromTriplets(entries.begin(), entries.end());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(unknowns);
  rhs(0) = 1;

  Eigen::ConjugateGradient<Eigen::SparseMatrix<Scalar>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<Scalar>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(1000000);
  cg.compute(L);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = cg.solve(rhs);
  std::int64_t iterations = cg.iterations();
  Scalar residual = (rhs - L * x).norm();
  // the recursively updated CG residual can drift from the true one; restart from x if so
  for (int restart = 0; restart < 4 && cg.info() == Eigen::Success && !(residual <= tol); ++restart) {
    x = cg.solveWithGuess(rhs, x);
    iterations += cg.iterations();
    residual = (rhs - L * x).norm();
  }
  if (cg.info() != Eigen::Success || !(residual <= tol)) {
    throw ConvergenceError("potential solve at radius " + std::to_string(r) + " stopped after " +
                           std::to_string(iterations) + " iterations with residual " +
                           std::to_string(static_cast<double>(residual)));
  }

  PotentialField<Scalar> field;
  field.radius = r;
  field.metric = metric;
  field.normalization = normalization;
  field.tol = tol;
  field.profile_digest = net.profile_digest();
  field.resistance = x(0);
  field.residual = residual;
  field.iterations = iterations;
  const Scalar shift = x(0) + (normalization == Normalization::OriginMinusHalf ? Scalar(0.5) : Scalar(0));
  field.boundary_value = -shift;
  field.values.assign(static_cast<std::size_t>(width * width), field.boundary_value);
  for (std::int64_t k = 0; k < width * width; ++k) {
    const int i = index[static_cast<std::size_t>(k)];
    if (i >= 0) field.values[static_cast<std::size_t>(k)] = x(i) - shift;
  }
  return field;
}

template <class Scalar>
Scalar effective_resistance(const FlattenedNetwork<Scalar>& net, std::int64_t r, Scalar tol = Scalar(1e-10)) {
  return solve_potential(net, r, Metric::Ball, Normalization::OriginZero, tol).resistance;
}

template <class Scalar>
Scalar effective_resistance_square(const FlattenedNetwork<Scalar>& net, std::int64_t m, Scalar tol = Scalar(1e-10)) {
  return solve_potential(net, m, Metric::Square, Normalization::OriginZero, tol).resistance;
}

/// Weighted Laplacian of the field at (n, z) on the unfolded network, for rho(n, z) < radius.
template <class Scalar>
Scalar field_laplacian(const FlattenedNetwork<Scalar>& net, const PotentialField<Scalar>& field, std::int64_t n,
                       std::int64_t z) {
  const Scalar here = field.value(n, z);
  Scalar sum = 0;
  if (n > 0) sum += net.horizontal_weight(n) * (here - field.value(n - 1, z));
  sum += net.horizontal_weight(n + 1) * (here - field.value(n + 1, z));
  sum += net.vertical_weight(n) * (here - field.value(n, z + 1));
  sum += net.vertical_weight(n) * (here - field.value(n, z - 1));
  return sum;
}

/// Number of T x Z edges between the squares S_{n-1} and S_n, where
/// S_k = {(t, z) : |t| = k, |z| <= k} u {(t, z) : |z| = k, |t| <= k}.
std::int64_t shell_edge_count(const BranchingProfile& profile, std::int64_t n);

/// sum_{n=1}^{m} 1 / shell_edge_count(n).
double shorting_lower_bound(const BranchingProfile& profile, std::int64_t m);

struct FlowBound {
  double energy = 0.0;
  std::int64_t paths = 0;
  std::int64_t edges_used = 0;
};

/// Energy of the unit flow spreading 1/(2m+1) along each of the staircase paths from the
/// origin towards (m, k), k = -m..m, stopped on entering S_m. Conservation is verified in
/// integer path counts; a violation raises InternalError.
FlowBound flow_upper_bound(const BranchingProfile& profile, std::int64_t m);

/// Lattice points of the staircase path towards (m, k), starting at the origin and ending at
/// the first point of S_m.
std::vector<std::pair<std::int64_t, std::int64_t>> staircase_path(std::int64_t m, std::int64_t k);

/// Resistance between the origin and the fused sphere of radius m in the explicitly built
/// T x Z ball, solved by sparse Cholesky. Meant for small m.
double product_ball_resistance(const BranchingProfile& profile, std::int64_t m, Metric metric);

struct ResistanceRow {
  std::int64_t m = 0;
  double res_exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double analytic = 0.0;
  double ratio = 0.0;
  std::int64_t iterations = 0;
};

std::vector<ResistanceRow> resistance_report(const BranchingProfile& profile, const std::vector<std::int64_t>& m_list,
                                             double tol = 1e-10);

struct WitnessRow {
  int k = 0;
  std::int64_t r = 0;
  double sum_r = 0.0;
  double sum_r3 = 0.0;
  bool accepted = false;
};

/// Candidates r = 2^(3^k) with r^3 <= big_N, with the analytic proxy sums.
std::vector<WitnessRow> subsequence_candidates(const BranchingProfile& profile, std::int64_t big_N);
/// Candidates with sum(r^3) <= 4 sum(r).
std::vector<std::int64_t> subsequence_witness(const BranchingProfile& profile, std::int64_t big_N);

/// Binary cache of a double-precision field with a versioned header.
void write_potential_cache(const std::string& path, const PotentialField<double>& field);
/// Returns the cached field if the file exists, is intact, and matches every key; otherwise nullopt.
std::optional<PotentialField<double>> read_potential_cache(const std::string& path, std::uint64_t profile_digest,
                                                           std::int64_t radius, Metric metric,
                                                           Normalization normalization, double tol);

}  // namespace wreathwalk
