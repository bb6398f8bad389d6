#pragma once

// Potentials and effective resistance by dense Gaussian elimination in long double on an
// explicit weighted graph: ground the target set, inject unit current at the source.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

struct WeightedGraph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<long double> weights;

  void add(int u, int v, long double w) {
    edges.push_back({u, v});
    weights.push_back(w);
  }
};

// Potential of every vertex, zero on the grounded set.
inline std::vector<long double> dense_potential(const WeightedGraph& g, int source, const std::vector<bool>& grounded) {
  std::vector<int> index(static_cast<std::size_t>(g.vertices), -1);
  int n = 0;
  for (int v = 0; v < g.vertices; ++v)
    if (!grounded[static_cast<std::size_t>(v)]) index[static_cast<std::size_t>(v)] = n++;
  std::vector<std::vector<long double>> a(static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(n) + 1, 0.0L));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int iu = index[static_cast<std::size_t>(g.edges[e].first)];
    const int iv = index[static_cast<std::size_t>(g.edges[e].second)];
    const long double w = g.weights[e];
    if (iu >= 0) a[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iu)] += w;
    if (iv >= 0) a[static_cast<std::size_t>(iv)][static_cast<std::size_t>(iv)] += w;
    if (iu >= 0 && iv >= 0) {
      a[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iv)] -= w;
      a[static_cast<std::size_t>(iv)][static_cast<std::size_t>(iu)] -= w;
    }
  }
  const int s = index[static_cast<std::size_t>(source)];
  a[static_cast<std::size_t>(s)][static_cast<std::size_t>(n)] = 1.0L;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          std::fabs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]))
        pivot = r;
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
    const long double p = a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
    if (p == 0.0L) throw std::runtime_error("singular system");
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / p;
      if (f == 0.0L) continue;
      for (int c = col; c <= n; ++c)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
    }
  }
  std::vector<long double> u(static_cast<std::size_t>(g.vertices), 0.0L);
  for (int v = 0; v < g.vertices; ++v) {
    const int i = index[static_cast<std::size_t>(v)];
    if (i >= 0)
      u[static_cast<std::size_t>(v)] = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  return u;
}

inline long double dense_resistance(const WeightedGraph& g, int source, const std::vector<bool>& grounded) {
  return dense_potential(g, source, grounded)[static_cast<std::size_t>(source)];
}

}  // namespace oracle
