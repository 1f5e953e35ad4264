#pragma once

// Graphs and matrices shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "lyapid/exact.hpp"
#include "lyapid/graph.hpp"

namespace lyapid::fixtures {

inline Digraph forward_path() { return Digraph(3, {{1, 2}, {2, 3}}); }
inline Digraph backward_path() { return Digraph(3, {{3, 2}, {2, 1}}); }
inline Digraph collider() { return Digraph(3, {{1, 3}, {2, 3}}); }
inline Digraph complete_dag(int n) {
  Digraph g(n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) g = g.with_edge({i, j});
  return g;
}

// Six-node graph of the flip-sequence example and its two flips.
inline Digraph six_node_g1() {
  return Digraph(6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5},
                     {6, 4}});
}
inline Digraph six_node_g2() { return flip_edge(six_node_g1(), {2, 3}); }
inline Digraph six_node_g3() { return flip_edge(six_node_g2(), {1, 3}); }

// Backward-path drift matrix and its stationary covariance (noise 2I).
inline RatMatrix backward_drift() {
  return RatMatrix{{-1, 1, 0}, {0, -1, 1}, {0, 0, -1}};
}
inline RatMatrix backward_sigma() {
  return RatMatrix{{ratio(15, 8), ratio(7, 8), ratio(1, 4)},
                   {ratio(7, 8), ratio(3, 2), ratio(1, 2)},
                   {ratio(1, 4), ratio(1, 2), Rational(1)}};
}

// Uniformly random labeled DAG: random orientation of a random skeleton
// along a random permutation.
inline Digraph random_dag(int n, double density, std::mt19937_64 &rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(density);
  Digraph g(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng)) g = g.with_edge({perm[static_cast<std::size_t>(a)],
                                      perm[static_cast<std::size_t>(b)]});
  return g;
}

// Random symmetric, diagonally dominant (hence PD) rational matrix.
inline RatMatrix random_pd(int n, std::mt19937_64 &rng) {
  const auto size = static_cast<std::size_t>(n);
  RatMatrix s(size, size);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 5);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j) s(i, j) = s(j, i) = ratio(num(rng), den(rng));
  for (std::size_t i = 0; i < size; ++i) {
    Rational row = 1;
    for (std::size_t j = 0; j < size; ++j)
      if (j != i) row += abs(s(i, j));
    s(i, i) = row + ratio(den(rng) - 1, 3);
  }
  return s;
}

// Correlation matrix on three nodes, or an empty matrix when not PD.
inline RatMatrix correlation3(const Rational &s12, const Rational &s13, const Rational &s23) {
  RatMatrix s{{1, s12, s13}, {s12, 1, s23}, {s13, s23, 1}};
  if (!is_positive_definite(s)) return {};
  return s;
}

}  // namespace lyapid::fixtures
