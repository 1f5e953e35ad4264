#pragma once

// Algebra of the continuous Lyapunov equation  M S + S M^T + C = 0.
//
// Conventions:
//  - drift entry m(j, i) (0-based j-1, i-1) weights the edge i -> j;
//  - vec() is column-wise, vech() runs over pairs (k, l), k <= l, in
//    lexicographic order (1,1), (1,2), ..., (n,n);
//  - columns of A_G(S) are the edges of G plus all self-loops, ordered
//    (1->1), (1->2), ..., (1->n), (2->1), ...

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lyapid/exact.hpp"
#include "lyapid/graph.hpp"

namespace lyapid {

// Raised when a drift matrix is not stable (singular B(M) or a Lyapunov
// solution that is not positive definite).
class NotStableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when a covariance matrix does not belong to a graph's model.
class NotInModelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DriftMatrix {
 public:
  DriftMatrix() = default;
  explicit DriftMatrix(RatMatrix m);

  int n() const { return static_cast<int>(m_.rows()); }
  const RatMatrix &matrix() const { return m_; }
  // Weight of the edge i -> j (1-based), i.e. m_{ji}.
  const Rational &weight(int i, int j) const { return m_(j - 1, i - 1); }

  // Graph of the off-diagonal support; may be non-simple.
  Digraph support() const;
  bool supported_on(const Digraph &g) const;

  bool operator==(const DriftMatrix &) const = default;

 private:
  RatMatrix m_;
};

class Covariance {
 public:
  Covariance() = default;
  // Throws std::invalid_argument unless m is square and exactly symmetric.
  explicit Covariance(RatMatrix m);

  int n() const { return static_cast<int>(m_.rows()); }
  const RatMatrix &matrix() const { return m_; }
  // 1-based entry sigma_{ij}.
  const Rational &operator()(int i, int j) const { return m_(i - 1, j - 1); }
  bool is_positive_definite() const { return lyapid::is_positive_definite(m_); }

  bool operator==(const Covariance &) const = default;

 private:
  RatMatrix m_;
};

class NoiseMatrix {
 public:
  // Throws std::invalid_argument unless m is symmetric positive definite.
  explicit NoiseMatrix(RatMatrix m);
  static NoiseMatrix standard(int n);  // 2 I_n

  int n() const { return static_cast<int>(m_.rows()); }
  const RatMatrix &matrix() const { return m_; }
  RatVector vech() const;

 private:
  RatMatrix m_;
};

// Row and column bookkeeping for the A_G(S) matrix.
struct SymIndex {
  explicit SymIndex(int n);

  int n;
  std::vector<std::pair<int, int>> rows;  // (k, l), k <= l, lexicographic

  std::size_t row_of(int k, int l) const;
  std::size_t row_count() const { return rows.size(); }
};

// Column order of A_G(S): self-loops included, row-major by source.
std::vector<Edge> edge_columns(const Digraph &g);

RatMatrix build_B(const DriftMatrix &m);
Covariance solve_for_sigma(const DriftMatrix &m, const NoiseMatrix &c);
Covariance solve_for_sigma(const DriftMatrix &m);
bool is_stable(const DriftMatrix &m);

// Gershgorin-dominant random drift matrix supported on g; deterministic in
// the seed.
DriftMatrix sample_stable_sparse(const Digraph &g, std::uint64_t seed);

RatMatrix build_A(const Digraph &g, const Covariance &sigma);

DriftMatrix identify_M(const Digraph &g, const Covariance &sigma, const NoiseMatrix &c);

Rational missing_edge_value(const Digraph &gprime, const Covariance &sigma,
                            const NoiseMatrix &c, Edge e);

struct MissingEdgeRelation {
  Edge edge;
  Rational value;
};

// Relations of g with respect to completion(g).
std::vector<MissingEdgeRelation> missing_edge_relations(const Digraph &g,
                                                        const Covariance &sigma,
                                                        const NoiseMatrix &c);
bool membership(const Digraph &g, const Covariance &sigma, const NoiseMatrix &c);
bool membership(const Digraph &g, const Covariance &sigma);

// Kernel vector of A_G(S) for the union G of an almost-complete DAG g1 and
// its flip at a super-covered edge a -> b whose missing edge joins two
// children of b.
struct KernelWitness {
  Digraph union_graph;
  std::vector<Edge> columns;  // edge_columns(union_graph)
  RatVector values;           // D restricted to columns
  RatMatrix full;             // D over all n x n edges, full(i-1, j-1) = D_{i->j}
  std::vector<int> p_nodes;   // pa(a) in topological order
};

KernelWitness kernel_witness(const Digraph &g1, Edge flip, const Covariance &sigma);

}  // namespace lyapid
