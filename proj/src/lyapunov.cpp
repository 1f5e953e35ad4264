#include "lyapid/lyapunov.hpp"

#include <algorithm>
#include <random>

namespace lyapid {

namespace {

int binom2(int n) { return n * (n - 1) / 2; }

void require_same_size(int a, int b, const char *what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

DriftMatrix::DriftMatrix(RatMatrix m) : m_(std::move(m)) {
  if (!m_.is_square()) throw std::invalid_argument("drift matrix must be square");
  if (m_.rows() > static_cast<std::size_t>(Digraph::kMaxNodes)) {
    throw std::invalid_argument("drift matrix larger than " +
                                std::to_string(Digraph::kMaxNodes) + " nodes");
  }
}

Digraph DriftMatrix::support() const {
  std::vector<Edge> edges;
  for (int i = 1; i <= n(); ++i)
    for (int j = 1; j <= n(); ++j)
      if (i != j && weight(i, j) != 0) edges.push_back({i, j});
  return Digraph(n(), edges);
}

bool DriftMatrix::supported_on(const Digraph &g) const {
  return g.node_count() == n() && (support().bits() & ~g.bits()) == 0;
}

Covariance::Covariance(RatMatrix m) : m_(std::move(m)) {
  if (!m_.is_symmetric()) throw std::invalid_argument("covariance matrix must be symmetric");
}

NoiseMatrix::NoiseMatrix(RatMatrix m) : m_(std::move(m)) {
  if (!m_.is_symmetric()) throw std::invalid_argument("noise matrix must be symmetric");
  if (!is_positive_definite(m_)) {
    throw std::invalid_argument("noise matrix must be positive definite");
  }
}

NoiseMatrix NoiseMatrix::standard(int n) {
  return NoiseMatrix(RatMatrix::identity(static_cast<std::size_t>(n)).scaled(2));
}

RatVector NoiseMatrix::vech() const {
  RatVector out;
  for (std::size_t k = 0; k < m_.rows(); ++k)
    for (std::size_t l = k; l < m_.cols(); ++l) out.push_back(m_(k, l));
  return out;
}

SymIndex::SymIndex(int n_) : n(n_) {
  for (int k = 1; k <= n; ++k)
    for (int l = k; l <= n; ++l) rows.emplace_back(k, l);
}

std::size_t SymIndex::row_of(int k, int l) const {
  if (k > l) std::swap(k, l);
  // Rows before k: sum_{r<k} (n - r + 1).
  const int before = (k - 1) * n - (k - 1) * (k - 2) / 2;
  return static_cast<std::size_t>(before + (l - k));
}

std::vector<Edge> edge_columns(const Digraph &g) {
  std::vector<Edge> out;
  for (int i = 1; i <= g.node_count(); ++i)
    for (int j = 1; j <= g.node_count(); ++j)
      if (i == j || g.has_edge(i, j)) out.push_back({i, j});
  return out;
}

RatMatrix build_B(const DriftMatrix &m) {
  const auto id = RatMatrix::identity(static_cast<std::size_t>(m.n()));
  return kron(id, m.matrix()) + kron(m.matrix(), id);
}

Covariance solve_for_sigma(const DriftMatrix &m, const NoiseMatrix &c) {
  require_same_size(m.n(), c.n(), "solve_for_sigma");
  const std::size_t n = static_cast<std::size_t>(m.n());
  RatVector rhs(n * n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) rhs[l * n + k] = -c.matrix()(k, l);
  const auto x = solve(build_B(m), rhs);
  if (!x) throw NotStableError("B(M) is singular; drift matrix is not stable");
  RatMatrix sigma(n, n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) sigma(k, l) = (*x)[l * n + k];
  if (!sigma.is_symmetric()) {
    throw std::logic_error("Lyapunov solution is not exactly symmetric");
  }
  if (!is_positive_definite(sigma)) {
    throw NotStableError("Lyapunov solution is not positive definite; drift matrix is not stable");
  }
  return Covariance(std::move(sigma));
}

Covariance solve_for_sigma(const DriftMatrix &m) {
  return solve_for_sigma(m, NoiseMatrix::standard(m.n()));
}

bool is_stable(const DriftMatrix &m) {
  try {
    solve_for_sigma(m);
    return true;
  } catch (const NotStableError &) {
    return false;
  }
}

DriftMatrix sample_stable_sparse(const Digraph &g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = static_cast<std::size_t>(g.node_count());
  RatMatrix m(n, n);
  for (const Edge &e : g.edges()) {
    const auto v = static_cast<long>(rng() % 18);
    const long num = v < 9 ? v - 9 : v - 8;  // [-9, 9] \ {0}
    const long den = 1 + static_cast<long>(rng() % 4);
    Rational w(num, den);
    w.canonicalize();
    m(e.dst - 1, e.src - 1) = w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Rational row_sum = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row_sum += abs(m(i, j));
    m(i, i) = -row_sum;
  }
  return DriftMatrix(std::move(m));
}

RatMatrix build_A(const Digraph &g, const Covariance &sigma) {
  require_same_size(g.node_count(), sigma.n(), "build_A");
  const SymIndex index(g.node_count());
  const auto cols = edge_columns(g);
  RatMatrix a(index.row_count(), cols.size());
  for (std::size_t r = 0; r < index.row_count(); ++r) {
    const auto [k, l] = index.rows[r];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto [i, j] = cols[c];
      if (j != k && j != l) continue;
      if (k == l) {
        a(r, c) = 2 * sigma(j, i);
      } else if (j == k) {
        a(r, c) = sigma(l, i);
      } else {
        a(r, c) = sigma(k, i);
      }
    }
  }
  return a;
}

DriftMatrix identify_M(const Digraph &g, const Covariance &sigma, const NoiseMatrix &c) {
  require_same_size(g.node_count(), sigma.n(), "identify_M");
  require_same_size(g.node_count(), c.n(), "identify_M");
  if (!g.is_simple()) throw std::invalid_argument("identify_M needs a simple graph");
  if (!sigma.is_positive_definite()) {
    throw NotInModelError("covariance matrix is not positive definite");
  }
  RatVector rhs = c.vech();
  for (auto &x : rhs) x = -x;
  const auto sol = solve_overdetermined(build_A(g, sigma), rhs);
  if (sol.status == SystemStatus::kRankDeficient) {
    throw std::logic_error("A_G(Sigma) is rank deficient for a simple graph");
  }
  if (sol.status == SystemStatus::kInconsistent) {
    throw NotInModelError("no drift matrix supported on the graph solves the Lyapunov equation");
  }
  const std::size_t n = static_cast<std::size_t>(g.node_count());
  RatMatrix m(n, n);
  const auto cols = edge_columns(g);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    m(cols[k].dst - 1, cols[k].src - 1) = sol.x[k];
  }
  return DriftMatrix(std::move(m));
}

Rational missing_edge_value(const Digraph &gprime, const Covariance &sigma,
                            const NoiseMatrix &c, Edge e) {
  require_same_size(gprime.node_count(), sigma.n(), "missing_edge_value");
  require_same_size(gprime.node_count(), c.n(), "missing_edge_value");
  if (!gprime.is_simple() || gprime.edge_count() != binom2(gprime.node_count())) {
    throw std::invalid_argument("missing-edge relations need a simple complete graph");
  }
  if (!gprime.has_edge(e)) {
    throw std::invalid_argument("edge " + e.to_string() + " not in the completion");
  }
  RatMatrix a = build_A(gprime, sigma);
  const auto cols = edge_columns(gprime);
  const auto pos = static_cast<std::size_t>(
      std::find(cols.begin(), cols.end(), e) - cols.begin());
  RatVector col = c.vech();
  for (auto &x : col) x = -x;
  a.set_column(pos, col);
  return det(a);
}

std::vector<MissingEdgeRelation> missing_edge_relations(const Digraph &g,
                                                        const Covariance &sigma,
                                                        const NoiseMatrix &c) {
  require_same_size(g.node_count(), sigma.n(), "missing_edge_relations");
  if (!sigma.is_positive_definite()) {
    throw std::invalid_argument("covariance matrix is not positive definite");
  }
  const Digraph gprime = completion(g);
  std::vector<MissingEdgeRelation> out;
  for (const Edge &e : gprime.edges()) {
    if (g.has_edge(e)) continue;
    out.push_back({e, missing_edge_value(gprime, sigma, c, e)});
  }
  return out;
}

bool membership(const Digraph &g, const Covariance &sigma, const NoiseMatrix &c) {
  for (const auto &rel : missing_edge_relations(g, sigma, c)) {
    if (rel.value != 0) return false;
  }
  return true;
}

bool membership(const Digraph &g, const Covariance &sigma) {
  return membership(g, sigma, NoiseMatrix::standard(g.node_count()));
}

KernelWitness kernel_witness(const Digraph &g1, Edge flip, const Covariance &sigma) {
  const int n = g1.node_count();
  require_same_size(n, sigma.n(), "kernel_witness");
  if (!g1.is_simple() || !is_acyclic(g1) || g1.edge_count() != binom2(n) - 1) {
    throw std::invalid_argument("kernel_witness needs an almost-complete DAG");
  }
  if (!g1.has_edge(flip) || !is_super_covered(g1, flip)) {
    throw std::invalid_argument("edge " + flip.to_string() + " is not super-covered");
  }
  const int a = flip.src;
  const int b = flip.dst;
  const NodeSet kids = g1.children(b);
  bool found = false;
  for (int i = 1; i <= n && !found; ++i)
    for (int j = i + 1; j <= n && !found; ++j)
      if (!g1.adjacent(i, j)) found = kids.contains(i) && kids.contains(j);
  if (!found) {
    throw std::invalid_argument("missing edge must join two children of " +
                                std::to_string(b));
  }

  const auto order = topological_order(g1);
  const NodeSet p_set = g1.parents(a);
  const std::size_t q_size = static_cast<std::size_t>(p_set.size()) + 2;
  // P, a, b occupy the first |P| + 2 positions of every topological order.
  std::vector<int> q(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(q_size));
  std::vector<int> p(q.begin(), q.end() - 2);
  if (q[q_size - 2] != a || q[q_size - 1] != b) {
    throw std::logic_error("unexpected topological order around the flipped edge");
  }

  std::vector<std::size_t> p_rows;
  for (int v : p) p_rows.push_back(static_cast<std::size_t>(v - 1));

  RatMatrix d_full(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < q_size; ++s) {
    for (std::size_t t = s + 1; t < q_size; ++t) {
      std::vector<std::size_t> cols;
      for (std::size_t r = 0; r < q_size; ++r)
        if (r != s && r != t) cols.push_back(static_cast<std::size_t>(q[r] - 1));
      // 1-based positions; (-1)^{s+t+1}.
      const bool negative = ((s + 1) + (t + 1) + 1) % 2 == 1;
      Rational coeff = det(sigma.matrix().submatrix(p_rows, cols));
      if (negative) coeff = -coeff;
      if (coeff == 0) continue;
      const int sn = q[s];
      const int tn = q[t];
      // Column (s, t) of H: rows s -> j get -sigma_{tj}, rows t -> j get sigma_{sj}.
      for (int j = 1; j <= n; ++j) {
        d_full(static_cast<std::size_t>(sn - 1), static_cast<std::size_t>(j - 1)) -=
            coeff * sigma(tn, j);
        d_full(static_cast<std::size_t>(tn - 1), static_cast<std::size_t>(j - 1)) +=
            coeff * sigma(sn, j);
      }
    }
  }

  KernelWitness w;
  w.union_graph = g1.with_edge(flip.reversed());
  w.columns = edge_columns(w.union_graph);
  for (const Edge &e : w.columns) {
    w.values.push_back(d_full(static_cast<std::size_t>(e.src - 1),
                              static_cast<std::size_t>(e.dst - 1)));
  }
  w.full = std::move(d_full);
  w.p_nodes = std::move(p);
  return w;
}

}  // namespace lyapid
