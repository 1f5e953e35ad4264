#include "lyapid/equivalence.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

#include "lyapid/lyapunov.hpp"

namespace lyapid {

namespace {

void require_simple_dag(const Digraph &g) {
  if (!g.is_simple() || !is_acyclic(g)) {
    throw std::invalid_argument("expected a simple DAG");
  }
}

void require_same_nodes(const Digraph &g1, const Digraph &g2) {
  if (g1.node_count() != g2.node_count()) {
    throw std::invalid_argument("graphs have different node counts (" +
                                std::to_string(g1.node_count()) + " vs " +
                                std::to_string(g2.node_count()) + ")");
  }
}

std::vector<std::uint64_t> flip_orbit_bits(const Digraph &g) {
  std::vector<std::uint64_t> orbit{g.bits()};
  std::unordered_set<std::uint64_t> seen{g.bits()};
  for (std::size_t head = 0; head < orbit.size(); ++head) {
    const Digraph cur = Digraph::from_bits(g.node_count(), orbit[head]);
    for (const Edge &e : super_covered_edges(cur)) {
      const Digraph next = flip_edge(cur, e);
      if (seen.insert(next.bits()).second) orbit.push_back(next.bits());
    }
  }
  return orbit;
}

// Canonical orbit representative of every 4-node DAG, built once.
const std::unordered_map<std::uint64_t, std::uint64_t> &four_node_canonical() {
  static const auto table = [] {
    std::unordered_map<std::uint64_t, std::uint64_t> out;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= 4; ++i)
      for (int j = i + 1; j <= 4; ++j) pairs.emplace_back(i, j);
    int total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
    for (int code = 0; code < total; ++code) {
      std::uint64_t bits = 0;
      int c = code;
      for (const auto &[i, j] : pairs) {
        const int digit = c % 3;
        c /= 3;
        if (digit == 1) bits |= std::uint64_t{1} << Digraph::bit_index(i, j);
        if (digit == 2) bits |= std::uint64_t{1} << Digraph::bit_index(j, i);
      }
      const Digraph g = Digraph::from_bits(4, bits);
      if (!is_acyclic(g) || out.count(bits)) continue;
      const auto orbit = flip_orbit_bits(g);
      const auto rep = *std::min_element(orbit.begin(), orbit.end());
      for (auto member : orbit) out[member] = rep;
    }
    return out;
  }();
  return table;
}

bool same_flip_orbit(const Digraph &g1, const Digraph &g2) {
  if (g1 == g2) return true;
  if (g1.node_count() == 4) {
    const auto &table = four_node_canonical();
    return table.at(g1.bits()) == table.at(g2.bits());
  }
  const auto orbit = flip_orbit_bits(g1);
  return std::find(orbit.begin(), orbit.end(), g2.bits()) != orbit.end();
}

}  // namespace

std::string to_string(FourNodeType t) {
  switch (t) {
    case FourNodeType::kI: return "I";
    case FourNodeType::kII: return "II";
    case FourNodeType::kIII: return "III";
    case FourNodeType::kIV: return "IV";
    case FourNodeType::kV: return "V";
    case FourNodeType::kVI: return "VI";
    case FourNodeType::kVII: return "VII";
    case FourNodeType::kIdentifiable: return "identifiable";
  }
  return "?";
}

const std::vector<Digraph> &four_node_patterns() {
  static const std::vector<Digraph> patterns = {
      Digraph(4, {{1, 4}, {2, 3}, {2, 4}, {3, 4}}),
      Digraph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}}),
      Digraph(4, {{1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}),
      Digraph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}),
      Digraph(4, {{1, 2}, {1, 3}, {2, 3}}),
      Digraph(4, {{1, 2}, {3, 4}}),
      Digraph(4, {{1, 2}}),
  };
  return patterns;
}

FourNodeType classify_four_node(const Digraph &g) {
  if (g.node_count() != 4) throw std::invalid_argument("classify_four_node needs n = 4");
  require_simple_dag(g);
  const auto &patterns = four_node_patterns();
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    if (isomorphic(patterns[k], g)) return static_cast<FourNodeType>(k);
  }
  return FourNodeType::kIdentifiable;
}

bool has_super_covered_edge(const Digraph &g) {
  require_simple_dag(g);
  return !super_covered_edges(g).empty();
}

bool is_identifiable(const Digraph &g) { return !has_super_covered_edge(g); }

namespace {

// For each pattern, the edges whose reversal stays inside the pattern's flip
// class, as a 4x4 mask indexed by Digraph::bit_index.
const std::vector<std::uint64_t> &pattern_flippable_edges() {
  static const std::vector<std::uint64_t> masks = [] {
    std::vector<std::uint64_t> out;
    for (const Digraph &p : four_node_patterns()) {
      const auto cls = flip_orbit_bits(p);
      std::uint64_t mask = 0;
      for (const Edge &e : p.edges()) {
        const Digraph r = p.without_edge(e).with_edge(e.reversed());
        if (std::find(cls.begin(), cls.end(), r.bits()) != cls.end()) {
          mask |= std::uint64_t{1} << Digraph::bit_index(e.src, e.dst);
        }
      }
      out.push_back(mask);
    }
    return out;
  }();
  return masks;
}

// True when some relabeling maps sub onto a pattern and the edge e of sub
// onto a flippable edge of that pattern.
bool edge_trapped(const Digraph &sub, Edge e) {
  const auto &patterns = four_node_patterns();
  const auto &flippable = pattern_flippable_edges();
  std::array<int, 5> perm{0, 1, 2, 3, 4};
  do {
    Digraph image(4);
    for (const Edge &f : sub.edges()) image = image.with_edge({perm[f.src], perm[f.dst]});
    const auto mapped = std::uint64_t{1} << Digraph::bit_index(perm[e.src], perm[e.dst]);
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      if (image == patterns[k] && (flippable[k] & mapped)) return true;
    }
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return false;
}

}  // namespace

bool is_identifiable_by_subgraphs(const Digraph &g) {
  require_simple_dag(g);
  const Digraph padded =
      g.node_count() >= 4 ? g : Digraph::from_bits(4, g.bits());
  const int n = padded.node_count();
  for (const Edge &e : padded.edges()) {
    bool escapes = false;
    for (int k = 1; k <= n && !escapes; ++k) {
      if (k == e.src || k == e.dst) continue;
      for (int l = k + 1; l <= n && !escapes; ++l) {
        if (l == e.src || l == e.dst) continue;
        const NodeSet subset{e.src, e.dst, k, l};
        // Position of a node inside the relabeled subgraph.
        auto local = [&](int v) { return (subset & NodeSet(NodeSet::range(v).bits())).size(); };
        escapes = !edge_trapped(induced_subgraph(padded, subset), {local(e.src), local(e.dst)});
      }
    }
    if (!escapes) return false;
  }
  return true;
}

EquivalenceClass equivalence_class(const Digraph &g) {
  require_simple_dag(g);
  auto bits = flip_orbit_bits(g);
  std::sort(bits.begin(), bits.end());
  EquivalenceClass out;
  for (auto b : bits) out.members.push_back(Digraph::from_bits(g.node_count(), b));
  out.representative = out.members.front();
  return out;
}

Digraph canonical_representative(const Digraph &g) {
  require_simple_dag(g);
  const auto orbit = flip_orbit_bits(g);
  return Digraph::from_bits(g.node_count(), *std::min_element(orbit.begin(), orbit.end()));
}

std::optional<GraphicalCertificate> model_equiv_certificate(const Digraph &g1,
                                                            const Digraph &g2) {
  require_same_nodes(g1, g2);
  require_simple_dag(g1);
  require_simple_dag(g2);
  if (skeleton(g1) != skeleton(g2)) return GraphicalCertificate{true, {}};
  const int n = g1.node_count();
  if (n < 4) {
    if (same_flip_orbit(g1, g2)) return std::nullopt;
    return GraphicalCertificate{false, NodeSet::range(n)};
  }
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d) {
          const NodeSet k{a, b, c, d};
          if (!same_flip_orbit(induced_subgraph(g1, k), induced_subgraph(g2, k))) {
            return GraphicalCertificate{false, k};
          }
        }
  return std::nullopt;
}

bool model_equiv(const Digraph &g1, const Digraph &g2) {
  return !model_equiv_certificate(g1, g2).has_value();
}

std::optional<FlipSequence> transform_sequence(const Digraph &g1, const Digraph &g2) {
  if (!model_equiv(g1, g2)) return std::nullopt;
  FlipSequence seq{g1, g2, {}};
  Digraph cur = g1;
  while (cur != g2) {
    const auto order = topological_order(cur);
    std::vector<int> pos(static_cast<std::size_t>(cur.node_count()) + 1);
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
    // Find-Edge: i->j precedes k->l iff j < l, or j = l and i > k.
    std::optional<Edge> best;
    for (const Edge &e : cur.edges()) {
      if (g2.has_edge(e)) continue;
      if (!best || pos[e.dst] < pos[best->dst] ||
          (e.dst == best->dst && pos[e.src] > pos[best->src])) {
        best = e;
      }
    }
    if (!is_super_covered(cur, *best)) {
      throw std::logic_error("Find-Edge produced edge " + best->to_string() +
                             " that is not super-covered");
    }
    cur = flip_edge(cur, *best);
    seq.flips.push_back(*best);
  }
  return seq;
}

bool markov_equiv(const Digraph &g1, const Digraph &g2) {
  require_same_nodes(g1, g2);
  require_simple_dag(g1);
  require_simple_dag(g2);
  return skeleton(g1) == skeleton(g2) && v_structures(g1) == v_structures(g2);
}

OracleResult oracle_equiv_detailed(const Digraph &g1, const Digraph &g2, int k,
                                   std::uint64_t seed) {
  require_same_nodes(g1, g2);
  require_simple_dag(g1);
  require_simple_dag(g2);
  if (k < 1) throw std::invalid_argument("oracle needs at least one sample");
  const auto c = NoiseMatrix::standard(g1.node_count());
  OracleResult out;
  for (int s = 0; s < k; ++s) {
    const std::uint64_t cur_seed = seed + static_cast<std::uint64_t>(s);
    for (int dir = 1; dir <= 2; ++dir) {
      const Digraph &from = dir == 1 ? g1 : g2;
      const Digraph &to = dir == 1 ? g2 : g1;
      const auto sigma = solve_for_sigma(sample_stable_sparse(from, cur_seed), c);
      for (auto &rel : missing_edge_relations(to, sigma, c)) {
        if (rel.value != 0) {
          out.equivalent = false;
          out.certificate = OracleCertificate{cur_seed, dir, rel.edge, std::move(rel.value)};
          return out;
        }
      }
    }
  }
  return out;
}

bool oracle_equiv(const Digraph &g1, const Digraph &g2, int k, std::uint64_t seed) {
  return oracle_equiv_detailed(g1, g2, k, seed).equivalent;
}

bool ci_defined(const Digraph &g) {
  require_simple_dag(g);
  const int n = g.node_count();
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (!g.adjacent(i, j) && has_trek(g, i, j)) return false;
  return true;
}

}  // namespace lyapid
