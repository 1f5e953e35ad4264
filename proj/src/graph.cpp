#include "lyapid/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>
#include <sstream>

namespace lyapid {

namespace {

constexpr std::uint64_t kRowMask = 0xFFu;

std::uint32_t bit(int v) { return 1u << (v - 1); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool parse_int(std::string_view s, int &out) {
  const auto *first = s.data();
  const auto *last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string Edge::to_string() const {
  return std::to_string(src) + "->" + std::to_string(dst);
}

Edge parse_edge(std::string_view text) {
  const auto arrow = text.find("->");
  Edge e;
  if (arrow == std::string_view::npos ||
      !parse_int(trim(text.substr(0, arrow)), e.src) ||
      !parse_int(trim(text.substr(arrow + 2)), e.dst)) {
    throw std::invalid_argument("malformed edge '" + std::string(text) + "'");
  }
  return e;
}

NodeSet::NodeSet(std::initializer_list<int> nodes) {
  for (int v : nodes) bits_ |= bit(v);
}

int NodeSet::size() const { return std::popcount(bits_); }

std::vector<int> NodeSet::to_vector() const {
  std::vector<int> out;
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(std::countr_zero(b) + 1);
  }
  return out;
}

Digraph::Digraph(int n) : n_(n) {
  if (n < 0 || n > kMaxNodes) {
    throw std::invalid_argument("node count " + std::to_string(n) +
                                " outside 0.." + std::to_string(kMaxNodes));
  }
}

Digraph::Digraph(int n, std::initializer_list<Edge> edges)
    : Digraph(n, std::vector<Edge>(edges)) {}

Digraph::Digraph(int n, const std::vector<Edge> &edges) : Digraph(n) {
  for (const Edge &e : edges) {
    check_edge(e);
    bits_ |= std::uint64_t{1} << bit_index(e.src, e.dst);
  }
}

Digraph Digraph::from_bits(int n, std::uint64_t bits) {
  Digraph g(n);
  g.bits_ = bits;
  return g;
}

void Digraph::check_node(int i) const {
  if (i < 1 || i > n_) {
    throw std::out_of_range("node " + std::to_string(i) + " outside 1.." +
                            std::to_string(n_));
  }
}

void Digraph::check_edge(Edge e) const {
  check_node(e.src);
  check_node(e.dst);
  if (e.src == e.dst) {
    throw std::invalid_argument("explicit self-loop " + e.to_string());
  }
}

std::vector<Edge> Digraph::edges() const {
  std::vector<Edge> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    const int idx = std::countr_zero(b);
    out.push_back({idx / 8 + 1, idx % 8 + 1});
  }
  return out;
}

int Digraph::edge_count() const { return std::popcount(bits_); }

Digraph Digraph::with_edge(Edge e) const {
  check_edge(e);
  return from_bits(n_, bits_ | (std::uint64_t{1} << bit_index(e.src, e.dst)));
}

Digraph Digraph::without_edge(Edge e) const {
  check_edge(e);
  return from_bits(n_, bits_ & ~(std::uint64_t{1} << bit_index(e.src, e.dst)));
}

NodeSet Digraph::children(int i) const {
  check_node(i);
  return NodeSet(static_cast<std::uint32_t>((bits_ >> ((i - 1) * 8)) & kRowMask));
}

NodeSet Digraph::parents(int i) const {
  check_node(i);
  std::uint32_t out = 0;
  for (int p = 1; p <= n_; ++p) {
    if (has_edge(p, i)) out |= bit(p);
  }
  return NodeSet(out);
}

bool Digraph::is_simple() const {
  for (const Edge &e : edges()) {
    if (has_edge(e.dst, e.src)) return false;
  }
  return true;
}

std::vector<std::pair<int, int>> Skeleton::to_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (std::uint64_t b = pairs; b != 0; b &= b - 1) {
    const int idx = std::countr_zero(b);
    out.emplace_back(idx / 8 + 1, idx % 8 + 1);
  }
  return out;
}

Digraph parse_graph(std::string_view text) {
  int line_no = 0;
  bool have_n = false;
  int n = 0;
  Digraph g;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_fields(line);
    if (!have_n) {
      if (fields.size() != 1 || !parse_int(fields[0], n)) {
        throw ParseError(line_no, "expected node count, got '" +
                                      std::string(line) + "'");
      }
      if (n < 1 || n > Digraph::kMaxNodes) {
        throw ParseError(line_no, "node count " + std::to_string(n) +
                                      " outside 1.." +
                                      std::to_string(Digraph::kMaxNodes));
      }
      g = Digraph(n);
      have_n = true;
      continue;
    }
    Edge e;
    if (fields.size() != 2 || !parse_int(fields[0], e.src) ||
        !parse_int(fields[1], e.dst)) {
      throw ParseError(line_no, "malformed edge line '" + std::string(line) + "'");
    }
    if (e.src < 1 || e.src > n || e.dst < 1 || e.dst > n) {
      throw ParseError(line_no, "node index out of range in '" +
                                    std::string(line) + "'");
    }
    if (e.src == e.dst) {
      throw ParseError(line_no, "explicit self-loop '" + std::string(line) + "'");
    }
    if (g.has_edge(e)) {
      throw ParseError(line_no, "duplicate edge " + e.to_string());
    }
    g = g.with_edge(e);
  }
  if (!have_n) throw ParseError(line_no, "missing node count");
  return g;
}

std::string format_graph(const Digraph &g) {
  std::ostringstream out;
  out << g.node_count() << '\n';
  for (const Edge &e : g.edges()) out << e.src << ' ' << e.dst << '\n';
  return out.str();
}

bool is_acyclic(const Digraph &g) {
  // Peel sources; a leftover node means a cycle.
  const int n = g.node_count();
  std::uint32_t remaining = NodeSet::range(n).bits();
  std::array<std::uint32_t, Digraph::kMaxNodes + 1> pa{};
  for (int v = 1; v <= n; ++v) pa[v] = g.parents(v).bits();
  bool progress = true;
  while (remaining != 0 && progress) {
    progress = false;
    for (int v = 1; v <= n; ++v) {
      if ((remaining & bit(v)) && (pa[v] & remaining) == 0) {
        remaining &= ~bit(v);
        progress = true;
      }
    }
  }
  return remaining == 0;
}

NodeSet ancestors(const Digraph &g, int i) {
  std::uint32_t seen = bit(i);
  std::uint32_t frontier = seen;
  while (frontier != 0) {
    std::uint32_t next = 0;
    for (int v : NodeSet(frontier).to_vector()) next |= g.parents(v).bits();
    frontier = next & ~seen;
    seen |= next;
  }
  return NodeSet(seen);
}

bool has_trek(const Digraph &g, int i, int j) {
  return !(ancestors(g, i) & ancestors(g, j)).empty();
}

bool marginally_independent(const Digraph &g, int k, NodeSet s) {
  if (s.contains(k)) {
    throw std::invalid_argument("node " + std::to_string(k) +
                                " must not belong to the conditioning set");
  }
  for (int v : s.to_vector()) {
    if (has_trek(g, k, v)) return false;
  }
  return true;
}

Skeleton skeleton(const Digraph &g) {
  Skeleton s{g.node_count(), 0};
  for (const Edge &e : g.edges()) {
    const int lo = std::min(e.src, e.dst);
    const int hi = std::max(e.src, e.dst);
    s.pairs |= std::uint64_t{1} << Digraph::bit_index(lo, hi);
  }
  return s;
}

std::vector<VStructure> v_structures(const Digraph &g) {
  std::vector<VStructure> out;
  const int n = g.node_count();
  for (int k = 1; k <= n; ++k) {
    const auto pa = g.parents(k).to_vector();
    for (std::size_t a = 0; a < pa.size(); ++a) {
      for (std::size_t b = a + 1; b < pa.size(); ++b) {
        if (!g.adjacent(pa[a], pa[b])) out.push_back({pa[a], k, pa[b]});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Digraph induced_subgraph(const Digraph &g, NodeSet k) {
  const auto nodes = k.to_vector();
  for (int v : nodes) {
    if (v > g.node_count()) {
      throw std::out_of_range("node " + std::to_string(v) + " not in graph");
    }
  }
  Digraph out(static_cast<int>(nodes.size()));
  std::uint64_t bits = 0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      if (a != b && g.has_edge(nodes[a], nodes[b])) {
        bits |= std::uint64_t{1}
                << Digraph::bit_index(static_cast<int>(a) + 1, static_cast<int>(b) + 1);
      }
    }
  }
  return Digraph::from_bits(out.node_count(), bits);
}

Adjacency::Adjacency(const Digraph &g) : n(g.node_count()) {
  const std::uint64_t bits = g.bits();
  for (int i = 1; i <= n; ++i) {
    const auto row = static_cast<std::uint8_t>((bits >> ((i - 1) * 8)) & kRowMask);
    ch[i] = row;
    for (std::uint32_t b = row; b != 0; b &= b - 1) {
      pa[std::countr_zero(b) + 1] |= static_cast<std::uint8_t>(bit(i));
    }
  }
  for (int i = 1; i <= n; ++i) anc[i] = static_cast<std::uint8_t>(bit(i));
  // Fixpoint; at most n rounds.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 1; i <= n; ++i) {
      std::uint8_t a = anc[i];
      for (std::uint32_t b = pa[i]; b != 0; b &= b - 1) {
        a |= anc[std::countr_zero(b) + 1];
      }
      if (a != anc[i]) {
        anc[i] = a;
        changed = true;
      }
    }
  }
}

bool Adjacency::super_covered(int i, int j) const {
  const std::uint8_t bi = static_cast<std::uint8_t>(bit(i));
  const std::uint8_t bj = static_cast<std::uint8_t>(bit(j));
  if (ch[i] != (ch[j] | bj) || (pa[i] | bi) != pa[j]) return false;
  // Every parent of j points to every child of i (self-loops implicit).
  for (std::uint32_t b = pa[j]; b != 0; b &= b - 1) {
    const int k = std::countr_zero(b) + 1;
    const std::uint8_t reach = ch[k] | static_cast<std::uint8_t>(bit(k));
    if ((ch[i] & ~reach) != 0) return false;
  }
  const std::uint8_t common_nb = (pa[i] | ch[i]) & (pa[j] | ch[j]);
  for (int k = 1; k <= n; ++k) {
    if (k == i || k == j) continue;
    if (common_nb & bit(k)) continue;
    if ((anc[k] & anc[i]) != 0 || (anc[k] & anc[j]) != 0) return false;
  }
  return true;
}

namespace {

void require_simple_dag_edge(const Digraph &g, Edge e) {
  if (!g.has_edge(e)) {
    throw std::invalid_argument("edge " + e.to_string() + " not in graph");
  }
  if (!g.is_simple() || !is_acyclic(g)) {
    throw std::invalid_argument("graph must be a simple DAG");
  }
}

}  // namespace

bool is_super_covered(const Digraph &g, Edge e) {
  require_simple_dag_edge(g, e);
  return Adjacency(g).super_covered(e.src, e.dst);
}

bool is_covered(const Digraph &g, Edge e) {
  require_simple_dag_edge(g, e);
  return (g.parents(e.src) | NodeSet::single(e.src)) == g.parents(e.dst);
}

std::vector<Edge> super_covered_edges(const Digraph &g) {
  const Adjacency adj(g);
  std::vector<Edge> out;
  for (const Edge &e : g.edges()) {
    if (adj.super_covered(e.src, e.dst)) out.push_back(e);
  }
  return out;
}

Digraph flip_edge(const Digraph &g, Edge e) {
  if (!g.has_edge(e)) {
    throw std::invalid_argument("edge " + e.to_string() + " not in graph");
  }
  if (g.has_edge(e.reversed())) {
    throw std::invalid_argument("reversal of " + e.to_string() +
                                " already present");
  }
  return g.without_edge(e).with_edge(e.reversed());
}

std::vector<int> topological_order(const Digraph &g) {
  const int n = g.node_count();
  std::vector<int> order;
  order.reserve(n);
  std::uint32_t remaining = NodeSet::range(n).bits();
  while (remaining != 0) {
    int pick = 0;
    for (int v = 1; v <= n; ++v) {
      if ((remaining & bit(v)) && (g.parents(v).bits() & remaining) == 0) {
        pick = v;
        break;
      }
    }
    if (pick == 0) throw std::invalid_argument("graph has a directed cycle");
    order.push_back(pick);
    remaining &= ~bit(pick);
  }
  return order;
}

Digraph completion(const Digraph &g) {
  if (!g.is_simple()) throw std::invalid_argument("completion needs a simple graph");
  const int n = g.node_count();
  Digraph out = g;
  if (is_acyclic(g)) {
    const auto order = topological_order(g);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (!out.adjacent(order[a], order[b])) out = out.with_edge({order[a], order[b]});
      }
    }
    return out;
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (!out.adjacent(i, j)) out = out.with_edge({i, j});
    }
  }
  return out;
}

bool isomorphic(const Digraph &g1, const Digraph &g2) {
  if (g1.node_count() != g2.node_count()) {
    throw std::invalid_argument("isomorphism test needs equal node counts");
  }
  if (g1.edge_count() != g2.edge_count()) return false;
  const int n = g1.node_count();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  const auto edges = g1.edges();
  do {
    bool ok = true;
    for (const Edge &e : edges) {
      if (!g2.has_edge(perm[e.src - 1], perm[e.dst - 1])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace lyapid
