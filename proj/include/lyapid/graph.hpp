#pragma once

// Labeled directed graphs on nodes 1..n with implicit self-loops.
//
// Every node carries a self-loop i -> i that is never stored: edge counts,
// parent/child sets and acyclicity all ignore it. Stored edges live in a
// single 64-bit adjacency word (row stride 8), which caps graphs at 8 nodes
// and makes copies, hashing and comparison trivial. The word doubles as the
// canonical encoding used by the census ("minimal encoding in an orbit").

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lyapid {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Edge {
  int src = 0;
  int dst = 0;

  auto operator<=>(const Edge &) const = default;
  Edge reversed() const { return {dst, src}; }
  std::string to_string() const;
};

// Parses "i->j".
Edge parse_edge(std::string_view text);

// A subset of {1..8} as a bitmask (bit i-1 for node i).
class NodeSet {
 public:
  constexpr NodeSet() = default;
  constexpr explicit NodeSet(std::uint32_t bits) : bits_(bits) {}
  NodeSet(std::initializer_list<int> nodes);

  static constexpr NodeSet single(int v) { return NodeSet(1u << (v - 1)); }
  static constexpr NodeSet range(int n) { return NodeSet((1u << n) - 1u); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int v) const { return (bits_ >> (v - 1)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  std::vector<int> to_vector() const;

  constexpr NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
  constexpr NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
  constexpr NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const NodeSet &) const = default;

 private:
  std::uint32_t bits_ = 0;
};

class Digraph {
 public:
  static constexpr int kMaxNodes = 8;

  Digraph() = default;
  explicit Digraph(int n);
  Digraph(int n, std::initializer_list<Edge> edges);
  Digraph(int n, const std::vector<Edge> &edges);

  // No validation of the bits beyond the node range.
  static Digraph from_bits(int n, std::uint64_t bits);

  int node_count() const { return n_; }
  std::uint64_t bits() const { return bits_; }

  bool has_edge(int i, int j) const {
    return (bits_ >> bit_index(i, j)) & 1u;
  }
  bool has_edge(Edge e) const { return has_edge(e.src, e.dst); }
  bool adjacent(int i, int j) const { return has_edge(i, j) || has_edge(j, i); }

  // Stored edges in row-major order 1->2, 1->3, ..., 2->1, 2->3, ...
  std::vector<Edge> edges() const;
  int edge_count() const;

  Digraph with_edge(Edge e) const;
  Digraph without_edge(Edge e) const;

  NodeSet parents(int i) const;
  NodeSet children(int i) const;
  NodeSet neighbors(int i) const { return parents(i) | children(i); }

  bool is_simple() const;

  auto operator<=>(const Digraph &) const = default;

  static constexpr int bit_index(int i, int j) { return (i - 1) * 8 + (j - 1); }

 private:
  void check_node(int i) const;
  void check_edge(Edge e) const;

  int n_ = 0;
  std::uint64_t bits_ = 0;
};

struct Skeleton {
  int n = 0;
  // Bit Digraph::bit_index(i, j) for each unordered pair {i, j}, i < j.
  std::uint64_t pairs = 0;

  std::vector<std::pair<int, int>> to_pairs() const;
  bool operator==(const Skeleton &) const = default;
};

// Unshielded collider left -> mid <- right with left < right.
struct VStructure {
  int left = 0;
  int mid = 0;
  int right = 0;
  auto operator<=>(const VStructure &) const = default;
};

// Edge-list text: first non-comment line is n, then one "i j" per edge.
// Lines starting with '#' and blank lines are ignored.
Digraph parse_graph(std::string_view text);
std::string format_graph(const Digraph &g);

bool is_acyclic(const Digraph &g);
NodeSet ancestors(const Digraph &g, int i);
bool has_trek(const Digraph &g, int i, int j);
bool marginally_independent(const Digraph &g, int k, NodeSet s);

Skeleton skeleton(const Digraph &g);
std::vector<VStructure> v_structures(const Digraph &g);

// Nodes of k are relabeled 1..|k| in increasing order.
Digraph induced_subgraph(const Digraph &g, NodeSet k);

bool is_super_covered(const Digraph &g, Edge e);
bool is_covered(const Digraph &g, Edge e);
// All super-covered edges of a simple DAG, in row-major order.
std::vector<Edge> super_covered_edges(const Digraph &g);

Digraph flip_edge(const Digraph &g, Edge e);

// Repeatedly removes the lowest-index source. Throws on cyclic input.
std::vector<int> topological_order(const Digraph &g);

Digraph completion(const Digraph &g);

// Brute force over all n! relabelings.
bool isomorphic(const Digraph &g1, const Digraph &g2);

// Precomputed parent/child/ancestor masks. Used on hot paths that query
// many edges of one graph.
struct Adjacency {
  int n = 0;
  std::array<std::uint8_t, Digraph::kMaxNodes + 1> pa{};
  std::array<std::uint8_t, Digraph::kMaxNodes + 1> ch{};
  std::array<std::uint8_t, Digraph::kMaxNodes + 1> anc{};

  // Requires an acyclic graph.
  explicit Adjacency(const Digraph &g);
  bool super_covered(int i, int j) const;
};

}  // namespace lyapid
