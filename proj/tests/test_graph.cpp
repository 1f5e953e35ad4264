#include <doctest.h>

#include <functional>

#include "fixtures.hpp"
#include "lyapid/census.hpp"
#include "lyapid/graph.hpp"

using namespace lyapid;
using namespace lyapid::fixtures;

namespace {

NodeSet nodes(std::initializer_list<int> v) { return NodeSet(v); }

// Independent reference: DFS with colors.
bool has_cycle_dfs(const Digraph &g) {
  const int n = g.node_count();
  std::vector<int> color(static_cast<std::size_t>(n) + 1, 0);
  std::function<bool(int)> visit = [&](int v) {
    color[v] = 1;
    for (int w : g.children(v).to_vector()) {
      if (color[w] == 1) return true;
      if (color[w] == 0 && visit(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (int v = 1; v <= n; ++v)
    if (color[v] == 0 && visit(v)) return true;
  return false;
}

}  // namespace

TEST_CASE("parse_graph reads edge lists") {
  CHECK(parse_graph("3\n1 2\n2 3") == forward_path());
  CHECK(parse_graph("3") == Digraph(3));
  CHECK(parse_graph("# header\n\n3\n# edge\n1 2\n  2 3  \n") == forward_path());
}

TEST_CASE("parse_graph rejects bad input with the offending line") {
  auto line_of = [](const char *text) {
    try {
      parse_graph(text);
    } catch (const ParseError &e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("2\n1 1") == 2);
  CHECK(line_of("3\n1 2\n1 2") == 3);
  CHECK(line_of("3\n1 4") == 2);
  CHECK(line_of("3\n0 1") == 2);
  CHECK(line_of("3\n1 2 3") == 2);
  CHECK(line_of("3\n1 x") == 2);
  CHECK(line_of("x") == 1);
  CHECK(line_of("9") == 1);
  CHECK(line_of("0") == 1);
}

TEST_CASE("empty document has no node count") {
  CHECK_THROWS_AS(parse_graph(""), ParseError);
  CHECK_THROWS_AS(parse_graph("# only a comment\n"), ParseError);
}

TEST_CASE("format_graph round-trips") {
  for (const auto &g : {forward_path(), Digraph(4), six_node_g1(), collider()}) {
    CHECK(parse_graph(format_graph(g)) == g);
  }
}

TEST_CASE("edge text") {
  CHECK(Edge{1, 3}.to_string() == "1->3");
  CHECK(parse_edge("12->3") == Edge{12, 3});
  CHECK_THROWS(parse_edge("1-3"));
  CHECK_THROWS(parse_edge("->3"));
}

TEST_CASE("acyclicity") {
  CHECK(is_acyclic(forward_path()));
  CHECK(is_acyclic(Digraph(5)));
  // Non-simple graph with 2->3 and 3->2.
  CHECK_FALSE(is_acyclic(Digraph(4, {{1, 2}, {2, 3}, {3, 2}, {3, 4}})));
  CHECK_FALSE(is_acyclic(Digraph(3, {{1, 2}, {2, 3}, {3, 1}})));
}

TEST_CASE("acyclicity agrees with DFS on all 3-node digraphs and random 6-node ones") {
  for (std::uint64_t code = 0; code < (1u << 6); ++code) {
    Digraph g(3);
    const std::vector<Edge> all = {{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}};
    for (std::size_t k = 0; k < all.size(); ++k)
      if ((code >> k) & 1u) g = g.with_edge(all[k]);
    CHECK(is_acyclic(g) == !has_cycle_dfs(g));
  }
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    Digraph g(6);
    std::bernoulli_distribution coin(0.2);
    for (int i = 1; i <= 6; ++i)
      for (int j = 1; j <= 6; ++j)
        if (i != j && coin(rng)) g = g.with_edge({i, j});
    CHECK(is_acyclic(g) == !has_cycle_dfs(g));
  }
}

TEST_CASE("parents, children, neighbors") {
  CHECK(forward_path().parents(2) == nodes({1}));
  CHECK(six_node_g1().parents(3) == nodes({1, 2}));
  CHECK(Digraph(3).neighbors(1).empty());
  CHECK(forward_path().children(2) == nodes({3}));
  CHECK(forward_path().neighbors(2) == nodes({1, 3}));
  CHECK_THROWS_AS(forward_path().parents(4), std::out_of_range);
  CHECK_THROWS_AS(forward_path().parents(0), std::out_of_range);
}

TEST_CASE("ancestors and treks") {
  CHECK(ancestors(forward_path(), 3) == nodes({1, 2, 3}));
  CHECK(ancestors(collider(), 3) == nodes({1, 2, 3}));
  CHECK(ancestors(Digraph(2), 2) == nodes({2}));
  CHECK(has_trek(forward_path(), 1, 3));
  CHECK_FALSE(has_trek(collider(), 1, 2));
  for (int i = 1; i <= 3; ++i) CHECK(has_trek(collider(), i, i));
}

TEST_CASE("marginal independence") {
  CHECK(marginally_independent(six_node_g1(), 6, nodes({2, 3})));
  CHECK_FALSE(marginally_independent(forward_path(), 1, nodes({3})));
  CHECK(marginally_independent(Digraph(3, {{1, 2}}), 3, nodes({1, 2})));
  CHECK_THROWS_AS(marginally_independent(forward_path(), 1, nodes({1, 2})),
                  std::invalid_argument);
}

TEST_CASE("trek symmetry and reflexive ancestors on all 4-node DAGs") {
  for_each_dag(4, [](const Digraph &g) {
    for (int i = 1; i <= 4; ++i) {
      CHECK(ancestors(g, i).contains(i));
      for (int j = 1; j <= 4; ++j) CHECK(has_trek(g, i, j) == has_trek(g, j, i));
    }
  });
}

TEST_CASE("skeletons and v-structures") {
  CHECK(skeleton(forward_path()) == skeleton(backward_path()));
  CHECK(v_structures(forward_path()).empty());
  CHECK(v_structures(backward_path()).empty());
  const auto vs = v_structures(collider());
  REQUIRE(vs.size() == 1);
  CHECK(vs[0] == VStructure{1, 3, 2});
  CHECK(v_structures(complete_dag(5)).empty());
  CHECK(skeleton(forward_path()).to_pairs() ==
        std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
  CHECK(skeleton(forward_path()) != skeleton(collider()));
}

TEST_CASE("induced subgraphs") {
  CHECK(induced_subgraph(six_node_g1(), nodes({1, 2, 3})) == complete_dag(3));
  CHECK(induced_subgraph(six_node_g1(), NodeSet::range(6)) == six_node_g1());
  CHECK(induced_subgraph(six_node_g1(), nodes({4})) == Digraph(1));
  // Relabeling keeps the order of the kept nodes.
  CHECK(induced_subgraph(six_node_g1(), nodes({3, 4, 6})) == Digraph(3, {{1, 2}, {3, 2}}));
}

TEST_CASE("super-covered edges in the flip-sequence example") {
  CHECK(is_super_covered(six_node_g1(), {2, 3}));
  CHECK_FALSE(is_super_covered(six_node_g1(), {1, 3}));
  CHECK(is_super_covered(six_node_g2(), {1, 3}));
  CHECK_FALSE(is_super_covered(forward_path(), {1, 2}));
  CHECK(is_super_covered(six_node_g1(), {1, 2}));
  CHECK(super_covered_edges(six_node_g1()) == std::vector<Edge>{{1, 2}, {2, 3}});
  CHECK_THROWS_AS(is_super_covered(six_node_g1(), {3, 2}), std::invalid_argument);
}

TEST_CASE("covered edges") {
  CHECK(is_covered(forward_path(), {1, 2}));
  CHECK_FALSE(is_covered(collider(), {1, 3}));
  CHECK_THROWS_AS(is_covered(collider(), {3, 1}), std::invalid_argument);
}

TEST_CASE("flip_edge") {
  CHECK(flip_edge(six_node_g1(), {2, 3}) ==
        Digraph(6, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {3, 2}, {2, 4}, {2, 5}, {3, 4}, {3, 5},
                    {6, 4}}));
  CHECK(flip_edge(flip_edge(six_node_g1(), {1, 4}), {4, 1}) == six_node_g1());
  CHECK_THROWS_AS(flip_edge(forward_path(), {1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(flip_edge(Digraph(2, {{1, 2}, {2, 1}}), {1, 2}), std::invalid_argument);
}

TEST_CASE("topological order") {
  CHECK(topological_order(forward_path()) == std::vector<int>{1, 2, 3});
  CHECK(topological_order(backward_path()) == std::vector<int>{3, 2, 1});
  CHECK(topological_order(Digraph(4)) == std::vector<int>{1, 2, 3, 4});
  CHECK(topological_order(six_node_g1()) == std::vector<int>{1, 2, 3, 5, 6, 4});
  CHECK_THROWS_AS(topological_order(Digraph(2, {{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("completion") {
  CHECK(completion(forward_path()) == forward_path().with_edge({1, 3}));
  CHECK(completion(complete_dag(4)) == complete_dag(4));
  CHECK(completion(Digraph(3)) == complete_dag(3));
  CHECK(completion(backward_path()) == backward_path().with_edge({3, 1}));
  // Cyclic simple input: missing pairs point from low to high index.
  const Digraph cycle(4, {{1, 2}, {2, 3}, {3, 1}});
  CHECK(completion(cycle) == cycle.with_edge({1, 4}).with_edge({2, 4}).with_edge({3, 4}));
  CHECK_THROWS_AS(completion(Digraph(2, {{1, 2}, {2, 1}})), std::invalid_argument);
}

TEST_CASE("completion is a complete supergraph, acyclic for DAG input (n <= 4)") {
  for (int n = 1; n <= 4; ++n) {
    for_each_dag(n, [n](const Digraph &g) {
      const Digraph c = completion(g);
      CHECK(c.edge_count() == n * (n - 1) / 2);
      CHECK((c.bits() & g.bits()) == g.bits());
      CHECK(c.is_simple());
      CHECK(is_acyclic(c));
    });
  }
}

TEST_CASE("isomorphism") {
  const Digraph type1(4, {{1, 4}, {2, 3}, {2, 4}, {3, 4}});
  const Digraph type2(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}});
  // Relabel 1->3, 2->1, 3->4, 4->2.
  const Digraph relabeled(4, {{3, 2}, {1, 4}, {1, 2}, {4, 2}});
  CHECK(isomorphic(type1, relabeled));
  CHECK_FALSE(isomorphic(type1, type2));
  CHECK(isomorphic(six_node_g1(), six_node_g1()));
  CHECK_FALSE(isomorphic(forward_path(), collider()));
  CHECK_THROWS_AS(isomorphic(Digraph(3), Digraph(4)), std::invalid_argument);
}

TEST_CASE("Adjacency fast path agrees with is_super_covered on all 5-node DAGs") {
  for_each_dag(5, [](const Digraph &g) {
    const Adjacency a(g);
    for (const Edge &e : g.edges()) CHECK(a.super_covered(e.src, e.dst) == is_super_covered(g, e));
  });
}

TEST_CASE("flipping a super-covered edge keeps a DAG; super-covered implies covered (n <= 5)") {
  for (int n = 2; n <= 5; ++n) {
    for_each_dag(n, [](const Digraph &g) {
      for (const Edge &e : super_covered_edges(g)) {
        CHECK(is_acyclic(flip_edge(g, e)));
        CHECK(is_covered(g, e));
      }
    });
  }
}

TEST_CASE("super-covered iff super-covered in every 4-node induced subgraph (n = 5)") {
  for_each_dag(5, [](const Digraph &g) {
    for (const Edge &e : g.edges()) {
      bool everywhere = true;
      for (int k = 1; k <= 5; ++k)
        for (int l = k + 1; l <= 5; ++l) {
          if (k == e.src || k == e.dst || l == e.src || l == e.dst) continue;
          const NodeSet subset{e.src, e.dst, k, l};
          auto local = [&](int v) { return (subset & NodeSet::range(v)).size(); };
          everywhere = everywhere &&
                       is_super_covered(induced_subgraph(g, subset), {local(e.src), local(e.dst)});
        }
      CHECK(is_super_covered(g, e) == everywhere);
    }
  });
}
