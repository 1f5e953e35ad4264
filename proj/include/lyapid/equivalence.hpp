#pragma once

// Model equivalence and structural identifiability deciders for Lyapunov
// DAG models with noise 2I:
//  - graphical: equal skeletons plus equivalent induced 4-node subgraphs;
//  - transformational: greedy super-covered edge flips;
//  - oracle: exact membership tests at sampled model points;
// plus Markov equivalence and the conditional-independence-definedness test.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapid/exact.hpp"
#include "lyapid/graph.hpp"

namespace lyapid {

enum class FourNodeType { kI, kII, kIII, kIV, kV, kVI, kVII, kIdentifiable };

std::string to_string(FourNodeType t);

// The seven non-identifiable 4-node patterns, types I..VII.
const std::vector<Digraph> &four_node_patterns();

FourNodeType classify_four_node(const Digraph &g);

bool has_super_covered_edge(const Digraph &g);
bool is_identifiable(const Digraph &g);
// Independent route through the seven patterns: every edge i->j must have
// some 4-node induced subgraph through it that cannot be relabeled onto a
// pattern with i->j landing on one of the pattern's flippable edges. Graphs
// with fewer than four nodes are padded with isolated nodes first.
bool is_identifiable_by_subgraphs(const Digraph &g);

struct EquivalenceClass {
  std::vector<Digraph> members;  // sorted by encoding
  Digraph representative;        // minimal encoding

  std::size_t size() const { return members.size(); }
};

// Closure of g under super-covered flips.
EquivalenceClass equivalence_class(const Digraph &g);

// Minimal encoding in g's flip orbit.
Digraph canonical_representative(const Digraph &g);

bool model_equiv(const Digraph &g1, const Digraph &g2);

// Why the graphical criterion rejected a pair.
struct GraphicalCertificate {
  bool skeleton_differs = false;
  NodeSet subset;  // offending node set when skeletons agree
};

std::optional<GraphicalCertificate> model_equiv_certificate(const Digraph &g1,
                                                            const Digraph &g2);

struct FlipSequence {
  Digraph start;
  Digraph end;
  std::vector<Edge> flips;  // each super-covered when flipped
};

std::optional<FlipSequence> transform_sequence(const Digraph &g1, const Digraph &g2);

bool markov_equiv(const Digraph &g1, const Digraph &g2);

struct OracleCertificate {
  std::uint64_t seed = 0;
  int sampled_from = 1;  // 1: sample of g1 tested against g2; 2: reverse
  Edge edge;
  Rational value;
};

struct OracleResult {
  bool equivalent = true;
  std::optional<OracleCertificate> certificate;
};

inline constexpr int kDefaultOracleSamples = 3;

// Seeds seed, seed+1, ..., seed+k-1, each in both directions.
OracleResult oracle_equiv_detailed(const Digraph &g1, const Digraph &g2, int k,
                                   std::uint64_t seed);
bool oracle_equiv(const Digraph &g1, const Digraph &g2, int k = kDefaultOracleSamples,
                  std::uint64_t seed = 0);

bool ci_defined(const Digraph &g);

}  // namespace lyapid
