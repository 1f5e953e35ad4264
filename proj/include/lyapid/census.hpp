#pragma once

// Exhaustive census of labeled DAGs: counts of DAGs, Lyapunov equivalence
// classes (orbits under super-covered flips), Lyapunov-identifiable DAGs,
// Markov equivalence classes and Markov-identifiable DAGs.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lyapid/equivalence.hpp"
#include "lyapid/graph.hpp"

namespace lyapid {

inline constexpr int kMaxEnumerationNodes = 7;
inline constexpr int kMaxCensusNodes = 6;

// Calls visit on every labeled DAG on n nodes exactly once, in base-3 order
// over the unordered pairs (1,2), (1,3), ..., (n-1,n) with digits
// 0 = absent, 1 = i->j, 2 = j->i (first pair least significant).
void for_each_dag(int n, const std::function<void(const Digraph &)> &visit);
std::vector<Digraph> enumerate_dags(int n);

struct CensusReport {
  int n = 0;
  std::uint64_t dag_count = 0;
  std::uint64_t lyap_class_count = 0;
  std::uint64_t lyap_identifiable_count = 0;
  std::uint64_t markov_class_count = 0;
  std::uint64_t markov_identifiable_count = 0;
  // Super-covered flips that changed the Markov signature; always 0 when
  // Lyapunov classes refine Markov classes.
  std::uint64_t refinement_violations = 0;
  int threads = 1;
  double runtime_seconds = 0.0;

  // Equality of the counts only; metadata is ignored.
  bool same_counts(const CensusReport &o) const;
};

// threads <= 0 selects std::thread::hardware_concurrency().
CensusReport run_census(int n, int threads = 0);

struct PatternRow {
  FourNodeType type;
  std::uint64_t classes = 0;
  std::uint64_t min_class_size = 0;
  std::uint64_t max_class_size = 0;
  std::uint64_t dags = 0;
};

// Non-identifiable 4-node DAGs grouped by pattern type I..VII.
std::vector<PatternRow> pattern_breakdown();

std::string census_csv_header();
std::string census_csv_row(const CensusReport &r);

}  // namespace lyapid
