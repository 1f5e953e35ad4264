// Acceptance run: one PASS/FAIL line per criterion, detail lines indented
// below. Exit status is the number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lyapid/census.hpp"
#include "lyapid/equivalence.hpp"
#include "lyapid/lyapunov.hpp"

using namespace lyapid;
using namespace lyapid::fixtures;

namespace {

// Pinned limits.
constexpr int kCensusThreads = 8;
constexpr double kCensusLimitSeconds[] = {0, 0, 0, 1.0, 2.0, 30.0, 15 * 60.0};
constexpr int kOracleSamples = 3;
constexpr std::uint64_t kOracleSeed = 0;
constexpr std::size_t kRoundTrips = 200;
constexpr std::size_t kKernelInstances = 50;
constexpr int kNormedPoints = 20;
constexpr std::uint64_t kRngSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string &what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::map<std::uint64_t, std::vector<Digraph>> dags_by_skeleton(int n) {
  std::map<std::uint64_t, std::vector<Digraph>> out;
  for_each_dag(n, [&](const Digraph &g) { out[skeleton(g).pairs].push_back(g); });
  return out;
}

Outcome census_counts() {
  struct Row {
    int n;
    std::uint64_t dags, lyap, lyap_id, markov, markov_id;
  };
  const std::vector<Row> expected = {{3, 25, 17, 13, 11, 4},
                                     {4, 543, 461, 423, 185, 59},
                                     {5, 29281, 27697, 26761, 8782, 2616},
                                     {6, 3781503, 3715745, 3665673, 1067825, 306117}};
  Outcome o;
  o.summary = "census counts for n = 3..6";
  for (const auto &e : expected) {
    const auto r = run_census(e.n, kCensusThreads);
    const bool counts = r.dag_count == e.dags && r.lyap_class_count == e.lyap &&
                        r.lyap_identifiable_count == e.lyap_id &&
                        r.markov_class_count == e.markov &&
                        r.markov_identifiable_count == e.markov_id;
    o.require(counts, "n=" + std::to_string(e.n) + " got " + census_csv_row(r));
    o.require(r.runtime_seconds < kCensusLimitSeconds[e.n],
              "n=" + std::to_string(e.n) + " time " + fmt(r.runtime_seconds) + " s < " +
                  fmt(kCensusLimitSeconds[e.n]) + " s on " + std::to_string(r.threads) +
                  " threads");
    o.require(r.refinement_violations == 0, "n=" + std::to_string(e.n) +
                                                " Lyapunov classes nest in Markov classes");
  }
  return o;
}

Outcome example_path() {
  Outcome o;
  o.summary = "backward-path covariance and 3-path relation value";
  const Covariance s = solve_for_sigma(DriftMatrix(backward_drift()), NoiseMatrix::standard(3));
  o.require(s.matrix() == backward_sigma(), "2a sigma = [[15/8,7/8,1/4],[7/8,3/2,1/2],[1/4,1/2,1]]");
  const Rational f =
      missing_edge_value(completion(forward_path()), s, NoiseMatrix::standard(3), {1, 3});
  o.require(f == ratio(13113, 256),
            "2b relation for 1->3 = 13113/256 (got " + to_string(f) + ")");
  return o;
}

Outcome pattern_types() {
  Outcome o;
  o.summary = "n = 4 breakdown by pattern type";
  // Expected (classes, class size) per pattern type.
  const std::map<FourNodeType, std::pair<std::uint64_t, std::uint64_t>> expected = {
      {FourNodeType::kI, {12, 2}},  {FourNodeType::kII, {6, 2}}, {FourNodeType::kIII, {6, 2}},
      {FourNodeType::kIV, {1, 24}}, {FourNodeType::kV, {4, 6}},  {FourNodeType::kVI, {3, 4}},
      {FourNodeType::kVII, {6, 2}}};
  std::uint64_t total = 0;
  std::size_t seen = 0;
  for (const auto &row : pattern_breakdown()) {
    total += row.dags;
    const std::string text = to_string(row.type) + ": " + std::to_string(row.classes) +
                             " classes x " + std::to_string(row.min_class_size) + ".." +
                             std::to_string(row.max_class_size) + " = " +
                             std::to_string(row.dags) + " DAGs";
    const auto it = expected.find(row.type);
    const bool ok = it != expected.end() && row.classes == it->second.first &&
                    row.min_class_size == it->second.second &&
                    row.max_class_size == it->second.second;
    seen += it != expected.end() ? 1 : 0;
    o.require(ok, text);
  }
  o.require(seen == expected.size(), "all seven pattern types present");
  o.require(total == 543 - 423, "non-identifiable total " + std::to_string(total) + " = 120");
  return o;
}

Outcome decider_agreement() {
  Outcome o;
  o.summary = "graphical / flips / oracle agree on all same-skeleton pairs, n = 3, 4";
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 3; n <= 4; ++n) {
    std::uint64_t pairs = 0, disagreements = 0, equivalent = 0;
    for (const auto &[skel, group] : dags_by_skeleton(n))
      for (const auto &a : group)
        for (const auto &b : group) {
          ++pairs;
          const bool graphical = model_equiv(a, b);
          const bool flips = transform_sequence(a, b).has_value();
          const bool oracle = oracle_equiv(a, b, kOracleSamples, kOracleSeed);
          if (graphical != flips || graphical != oracle) ++disagreements;
          if (graphical) ++equivalent;
        }
    o.require(disagreements == 0, "n=" + std::to_string(n) + ": " + std::to_string(pairs) +
                                      " pairs, " + std::to_string(equivalent) +
                                      " equivalent, " + std::to_string(disagreements) +
                                      " disagreements");
  }
  const double t = seconds_since(t0);
  o.require(t < 600.0, "runtime " + fmt(t) + " s < 600 s");
  return o;
}

Outcome round_trips() {
  Outcome o;
  o.summary = std::to_string(kRoundTrips) + " exact round trips Sigma -> M, n <= 5";
  std::mt19937_64 rng(kRngSeed);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < kRoundTrips; ++t) {
    const int n = 2 + static_cast<int>(t % 4);
    const Digraph g = random_dag(n, 0.5, rng);
    const DriftMatrix m = sample_stable_sparse(g, rng());
    if (!(identify_M(g, solve_for_sigma(m), NoiseMatrix::standard(n)) == m)) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " mismatches");
  return o;
}

Outcome refinement() {
  Outcome o;
  o.summary = "Lyapunov equivalence refines Markov equivalence";
  for (int n = 1; n <= 5; ++n) {
    std::uint64_t pairs = 0, bad = 0;
    for_each_dag(n, [&](const Digraph &g) {
      for (const auto &m : equivalence_class(g).members) {
        ++pairs;
        if (!markov_equiv(g, m)) ++bad;
      }
    });
    o.require(bad == 0, "n=" + std::to_string(n) + ": " + std::to_string(pairs) +
                            " equivalent pairs, " + std::to_string(bad) + " not Markov-equivalent");
  }
  o.require(markov_equiv(forward_path(), backward_path()) &&
                !model_equiv(forward_path(), backward_path()),
            "3-paths: Markov-equivalent, not Lyapunov-equivalent");
  return o;
}

Outcome flip_counts() {
  Outcome o;
  o.summary = "flip sequences have length delta";
  for (int n = 1; n <= 4; ++n) {
    std::uint64_t sequences = 0, bad = 0;
    for (const auto &[skel, group] : dags_by_skeleton(n))
      for (const auto &a : group)
        for (const auto &b : group) {
          const auto seq = transform_sequence(a, b);
          if (!seq) continue;
          ++sequences;
          int delta = 0;
          for (const Edge &e : a.edges()) delta += b.has_edge(e) ? 0 : 1;
          Digraph cur = a;
          bool valid = static_cast<int>(seq->flips.size()) == delta;
          for (const Edge &e : seq->flips) {
            valid = valid && cur.has_edge(e) && is_super_covered(cur, e);
            if (!valid) break;
            cur = flip_edge(cur, e);
          }
          if (!valid || cur != b) ++bad;
        }
    o.require(bad == 0, "n=" + std::to_string(n) + ": " + std::to_string(sequences) +
                            " sequences, " + std::to_string(bad) + " wrong");
  }
  const auto seq = transform_sequence(six_node_g1(), six_node_g3());
  o.require(seq && seq->flips == std::vector<Edge>{{2, 3}, {1, 3}},
            "six-node example: flips [2->3, 1->3], delta = 2");
  return o;
}

Outcome kernel_witnesses() {
  Outcome o;
  o.summary = std::to_string(kKernelInstances) + " kernel witnesses, n = 4, 5";
  // All (almost-complete DAG, super-covered edge) pairs whose missing edge
  // joins two children of the edge's head.
  std::vector<std::pair<Digraph, Edge>> instances[2];
  for (int n = 4; n <= 5; ++n) {
    for_each_dag(n, [&](const Digraph &g) {
      if (g.edge_count() != n * (n - 1) / 2 - 1) return;
      for (const Edge &e : super_covered_edges(g)) {
        const NodeSet kids = g.children(e.dst);
        for (int i = 1; i <= n; ++i)
          for (int j = i + 1; j <= n; ++j)
            if (!g.adjacent(i, j) && kids.contains(i) && kids.contains(j))
              instances[n - 4].push_back({g, e});
      }
    });
  }
  std::mt19937_64 rng(kRngSeed + 8);
  std::size_t bad = 0;
  for (std::size_t t = 0; t < kKernelInstances; ++t) {
    const auto &pool = instances[t % 2];
    const auto &[g1, flip] = pool[rng() % pool.size()];
    const Digraph g = g1.with_edge(flip.reversed());
    const Covariance s = solve_for_sigma(sample_stable_sparse(g, rng()));
    const KernelWitness w = kernel_witness(g1, flip, s);
    const RatVector image = build_A(g, s) * w.values;
    const bool zero = std::all_of(image.begin(), image.end(), [](const Rational &x) { return x == 0; });
    const Rational &dab = w.full(static_cast<std::size_t>(flip.src - 1),
                                 static_cast<std::size_t>(flip.dst - 1));
    if (!zero || dab == 0) ++bad;
  }
  o.require(!instances[0].empty() && !instances[1].empty(),
            std::to_string(instances[0].size()) + " / " + std::to_string(instances[1].size()) +
                " candidate instances for n = 4 / 5");
  o.require(bad == 0, std::to_string(bad) + " instances with A D != 0 or D_(a->b) = 0");
  return o;
}

Outcome normed_variances() {
  Outcome o;
  o.summary = "normed-variance 3-path relation / CI product is constant";
  const Digraph gprime = completion(forward_path());
  std::mt19937_64 rng(kRngSeed + 9);
  std::optional<Rational> common_ratio;
  int points = 0, bad = 0;
  while (points < kNormedPoints) {
    auto r = [&] { return ratio(static_cast<long>(rng() % 19) - 9, 10); };
    const RatMatrix corr = correlation3(r(), r(), r());
    if (corr.rows() == 0) continue;
    const Rational s12 = corr(0, 1), s13 = corr(0, 2), s23 = corr(1, 2);
    const Rational product = (s13 - s12 * s23) * (1 - s12 * s13 * s23);
    if (product == 0) continue;
    const Rational f = missing_edge_value(gprime, Covariance(corr), NoiseMatrix::standard(3), {1, 3});
    if (!common_ratio) common_ratio = f / product;
    if (f / product != *common_ratio) ++bad;
    ++points;
  }
  // Points on the conditional-independence surface.
  for (const auto &[a, b] : {std::pair{ratio(1, 2), ratio(1, 3)},
                             std::pair{ratio(-3, 5), ratio(2, 7)}}) {
    const RatMatrix corr = correlation3(a, a * b, b);
    if (missing_edge_value(gprime, Covariance(corr), NoiseMatrix::standard(3), {1, 3}) != 0) ++bad;
  }
  o.require(bad == 0, std::to_string(points) + " points, ratio " +
                          (common_ratio ? to_string(*common_ratio) : std::string("n/a")) + ", " +
                          std::to_string(bad) + " deviations");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", census_counts},           {"2", example_path},     {"3", pattern_types},
      {"4", decider_agreement}, {"5", round_trips},     {"6", refinement},
      {"7", flip_counts},      {"8", kernel_witnesses}, {"9", normed_variances},
  };
  int failed = 0;
  for (const auto &[id, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o.pass = false;
      o.details.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::printf("[%s] criterion %s: %s (%s s)\n", o.pass ? "PASS" : "FAIL", id.c_str(),
                o.summary.c_str(), fmt(seconds_since(t0)).c_str());
    for (const auto &d : o.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
