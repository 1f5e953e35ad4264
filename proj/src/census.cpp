#include "lyapid/census.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace lyapid {

namespace {

using VMask = unsigned __int128;

constexpr std::uint64_t kOne = 1;

struct PairTable {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;  // (i, j), i < j, lexicographic
  std::array<std::array<int, Digraph::kMaxNodes + 1>, Digraph::kMaxNodes + 1> index{};

  explicit PairTable(int n_) : n(n_) {
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        index[i][j] = index[j][i] = static_cast<int>(pairs.size());
        pairs.emplace_back(i, j);
      }
  }
};

void require_enumeration_range(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw std::invalid_argument("node count must be in 1.." + std::to_string(max_n) +
                                ", got " + std::to_string(n));
  }
}

// Source peeling on the adjacency word.
bool acyclic_bits(int n, std::uint64_t bits) {
  std::array<std::uint32_t, Digraph::kMaxNodes + 1> pa{};
  for (int i = 1; i <= n; ++i) {
    for (std::uint32_t row = (bits >> ((i - 1) * 8)) & 0xffu; row != 0; row &= row - 1) {
      pa[std::countr_zero(row) + 1] |= 1u << (i - 1);
    }
  }
  std::uint32_t remaining = (1u << n) - 1u;
  bool progress = true;
  while (remaining != 0 && progress) {
    progress = false;
    for (int v = 1; v <= n; ++v) {
      const std::uint32_t b = 1u << (v - 1);
      if ((remaining & b) && (pa[v] & remaining) == 0) {
        remaining &= ~b;
        progress = true;
      }
    }
  }
  return remaining == 0;
}

VMask v_structure_mask(const PairTable &pt, const Adjacency &a) {
  VMask mask = 0;
  const auto per_mid = static_cast<int>(pt.pairs.size());
  for (int k = 1; k <= pt.n; ++k) {
    const std::uint32_t pa = a.pa[k];
    for (std::uint32_t bi = pa; bi != 0; bi &= bi - 1) {
      const int i = std::countr_zero(bi) + 1;
      for (std::uint32_t bj = bi & (bi - 1); bj != 0; bj &= bj - 1) {
        const int j = std::countr_zero(bj) + 1;
        const bool adjacent = ((a.ch[i] | a.pa[i]) >> (j - 1)) & 1u;
        if (!adjacent) mask |= VMask{1} << ((k - 1) * per_mid + pt.index[i][j]);
      }
    }
  }
  return mask;
}

std::uint64_t flip_bits(std::uint64_t bits, int i, int j) {
  return bits ^ (kOne << Digraph::bit_index(i, j)) ^ (kOne << Digraph::bit_index(j, i));
}

template <typename F>
void for_each_super_covered(const Adjacency &a, F &&f) {
  for (int i = 1; i <= a.n; ++i)
    for (std::uint32_t b = a.ch[i]; b != 0; b &= b - 1) {
      const int j = std::countr_zero(b) + 1;
      if (a.super_covered(i, j)) f(i, j);
    }
}

// True when no member of start's flip orbit has a smaller encoding.
bool is_orbit_minimum(int n, std::uint64_t start) {
  std::vector<std::uint64_t> queue{start};
  std::unordered_set<std::uint64_t> seen{start};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Adjacency a(Digraph::from_bits(n, queue[head]));
    bool smaller = false;
    for_each_super_covered(a, [&](int i, int j) {
      if (smaller) return;
      const std::uint64_t next = flip_bits(queue[head], i, j);
      if (next < start) {
        smaller = true;
      } else if (seen.insert(next).second) {
        queue.push_back(next);
      }
    });
    if (smaller) return false;
  }
  return true;
}

struct Tally {
  std::uint64_t dags = 0;
  std::uint64_t lyap_classes = 0;
  std::uint64_t lyap_identifiable = 0;
  std::uint64_t markov_classes = 0;
  std::uint64_t markov_identifiable = 0;
  std::uint64_t refinement_violations = 0;

  Tally &operator+=(const Tally &o) {
    dags += o.dags;
    lyap_classes += o.lyap_classes;
    lyap_identifiable += o.lyap_identifiable;
    markov_classes += o.markov_classes;
    markov_identifiable += o.markov_identifiable;
    refinement_violations += o.refinement_violations;
    return *this;
  }
};

// All DAGs with a fixed skeleton. Flip orbits and Markov classes never leave
// a skeleton, so each skeleton is an independent unit of work.
void census_skeleton(const PairTable &pt, std::uint32_t skeleton_mask, Tally &t,
                     std::vector<VMask> &signatures) {
  std::vector<std::pair<int, int>> present;
  for (std::size_t p = 0; p < pt.pairs.size(); ++p) {
    if ((skeleton_mask >> p) & 1u) present.push_back(pt.pairs[p]);
  }
  signatures.clear();
  const std::uint32_t orientations = 1u << present.size();
  for (std::uint32_t o = 0; o < orientations; ++o) {
    std::uint64_t bits = 0;
    for (std::size_t e = 0; e < present.size(); ++e) {
      const auto [i, j] = present[e];
      bits |= ((o >> e) & 1u) ? kOne << Digraph::bit_index(j, i)
                              : kOne << Digraph::bit_index(i, j);
    }
    if (!acyclic_bits(pt.n, bits)) continue;
    ++t.dags;
    const Adjacency a(Digraph::from_bits(pt.n, bits));
    const VMask vmask = v_structure_mask(pt, a);
    signatures.push_back(vmask);

    bool any = false;
    for_each_super_covered(a, [&](int i, int j) {
      any = true;
      const Adjacency flipped(Digraph::from_bits(pt.n, flip_bits(bits, i, j)));
      if (v_structure_mask(pt, flipped) != vmask) ++t.refinement_violations;
    });
    if (!any) {
      ++t.lyap_identifiable;
      ++t.lyap_classes;
    } else if (is_orbit_minimum(pt.n, bits)) {
      ++t.lyap_classes;
    }
  }
  std::sort(signatures.begin(), signatures.end());
  for (std::size_t k = 0; k < signatures.size();) {
    std::size_t end = k;
    while (end < signatures.size() && signatures[end] == signatures[k]) ++end;
    ++t.markov_classes;
    if (end - k == 1) ++t.markov_identifiable;
    k = end;
  }
}

}  // namespace

void for_each_dag(int n, const std::function<void(const Digraph &)> &visit) {
  require_enumeration_range(n, kMaxEnumerationNodes);
  const PairTable pt(n);
  std::vector<int> digits(pt.pairs.size(), 0);
  while (true) {
    std::uint64_t bits = 0;
    for (std::size_t p = 0; p < digits.size(); ++p) {
      const auto [i, j] = pt.pairs[p];
      if (digits[p] == 1) bits |= kOne << Digraph::bit_index(i, j);
      if (digits[p] == 2) bits |= kOne << Digraph::bit_index(j, i);
    }
    if (acyclic_bits(n, bits)) visit(Digraph::from_bits(n, bits));
    std::size_t p = 0;
    while (p < digits.size() && digits[p] == 2) digits[p++] = 0;
    if (p == digits.size()) break;
    ++digits[p];
  }
}

std::vector<Digraph> enumerate_dags(int n) {
  std::vector<Digraph> out;
  for_each_dag(n, [&](const Digraph &g) { out.push_back(g); });
  return out;
}

bool CensusReport::same_counts(const CensusReport &o) const {
  return n == o.n && dag_count == o.dag_count && lyap_class_count == o.lyap_class_count &&
         lyap_identifiable_count == o.lyap_identifiable_count &&
         markov_class_count == o.markov_class_count &&
         markov_identifiable_count == o.markov_identifiable_count &&
         refinement_violations == o.refinement_violations;
}

CensusReport run_census(int n, int threads) {
  require_enumeration_range(n, kMaxCensusNodes);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto started = std::chrono::steady_clock::now();
  const PairTable pt(n);
  const std::uint32_t skeletons = 1u << pt.pairs.size();

  std::atomic<std::uint32_t> next{0};
  std::vector<Tally> partial(static_cast<std::size_t>(threads));
  auto worker = [&](std::size_t slot) {
    std::vector<VMask> signatures;
    constexpr std::uint32_t kChunk = 64;
    while (true) {
      const std::uint32_t begin = next.fetch_add(kChunk);
      if (begin >= skeletons) break;
      const std::uint32_t end = std::min(skeletons, begin + kChunk);
      for (std::uint32_t s = begin; s < end; ++s) census_skeleton(pt, s, partial[slot], signatures);
    }
  };
  std::vector<std::jthread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker, static_cast<std::size_t>(k));
  worker(0);
  pool.clear();

  Tally total;
  for (const auto &p : partial) total += p;
  CensusReport r;
  r.n = n;
  r.dag_count = total.dags;
  r.lyap_class_count = total.lyap_classes;
  r.lyap_identifiable_count = total.lyap_identifiable;
  r.markov_class_count = total.markov_classes;
  r.markov_identifiable_count = total.markov_identifiable;
  r.refinement_violations = total.refinement_violations;
  r.threads = threads;
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::vector<PatternRow> pattern_breakdown() {
  std::map<FourNodeType, PatternRow> rows;
  for_each_dag(4, [&](const Digraph &g) {
    if (is_identifiable(g)) return;
    const auto cls = equivalence_class(g);
    if (cls.representative != g) return;
    const FourNodeType type = classify_four_node(g);
    for (const auto &member : cls.members) {
      if (classify_four_node(member) != type) {
        throw std::logic_error("flip orbit of " + format_graph(g) + " mixes pattern types");
      }
    }
    auto [it, fresh] = rows.try_emplace(type, PatternRow{type});
    PatternRow &row = it->second;
    const std::uint64_t size = cls.size();
    row.min_class_size = fresh ? size : std::min(row.min_class_size, size);
    row.max_class_size = std::max(row.max_class_size, size);
    ++row.classes;
    row.dags += size;
  });
  std::vector<PatternRow> out;
  for (auto &[type, row] : rows) out.push_back(row);
  return out;
}

std::string census_csv_header() {
  return "n,dags,lyapunov_distinct,lyapunov_identifiable,bayesian_distinct,"
         "bayesian_identifiable";
}

std::string census_csv_row(const CensusReport &r) {
  std::ostringstream os;
  os << r.n << ',' << r.dag_count << ',' << r.lyap_class_count << ','
     << r.lyap_identifiable_count << ',' << r.markov_class_count << ','
     << r.markov_identifiable_count;
  return os.str();
}

}  // namespace lyapid
