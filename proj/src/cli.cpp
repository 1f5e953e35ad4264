#include "lyapid/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "lyapid/census.hpp"
#include "lyapid/equivalence.hpp"
#include "lyapid/exact.hpp"
#include "lyapid/graph.hpp"
#include "lyapid/lyapunov.hpp"

namespace lyapid {

namespace {

using Json = nlohmann::ordered_json;

// A rejected input, tagged with the check that failed.
class InputError : public std::runtime_error {
 public:
  InputError(std::string check, const std::string &what)
      : std::runtime_error(what), check_(std::move(check)) {}
  const std::string &check() const { return check_; }

 private:
  std::string check_;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("io", "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Digraph load_graph(const std::string &path) {
  try {
    return parse_graph(read_file(path));
  } catch (const ParseError &e) {
    throw InputError("parse", path + ": " + e.what());
  }
}

Digraph load_dag(const std::string &path) {
  const Digraph g = load_graph(path);
  if (!g.is_simple()) throw InputError("simple", path + ": graph has a 2-cycle");
  if (!is_acyclic(g)) throw InputError("acyclic", path + ": graph has a directed cycle");
  return g;
}

RatMatrix load_matrix(const std::string &path) {
  try {
    return parse_matrix_csv(read_file(path));
  } catch (const InputError &) {
    throw;
  } catch (const std::exception &e) {
    throw InputError("parse", path + ": " + e.what());
  }
}

Covariance load_sigma(const std::string &path) {
  const RatMatrix m = load_matrix(path);
  if (m.rows() != m.cols() || !m.is_symmetric()) {
    throw InputError("symmetric", path + ": sigma must be a symmetric square matrix");
  }
  Covariance sigma(m);
  if (!sigma.is_positive_definite()) {
    throw InputError("positive_definite", path + ": sigma is not positive definite");
  }
  return sigma;
}

NoiseMatrix load_noise(const std::optional<std::string> &path, int n) {
  if (!path) return NoiseMatrix::standard(n);
  const RatMatrix m = load_matrix(*path);
  if (m.rows() != static_cast<std::size_t>(n) || m.cols() != static_cast<std::size_t>(n)) {
    throw InputError("dimension", *path + ": noise matrix must be " + std::to_string(n) +
                                      "x" + std::to_string(n));
  }
  if (!m.is_symmetric() || !is_positive_definite(m)) {
    throw InputError("positive_definite", *path + ": noise matrix must be symmetric PD");
  }
  return NoiseMatrix(m);
}

void require_same_n(const Digraph &g, int n, const std::string &what) {
  if (g.node_count() != n) {
    throw InputError("dimension", what + " has " + std::to_string(n) +
                                      " rows but the graph has " +
                                      std::to_string(g.node_count()) + " nodes");
  }
}

Json edge_list(const Digraph &g) {
  Json out = Json::array();
  for (const Edge &e : g.edges()) out.push_back(e.to_string());
  return out;
}

Json edges_json(const std::vector<Edge> &edges) {
  Json out = Json::array();
  for (const Edge &e : edges) out.push_back(e.to_string());
  return out;
}

Json nodes_json(NodeSet s) {
  Json out = Json::array();
  for (int v : s.to_vector()) out.push_back(v);
  return out;
}

Json matrix_json(const RatMatrix &m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    out.push_back(row);
  }
  return out;
}

Json graphical_certificate(const GraphicalCertificate &c) {
  Json out;
  if (c.skeleton_differs) {
    out["reason"] = "skeleton";
  } else {
    out["reason"] = "subgraph";
    out["nodes"] = nodes_json(c.subset);
  }
  return out;
}

std::uint64_t default_seed() {
  const char *env = std::getenv("LYAPID_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const std::string text(env);
    if (text.front() == '-') throw std::invalid_argument("negative");
    const auto value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception &) {
    throw InputError("seed", "LYAPID_SEED must be a non-negative integer, got '" +
                                 std::string(env) + "'");
  }
}

struct Options {
  std::string g1, g2, graph, drift, sigma;
  std::optional<std::string> noise;
  std::string method = "graphical";
  int samples = kDefaultOracleSamples;
  std::optional<std::uint64_t> seed;
  int n = 0;
  int threads = 0;
  std::string format = "json";
};

Json cmd_equiv(const Options &o) {
  const Digraph g1 = load_dag(o.g1);
  const Digraph g2 = load_dag(o.g2);
  if (g1.node_count() != g2.node_count()) {
    throw InputError("dimension", "graphs have different node counts");
  }
  Json out;
  out["command"] = "equiv";
  out["inputs"] = {{"g1", o.g1}, {"g2", o.g2}, {"method", o.method}};
  if (o.method == "graphical") {
    const auto cert = model_equiv_certificate(g1, g2);
    out["equivalent"] = !cert.has_value();
    if (cert) out["certificate"] = graphical_certificate(*cert);
  } else if (o.method == "flips") {
    const auto seq = transform_sequence(g1, g2);
    out["equivalent"] = seq.has_value();
    if (seq) {
      out["flips"] = edges_json(seq->flips);
    } else {
      out["certificate"] = graphical_certificate(*model_equiv_certificate(g1, g2));
    }
  } else {
    const std::uint64_t seed = o.seed ? *o.seed : default_seed();
    out["inputs"]["samples"] = o.samples;
    out["inputs"]["seed"] = seed;
    const auto res = oracle_equiv_detailed(g1, g2, o.samples, seed);
    out["equivalent"] = res.equivalent;
    if (res.certificate) {
      const auto &c = *res.certificate;
      out["certificate"] = {{"edge", c.edge.to_string()},
                            {"det", to_string(c.value)},
                            {"seed", c.seed},
                            {"sampled_from", c.sampled_from == 1 ? "g1" : "g2"},
                            {"tested_against", c.sampled_from == 1 ? "g2" : "g1"}};
    }
  }
  return out;
}

Json cmd_identifiable(const Options &o) {
  const Digraph g = load_dag(o.graph);
  Json out;
  out["command"] = "identifiable";
  out["inputs"] = {{"graph", o.graph}};
  out["identifiable"] = is_identifiable(g);
  out["super_covered_edges"] = edges_json(super_covered_edges(g));
  out["identifiable_by_subgraphs"] = is_identifiable_by_subgraphs(g);
  return out;
}

Json cmd_class(const Options &o) {
  const Digraph g = load_dag(o.graph);
  const auto cls = equivalence_class(g);
  Json out;
  out["command"] = "class";
  out["inputs"] = {{"graph", o.graph}};
  out["size"] = cls.size();
  out["representative"] = edge_list(cls.representative);
  Json members = Json::array();
  for (const auto &m : cls.members) members.push_back(edge_list(m));
  out["members"] = members;
  return out;
}

Json cmd_transform(const Options &o) {
  const Digraph g1 = load_dag(o.g1);
  const Digraph g2 = load_dag(o.g2);
  if (g1.node_count() != g2.node_count()) {
    throw InputError("dimension", "graphs have different node counts");
  }
  Json out;
  out["command"] = "transform";
  out["inputs"] = {{"g1", o.g1}, {"g2", o.g2}};
  const auto seq = transform_sequence(g1, g2);
  out["equivalent"] = seq.has_value();
  if (seq) {
    out["delta"] = seq->flips.size();
    out["flips"] = edges_json(seq->flips);
  } else {
    out["certificate"] = graphical_certificate(*model_equiv_certificate(g1, g2));
  }
  return out;
}

Json v_structures_json(const Digraph &g) {
  Json out = Json::array();
  for (const auto &v : v_structures(g)) {
    out.push_back(std::to_string(v.left) + "->" + std::to_string(v.mid) + "<-" +
                  std::to_string(v.right));
  }
  return out;
}

Json cmd_markov(const Options &o) {
  const Digraph g1 = load_dag(o.g1);
  const Digraph g2 = load_dag(o.g2);
  if (g1.node_count() != g2.node_count()) {
    throw InputError("dimension", "graphs have different node counts");
  }
  Json out;
  out["command"] = "markov";
  out["inputs"] = {{"g1", o.g1}, {"g2", o.g2}};
  out["equivalent"] = markov_equiv(g1, g2);
  out["same_skeleton"] = skeleton(g1) == skeleton(g2);
  out["v_structures"] = {{"g1", v_structures_json(g1)}, {"g2", v_structures_json(g2)}};
  return out;
}

Json cmd_ci_defined(const Options &o) {
  const Digraph g = load_dag(o.graph);
  Json out;
  out["command"] = "ci-defined";
  out["inputs"] = {{"graph", o.graph}};
  out["ci_defined"] = ci_defined(g);
  Json treks = Json::array();
  for (int i = 1; i <= g.node_count(); ++i)
    for (int j = i + 1; j <= g.node_count(); ++j)
      if (!g.adjacent(i, j) && has_trek(g, i, j)) {
        treks.push_back(std::to_string(i) + "-" + std::to_string(j));
      }
  out["nonadjacent_trek_pairs"] = treks;
  return out;
}

Json cmd_solve(const Options &o) {
  const RatMatrix m = load_matrix(o.drift);
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InputError("dimension", o.drift + ": drift matrix must be square");
  }
  const int n = static_cast<int>(m.rows());
  const DriftMatrix drift(m);
  Json out;
  out["command"] = "solve";
  out["inputs"] = {{"drift", o.drift}};
  if (o.noise) out["inputs"]["noise"] = *o.noise;
  if (!o.graph.empty()) {
    out["inputs"]["graph"] = o.graph;
    const Digraph g = load_graph(o.graph);
    require_same_n(g, n, "drift matrix");
    if (!drift.supported_on(g)) {
      throw InputError("support", "drift matrix has a nonzero entry off the graph's edges");
    }
  }
  const NoiseMatrix c = load_noise(o.noise, n);
  try {
    out["sigma"] = matrix_json(solve_for_sigma(drift, c).matrix());
  } catch (const NotStableError &e) {
    throw InputError("stability", e.what());
  }
  return out;
}

Json cmd_identify(const Options &o) {
  const Covariance sigma = load_sigma(o.sigma);
  const Digraph g = load_dag(o.graph);
  require_same_n(g, sigma.n(), "sigma");
  const NoiseMatrix c = load_noise(o.noise, sigma.n());
  Json out;
  out["command"] = "identify";
  out["inputs"] = {{"sigma", o.sigma}, {"graph", o.graph}};
  if (o.noise) out["inputs"]["noise"] = *o.noise;
  try {
    out["drift"] = matrix_json(identify_M(g, sigma, c).matrix());
  } catch (const NotInModelError &e) {
    throw InputError("membership", e.what());
  }
  return out;
}

Json cmd_member(const Options &o) {
  const Covariance sigma = load_sigma(o.sigma);
  const Digraph g = load_dag(o.graph);
  require_same_n(g, sigma.n(), "sigma");
  const NoiseMatrix c = load_noise(o.noise, sigma.n());
  Json out;
  out["command"] = "member";
  out["inputs"] = {{"sigma", o.sigma}, {"graph", o.graph}};
  if (o.noise) out["inputs"]["noise"] = *o.noise;
  const auto rels = missing_edge_relations(g, sigma, c);
  Json relations = Json::array();
  std::optional<Json> certificate;
  for (const auto &r : rels) {
    Json item = {{"edge", r.edge.to_string()}, {"det", to_string(r.value)}};
    if (r.value != 0 && !certificate) certificate = item;
    relations.push_back(std::move(item));
  }
  out["member"] = !certificate.has_value();
  out["relations"] = relations;
  if (certificate) out["certificate"] = *certificate;
  return out;
}

Json census_json(const CensusReport &r) {
  Json out;
  out["n"] = r.n;
  out["dags"] = r.dag_count;
  out["lyapunov_distinct"] = r.lyap_class_count;
  out["lyapunov_identifiable"] = r.lyap_identifiable_count;
  out["bayesian_distinct"] = r.markov_class_count;
  out["bayesian_identifiable"] = r.markov_identifiable_count;
  out["refinement_violations"] = r.refinement_violations;
  out["threads"] = r.threads;
  out["runtime_seconds"] = r.runtime_seconds;
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Exact analysis of Lyapunov models on directed acyclic graphs", "lyapid"};
  app.require_subcommand(1);
  Options o;

  auto *equiv = app.add_subcommand("equiv", "Decide model equivalence of two DAGs");
  equiv->add_option("g1", o.g1, "First graph file")->required();
  equiv->add_option("g2", o.g2, "Second graph file")->required();
  equiv->add_option("--method", o.method, "Decider")
      ->check(CLI::IsMember({"graphical", "flips", "oracle"}));
  equiv->add_option("--samples", o.samples, "Oracle samples per direction")
      ->check(CLI::Range(1, 1000));
  equiv->add_option("--seed", o.seed, "Oracle seed (default: $LYAPID_SEED or 0)");

  auto *ident = app.add_subcommand("identifiable", "Decide structural identifiability");
  ident->add_option("graph", o.graph, "Graph file")->required();

  auto *cls = app.add_subcommand("class", "List the model equivalence class");
  cls->add_option("graph", o.graph, "Graph file")->required();

  auto *transform = app.add_subcommand("transform", "Super-covered flip sequence g1 -> g2");
  transform->add_option("g1", o.g1, "Start graph file")->required();
  transform->add_option("g2", o.g2, "Target graph file")->required();

  auto *markov = app.add_subcommand("markov", "Decide Markov equivalence");
  markov->add_option("g1", o.g1, "First graph file")->required();
  markov->add_option("g2", o.g2, "Second graph file")->required();

  auto *ci = app.add_subcommand("ci-defined", "Is the model defined by independences?");
  ci->add_option("graph", o.graph, "Graph file")->required();

  auto *solve = app.add_subcommand("solve", "Solve the Lyapunov equation for sigma");
  solve->add_option("--drift", o.drift, "Drift matrix CSV")->required();
  solve->add_option("--noise", o.noise, "Noise matrix CSV (default 2I)");
  solve->add_option("--graph", o.graph, "Check the drift support against this graph");

  auto *identify = app.add_subcommand("identify", "Recover the drift matrix from sigma");
  identify->add_option("--sigma", o.sigma, "Covariance CSV")->required();
  identify->add_option("--graph", o.graph, "Graph file")->required();
  identify->add_option("--noise", o.noise, "Noise matrix CSV (default 2I)");

  auto *member = app.add_subcommand("member", "Decide model membership of sigma");
  member->add_option("--sigma", o.sigma, "Covariance CSV")->required();
  member->add_option("--graph", o.graph, "Graph file")->required();
  member->add_option("--noise", o.noise, "Noise matrix CSV (default 2I)");

  auto *census = app.add_subcommand("census", "Count DAGs and equivalence classes");
  census->add_option("-n", o.n, "Number of nodes")->required()->check(
      CLI::Range(1, kMaxCensusNodes));
  census->add_option("--threads", o.threads, "Worker threads (0 = all cores)")
      ->check(CLI::Range(0, 1024));
  census->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "lyapid: " << e.what() << "\n";
    return kExitInputError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "census") {
      const auto report = run_census(o.n, o.threads);
      if (o.format == "csv") {
        out << census_csv_header() << "\n" << census_csv_row(report) << "\n";
      } else {
        Json doc;
        doc["command"] = "census";
        doc["inputs"] = {{"n", o.n}, {"threads", o.threads}};
        doc["result"] = census_json(report);
        doc["exit_status"] = kExitOk;
        out << doc.dump(2) << "\n";
      }
      return kExitOk;
    }
    Json doc;
    if (name == "equiv") doc = cmd_equiv(o);
    else if (name == "identifiable") doc = cmd_identifiable(o);
    else if (name == "class") doc = cmd_class(o);
    else if (name == "transform") doc = cmd_transform(o);
    else if (name == "markov") doc = cmd_markov(o);
    else if (name == "ci-defined") doc = cmd_ci_defined(o);
    else if (name == "solve") doc = cmd_solve(o);
    else if (name == "identify") doc = cmd_identify(o);
    else doc = cmd_member(o);
    doc["exit_status"] = kExitOk;
    out << doc.dump(2) << "\n";
    return kExitOk;
  } catch (const InputError &e) {
    Json doc;
    doc["command"] = name;
    doc["error"] = {{"check", e.check()}, {"message", e.what()}};
    doc["exit_status"] = kExitInputError;
    out << doc.dump(2) << "\n";
    err << "lyapid " << name << ": " << e.check() << ": " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument &e) {
    Json doc;
    doc["command"] = name;
    doc["error"] = {{"check", "validation"}, {"message", e.what()}};
    doc["exit_status"] = kExitInputError;
    out << doc.dump(2) << "\n";
    err << "lyapid " << name << ": validation: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace lyapid
