#include "dispex/causal_graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "dispex/errors.hpp"
#include "dispex/util.hpp"

namespace dispex {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Returns one cycle as a node sequence, or empty if acyclic.
std::vector<std::string> find_cycle(const std::set<std::string>& nodes,
                                    const std::set<CausalDag::Edge>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [u, v] : edges) adj[u].push_back(v);
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  auto dfs = [&](auto&& self, const std::string& u) -> bool {
    state[u] = 1;
    stack.push_back(u);
    for (const auto& v : adj[u]) {
      if (state[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        cycle.push_back(v);
        return true;
      }
      if (state[v] == 0 && self(self, v)) return true;
    }
    stack.pop_back();
    state[u] = 2;
    return false;
  };
  for (const auto& n : nodes) {
    if (state[n] == 0 && dfs(dfs, n)) return cycle;
  }
  return {};
}

}  // namespace

CausalDag::CausalDag(std::set<std::string> nodes, std::set<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (const auto& [u, v] : edges_) {
    if (u == v) throw DagError("self-loop on '" + u + "'");
    nodes_.insert(u);
    nodes_.insert(v);
  }
  auto cycle = find_cycle(nodes_, edges_);
  if (!cycle.empty()) {
    std::string msg = "cycle detected: ";
    for (std::size_t i = 0; i < cycle.size(); ++i) msg += (i ? " -> " : "") + cycle[i];
    throw DagError(msg);
  }
}

std::set<std::string> CausalDag::parents(std::string_view node) const {
  std::set<std::string> out;
  for (const auto& [u, v] : edges_) {
    if (v == node) out.insert(u);
  }
  return out;
}

std::set<std::string> CausalDag::children(std::string_view node) const {
  std::set<std::string> out;
  for (const auto& [u, v] : edges_) {
    if (u == node) out.insert(v);
  }
  return out;
}

CausalDag CausalDag::with_nodes(const std::vector<std::string>& extra) const {
  auto nodes = nodes_;
  nodes.insert(extra.begin(), extra.end());
  return CausalDag(std::move(nodes), edges_);
}

std::string CausalDag::serialize() const {
  std::string out;
  std::set<std::string> touched;
  for (const auto& [u, v] : edges_) {
    out += u + " -> " + v + "\n";
    touched.insert(u);
    touched.insert(v);
  }
  for (const auto& n : nodes_) {
    if (!touched.count(n)) out += n + "\n";
  }
  return out;
}

CausalDag parse_dag(std::string_view text) {
  std::set<std::string> nodes;
  std::set<CausalDag::Edge> edges;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      if (line.find_first_of(" \t<>") != std::string_view::npos) {
        throw DagError("malformed DAG line " + std::to_string(line_no) + ": '" +
                       std::string(line) + "'");
      }
      nodes.emplace(line);
      continue;
    }
    auto parent = trim(line.substr(0, arrow));
    auto child = trim(line.substr(arrow + 2));
    if (parent.empty() || child.empty() || child.find("->") != std::string_view::npos) {
      throw DagError("malformed DAG line " + std::to_string(line_no) + ": '" + std::string(line) +
                     "'");
    }
    edges.emplace(std::string(parent), std::string(child));
  }
  return CausalDag(std::move(nodes), std::move(edges));
}

CausalDag load_dag(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open DAG file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dag(buf.str());
}

std::string treatment_node_name(const Pattern& treatment) {
  return "T[" + treatment.to_string() + "]";
}

CausalDag insert_treatment_node(const CausalDag& dag, const Pattern& treatment) {
  const auto constituents = treatment.attributes();
  std::set<std::string> parents;
  std::set<std::string> children;
  for (const auto& attr : constituents) {
    if (!dag.has_node(attr)) {
      throw DagError("treatment attribute '" + attr + "' is not a DAG node");
    }
    auto p = dag.parents(attr);
    auto c = dag.children(attr);
    parents.insert(p.begin(), p.end());
    children.insert(c.begin(), c.end());
  }
  for (const auto& attr : constituents) {
    parents.erase(attr);
    children.erase(attr);
  }
  const auto t = treatment_node_name(treatment);
  auto nodes = dag.nodes();
  auto edges = dag.edges();
  nodes.insert(t);
  for (const auto& p : parents) edges.emplace(p, t);
  for (const auto& c : children) edges.emplace(t, c);
  try {
    return CausalDag(std::move(nodes), std::move(edges));
  } catch (const DagError& e) {
    throw DagError("splicing '" + t + "' creates a " + e.what());
  }
}

AdjustmentSet backdoor_adjustment_set(const CausalDag& dag_with_t, std::string_view treatment_node,
                                      std::string_view outcome) {
  if (!dag_with_t.has_node(treatment_node)) {
    throw DagError("treatment node '" + std::string(treatment_node) + "' is absent");
  }
  AdjustmentSet out;
  for (const auto& p : dag_with_t.parents(treatment_node)) {
    if (p != outcome) out.confounders.push_back(p);
  }
  return out;
}

std::uint64_t dag_fingerprint(const CausalDag& dag) {
  return fnv1a64(dag.serialize());
}

}  // namespace dispex
