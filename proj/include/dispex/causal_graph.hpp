#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dispex/pattern.hpp"

namespace dispex {

// Directed acyclic graph over attribute names. Immutable value type; every
// mutation returns a new graph.
class CausalDag {
 public:
  using Edge = std::pair<std::string, std::string>;

  CausalDag() = default;
  // Throws DagError on self-loops or cycles.
  CausalDag(std::set<std::string> nodes, std::set<Edge> edges);

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }
  bool has_node(std::string_view n) const { return nodes_.find(std::string(n)) != nodes_.end(); }
  std::set<std::string> parents(std::string_view node) const;
  std::set<std::string> children(std::string_view node) const;

  CausalDag with_nodes(const std::vector<std::string>& extra) const;

  // Canonical edge list, one "A -> B" per line, followed by isolated nodes.
  std::string serialize() const;

  bool operator==(const CausalDag&) const = default;

 private:
  std::set<std::string> nodes_;
  std::set<Edge> edges_;
};

// Parses "A -> B" lines; blank lines and '#' comments are skipped. A line
// holding a single name declares an isolated node.
CausalDag parse_dag(std::string_view text);
CausalDag load_dag(const std::string& path);

// Name of the node spliced in for a treatment pattern.
std::string treatment_node_name(const Pattern& treatment);

// Splices a node T for the treatment: parents are the union of the
// constituents' parents, children the union of their children, both minus
// the constituents themselves.
CausalDag insert_treatment_node(const CausalDag& dag, const Pattern& treatment);

struct AdjustmentSet {
  std::vector<std::string> confounders;  // sorted
  bool operator==(const AdjustmentSet&) const = default;
};

// Parents of the spliced treatment node, excluding the outcome.
AdjustmentSet backdoor_adjustment_set(const CausalDag& dag_with_t, std::string_view treatment_node,
                                      std::string_view outcome);

std::uint64_t dag_fingerprint(const CausalDag& dag);

}  // namespace dispex
