#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "twsat/formula.hpp"

namespace twsat {

/// Vertex of the incidence graph. Variables and clauses share one id space:
/// variable j is vertex j, clause i is vertex n + i.
struct IncidenceNode {
  enum class Kind { Var, Clause };
  Kind kind = Kind::Var;
  int index = 0;  // 1-based within its kind

  bool operator==(const IncidenceNode&) const = default;
};

inline int node_to_vertex(const IncidenceNode& node, int num_vars) {
  return node.kind == IncidenceNode::Kind::Var ? node.index : num_vars + node.index;
}
inline IncidenceNode vertex_to_node(int vertex, int num_vars) {
  if (vertex <= num_vars) return {IncidenceNode::Kind::Var, vertex};
  return {IncidenceNode::Kind::Clause, vertex - num_vars};
}
inline bool vertex_is_var(int vertex, int num_vars) { return vertex <= num_vars; }

/// Adjacency lists over vertices 1..n+m; entry 0 unused.
/// One edge per (variable, clause) pair regardless of how often the
/// variable occurs in the clause.
std::vector<std::vector<int>> build_incidence_graph(const CnfFormula& f);

struct TreeDecomposition {
  int num_vertices = 0;                    // n + m of the underlying formula
  std::vector<std::vector<int>> bags;      // bag id b has members bags[b-1], sorted
  std::vector<std::pair<int, int>> edges;  // undirected, over bag ids

  int num_bags() const { return static_cast<int>(bags.size()); }
  const std::vector<int>& bag(int id) const { return bags[static_cast<size_t>(id - 1)]; }

  /// max bag size - 1; -1 for a decomposition of only empty bags.
  int width() const;
  int max_degree() const;
  bool is_path() const;
  /// 1-based adjacency over bag ids.
  std::vector<std::vector<int>> adjacency() const;

  bool operator==(const TreeDecomposition&) const = default;
};

struct ValidationResult {
  bool ok = true;
  std::string message;
};

/// Checks tree-ness of the bag graph plus decomposition properties (1)-(3);
/// reports the first violation found with a witness.
ValidationResult validate(const TreeDecomposition& td, const CnfFormula& f);

/// Chain-expands bags of degree > 3 so every bag has degree <= 3.
/// Width and the decided formula are unchanged; inputs already satisfying
/// the bound are returned as-is.
TreeDecomposition make_nice(const TreeDecomposition& td);

TreeDecomposition parse_td(std::istream& in);
TreeDecomposition parse_td(const std::string& text);
std::string emit_td(const TreeDecomposition& td);

}  // namespace twsat
