#include "twsat/decomp.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

namespace twsat {

std::vector<std::vector<int>> build_incidence_graph(const CnfFormula& f) {
  int n = f.num_vars();
  std::vector<std::vector<int>> adj(static_cast<size_t>(f.size()) + 1);
  for (int i = 1; i <= f.num_clauses(); ++i) {
    int cv = n + i;
    std::set<int> vars;
    for (const Literal& l : f.clause(i).literals) vars.insert(l.var);
    for (int x : vars) {
      adj[static_cast<size_t>(x)].push_back(cv);
      adj[static_cast<size_t>(cv)].push_back(x);
    }
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

int TreeDecomposition::width() const {
  size_t mx = 0;
  for (const auto& b : bags) mx = std::max(mx, b.size());
  return static_cast<int>(mx) - 1;
}

std::vector<std::vector<int>> TreeDecomposition::adjacency() const {
  std::vector<std::vector<int>> adj(bags.size() + 1);
  for (auto [a, b] : edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

int TreeDecomposition::max_degree() const {
  std::vector<int> deg(bags.size() + 1, 0);
  for (auto [a, b] : edges) {
    ++deg[static_cast<size_t>(a)];
    ++deg[static_cast<size_t>(b)];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

bool TreeDecomposition::is_path() const { return max_degree() <= 2; }

namespace {

// Connectivity of an id subset under the bag adjacency.
bool subset_connected(const std::vector<std::vector<int>>& adj, const std::vector<int>& ids) {
  if (ids.empty()) return true;
  std::set<int> want(ids.begin(), ids.end());
  std::vector<int> stack{ids[0]};
  std::set<int> seen{ids[0]};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<size_t>(v)]) {
      if (want.count(w) && !seen.count(w)) {
        seen.insert(w);
        stack.push_back(w);
      }
    }
  }
  return seen.size() == want.size();
}

}  // namespace

ValidationResult validate(const TreeDecomposition& td, const CnfFormula& f) {
  int nb = td.num_bags();
  if (nb == 0) return {false, "decomposition has no bags"};
  if (td.num_vertices != f.size())
    return {false, "vertex count " + std::to_string(td.num_vertices) + " does not match |phi| = " +
                       std::to_string(f.size())};
  for (int b = 1; b <= nb; ++b) {
    for (int v : td.bag(b)) {
      if (v < 1 || v > f.size())
        return {false, "bag " + std::to_string(b) + " references vertex " + std::to_string(v) +
                           " out of range"};
    }
  }
  for (auto [a, b] : td.edges) {
    if (a < 1 || a > nb || b < 1 || b > nb)
      return {false, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                         ") has dangling endpoint"};
    if (a == b) return {false, "self-loop at bag " + std::to_string(a)};
  }
  if (static_cast<int>(td.edges.size()) != nb - 1)
    return {false, "bag graph is not a tree: " + std::to_string(td.edges.size()) + " edges for " +
                       std::to_string(nb) + " bags"};
  {
    std::vector<int> all(static_cast<size_t>(nb));
    std::iota(all.begin(), all.end(), 1);
    if (!subset_connected(td.adjacency(), all))
      return {false, "bag graph is not connected"};
  }

  // Property (1): every incidence vertex occurs in some bag.
  std::vector<char> covered(static_cast<size_t>(f.size()) + 1, 0);
  for (const auto& b : td.bags)
    for (int v : b) covered[static_cast<size_t>(v)] = 1;
  for (int v = 1; v <= f.size(); ++v) {
    if (!covered[static_cast<size_t>(v)]) {
      IncidenceNode node = vertex_to_node(v, f.num_vars());
      return {false, std::string("property (1) violated: ") +
                         (node.kind == IncidenceNode::Kind::Var ? "variable " : "clause ") +
                         std::to_string(node.index) + " appears in no bag"};
    }
  }

  // Property (2): every incidence edge is inside some bag.
  for (int i = 1; i <= f.num_clauses(); ++i) {
    int cv = f.num_vars() + i;
    std::set<int> vars;
    for (const Literal& l : f.clause(i).literals) vars.insert(l.var);
    for (int x : vars) {
      bool found = false;
      for (const auto& b : td.bags) {
        if (std::binary_search(b.begin(), b.end(), x) &&
            std::binary_search(b.begin(), b.end(), cv)) {
          found = true;
          break;
        }
      }
      if (!found)
        return {false, "property (2) violated: edge (x" + std::to_string(x) + ", C" +
                           std::to_string(i) + ") is in no bag"};
    }
  }

  // Property (3): occurrence sets induce connected subtrees.
  auto adj = td.adjacency();
  for (int v = 1; v <= f.size(); ++v) {
    std::vector<int> occ;
    for (int b = 1; b <= nb; ++b)
      if (std::binary_search(td.bag(b).begin(), td.bag(b).end(), v)) occ.push_back(b);
    if (!subset_connected(adj, occ)) {
      IncidenceNode node = vertex_to_node(v, f.num_vars());
      return {false, std::string("property (3) violated: occurrence set of ") +
                         (node.kind == IncidenceNode::Kind::Var ? "variable " : "clause ") +
                         std::to_string(node.index) + " is disconnected"};
    }
  }
  return {true, ""};
}

TreeDecomposition make_nice(const TreeDecomposition& td) {
  int nb = td.num_bags();
  if (nb == 0 || static_cast<int>(td.edges.size()) != nb - 1)
    throw std::invalid_argument("make_nice: bag graph is not a tree");
  {
    std::vector<int> all(static_cast<size_t>(nb));
    std::iota(all.begin(), all.end(), 1);
    if (!subset_connected(td.adjacency(), all))
      throw std::invalid_argument("make_nice: bag graph is not connected");
  }
  if (td.max_degree() <= 3) return td;

  TreeDecomposition out;
  out.num_vertices = td.num_vertices;
  out.bags = td.bags;

  auto adj = td.adjacency();

  // Rooted DFS from bag 1. A node keeps its two lowest children; the rest
  // move to a chain of duplicate bags hanging below it.
  struct Frame {
    int node;
    int parent;
  };
  std::vector<Frame> stack{{1, 0}};
  while (!stack.empty()) {
    auto [v, parent] = stack.back();
    stack.pop_back();
    std::vector<int> children;
    for (int w : adj[static_cast<size_t>(v)]) {
      if (w != parent) children.push_back(w);
    }
    size_t allowed = parent == 0 ? 3 : 2;
    int attach = v;
    size_t taken = 0;
    for (size_t i = 0; i < children.size(); ++i) {
      size_t room = (attach == v) ? allowed : 2;
      if (taken + 1 >= room && i + 1 < children.size()) {
        // Keep room for a chain link: spill remaining children to a copy.
        out.bags.push_back(td.bag(v));
        int copy = static_cast<int>(out.bags.size());
        out.edges.emplace_back(attach, copy);
        attach = copy;
        taken = 0;
      }
      out.edges.emplace_back(attach, children[i]);
      ++taken;
      stack.push_back({children[i], v});
    }
  }
  return out;
}

TreeDecomposition parse_td(std::istream& in) {
  TreeDecomposition td;
  std::string line;
  int declared_bags = -1, declared_max = -1;
  bool have_header = false;
  std::vector<char> bag_seen;

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 's') {
      std::string s, tag;
      ls >> s >> tag >> declared_bags >> declared_max >> td.num_vertices;
      if (!ls || tag != "td" || declared_bags < 0 || declared_max < 0 || td.num_vertices < 0)
        throw ParseError("malformed td header: " + line);
      have_header = true;
      td.bags.assign(static_cast<size_t>(declared_bags), {});
      bag_seen.assign(static_cast<size_t>(declared_bags) + 1, 0);
    } else if (line[0] == 'b') {
      if (!have_header) throw ParseError("bag line before header");
      char b;
      int id;
      ls >> b >> id;
      if (!ls || id < 1 || id > declared_bags)
        throw ParseError("bad bag id in: " + line);
      if (bag_seen[static_cast<size_t>(id)]) throw ParseError("duplicate bag " + std::to_string(id));
      bag_seen[static_cast<size_t>(id)] = 1;
      int v;
      std::vector<int> members;
      while (ls >> v) {
        if (v < 1 || v > td.num_vertices)
          throw ParseError("bag " + std::to_string(id) + " vertex " + std::to_string(v) +
                           " out of range");
        members.push_back(v);
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      td.bags[static_cast<size_t>(id - 1)] = std::move(members);
    } else {
      if (!have_header) throw ParseError("edge line before header");
      int a, b;
      ls >> a >> b;
      if (!ls || a < 1 || a > declared_bags || b < 1 || b > declared_bags || a == b)
        throw ParseError("malformed edge line: " + line);
      td.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  if (!have_header) throw ParseError("missing td header");
  if (td.width() + 1 > declared_max)
    throw ParseError("bag larger than declared max bag size");
  if (static_cast<int>(td.edges.size()) != declared_bags - 1)
    throw ParseError("non-tree edge set: " + std::to_string(td.edges.size()) + " edges for " +
                     std::to_string(declared_bags) + " bags");
  std::vector<int> all(static_cast<size_t>(declared_bags));
  std::iota(all.begin(), all.end(), 1);
  if (!subset_connected(td.adjacency(), all)) throw ParseError("non-tree edge set: disconnected");
  return td;
}

TreeDecomposition parse_td(const std::string& text) {
  std::istringstream in(text);
  return parse_td(in);
}

std::string emit_td(const TreeDecomposition& td) {
  std::ostringstream out;
  out << "s td " << td.num_bags() << ' ' << td.width() + 1 << ' ' << td.num_vertices << '\n';
  for (int b = 1; b <= td.num_bags(); ++b) {
    out << "b " << b;
    for (int v : td.bag(b)) out << ' ' << v;
    out << '\n';
  }
  auto edges = td.edges;
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  for (auto [a, b] : edges) out << a << ' ' << b << '\n';
  return out.str();
}

}  // namespace twsat
