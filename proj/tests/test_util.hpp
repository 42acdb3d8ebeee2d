#pragma once

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "twsat/assignment.hpp"
#include "twsat/decomp.hpp"
#include "twsat/formula.hpp"
#include "twsat/oracle.hpp"
#include "twsat/splitting.hpp"

namespace twsat::test {

// The six-variable warm-up instances: C1 = x1|x2|x4|x6, C2 = -x1|x3|x5,
// C3..C7 the negative units -x2..-x6. Variant 1 keeps all clauses, variant 2
// drops C6, variant 3 drops C5. Ships with a width-4 path decomposition.
struct PhiFixture {
  CnfFormula formula;
  TreeDecomposition decomp;
};

inline PhiFixture make_phi(int variant) {
  std::vector<std::vector<int>> all = {{1, 2, 4, 6}, {-1, 3, 5}, {-2}, {-3},
                                       {-4},         {-5},      {-6}};
  int drop = variant == 2 ? 6 : variant == 3 ? 5 : 0;  // original clause number

  std::vector<int> renumber(8, 0);
  std::vector<Clause> clauses;
  for (int k = 1; k <= 7; ++k) {
    if (k == drop) continue;
    clauses.push_back(make_clause(all[static_cast<size_t>(k - 1)]));
    renumber[static_cast<size_t>(k)] = static_cast<int>(clauses.size());
  }
  CnfFormula f(6, clauses);

  // bags over original names; clause k encodes as 6 + renumber[k]
  std::vector<std::vector<int>> proto = {
      {-2, 3},           // {V2, C3}
      {-2, -3, 4},       // {V2, V3, C4}
      {-1, -2, -3, 1, 2}, // {V1, V2, V3, C1, C2}
      {-4, -5, -6, 1, 2}, // {V4, V5, V6, C1, C2}
      {-4, -5, -6, 5, 6}, // {V4, V5, V6, C5, C6}
      {-6, 7}};           // {V6, C7}
  TreeDecomposition td;
  td.num_vertices = f.size();
  for (const auto& spec : proto) {
    std::vector<int> bag;
    for (int entry : spec) {
      if (entry < 0) {
        bag.push_back(-entry);  // variable vertex
      } else if (entry != drop) {
        bag.push_back(6 + renumber[static_cast<size_t>(entry)]);
      }
    }
    std::sort(bag.begin(), bag.end());
    td.bags.push_back(bag);
  }
  for (int b = 2; b <= td.num_bags(); ++b) td.edges.emplace_back(b - 1, b);
  return {f, td};
}

// Uniform random tree with bounded degree, deterministic per seed.
inline TreeTopology random_bounded_tree(int n, uint64_t seed, int max_degree = 3) {
  if (n < 1) throw std::invalid_argument("random_bounded_tree: n < 1");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
  std::vector<std::vector<int>> adj(static_cast<size_t>(n) + 1);
  std::vector<int> open{1};  // nodes with spare degree
  for (int v = 2; v <= n; ++v) {
    size_t pick = rng() % open.size();
    int u = open[pick];
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
    if (static_cast<int>(adj[static_cast<size_t>(u)].size()) >= max_degree) {
      open[pick] = open.back();
      open.pop_back();
    }
    if (max_degree > 1) open.push_back(v);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return TreeTopology{std::move(adj)};
}

// Reference evaluator for the "satisfying assignment" definition: enumerate
// full truth assignments over the view's variables directly.
inline bool def_satisfiable(const CnfFormula& f, const TreeDecomposition& td,
                            const SubtreeView& view, const Assignment& r) {
  int n = f.num_vars();
  std::vector<int> vars, clauses;
  for (int b : view.nodes) {
    for (int v : td.bag(b)) {
      if (vertex_is_var(v, n))
        vars.push_back(v);
      else
        clauses.push_back(v);
    }
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::sort(clauses.begin(), clauses.end());
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  std::vector<int> scope = view_scope(td, view);
  auto in_scope = [&](int v) { return std::binary_search(scope.begin(), scope.end(), v); };

  if (vars.size() > 20) throw std::invalid_argument("def_satisfiable: view too large");
  for (uint64_t mask = 0; mask < (1ull << vars.size()); ++mask) {
    auto value = [&](int var) {
      auto it = std::lower_bound(vars.begin(), vars.end(), var);
      if (it == vars.end() || *it != var) return -1;
      return static_cast<int>((mask >> (it - vars.begin())) & 1);
    };
    bool ok = true;
    for (int v : vars) {
      if (in_scope(v) && value(v) != (r.bit(v) ? 1 : 0)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (int cv : clauses) {
      bool obliged = !in_scope(cv) || r.bit(cv);
      if (!obliged) continue;
      bool sat = false;
      for (const Literal& l : f.clause(cv - n).literals) {
        int val = value(l.var);
        if (val >= 0 && (val != 0) == l.positive) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

// The same predicate via the splitting recursion.
inline bool rec_satisfiable(const CnfFormula& f, const TreeDecomposition& td,
                            const SubtreeView& view, const Assignment& r) {
  if (view.all_marked()) return base_satisfying_check(f, td, view, r);
  int p = find_half_splitting_node(view);
  SplitResult split = split_at(view, p);
  SplitAssignContext ctx(f, td, view, split);
  bool found = false;
  enumerate_consistent(ctx, r, [&](const std::vector<Assignment>& tuple) {
    bool all = true;
    for (size_t i = 0; i < tuple.size(); ++i) {
      if (!rec_satisfiable(f, td, split.parts[i], tuple[i])) {
        all = false;
        break;
      }
    }
    if (all) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

// Unpruned minimax over all splitting algorithms; small views only.
inline int msd_game_oracle(const SubtreeView& view, int c) {
  if (view.type() > c) return kDepthInfinity;
  if (view.all_marked()) return 0;
  int best = kDepthInfinity;
  for (int p : view.nodes) {
    if (view.marked(p) && view.degree_in(p) <= 1) continue;
    SplitResult sr = split_at(view, p);
    int worst = 0;
    bool ok = true;
    for (const SubtreeView& part : sr.parts) {
      int d = msd_game_oracle(part, c);
      if (d == kDepthInfinity) {
        ok = false;
        break;
      }
      worst = std::max(worst, d);
    }
    if (ok) best = std::min(best, worst + 1);
  }
  return best;
}

}  // namespace twsat::test
