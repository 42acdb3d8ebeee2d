#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "twsat/decomp.hpp"

namespace twsat {

/// Unbounded recursion depth sentinel (the |S| > c case).
inline constexpr int kDepthInfinity = std::numeric_limits<int>::max();

/// Plain tree over node ids 1..size; entry 0 of adj unused.
struct TreeTopology {
  std::vector<std::vector<int>> adj;

  int size() const { return static_cast<int>(adj.size()) - 1; }
  const std::vector<int>& neighbors(int v) const { return adj[static_cast<size_t>(v)]; }
};

TreeTopology topology_of(const TreeDecomposition& td);
/// Wraps a bare tree as a decomposition of singleton bags, for .td output.
TreeDecomposition synthetic_td(const TreeTopology& tree);

/// A connected subtree of a decomposition tree together with the set S of
/// previous splitting nodes. type = |S|.
struct SubtreeView {
  const TreeTopology* tree = nullptr;
  std::vector<int> nodes;   // sorted
  std::vector<int> smarks;  // sorted, subset of nodes

  int size() const { return static_cast<int>(nodes.size()); }
  int type() const { return static_cast<int>(smarks.size()); }
  bool contains(int v) const;
  bool marked(int v) const;
  bool all_marked() const { return nodes.size() == smarks.size(); }
  std::vector<int> neighbors_in(int v) const;
  int degree_in(int v) const;

  bool operator==(const SubtreeView&) const = default;
};

SubtreeView full_view(const TreeTopology& tree);

struct SplitResult {
  int node = 0;
  std::vector<SubtreeView> parts;
};

/// Splits the view at p. Every part contains p with p added to its splitting
/// set; a split at a leaf produces a single part covering the whole view.
SplitResult split_at(const SubtreeView& view, int p);

int classify_type(const SubtreeView& view);

/// The balancing walk from leaf s: root at s, repeatedly descend into the
/// largest child subtree while the s-side part stays within floor(alpha*N)+1
/// nodes. The returned node p guarantees (counting p in every part)
///   |part containing s| <= floor(alpha*N) + 1,
///   |every other part|  <= N - floor(alpha*N).
/// When alpha*N < 1 the walk is clamped one step away from s so that a
/// 2-node view always splits at its non-s node.
int find_alpha_splitting_node(const SubtreeView& view, int s, double alpha);

/// Alpha = 1/2 from a deterministic leaf (lowest-id marked leaf if any,
/// else lowest-id leaf). All parts have at most floor(N/2)+1 nodes.
int find_half_splitting_node(const SubtreeView& view);

/// True iff q lies on the tree path between some pair of splitting nodes.
bool on_splitting_path(const SubtreeView& view, int q);

/// Deepest node (w.r.t. root) that is an ancestor of q and of every target.
int lca_with_splitting_nodes(const SubtreeView& view, int root, int q,
                             const std::vector<int>& targets);

using SplitterFn = std::function<int(const SubtreeView&)>;

/// c-splitting depth of a concrete splitter: 0 once every node is a
/// splitting node, kDepthInfinity if a view with more than c splitting nodes
/// appears (or the splitter stops making progress), else 1 + max over parts.
int sd_c(const SplitterFn& splitter, const SubtreeView& view, int c);

struct MsdOptions {
  bool memoize = false;  // default keeps the search polynomial-space
};

/// Minimal c-splitting depth over all splitting algorithms, by iterative
/// deepening over depth budgets.
int msd(const SubtreeView& view, int c, const MsdOptions& opts = {});

/// msd value plus a first move achieving it (lowest node id among optima).
/// The move is 0 when the view is already fully marked.
std::pair<int, int> msd_with_move(const SubtreeView& view, int c, const MsdOptions& opts = {});

// Adversarial tree families. Roots are the attachment points used by the
// recursive constructions.
struct GeneratedTree {
  TreeTopology tree;
  int root = 1;
};

GeneratedTree gen_fib(int h);
/// gen_fib(h) plus one extra node r joined to the F_h root; returns r as root.
GeneratedTree gen_fib_extended(int h);
GeneratedTree gen_gfib(int c, int h);

struct GeneratedMarkedTree {
  TreeTopology tree;
  std::vector<int> smarks;
};

GeneratedMarkedTree gen_G(int c, int h, int w);

}  // namespace twsat
