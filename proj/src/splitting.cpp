#include "twsat/splitting.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace twsat {

TreeTopology topology_of(const TreeDecomposition& td) {
  return TreeTopology{td.adjacency()};
}

TreeDecomposition synthetic_td(const TreeTopology& tree) {
  TreeDecomposition td;
  td.num_vertices = tree.size();
  for (int v = 1; v <= tree.size(); ++v) td.bags.push_back({v});
  for (int v = 1; v <= tree.size(); ++v)
    for (int w : tree.neighbors(v))
      if (v < w) td.edges.emplace_back(v, w);
  return td;
}

bool SubtreeView::contains(int v) const {
  return std::binary_search(nodes.begin(), nodes.end(), v);
}

bool SubtreeView::marked(int v) const {
  return std::binary_search(smarks.begin(), smarks.end(), v);
}

std::vector<int> SubtreeView::neighbors_in(int v) const {
  std::vector<int> out;
  for (int w : tree->neighbors(v))
    if (contains(w)) out.push_back(w);
  return out;
}

int SubtreeView::degree_in(int v) const {
  int d = 0;
  for (int w : tree->neighbors(v))
    if (contains(w)) ++d;
  return d;
}

SubtreeView full_view(const TreeTopology& tree) {
  SubtreeView v;
  v.tree = &tree;
  v.nodes.resize(static_cast<size_t>(tree.size()));
  for (int i = 0; i < tree.size(); ++i) v.nodes[static_cast<size_t>(i)] = i + 1;
  return v;
}

namespace {

void insert_sorted(std::vector<int>& vec, int v) {
  auto it = std::lower_bound(vec.begin(), vec.end(), v);
  if (it == vec.end() || *it != v) vec.insert(it, v);
}

// View rooted at a node: parent/depth/subtree-size over local indices
// (positions in the sorted node vector).
struct RootedView {
  const SubtreeView* view;
  std::vector<int> order;    // local indices in BFS order
  std::vector<int> parent;   // local; -1 at root
  std::vector<int> depth;
  std::vector<int> subtree;  // subtree sizes w.r.t. the root

  int local(int id) const {
    return static_cast<int>(std::lower_bound(view->nodes.begin(), view->nodes.end(), id) -
                            view->nodes.begin());
  }
  int id(int local_idx) const { return view->nodes[static_cast<size_t>(local_idx)]; }
};

RootedView root_view(const SubtreeView& view, int root) {
  RootedView rv;
  rv.view = &view;
  size_t n = view.nodes.size();
  rv.parent.assign(n, -2);
  rv.depth.assign(n, 0);
  rv.subtree.assign(n, 1);
  int r = rv.local(root);
  rv.parent[static_cast<size_t>(r)] = -1;
  rv.order.push_back(r);
  for (size_t head = 0; head < rv.order.size(); ++head) {
    int u = rv.order[head];
    for (int w : view.tree->neighbors(rv.id(u))) {
      if (!view.contains(w)) continue;
      int lw = rv.local(w);
      if (rv.parent[static_cast<size_t>(lw)] != -2) continue;
      rv.parent[static_cast<size_t>(lw)] = u;
      rv.depth[static_cast<size_t>(lw)] = rv.depth[static_cast<size_t>(u)] + 1;
      rv.order.push_back(lw);
    }
  }
  if (rv.order.size() != n)
    throw std::invalid_argument("view is not connected");
  for (size_t i = rv.order.size(); i-- > 1;) {
    int u = rv.order[i];
    rv.subtree[static_cast<size_t>(rv.parent[static_cast<size_t>(u)])] +=
        rv.subtree[static_cast<size_t>(u)];
  }
  return rv;
}

}  // namespace

SplitResult split_at(const SubtreeView& view, int p) {
  if (!view.contains(p)) throw std::invalid_argument("split_at: node not in view");
  SplitResult res;
  res.node = p;
  const auto& nodes = view.nodes;
  auto idx = [&](int v) {
    return static_cast<size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  std::vector<char> visited(nodes.size(), 0);
  visited[idx(p)] = 1;
  for (int nb : view.tree->neighbors(p)) {
    if (!view.contains(nb) || visited[idx(nb)]) continue;
    std::vector<int> comp;
    std::vector<int> stack{nb};
    visited[idx(nb)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int w : view.tree->neighbors(v)) {
        if (view.contains(w) && !visited[idx(w)]) {
          visited[idx(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    comp.push_back(p);
    std::sort(comp.begin(), comp.end());
    SubtreeView part;
    part.tree = view.tree;
    part.nodes = std::move(comp);
    for (int s : view.smarks)
      if (part.contains(s)) part.smarks.push_back(s);
    insert_sorted(part.smarks, p);
    res.parts.push_back(std::move(part));
  }
  if (res.parts.empty()) {
    // p is the only node of the view
    SubtreeView part = view;
    insert_sorted(part.smarks, p);
    res.parts.push_back(std::move(part));
  }
  return res;
}

int classify_type(const SubtreeView& view) { return view.type(); }

int find_alpha_splitting_node(const SubtreeView& view, int s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("find_alpha_splitting_node: alpha must lie in (0,1)");
  if (!view.contains(s)) throw std::invalid_argument("find_alpha_splitting_node: s not in view");
  if (view.degree_in(s) > 1)
    throw std::invalid_argument("find_alpha_splitting_node: s is not a leaf of the view");
  int n = view.size();
  if (n == 1) return s;

  RootedView rv = root_view(view, s);
  std::vector<std::vector<int>> children(static_cast<size_t>(n));
  for (int u : rv.order) {
    int par = rv.parent[static_cast<size_t>(u)];
    if (par >= 0) children[static_cast<size_t>(par)].push_back(u);
  }
  // node ids ascend with local index, so sorting children gives lowest-id ties
  for (auto& ch : children) std::sort(ch.begin(), ch.end());

  long long limit = static_cast<long long>(std::floor(alpha * n)) + 1;
  int cur = rv.local(s);
  while (true) {
    int best = -1;
    for (int ch : children[static_cast<size_t>(cur)]) {
      if (best == -1 || rv.subtree[static_cast<size_t>(ch)] > rv.subtree[static_cast<size_t>(best)])
        best = ch;
    }
    if (best == -1) break;
    long long s_side = static_cast<long long>(n) - rv.subtree[static_cast<size_t>(best)] + 1;
    if (s_side > limit) break;
    cur = best;
  }
  if (rv.id(cur) == s) cur = children[static_cast<size_t>(cur)].front();
  return rv.id(cur);
}

int find_half_splitting_node(const SubtreeView& view) {
  if (view.size() == 0) throw std::invalid_argument("find_half_splitting_node: empty view");
  if (view.size() == 1) return view.nodes.front();
  int s = -1;
  for (int m : view.smarks) {
    if (view.degree_in(m) <= 1) {
      s = m;
      break;
    }
  }
  if (s == -1) {
    for (int v : view.nodes) {
      if (view.degree_in(v) <= 1) {
        s = v;
        break;
      }
    }
  }
  assert(s != -1);
  return find_alpha_splitting_node(view, s, 0.5);
}

namespace {

int climb_lca(const RootedView& rv, int a, int b) {
  while (a != b) {
    if (rv.depth[static_cast<size_t>(a)] < rv.depth[static_cast<size_t>(b)]) std::swap(a, b);
    a = rv.parent[static_cast<size_t>(a)];
  }
  return a;
}

}  // namespace

bool on_splitting_path(const SubtreeView& view, int q) {
  if (view.type() < 2) return false;
  if (!view.contains(q)) throw std::invalid_argument("on_splitting_path: q not in view");
  RootedView rv = root_view(view, view.smarks.front());
  int lq = rv.local(q);
  auto dist = [&](int a, int b) {
    int l = climb_lca(rv, a, b);
    return rv.depth[static_cast<size_t>(a)] + rv.depth[static_cast<size_t>(b)] -
           2 * rv.depth[static_cast<size_t>(l)];
  };
  for (size_t i = 0; i < view.smarks.size(); ++i) {
    for (size_t j = i + 1; j < view.smarks.size(); ++j) {
      int a = rv.local(view.smarks[i]);
      int b = rv.local(view.smarks[j]);
      if (dist(a, lq) + dist(lq, b) == dist(a, b)) return true;
    }
  }
  return false;
}

int lca_with_splitting_nodes(const SubtreeView& view, int root, int q,
                             const std::vector<int>& targets) {
  if (!view.contains(root) || !view.contains(q))
    throw std::invalid_argument("lca_with_splitting_nodes: node not in view");
  RootedView rv = root_view(view, root);
  int acc = rv.local(q);
  for (int t : targets) {
    if (!view.contains(t))
      throw std::invalid_argument("lca_with_splitting_nodes: target not in view");
    acc = climb_lca(rv, acc, rv.local(t));
  }
  return rv.id(acc);
}

int sd_c(const SplitterFn& splitter, const SubtreeView& view, int c) {
  if (view.type() > c) return kDepthInfinity;
  if (view.all_marked()) return 0;
  int p = splitter(view);
  if (!view.contains(p)) throw std::logic_error("splitter returned a node outside the view");
  SplitResult sr = split_at(view, p);
  int worst = 0;
  for (const SubtreeView& part : sr.parts) {
    if (part.nodes == view.nodes && part.smarks == view.smarks)
      return kDepthInfinity;  // splitter makes no progress
    int d = sd_c(splitter, part, c);
    if (d == kDepthInfinity) return kDepthInfinity;
    worst = std::max(worst, d);
  }
  return worst + 1;
}

namespace {

struct ViewKey {
  std::vector<int> nodes;
  std::vector<int> smarks;
  bool operator==(const ViewKey&) const = default;
};

struct ViewKeyHash {
  size_t operator()(const ViewKey& k) const {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    for (int v : k.nodes) mix(static_cast<uint64_t>(v));
    mix(0xffffffffULL);
    for (int v : k.smarks) mix(static_cast<uint64_t>(v));
    return static_cast<size_t>(h);
  }
};

struct MsdSearch {
  int c;
  bool memoize;
  int dmax;
  // per view: smallest h proven reachable / largest h proven unreachable
  std::unordered_map<ViewKey, std::pair<int, int>, ViewKeyHash> memo;

  int lower_bound_depth(const SubtreeView& v) const {
    if (v.all_marked()) return 0;
    long long m = v.size();
    int steps = 0;
    while (m > c) {
      long long next = (m - 1 + dmax - 1) / dmax + 1;
      if (next >= m) break;
      m = next;
      ++steps;
    }
    return std::max(steps, 1);
  }

  bool depth_reachable(const SubtreeView& view, int h) {
    if (view.type() > c) return false;
    if (view.all_marked()) return true;
    if (h <= 0) return false;
    if (lower_bound_depth(view) > h) return false;
    ViewKey key;
    if (memoize) {
      key = ViewKey{view.nodes, view.smarks};
      auto it = memo.find(key);
      if (it != memo.end()) {
        if (it->second.first <= h) return true;
        if (it->second.second >= h) return false;
      }
    }
    bool ok = false;
    for (int p : view.nodes) {
      if (view.marked(p) && view.degree_in(p) <= 1) continue;  // would not progress
      SplitResult sr = split_at(view, p);
      bool legal = true;
      for (const SubtreeView& part : sr.parts)
        if (part.type() > c) {
          legal = false;
          break;
        }
      if (!legal) continue;
      std::sort(sr.parts.begin(), sr.parts.end(),
                [](const SubtreeView& a, const SubtreeView& b) { return a.size() > b.size(); });
      bool all = true;
      for (const SubtreeView& part : sr.parts) {
        if (!depth_reachable(part, h - 1)) {
          all = false;
          break;
        }
      }
      if (all) {
        ok = true;
        break;
      }
    }
    if (memoize) {
      auto& entry = memo.try_emplace(key, std::make_pair(kDepthInfinity, -1)).first->second;
      if (ok)
        entry.first = std::min(entry.first, h);
      else
        entry.second = std::max(entry.second, h);
    }
    return ok;
  }
};

int topology_max_degree(const TreeTopology& tree) {
  int d = 0;
  for (int v = 1; v <= tree.size(); ++v)
    d = std::max(d, static_cast<int>(tree.neighbors(v).size()));
  return std::max(d, 1);
}

}  // namespace

int msd(const SubtreeView& view, int c, const MsdOptions& opts) {
  if (c < 2) throw std::invalid_argument("msd: c must be >= 2");
  if (view.type() > c) return kDepthInfinity;
  MsdSearch search{c, opts.memoize, topology_max_degree(*view.tree), {}};
  int cap = 2 * view.size() + c + 2;
  for (int h = search.lower_bound_depth(view); h <= cap; ++h)
    if (search.depth_reachable(view, h)) return h;
  throw std::logic_error("msd: depth cap exceeded");
}

std::pair<int, int> msd_with_move(const SubtreeView& view, int c, const MsdOptions& opts) {
  if (c < 2) throw std::invalid_argument("msd: c must be >= 2");
  if (view.type() > c) return {kDepthInfinity, 0};
  if (view.all_marked()) return {0, 0};
  MsdSearch search{c, opts.memoize, topology_max_degree(*view.tree), {}};
  int cap = 2 * view.size() + c + 2;
  int value = -1;
  for (int h = search.lower_bound_depth(view); h <= cap; ++h) {
    if (search.depth_reachable(view, h)) {
      value = h;
      break;
    }
  }
  if (value < 0) throw std::logic_error("msd: depth cap exceeded");
  for (int p : view.nodes) {
    if (view.marked(p) && view.degree_in(p) <= 1) continue;
    SplitResult sr = split_at(view, p);
    bool good = true;
    for (const SubtreeView& part : sr.parts) {
      if (part.type() > c || !search.depth_reachable(part, value - 1)) {
        good = false;
        break;
      }
    }
    if (good) return {value, p};
  }
  throw std::logic_error("msd_with_move: no move achieves the computed depth");
}

namespace {

struct TreeBuilder {
  std::vector<std::vector<int>> adj{{}};

  int add_node() {
    adj.emplace_back();
    return static_cast<int>(adj.size()) - 1;
  }
  void add_edge(int a, int b) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  TreeTopology take() {
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return TreeTopology{std::move(adj)};
  }
};

int build_fib(TreeBuilder& tb, int h) {
  int root = tb.add_node();
  if (h == 2) {
    int child = tb.add_node();
    tb.add_edge(root, child);
  } else if (h >= 3) {
    int a = build_fib(tb, h - 2);
    int b = build_fib(tb, h - 1);
    tb.add_edge(root, a);
    tb.add_edge(root, b);
  }
  return root;
}

int build_gfib(TreeBuilder& tb, int c, int h) {
  if (h <= c) {
    int first = tb.add_node();
    int prev = first;
    for (int i = 1; i < (1 << c); ++i) {
      int v = tb.add_node();
      tb.add_edge(prev, v);
      prev = v;
    }
    return first;
  }
  std::vector<int> chain;
  for (int i = 0; i < c; ++i) {
    chain.push_back(tb.add_node());
    if (i > 0) tb.add_edge(chain[static_cast<size_t>(i) - 1], chain[static_cast<size_t>(i)]);
  }
  for (int i = 1; i <= c; ++i) {
    int sub = build_gfib(tb, c, h - i);
    tb.add_edge(chain[static_cast<size_t>(i) - 1], sub);
  }
  return chain.front();
}

}  // namespace

GeneratedTree gen_fib(int h) {
  if (h < 1) throw std::invalid_argument("gen_fib: h must be >= 1");
  TreeBuilder tb;
  int root = build_fib(tb, h);
  return {tb.take(), root};
}

GeneratedTree gen_fib_extended(int h) {
  if (h < 1) throw std::invalid_argument("gen_fib_extended: h must be >= 1");
  TreeBuilder tb;
  int r = tb.add_node();
  int root = build_fib(tb, h);
  tb.add_edge(r, root);
  return {tb.take(), r};
}

GeneratedTree gen_gfib(int c, int h) {
  if (c < 2 || c > 20) throw std::invalid_argument("gen_gfib: c must lie in [2,20]");
  if (h < 1) throw std::invalid_argument("gen_gfib: h must be >= 1");
  TreeBuilder tb;
  int root = build_gfib(tb, c, h);
  return {tb.take(), root};
}

GeneratedMarkedTree gen_G(int c, int h, int w) {
  if (c < 2 || c > 20) throw std::invalid_argument("gen_G: c must lie in [2,20]");
  if (h <= c) throw std::invalid_argument("gen_G: h must exceed c");
  if (w < 1 || w > c) throw std::invalid_argument("gen_G: w must lie in [1,c]");
  TreeBuilder tb;
  std::vector<int> chain;
  for (int i = 0; i < w; ++i) {
    chain.push_back(tb.add_node());
    if (i > 0) tb.add_edge(chain[static_cast<size_t>(i) - 1], chain[static_cast<size_t>(i)]);
  }
  std::vector<int> marks;
  for (int j = 0; j < c - w + 1; ++j) {
    int s = tb.add_node();
    tb.add_edge(chain.front(), s);
    marks.push_back(s);
  }
  for (int i = 1; i <= w; ++i) {
    int sub = build_gfib(tb, c, h - c + w - i);
    tb.add_edge(chain[static_cast<size_t>(i) - 1], sub);
  }
  std::sort(marks.begin(), marks.end());
  return {tb.take(), std::move(marks)};
}

}  // namespace twsat
