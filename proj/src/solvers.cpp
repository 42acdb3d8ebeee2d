#include "twsat/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <memory>
#include <optional>
#include <cmath>
#include <stdexcept>

namespace twsat {

namespace {

using Clock = std::chrono::steady_clock;

void require_valid(const CnfFormula& f, const TreeDecomposition& td) {
  ValidationResult vr = validate(td, f);
  if (!vr.ok) throw std::invalid_argument("invalid decomposition: " + vr.message);
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// dynamic programming engine

namespace {

struct DpBagInfo {
  std::vector<int> vars;     // positions in layout that are variables
  std::vector<int> clauses;  // positions in layout that are clauses
  // per clause position: (var position in layout, positive) for in-bag literals
  std::vector<std::vector<std::pair<int, bool>>> direct;
};

}  // namespace

SolveResult dp_solve(const CnfFormula& f, const TreeDecomposition& td, int root_bag) {
  auto t0 = Clock::now();
  require_valid(f, td);
  if (root_bag < 1 || root_bag > td.num_bags())
    throw std::invalid_argument("dp_solve: bad root bag");

  SolveResult res;
  SolveStats& stats = res.stats;
  int n = f.num_vars();

  // layouts and in-bag literal tables
  std::vector<DpBagInfo> info(static_cast<size_t>(td.num_bags()));
  for (int b = 1; b <= td.num_bags(); ++b) {
    const auto& bag = td.bag(b);
    if (bag.size() > 30) throw std::invalid_argument("dp_solve: bag too large");
    DpBagInfo& bi = info[static_cast<size_t>(b - 1)];
    for (size_t i = 0; i < bag.size(); ++i) {
      if (vertex_is_var(bag[static_cast<size_t>(i)], n))
        bi.vars.push_back(static_cast<int>(i));
      else
        bi.clauses.push_back(static_cast<int>(i));
    }
    bi.direct.resize(bi.clauses.size());
    for (size_t ci = 0; ci < bi.clauses.size(); ++ci) {
      int cidx = bag[static_cast<size_t>(bi.clauses[ci])] - n;
      for (const Literal& l : f.clause(cidx).literals) {
        auto it = std::lower_bound(bag.begin(), bag.end(), l.var);
        if (it != bag.end() && *it == l.var)
          bi.direct[ci].emplace_back(static_cast<int>(it - bag.begin()), l.positive);
      }
    }
  }

  auto adj = td.adjacency();
  // post-order over the rooted tree
  std::vector<int> order, parent(static_cast<size_t>(td.num_bags()) + 1, 0);
  {
    std::vector<int> stack{root_bag};
    parent[static_cast<size_t>(root_bag)] = -1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (int w : adj[static_cast<size_t>(v)]) {
        if (w != parent[static_cast<size_t>(v)]) {
          parent[static_cast<size_t>(w)] = v;
          stack.push_back(w);
        }
      }
    }
    std::reverse(order.begin(), order.end());
  }

  std::vector<std::vector<uint64_t>> tables(static_cast<size_t>(td.num_bags()) + 1);
  // live table bits: a bag's satisfiability array holds 2^{layout} bits from
  // the moment it is seeded until its parent consumes it
  uint64_t live = 0;
  auto dense_bits = [&](int b) { return 1ull << td.bag(b).size(); };
  auto bump_peak = [&]() { stats.peak_entries = std::max(stats.peak_entries, live); };

  for (int b : order) {
    const auto& bag = td.bag(b);
    const DpBagInfo& bi = info[static_cast<size_t>(b - 1)];

    // seed states: every variable pattern with its directly satisfied clauses
    std::vector<uint64_t> table;
    uint64_t vcount = 1ull << bi.vars.size();
    for (uint64_t vm = 0; vm < vcount; ++vm) {
      uint64_t mask = 0;
      for (size_t i = 0; i < bi.vars.size(); ++i)
        if ((vm >> i) & 1) mask |= 1ull << bi.vars[i];
      for (size_t ci = 0; ci < bi.clauses.size(); ++ci) {
        for (auto [vpos, positive] : bi.direct[ci]) {
          bool val = (mask >> vpos) & 1;
          if (val == positive) {
            mask |= 1ull << bi.clauses[ci];
            break;
          }
        }
      }
      table.push_back(mask);
    }
    std::sort(table.begin(), table.end());
    table.erase(std::unique(table.begin(), table.end()), table.end());
    live += dense_bits(b);
    bump_peak();

    for (int child : adj[static_cast<size_t>(b)]) {
      if (child == parent[static_cast<size_t>(b)]) continue;
      const auto& cbag = td.bag(child);
      // shared vertices and the child's clauses that vanish at this step
      std::vector<std::pair<int, int>> shared_vars, shared_clauses;
      std::vector<int> discharge;  // child positions
      for (size_t i = 0; i < cbag.size(); ++i) {
        int v = cbag[i];
        auto it = std::lower_bound(bag.begin(), bag.end(), v);
        bool in_parent = it != bag.end() && *it == v;
        if (vertex_is_var(v, n)) {
          if (in_parent)
            shared_vars.emplace_back(static_cast<int>(it - bag.begin()), static_cast<int>(i));
        } else {
          if (in_parent)
            shared_clauses.emplace_back(static_cast<int>(it - bag.begin()), static_cast<int>(i));
          else
            discharge.push_back(static_cast<int>(i));
        }
      }

      std::vector<uint64_t> merged;
      for (uint64_t s : table) {
        for (uint64_t t : tables[static_cast<size_t>(child)]) {
          ++stats.work_units;
          bool ok = true;
          for (auto [pp, cp] : shared_vars) {
            if (((s >> pp) & 1) != ((t >> cp) & 1)) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          for (int cp : discharge) {
            if (!((t >> cp) & 1)) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          uint64_t u = s;
          for (auto [pp, cp] : shared_clauses)
            if ((t >> cp) & 1) u |= 1ull << pp;
          merged.push_back(u);
        }
      }
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      bump_peak();
      live -= dense_bits(child);
      tables[static_cast<size_t>(child)].clear();
      tables[static_cast<size_t>(child)].shrink_to_fit();
      table = std::move(merged);
    }

    tables[static_cast<size_t>(b)] = std::move(table);
  }

  uint64_t clause_mask = 0;
  for (int cpos : info[static_cast<size_t>(root_bag - 1)].clauses) clause_mask |= 1ull << cpos;
  res.verdict = Verdict::Unsat;
  for (uint64_t s : tables[static_cast<size_t>(root_bag)]) {
    if ((s & clause_mask) == clause_mask) {
      res.verdict = Verdict::Sat;
      break;
    }
  }
  stats.wall_ms = elapsed_ms(t0);
  return res;
}

// ---------------------------------------------------------------------------
// splitters

int splitter_path(const SubtreeView& view) {
  if (view.type() > 2)
    throw std::invalid_argument("splitter_path: segment carries more than 2 splitting nodes");
  std::vector<int> ends;
  for (int v : view.nodes) {
    int d = view.degree_in(v);
    if (d > 2) throw std::invalid_argument("splitter_path: view is not a path segment");
    if (d <= 1) ends.push_back(v);
  }
  // walk the segment from its lowest-id end
  std::vector<int> seq;
  int prev = 0, cur = ends.front();
  while (true) {
    seq.push_back(cur);
    int next = 0;
    for (int w : view.neighbors_in(cur))
      if (w != prev) next = w;
    if (next == 0) break;
    prev = cur;
    cur = next;
  }
  // free node closest to the segment center, ties to the lower position;
  // marks sit at the ends, so for length >= 3 this is the exact center
  size_t target = (seq.size() - 1) / 2;
  int best = 0;
  size_t best_dist = seq.size();
  for (size_t i = 0; i < seq.size(); ++i) {
    if (view.marked(seq[i])) continue;
    size_t dist = i > target ? i - target : target - i;
    if (dist < best_dist) {
      best_dist = dist;
      best = seq[i];
    }
  }
  if (best == 0)
    throw std::invalid_argument("splitter_path: every node is already a splitting node");
  return best;
}

int splitter_h2(const SubtreeView& view) {
  int t = view.type();
  if (t > 2) throw std::invalid_argument("splitter_h2: view has more than 2 splitting nodes");
  if (t == 0) return find_half_splitting_node(view);
  if (t == 1) {
    static const double alpha = (3.0 - std::sqrt(5.0)) / 2.0;
    return find_alpha_splitting_node(view, view.smarks.front(), alpha);
  }
  int p1 = view.smarks[0];
  int m = find_half_splitting_node(view);
  if (on_splitting_path(view, m)) return m;
  return lca_with_splitting_nodes(view, p1, m, {view.smarks[1]});
}

int splitter_hc(const SubtreeView& view, const Schedule& sched) {
  int c = sched.c;
  int t = view.type();
  if (t > c) throw std::invalid_argument("splitter_hc: view has more than c splitting nodes");
  if (t == 0) return find_half_splitting_node(view);
  if (view.size() < (1 << (c - t))) return find_half_splitting_node(view);
  int root = view.smarks.front();
  if (t < c) {
    int q1 = find_alpha_splitting_node(view, root, sched.alpha(t));
    if (!on_splitting_path(view, q1)) return q1;
  }
  int q2 = find_half_splitting_node(view);
  if (!on_splitting_path(view, q2)) {
    std::vector<int> targets;
    for (int s : view.smarks)
      if (s != root) targets.push_back(s);
    return lca_with_splitting_nodes(view, root, q2, targets);
  }
  return q2;
}

int splitter_optimal(const SubtreeView& view, int c) {
  return msd_with_move(view, c, MsdOptions{true}).second;
}

SplitterFn make_splitter(SplitterKind kind, const Schedule* sched, int c) {
  switch (kind) {
    case SplitterKind::Path:
      return [](const SubtreeView& v) { return splitter_path(v); };
    case SplitterKind::H2:
      return [](const SubtreeView& v) { return splitter_h2(v); };
    case SplitterKind::Hc:
      if (sched == nullptr) throw std::invalid_argument("hc splitter needs a schedule");
      return [sched](const SubtreeView& v) { return splitter_hc(v, *sched); };
    case SplitterKind::Optimal:
      return [c](const SubtreeView& v) { return splitter_optimal(v, c); };
  }
  throw std::logic_error("unknown splitter");
}

// ---------------------------------------------------------------------------
// recursive engine

namespace {

// The split, its context, and the child frames depend only on the view, not
// on the assignment driving the recursion; they are expanded once and reused
// across every tuple that recurses through this view.
struct SplitFrame {
  SubtreeView view;
  bool expanded = false;
  bool base = false;
  SplitResult split;
  std::optional<SplitAssignContext> ctx;
  std::vector<AssignmentGroup> free_groups;
  std::vector<std::unique_ptr<SplitFrame>> children;
};

void expand_frame(SplitFrame& fr, const CnfFormula& f, const TreeDecomposition& td,
                  const SplitterFn& splitter, bool with_free_groups) {
  fr.expanded = true;
  if (fr.view.all_marked()) {
    fr.base = true;
    return;
  }
  int p = splitter(fr.view);
  fr.split = split_at(fr.view, p);
  fr.ctx.emplace(f, td, fr.view, fr.split);
  for (int i = 0; i < fr.ctx->num_parts(); ++i) {
    if (with_free_groups) fr.free_groups.push_back(all_free_group(fr.ctx->part_scope(i)));
    auto child = std::make_unique<SplitFrame>();
    child->view = fr.split.parts[static_cast<size_t>(i)];
    fr.children.push_back(std::move(child));
  }
}

struct RecCtx {
  const CnfFormula& f;
  const TreeDecomposition& td;
  SplitterFn splitter;
  SolveStats stats;
  uint64_t live_entries = 0;
  uint64_t live_frames = 0;

  void note_live() {
    stats.peak_entries = std::max(stats.peak_entries, live_entries);
    stats.peak_assignment_frames = std::max(stats.peak_assignment_frames, live_frames);
  }
};

bool rec_sat(RecCtx& ctx, SplitFrame& fr, const Assignment& r, int depth) {
  ctx.stats.max_type_seen = std::max(ctx.stats.max_type_seen, fr.view.type());
  ctx.stats.measured_splitting_depth = std::max(ctx.stats.measured_splitting_depth, depth);
  if (!fr.expanded) expand_frame(fr, ctx.f, ctx.td, ctx.splitter, true);
  if (fr.base) return base_satisfying_check(ctx.f, ctx.td, fr.view, r);

  ConsistentTupleEnumerator en(*fr.ctx, fr.free_groups, r);
  if (en.choice_product() > consistent_tuple_bound(*fr.ctx)) ++ctx.stats.counting_violations;

  bool found = false;
  en.for_each([&](const std::vector<Assignment>& tuple) {
    ++ctx.stats.work_units;
    ctx.live_entries += tuple.size();  // one stored assignment per part
    ++ctx.live_frames;
    ctx.note_live();
    bool all = true;
    for (size_t i = 0; i < tuple.size(); ++i) {
      if (!rec_sat(ctx, *fr.children[i], tuple[i], depth + 1)) {
        all = false;
        break;
      }
    }
    ctx.live_entries -= tuple.size();
    --ctx.live_frames;
    if (all) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace

SolveResult recursive_solve(const CnfFormula& f, const TreeDecomposition& td) {
  auto t0 = Clock::now();
  require_valid(f, td);
  TreeTopology topo = topology_of(td);
  RecCtx ctx{f, td, [](const SubtreeView& v) { return find_half_splitting_node(v); }, {}, 0, 0};
  SplitFrame root;
  root.view = full_view(topo);
  Assignment empty = make_assignment({});
  ctx.live_frames = 1;  // the top-level assignment
  ctx.note_live();
  bool sat = rec_sat(ctx, root, empty, 0);
  SolveResult res{sat ? Verdict::Sat : Verdict::Unsat, ctx.stats};
  res.stats.wall_ms = elapsed_ms(t0);
  return res;
}

// ---------------------------------------------------------------------------
// hybrid engine

namespace {

struct HybCtx {
  const CnfFormula& f;
  const TreeDecomposition& td;
  TradeoffParams params;
  SplitterFn splitter;
  SolveStats stats;
  uint64_t live_entries = 0;
  uint64_t live_frames = 0;

  void note_live() {
    stats.peak_entries = std::max(stats.peak_entries, live_entries);
    stats.peak_assignment_frames = std::max(stats.peak_assignment_frames, live_frames);
  }
};

std::vector<char> hyb_m(HybCtx& ctx, SplitFrame& fr, const AssignmentGroup& gr, int depth) {
  ctx.stats.max_type_seen = std::max(ctx.stats.max_type_seen, fr.view.type());
  ctx.stats.measured_splitting_depth = std::max(ctx.stats.measured_splitting_depth, depth);
  if (fr.view.type() > ctx.params.c)
    throw std::runtime_error("hybrid_solve: splitter produced a type_" +
                             std::to_string(fr.view.type()) + " view with c = " +
                             std::to_string(ctx.params.c));
  if (!fr.expanded) expand_frame(fr, ctx.f, ctx.td, ctx.splitter, false);

  uint64_t size = gr.size();
  std::vector<char> m(size, 0);
  ctx.live_entries += m.size();
  ctx.note_live();

  if (fr.base) {
    for (uint64_t j = 1; j <= size; ++j) {
      Assignment r = group_member(gr, j);
      ++ctx.live_entries;
      ++ctx.live_frames;
      ctx.note_live();
      if (base_satisfying_check(ctx.f, ctx.td, fr.view, r)) m[j - 1] = 1;
      --ctx.live_entries;
      --ctx.live_frames;
    }
    return m;
  }

  FixingEnumerator fixings(*fr.ctx, gr, ctx.params.epsilon);
  if (fixings.count() > fixings.lemma_bound()) ++ctx.stats.counting_violations;

  uint64_t remaining = size;
  for (uint64_t fix = 0; fix < fixings.count() && remaining > 0; ++fix) {
    ++ctx.stats.work_units;  // one fixing examined
    std::vector<AssignmentGroup> child_groups = fixings.derive(fix);
    std::vector<std::vector<char>> child_m;
    for (size_t i = 0; i < fr.children.size(); ++i)
      child_m.push_back(hyb_m(ctx, *fr.children[i], child_groups[i], depth + 1));

    for (uint64_t j = 1; j <= size; ++j) {
      if (m[j - 1]) continue;
      Assignment r = group_member(gr, j);
      ++ctx.live_entries;
      ++ctx.live_frames;
      ConsistentTupleEnumerator en(*fr.ctx, child_groups, r);
      if (en.choice_product() > consistent_tuple_bound(*fr.ctx)) ++ctx.stats.counting_violations;
      bool found = false;
      en.for_each([&](const std::vector<Assignment>& tuple) {
        ++ctx.stats.work_units;  // one candidate tuple evaluated
        for (size_t i = 0; i < tuple.size(); ++i) {
          uint64_t idx = member_index(child_groups[i], tuple[i]);
          if (!child_m[i][idx - 1]) return true;
        }
        found = true;
        return false;
      });
      --ctx.live_entries;
      --ctx.live_frames;
      if (found) {
        m[j - 1] = 1;
        --remaining;
      }
    }
    for (const auto& cm : child_m) ctx.live_entries -= cm.size();
  }
  return m;
}

}  // namespace

SolveResult hybrid_solve(const CnfFormula& f, const TreeDecomposition& td,
                         const TradeoffParams& params, SplitterKind splitter) {
  auto t0 = Clock::now();
  require_valid(f, td);
  if (params.c < 2) throw std::invalid_argument("hybrid_solve: c must be >= 2");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
    throw std::invalid_argument("hybrid_solve: epsilon must lie in (0,1)");
  if (splitter == SplitterKind::H2 && params.c != 2)
    throw std::invalid_argument("hybrid_solve: the H2 splitter requires c = 2");
  if (splitter == SplitterKind::Path && !td.is_path())
    throw std::invalid_argument("hybrid_solve: the path splitter requires a path decomposition");

  Schedule sched;
  if (splitter == SplitterKind::Hc) sched = compute_schedule(params.c);
  TreeTopology topo = topology_of(td);
  HybCtx ctx{f,
             td,
             params,
             make_splitter(splitter, splitter == SplitterKind::Hc ? &sched : nullptr, params.c),
             {},
             0,
             0};
  SplitFrame root;
  root.view = full_view(topo);
  std::vector<char> m = hyb_m(ctx, root, trivial_group(), 0);
  ctx.live_entries -= m.size();
  SolveResult res{m[0] ? Verdict::Sat : Verdict::Unsat, ctx.stats};
  res.stats.wall_ms = elapsed_ms(t0);
  return res;
}

SolveResult solve(const CnfFormula& f, const TreeDecomposition& td, const SolverConfig& config) {
  switch (config.engine) {
    case Engine::Dp:
      return dp_solve(f, td);
    case Engine::Recursive:
      return recursive_solve(f, td);
    case Engine::Hybrid:
      if (!config.params.has_value())
        throw std::invalid_argument("solve: the hybrid engine requires tradeoff parameters");
      return hybrid_solve(f, td, *config.params, config.splitter);
  }
  throw std::logic_error("solve: unknown engine");
}

}  // namespace twsat
