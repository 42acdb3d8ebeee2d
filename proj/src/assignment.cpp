#include "twsat/assignment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace twsat {

namespace {

std::vector<int> sorted_union(const std::vector<std::vector<int>*>& sets) {
  std::vector<int> out;
  for (const auto* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

uint64_t saturating_pow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    if (r > (~0ull) / (base == 0 ? 1 : base)) return ~0ull;
    r *= base;
  }
  return r;
}

}  // namespace

int Assignment::find(int vertex) const {
  auto it = std::lower_bound(scope.begin(), scope.end(), vertex);
  if (it == scope.end() || *it != vertex) return -1;
  return static_cast<int>(it - scope.begin());
}

bool Assignment::bit(int vertex) const {
  int pos = find(vertex);
  if (pos < 0) throw std::out_of_range("assignment has no bit for vertex " + std::to_string(vertex));
  return bits[static_cast<size_t>(pos)] != 0;
}

void Assignment::set(int vertex, bool value) {
  int pos = find(vertex);
  if (pos < 0) throw std::out_of_range("assignment has no bit for vertex " + std::to_string(vertex));
  bits[static_cast<size_t>(pos)] = value ? 1 : 0;
}

Assignment make_assignment(std::vector<int> scope) {
  Assignment a;
  a.bits.assign(scope.size(), 0);
  a.scope = std::move(scope);
  return a;
}

std::vector<int> view_scope(const TreeDecomposition& td, const SubtreeView& view) {
  std::vector<int> out;
  for (int s : view.smarks) {
    const auto& b = td.bag(s);
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

uint64_t group_size(const AssignmentGroup& g) { return g.size(); }

Assignment group_member(const AssignmentGroup& g, uint64_t j) {
  if (j < 1 || j > g.size()) throw std::out_of_range("group member index out of range");
  Assignment a;
  a.scope = g.scope;
  a.bits.assign(g.scope.size(), 0);
  for (size_t i = 0; i < g.scope.size(); ++i) a.bits[i] = g.value[i];
  uint64_t pattern = j - 1;
  for (size_t k = 0; k < g.free_pos.size(); ++k)
    a.bits[static_cast<size_t>(g.free_pos[k])] = (pattern >> k) & 1;
  return a;
}

uint64_t member_index(const AssignmentGroup& g, const Assignment& a) {
  uint64_t pattern = 0;
  for (size_t k = 0; k < g.free_pos.size(); ++k)
    if (a.bits[static_cast<size_t>(g.free_pos[k])]) pattern |= 1ull << k;
  return pattern + 1;
}

AssignmentGroup trivial_group() { return AssignmentGroup{}; }

AssignmentGroup all_free_group(std::vector<int> scope) {
  AssignmentGroup g;
  g.fixed.assign(scope.size(), 0);
  g.value.assign(scope.size(), 0);
  g.free_pos.resize(scope.size());
  for (size_t i = 0; i < scope.size(); ++i) g.free_pos[i] = static_cast<int>(i);
  g.scope = std::move(scope);
  if (g.free_pos.size() > 62) throw std::invalid_argument("scope too large for group indexing");
  return g;
}

int fixed_quota(int k, double eps) {
  if (k <= 0) return 0;
  double raw = (1.0 - eps) * k;
  int q = static_cast<int>(std::ceil(raw - 1e-9));
  return std::clamp(q, 0, k);
}

SplitAssignContext::SplitAssignContext(const CnfFormula& f, const TreeDecomposition& td,
                                       const SubtreeView& parent_view, const SplitResult& split)
    : formula_(&f), pivot_(split.node) {
  parent_scope_ = view_scope(td, parent_view);
  pivot_layout_ = td.bag(split.node);

  std::vector<std::vector<int>> old_scopes;
  for (const SubtreeView& part : split.parts) {
    part_scopes_.push_back(view_scope(td, part));
    // scope contributed by splitting nodes that predate this split
    std::vector<int> old_scope;
    for (int s : parent_view.smarks) {
      if (part.contains(s)) {
        const auto& b = td.bag(s);
        old_scope.insert(old_scope.end(), b.begin(), b.end());
      }
    }
    std::sort(old_scope.begin(), old_scope.end());
    old_scope.erase(std::unique(old_scope.begin(), old_scope.end()), old_scope.end());
    old_scopes.push_back(std::move(old_scope));
  }

  std::vector<std::vector<int>*> all;
  for (auto& s : part_scopes_) all.push_back(&s);
  std::vector<int> universe = sorted_union(all);

  int n = f.num_vars();
  for (int v : universe) {
    ElementInfo info;
    info.vertex = v;
    info.is_var = vertex_is_var(v, n);
    info.in_parent = std::binary_search(parent_scope_.begin(), parent_scope_.end(), v);
    auto it = std::lower_bound(pivot_layout_.begin(), pivot_layout_.end(), v);
    info.pivot_pos = (it != pivot_layout_.end() && *it == v)
                         ? static_cast<int>(it - pivot_layout_.begin())
                         : -1;
    for (int i = 0; i < num_parts(); ++i) {
      const auto& sc = part_scopes_[static_cast<size_t>(i)];
      if (std::binary_search(sc.begin(), sc.end(), v)) info.parts.push_back(i);
      const auto& os = old_scopes[static_cast<size_t>(i)];
      if (std::binary_search(os.begin(), os.end(), v)) info.old_parts.push_back(i);
    }
    elements_.push_back(std::move(info));
  }
}

const SplitAssignContext::ElementInfo& SplitAssignContext::element(int vertex) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), vertex,
                             [](const ElementInfo& e, int v) { return e.vertex < v; });
  if (it == elements_.end() || it->vertex != vertex)
    throw std::out_of_range("no element info for vertex " + std::to_string(vertex));
  return *it;
}

ConsistentTupleEnumerator::ConsistentTupleEnumerator(
    const SplitAssignContext& ctx, const std::vector<AssignmentGroup>& child_groups,
    const Assignment& parent)
    : ctx_(&ctx) {
  int k = ctx.num_parts();
  if (static_cast<int>(child_groups.size()) != k)
    throw std::invalid_argument("one child group per part required");

  // determined[i][slot]: -1 undecided, else pinned bit
  std::vector<std::vector<int8_t>> det(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const AssignmentGroup& g = child_groups[static_cast<size_t>(i)];
    if (g.scope != ctx.part_scope(i))
      throw std::invalid_argument("child group scope does not match part scope");
    det[static_cast<size_t>(i)].assign(g.scope.size(), -1);
    for (size_t s = 0; s < g.scope.size(); ++s)
      if (g.fixed[s]) det[static_cast<size_t>(i)][s] = static_cast<int8_t>(g.value[s]);
  }

  auto slot_of = [&](int part, int vertex) {
    const auto& sc = ctx.part_scope(part);
    return static_cast<size_t>(std::lower_bound(sc.begin(), sc.end(), vertex) - sc.begin());
  };

  for (const auto& info : ctx.elements()) {
    if (!feasible_) break;
    if (info.is_var) {
      int required = -1;
      if (info.in_parent) required = parent.bit(info.vertex) ? 1 : 0;
      std::vector<int> open;
      for (int i : info.parts) {
        int8_t d = det[static_cast<size_t>(i)][slot_of(i, info.vertex)];
        if (d < 0) {
          open.push_back(i);
        } else if (required == -1) {
          required = d;
        } else if (d != required) {
          feasible_ = false;
        }
      }
      if (!feasible_) break;
      if (required >= 0) {
        for (int i : open)
          det[static_cast<size_t>(i)][slot_of(i, info.vertex)] = static_cast<int8_t>(required);
      } else if (!open.empty()) {
        Choice ch;
        ch.is_var = true;
        ch.vertex = info.vertex;
        ch.claimable = open;
        choices_.push_back(std::move(ch));
      }
    } else {
      bool zero_rule = info.in_parent && !parent.bit(info.vertex);
      if (zero_rule) {
        for (int i : info.parts) {
          int8_t& d = det[static_cast<size_t>(i)][slot_of(i, info.vertex)];
          if (d == 1) {
            feasible_ = false;
            break;
          }
          d = 0;
        }
      } else {
        // exactly one containing part claims the clause
        int fixed_ones = 0;
        std::vector<int> open;
        for (int i : info.parts) {
          int8_t d = det[static_cast<size_t>(i)][slot_of(i, info.vertex)];
          if (d == 1)
            ++fixed_ones;
          else if (d < 0)
            open.push_back(i);
        }
        if (fixed_ones > 1) {
          feasible_ = false;
        } else if (fixed_ones == 1) {
          for (int i : open) det[static_cast<size_t>(i)][slot_of(i, info.vertex)] = 0;
        } else if (open.empty()) {
          feasible_ = false;  // nothing can claim it
        } else {
          Choice ch;
          ch.vertex = info.vertex;
          ch.claimable = open;
          choices_.push_back(std::move(ch));
        }
      }
    }
  }

  base_.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    Assignment a = make_assignment(ctx.part_scope(i));
    for (size_t s = 0; s < a.scope.size(); ++s) {
      int8_t d = det[static_cast<size_t>(i)][s];
      a.bits[s] = d > 0 ? 1 : 0;
    }
    base_.push_back(std::move(a));
  }
}

uint64_t ConsistentTupleEnumerator::choice_product() const {
  if (!feasible_) return 0;
  uint64_t p = 1;
  for (const Choice& ch : choices_) {
    uint64_t options = ch.is_var ? 2 : ch.claimable.size();
    if (p > (~0ull) / options) return ~0ull;
    p *= options;
  }
  return p;
}

uint64_t ConsistentTupleEnumerator::for_each(
    const std::function<bool(const std::vector<Assignment>&)>& fn) const {
  if (!feasible_) return 0;
  std::vector<size_t> odo(choices_.size(), 0);
  uint64_t visited = 0;
  std::vector<Assignment> tuple = base_;  // buffer reused across iterations
  while (true) {
    for (size_t i = 0; i < tuple.size(); ++i) tuple[i].bits = base_[i].bits;
    for (size_t c = 0; c < choices_.size(); ++c) {
      const Choice& ch = choices_[c];
      if (ch.is_var) {
        bool val = odo[c] == 1;
        for (int part : ch.claimable) tuple[static_cast<size_t>(part)].set(ch.vertex, val);
      } else {
        int claimed = ch.claimable[odo[c]];
        for (int part : ch.claimable)
          tuple[static_cast<size_t>(part)].set(ch.vertex, part == claimed);
      }
    }
    ++visited;
    if (!fn(tuple)) return visited;
    // odometer: last choice fastest
    size_t c = choices_.size();
    while (c > 0) {
      --c;
      size_t options = choices_[c].is_var ? 2 : choices_[c].claimable.size();
      if (++odo[c] < options) break;
      odo[c] = 0;
      if (c == 0) return visited;
    }
    if (choices_.empty()) return visited;
  }
}

uint64_t enumerate_consistent(const SplitAssignContext& ctx, const Assignment& parent,
                              const std::function<bool(const std::vector<Assignment>&)>& fn) {
  std::vector<AssignmentGroup> groups;
  for (int i = 0; i < ctx.num_parts(); ++i) groups.push_back(all_free_group(ctx.part_scope(i)));
  ConsistentTupleEnumerator en(ctx, groups, parent);
  return en.for_each(fn);
}

uint64_t consistent_tuple_bound(const SplitAssignContext& ctx) {
  uint64_t d = std::max<uint64_t>(2, static_cast<uint64_t>(ctx.num_parts()));
  return saturating_pow(d, ctx.pivot_layout().size());
}

FixingEnumerator::FixingEnumerator(const SplitAssignContext& ctx, const AssignmentGroup& parent,
                                   double eps)
    : ctx_(&ctx), parent_(&parent) {
  if (parent.scope != ctx.parent_scope())
    throw std::invalid_argument("parent group scope does not match the view scope");
  quota_ = fixed_quota(static_cast<int>(ctx.pivot_layout().size()), eps);

  auto parent_slot = [&](int vertex) {
    const auto& sc = parent.scope;
    auto it = std::lower_bound(sc.begin(), sc.end(), vertex);
    return static_cast<size_t>(it - sc.begin());
  };

  for (const auto& info : ctx.elements()) {
    ElementPlan plan;
    plan.vertex = info.vertex;
    plan.status.assign(info.parts.size(), 0);   // Free
    plan.value.assign(info.parts.size(), -1);
    bool in_prefix = info.pivot_pos >= 0 && info.pivot_pos < quota_;
    bool in_suffix = info.pivot_pos >= quota_;

    if (info.in_parent) {
      size_t ps = parent_slot(info.vertex);
      bool pfixed = parent.fixed[ps] != 0;
      bool pval = parent.value[ps] != 0;
      if (pfixed) {
        if (info.is_var || !pval) {
          for (size_t i = 0; i < info.parts.size(); ++i) {
            plan.status[i] = 1;
            plan.value[i] = pval ? 1 : 0;
          }
        } else if (in_suffix) {
          // fixed-1 clause in the pivot's free region: leave the claim to
          // the member level so the fixing count stays within the lemma
        } else if (in_prefix) {
          Slot slot;
          slot.vertex = info.vertex;
          slot.fixable = info.parts;
          plan.slot = static_cast<int>(slots_.size());
          slots_.push_back(slot);
          for (size_t i = 0; i < info.parts.size(); ++i) plan.status[i] = 1;
        } else {
          // a fixed-1 clause outside the pivot bag lives in exactly one part
          assert(info.parts.size() == 1);
          plan.status[0] = 1;
          plan.value[0] = 1;
        }
      } else {
        // parent-free entries need not be re-fixed below; only the pivot's
        // fixed prefix pins a clause in the parts that see it solely via p
        if (!info.is_var && in_prefix) {
          std::vector<int> fixable;
          for (size_t i = 0; i < info.parts.size(); ++i) {
            int part = info.parts[i];
            bool via_old = std::binary_search(info.old_parts.begin(), info.old_parts.end(), part);
            if (!via_old) fixable.push_back(part);
          }
          if (!fixable.empty()) {
            Slot slot;
            slot.vertex = info.vertex;
            slot.allow_all_zero = true;
            slot.fixable = fixable;
            plan.slot = static_cast<int>(slots_.size());
            slots_.push_back(slot);
            for (size_t i = 0; i < info.parts.size(); ++i) {
              if (std::find(fixable.begin(), fixable.end(), info.parts[i]) != fixable.end())
                plan.status[i] = 1;
            }
          }
        }
      }
    } else {
      // new element; necessarily in the pivot bag
      assert(info.pivot_pos >= 0);
      if (in_prefix) {
        Slot slot;
        slot.is_var = info.is_var;
        slot.vertex = info.vertex;
        slot.fixable = info.parts;
        plan.slot = static_cast<int>(slots_.size());
        slots_.push_back(slot);
        for (size_t i = 0; i < info.parts.size(); ++i) plan.status[i] = 1;
      }
    }
    plans_.push_back(std::move(plan));
  }
}

uint64_t FixingEnumerator::count() const {
  uint64_t p = 1;
  for (const Slot& slot : slots_) {
    uint64_t options =
        slot.is_var ? 2 : slot.fixable.size() + (slot.allow_all_zero ? 1 : 0);
    if (p > (~0ull) / options) return ~0ull;
    p *= options;
  }
  return p;
}

uint64_t FixingEnumerator::lemma_bound() const {
  uint64_t d = std::max<uint64_t>(2, static_cast<uint64_t>(ctx_->num_parts()));
  return saturating_pow(d, static_cast<uint64_t>(quota_));
}

std::vector<AssignmentGroup> FixingEnumerator::derive(uint64_t fixing_index) const {
  if (fixing_index >= count()) throw std::out_of_range("fixing index out of range");

  // decode odometer, last slot fastest
  std::vector<size_t> pick(slots_.size(), 0);
  for (size_t s = slots_.size(); s-- > 0;) {
    size_t options =
        slots_[s].is_var ? 2 : slots_[s].fixable.size() + (slots_[s].allow_all_zero ? 1 : 0);
    pick[s] = fixing_index % options;
    fixing_index /= options;
  }

  std::vector<AssignmentGroup> groups;
  for (int i = 0; i < ctx_->num_parts(); ++i) {
    AssignmentGroup g;
    g.scope = ctx_->part_scope(i);
    g.fixed.assign(g.scope.size(), 0);
    g.value.assign(g.scope.size(), 0);
    groups.push_back(std::move(g));
  }

  for (const ElementPlan& plan : plans_) {
    const auto& info = ctx_->element(plan.vertex);
    for (size_t pi = 0; pi < info.parts.size(); ++pi) {
      if (plan.status[pi] == 0) continue;
      int part = info.parts[pi];
      AssignmentGroup& g = groups[static_cast<size_t>(part)];
      int pos = static_cast<int>(
          std::lower_bound(g.scope.begin(), g.scope.end(), plan.vertex) - g.scope.begin());
      g.fixed[static_cast<size_t>(pos)] = 1;
      int8_t val = plan.value[pi];
      if (val < 0) {
        const Slot& slot = slots_[static_cast<size_t>(plan.slot)];
        size_t choice = pick[static_cast<size_t>(plan.slot)];
        if (slot.is_var) {
          val = choice == 1 ? 1 : 0;
        } else if (slot.allow_all_zero) {
          val = (choice >= 1 && slot.fixable[choice - 1] == part) ? 1 : 0;
        } else {
          val = (slot.fixable[choice] == part) ? 1 : 0;
        }
      }
      g.value[static_cast<size_t>(pos)] = static_cast<uint8_t>(val);
    }
  }

  for (AssignmentGroup& g : groups) {
    for (size_t s = 0; s < g.scope.size(); ++s)
      if (!g.fixed[s]) g.free_pos.push_back(static_cast<int>(s));
    if (g.free_pos.size() > 62) throw std::invalid_argument("scope too large for group indexing");
  }
  return groups;
}

std::vector<AssignmentGroup> derive_child_groups(const SplitAssignContext& ctx,
                                                 const AssignmentGroup& parent, double eps,
                                                 uint64_t fixing_index) {
  return FixingEnumerator(ctx, parent, eps).derive(fixing_index);
}

bool base_satisfying_check(const CnfFormula& f, const TreeDecomposition& td,
                           const SubtreeView& view, const Assignment& r) {
  if (!view.all_marked())
    throw std::invalid_argument("base_satisfying_check requires a fully marked view");
  assert(r.scope == view_scope(td, view));
  (void)td;
  int n = f.num_vars();
  for (size_t i = 0; i < r.scope.size(); ++i) {
    int v = r.scope[i];
    if (vertex_is_var(v, n) || !r.bits[i]) continue;
    const Clause& c = f.clause(v - n);
    bool sat = false;
    for (const Literal& l : c.literals) {
      int pos = r.find(l.var);
      if (pos >= 0 && (r.bits[static_cast<size_t>(pos)] != 0) == l.positive) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

bool members_consistent(const SplitAssignContext& ctx, const Assignment& parent,
                        const std::vector<Assignment>& children) {
  for (const auto& info : ctx.elements()) {
    if (info.is_var) {
      int required = info.in_parent ? (parent.bit(info.vertex) ? 1 : 0) : -1;
      for (int i : info.parts) {
        int v = children[static_cast<size_t>(i)].bit(info.vertex) ? 1 : 0;
        if (required == -1) required = v;
        if (v != required) return false;
      }
    } else {
      if (info.in_parent && !parent.bit(info.vertex)) {
        for (int i : info.parts)
          if (children[static_cast<size_t>(i)].bit(info.vertex)) return false;
      } else {
        int ones = 0;
        for (int i : info.parts)
          if (children[static_cast<size_t>(i)].bit(info.vertex)) ++ones;
        if (ones != 1) return false;
      }
    }
  }
  return true;
}

}  // namespace twsat
