#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "twsat/decomp.hpp"
#include "twsat/splitting.hpp"

namespace twsat {

/// Bit vector over the distinct variables and clauses of a view's splitting
/// bags. The scope is sorted by vertex id, which puts variables (ids 1..n)
/// before clauses (ids n+1..n+m) -- the canonical bag layout.
struct Assignment {
  std::vector<int> scope;
  std::vector<uint8_t> bits;  // parallel to scope

  int find(int vertex) const;  // position in scope, -1 if absent
  bool has(int vertex) const { return find(vertex) >= 0; }
  bool bit(int vertex) const;
  void set(int vertex, bool value);

  bool operator==(const Assignment&) const = default;
};

Assignment make_assignment(std::vector<int> scope);

/// Union of the bags of the view's splitting nodes, sorted.
std::vector<int> view_scope(const TreeDecomposition& td, const SubtreeView& view);

/// epsilon-assignment group: per splitting bag a canonical prefix of the
/// layout is fixed; members are the completions of the free slots.
struct AssignmentGroup {
  std::vector<int> scope;
  std::vector<uint8_t> fixed;  // parallel: slot is pinned
  std::vector<uint8_t> value;  // parallel: pinned value (0 when free)
  std::vector<int> free_pos;   // positions of free slots, ascending

  uint64_t size() const { return 1ull << free_pos.size(); }
};

uint64_t group_size(const AssignmentGroup& g);
/// j is 1-based; member 1 has all free bits 0 (binary counting over the
/// free slots in layout order, least significant first).
Assignment group_member(const AssignmentGroup& g, uint64_t j);
/// Inverse of group_member on the free bits (the fixed bits of a must match).
uint64_t member_index(const AssignmentGroup& g, const Assignment& a);

AssignmentGroup trivial_group();
AssignmentGroup all_free_group(std::vector<int> scope);

/// Number of fixed slots for a bag of k layout slots: ceil((1-eps)*k).
int fixed_quota(int k, double eps);

/// Per-split bookkeeping shared by tuple enumeration and group derivation:
/// part scopes, pivot-bag layout, and per-element occurrence data.
class SplitAssignContext {
 public:
  SplitAssignContext(const CnfFormula& f, const TreeDecomposition& td,
                     const SubtreeView& parent_view, const SplitResult& split);

  struct ElementInfo {
    int vertex = 0;
    bool is_var = false;
    bool in_parent = false;        // member of the parent scope
    int pivot_pos = -1;            // position in the pivot bag layout, -1 if absent
    std::vector<int> parts;        // parts whose scope contains it
    std::vector<int> old_parts;    // parts where an old splitting bag contains it
  };

  int num_parts() const { return static_cast<int>(part_scopes_.size()); }
  const std::vector<int>& parent_scope() const { return parent_scope_; }
  const std::vector<int>& part_scope(int i) const {
    return part_scopes_[static_cast<size_t>(i)];
  }
  const std::vector<int>& pivot_layout() const { return pivot_layout_; }
  const std::vector<ElementInfo>& elements() const { return elements_; }
  const ElementInfo& element(int vertex) const;
  const CnfFormula& formula() const { return *formula_; }
  int pivot() const { return pivot_; }

 private:
  const CnfFormula* formula_;
  int pivot_;
  std::vector<int> parent_scope_;
  std::vector<int> pivot_layout_;
  std::vector<std::vector<int>> part_scopes_;
  std::vector<ElementInfo> elements_;
};

/// Streams the child-assignment tuples consistent with a parent assignment,
/// optionally restricted to fixed child groups (used by the hybrid engine).
/// Free decisions are: a shared truth value per undetermined variable, and
/// the "which part claims it" choice per live clause.
class ConsistentTupleEnumerator {
 public:
  ConsistentTupleEnumerator(const SplitAssignContext& ctx,
                            const std::vector<AssignmentGroup>& child_groups,
                            const Assignment& parent);

  bool feasible() const { return feasible_; }
  /// Number of candidate tuples (product over free decisions).
  uint64_t choice_product() const;
  /// fn returns false to stop early; returns the number of tuples visited.
  uint64_t for_each(const std::function<bool(const std::vector<Assignment>&)>& fn) const;

 private:
  struct Choice {
    bool is_var = false;
    int vertex = 0;
    std::vector<int> claimable;  // parts that may claim a clause (unused for vars)
  };

  const SplitAssignContext* ctx_;
  bool feasible_ = true;
  std::vector<Assignment> base_;  // forced + group-fixed bits
  std::vector<Choice> choices_;
};

/// Direct consistency enumeration (the recursive engine's inner loop): every
/// child bit free. Returns the number of tuples visited.
uint64_t enumerate_consistent(const SplitAssignContext& ctx, const Assignment& parent,
                              const std::function<bool(const std::vector<Assignment>&)>& fn);

/// Upper bound from the consistency-counting lemma: max(2,d0)^(pivot layout).
uint64_t consistent_tuple_bound(const SplitAssignContext& ctx);

/// Enumerates the distinct fixings of the pivot bag's fixed slots and the
/// child groups each fixing induces.
class FixingEnumerator {
 public:
  FixingEnumerator(const SplitAssignContext& ctx, const AssignmentGroup& parent, double eps);

  uint64_t count() const;        // number of distinct fixings
  uint64_t lemma_bound() const;  // max(2,d0)^(#fixed slots of the pivot)
  int pivot_fixed_slots() const { return quota_; }
  std::vector<AssignmentGroup> derive(uint64_t fixing_index) const;  // 0-based

 private:
  enum class Status : uint8_t { Free, FixedInherit, FixedChoice };

  struct Slot {  // one enumerated fixing decision
    bool is_var = false;
    int vertex = 0;
    bool allow_all_zero = false;   // the d0-e0+1 pattern for parent-free clauses
    std::vector<int> fixable;      // parts whose bit the pattern pins
  };

  const SplitAssignContext* ctx_;
  const AssignmentGroup* parent_;
  int quota_ = 0;
  std::vector<Slot> slots_;
  // per (element, part): status and inherited value
  struct ElementPlan {
    int vertex = 0;
    std::vector<int8_t> status;  // per containing part: 0 free, 1 fixed (value below)
    std::vector<int8_t> value;   // inherited/pattern value; -1 when decided by a slot
    int slot = -1;               // index into slots_, -1 if none
  };
  std::vector<ElementPlan> plans_;
};

/// One fixing applied to a split: the child groups it induces, indexed among
/// all fixings in FixingEnumerator order.
std::vector<AssignmentGroup> derive_child_groups(const SplitAssignContext& ctx,
                                                 const AssignmentGroup& parent, double eps,
                                                 uint64_t fixing_index);

/// Base case of the splitting recursion: every bit-1 clause of the scope must
/// be satisfied by some variable of the view under the assignment's variable
/// bits. Requires a fully marked view.
bool base_satisfying_check(const CnfFormula& f, const TreeDecomposition& td,
                           const SubtreeView& view, const Assignment& r);

/// Rule-by-rule consistency test between a parent assignment and one child
/// assignment per part (reference semantics for tests and the hybrid join).
bool members_consistent(const SplitAssignContext& ctx, const Assignment& parent,
                        const std::vector<Assignment>& children);

}  // namespace twsat
