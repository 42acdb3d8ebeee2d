#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "twsat/assignment.hpp"
#include "twsat/oracle.hpp"

using namespace twsat;

namespace {

// n=2; C1 = (x1 | x2) is vertex 3, C2 = (-x1) is vertex 4.
// Path bags B1{1,3} - B2{1,2,3} - B3{1,4}.
struct Chain3 {
  CnfFormula f{2, {make_clause({1, 2}), make_clause({-1})}};
  TreeDecomposition td;
  TreeTopology topo;

  Chain3() {
    td.num_vertices = 4;
    td.bags = {{1, 3}, {1, 2, 3}, {1, 4}};
    td.edges = {{1, 2}, {2, 3}};
    REQUIRE(validate(td, f).ok);
    topo = topology_of(td);
  }
};

std::string serialize(const std::vector<Assignment>& tuple) {
  std::ostringstream s;
  for (const Assignment& a : tuple) {
    for (size_t i = 0; i < a.scope.size(); ++i) s << a.scope[i] << ':' << int(a.bits[i]) << ' ';
    s << '|';
  }
  return s.str();
}

}  // namespace

TEST_CASE("view_scope unions splitting bags with one bit per node") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  view.smarks = {1, 2};
  CHECK(view_scope(fx.td, view) == std::vector<int>{1, 2, 3});  // vertex 1 shared, one entry
  view.smarks = {};
  CHECK(view_scope(fx.td, view).empty());
}

TEST_CASE("group size and member indexing") {
  AssignmentGroup g;
  g.scope = {1, 2, 3, 4, 5, 6, 7};  // 4 vars + 3 clauses (n = 4)
  g.fixed = {1, 0, 0, 1, 0, 1, 1};
  g.value = {1, 0, 0, 1, 0, 0, 1};  // x1=1, x4=1, C2=0, C3=1 fixed
  for (size_t i = 0; i < g.scope.size(); ++i)
    if (!g.fixed[i]) g.free_pos.push_back(static_cast<int>(i));
  CHECK(group_size(g) == 8);  // x2, x3, C1 free

  Assignment first = group_member(g, 1);
  CHECK(first.bits == std::vector<uint8_t>{1, 0, 0, 1, 0, 0, 1});
  for (uint64_t j = 1; j <= 8; ++j) {
    Assignment a = group_member(g, j);
    CHECK(member_index(g, a) == j);
    CHECK(a.bit(1));
    CHECK(a.bit(4));
    CHECK_FALSE(a.bit(6));
    CHECK(a.bit(7));
  }
  CHECK_THROWS_AS(group_member(g, 0), std::out_of_range);
  CHECK_THROWS_AS(group_member(g, 9), std::out_of_range);

  AssignmentGroup t = trivial_group();
  CHECK(group_size(t) == 1);
  CHECK(group_member(t, 1).scope.empty());
}

TEST_CASE("fixed_quota") {
  CHECK(fixed_quota(4, 1.0) == 0);
  CHECK(fixed_quota(4, 1e-9) == 4);
  CHECK(fixed_quota(3, 0.5) == 2);   // ceil(1.5)
  CHECK(fixed_quota(4, 0.25) == 3);  // ceil(3.0)
  CHECK(fixed_quota(10, 0.1) == 9);
  CHECK(fixed_quota(0, 0.5) == 0);
}

TEST_CASE("enumerate_consistent on a fresh split: free choices multiply") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);
  REQUIRE(ctx.num_parts() == 2);
  CHECK(ctx.part_scope(0) == std::vector<int>{1, 2, 3});
  CHECK(ctx.part_scope(1) == std::vector<int>{1, 2, 3});

  Assignment parent = make_assignment({});  // S was empty
  std::set<std::string> seen;
  uint64_t count = enumerate_consistent(ctx, parent, [&](const std::vector<Assignment>& tuple) {
    CHECK(members_consistent(ctx, parent, tuple));
    seen.insert(serialize(tuple));
    // shared variables agree across parts
    CHECK(tuple[0].bit(1) == tuple[1].bit(1));
    CHECK(tuple[0].bit(2) == tuple[1].bit(2));
    // exactly one part claims the new clause C1
    CHECK((tuple[0].bit(3) ^ tuple[1].bit(3)));
    return true;
  });
  CHECK(count == 8);  // 2 vars * 2 values, clause claimed by one of 2 parts
  CHECK(seen.size() == 8);
  CHECK(count <= consistent_tuple_bound(ctx));
}

TEST_CASE("enumerate_consistent: parent clause bits force children") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  view.smarks = {2};
  SplitResult split = split_at(view, 2);  // marked internal re-split
  SplitAssignContext ctx(fx.f, fx.td, view, split);

  Assignment parent = make_assignment({1, 2, 3});
  parent.set(1, true);
  parent.set(2, false);

  SUBCASE("bit 0 propagates 0 to both parts") {
    parent.set(3, false);
    uint64_t count = enumerate_consistent(ctx, parent, [&](const std::vector<Assignment>& t) {
      CHECK_FALSE(t[0].bit(3));
      CHECK_FALSE(t[1].bit(3));
      CHECK(t[0].bit(1));
      CHECK_FALSE(t[0].bit(2));
      return true;
    });
    CHECK(count == 1);
  }
  SUBCASE("bit 1 is claimed by exactly one of the two parts") {
    parent.set(3, true);
    uint64_t count = enumerate_consistent(ctx, parent, [&](const std::vector<Assignment>& t) {
      CHECK((t[0].bit(3) ^ t[1].bit(3)));
      return true;
    });
    CHECK(count == 2);
  }
}

TEST_CASE("yielded tuples are consistent; corrupted tuples are rejected") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);
  Assignment parent = make_assignment({});
  enumerate_consistent(ctx, parent, [&](const std::vector<Assignment>& tuple) {
    std::vector<Assignment> bad = tuple;
    bad[0].set(3, true);
    bad[1].set(3, true);  // two claims
    CHECK_FALSE(members_consistent(ctx, parent, bad));
    std::vector<Assignment> flip = tuple;
    flip[0].set(1, !flip[0].bit(1));  // variable disagreement across parts
    CHECK_FALSE(members_consistent(ctx, parent, flip));
    return false;
  });
}

TEST_CASE("fixings: limit cases") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);
  AssignmentGroup parent = trivial_group();

  SUBCASE("eps = 1: nothing fixed, single fixing, full child spaces") {
    FixingEnumerator fe(ctx, parent, 1.0);
    CHECK(fe.count() == 1);
    CHECK(fe.pivot_fixed_slots() == 0);
    auto groups = fe.derive(0);
    REQUIRE(groups.size() == 2);
    CHECK(group_size(groups[0]) == 8);  // all of {1,2,3} free
    CHECK(group_size(groups[1]) == 8);
  }
  SUBCASE("eps -> 0: fixings enumerate the consistent pivot assignments") {
    FixingEnumerator fe(ctx, parent, 1e-9);
    CHECK(fe.pivot_fixed_slots() == 3);
    CHECK(fe.count() == 8);  // matches enumerate_consistent on the same split
    CHECK(fe.count() <= fe.lemma_bound());
    for (uint64_t i = 0; i < fe.count(); ++i) {
      for (const AssignmentGroup& g : fe.derive(i)) CHECK(group_size(g) == 1);
    }
  }
}

TEST_CASE("fixings: parent-fixed bit-1 clause in the pivot prefix has d0 claim choices") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  view.smarks = {2};
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);

  AssignmentGroup parent;
  parent.scope = {1, 2, 3};
  parent.fixed = {1, 1, 1};
  parent.value = {1, 0, 1};  // x1=1, x2=0, C1=1
  FixingEnumerator fe(ctx, parent, 1e-9);  // prefix covers the whole pivot bag
  CHECK(fe.count() == 2);                  // which part claims C1
  std::set<std::pair<bool, bool>> patterns;
  for (uint64_t i = 0; i < fe.count(); ++i) {
    auto groups = fe.derive(i);
    patterns.insert({group_member(groups[0], 1).bit(3), group_member(groups[1], 1).bit(3)});
    CHECK(group_member(groups[0], 1).bit(1));  // inherited variable value
  }
  CHECK(patterns == std::set<std::pair<bool, bool>>{{false, true}, {true, false}});
}

TEST_CASE("fixings: parent-free clause pinned only where the pivot is its sole witness") {
  // n=1, one unit clause x1 (vertex 2) appearing in every bag of a 3-path
  CnfFormula f(1, {make_clause({1})});
  TreeDecomposition td;
  td.num_vertices = 2;
  td.bags = {{1, 2}, {1, 2}, {1, 2}};
  td.edges = {{1, 2}, {2, 3}};
  REQUIRE(validate(td, f).ok);
  TreeTopology topo = topology_of(td);

  SubtreeView view = full_view(topo);
  view.smarks = {1};
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(f, td, view, split);

  AssignmentGroup parent;
  parent.scope = {1, 2};
  parent.fixed = {1, 0};  // x1 fixed, the clause bit free
  parent.value = {1, 0};
  parent.free_pos = {1};

  FixingEnumerator fe(ctx, parent, 1e-9);
  // part containing bag 1 sees the clause through an old splitting node and
  // stays free there; the other part gets the all-zero-or-claim pattern
  CHECK(fe.count() == 2);  // d0 - e0 + 1 with d0 = 2, e0 = 1
  for (uint64_t i = 0; i < fe.count(); ++i) {
    auto groups = fe.derive(i);
    for (size_t pi = 0; pi < groups.size(); ++pi) {
      const auto& g = groups[pi];
      bool has_old = split.parts[pi].contains(1);
      CHECK((g.fixed[1] == 0) == has_old);  // clause vertex 2 at scope position 1
    }
  }
}

TEST_CASE("group-level enumeration covers exactly the consistent tuples") {
  Chain3 fx;
  for (double eps : {0.3, 0.6, 0.999}) {
    for (bool marked : {false, true}) {
      SubtreeView view = full_view(fx.topo);
      if (marked) view.smarks = {1};
      SplitResult split = split_at(view, 2);
      SplitAssignContext ctx(fx.f, fx.td, view, split);

      AssignmentGroup parent_group = all_free_group(view_scope(fx.td, view));
      for (uint64_t j = 1; j <= group_size(parent_group); ++j) {
        Assignment r = group_member(parent_group, j);
        std::multiset<std::string> direct;
        enumerate_consistent(ctx, r, [&](const std::vector<Assignment>& t) {
          direct.insert(serialize(t));
          return true;
        });
        std::multiset<std::string> via_groups;
        FixingEnumerator fe(ctx, parent_group, eps);
        CHECK(fe.count() <= fe.lemma_bound());
        for (uint64_t fi = 0; fi < fe.count(); ++fi) {
          auto groups = fe.derive(fi);
          ConsistentTupleEnumerator en(ctx, groups, r);
          en.for_each([&](const std::vector<Assignment>& t) {
            via_groups.insert(serialize(t));
            CHECK(members_consistent(ctx, r, t));
            // tuples must extend the groups' pinned bits
            for (size_t i = 0; i < t.size(); ++i) {
              for (size_t s = 0; s < groups[i].scope.size(); ++s) {
                if (groups[i].fixed[s]) CHECK(t[i].bits[s] == groups[i].value[s]);
              }
            }
            return true;
          });
        }
        CHECK(direct == via_groups);
      }
    }
  }
}

TEST_CASE("derive_child_groups matches the enumerator") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);
  AssignmentGroup parent = trivial_group();
  FixingEnumerator fe(ctx, parent, 0.5);
  for (uint64_t i = 0; i < fe.count(); ++i) {
    auto a = fe.derive(i);
    auto b = derive_child_groups(ctx, parent, 0.5, i);
    REQUIRE(a.size() == b.size());
    for (size_t p = 0; p < a.size(); ++p) {
      CHECK(a[p].scope == b[p].scope);
      CHECK(a[p].fixed == b[p].fixed);
      CHECK(a[p].value == b[p].value);
    }
  }
  CHECK_THROWS_AS(derive_child_groups(ctx, parent, 0.5, fe.count()), std::out_of_range);
}

TEST_CASE("base_satisfying_check") {
  CnfFormula f(1, {make_clause({1})});
  TreeDecomposition td;
  td.num_vertices = 2;
  td.bags = {{1, 2}};
  REQUIRE(validate(td, f).ok);
  TreeTopology topo = topology_of(td);
  SubtreeView view = full_view(topo);
  view.smarks = {1};

  Assignment r = make_assignment({1, 2});
  r.set(1, true);
  r.set(2, true);
  CHECK(base_satisfying_check(f, td, view, r));
  r.set(1, false);
  CHECK_FALSE(base_satisfying_check(f, td, view, r));
  r.set(2, false);
  CHECK(base_satisfying_check(f, td, view, r));  // bit 0: no obligation

  SubtreeView unmarked = full_view(topo);
  CHECK_THROWS_AS(base_satisfying_check(f, td, unmarked, r), std::invalid_argument);
}

TEST_CASE("recursion soundness: splitting recursion equals direct enumeration") {
  std::mt19937_64 rng(60902);
  int done = 0;
  for (uint64_t seed = 0; done < 40; ++seed) {
    GeneratorSpec spec;
    spec.target_width = 1 + static_cast<int>(rng() % 4);
    spec.tree_shape = rng() % 2 == 0;
    spec.num_vars = 3 + static_cast<int>(rng() % 6);
    spec.num_clauses = 2 + static_cast<int>(rng() % 6);
    spec.max_clause_len = std::min(3, spec.target_width);
    spec.seed = seed;
    GeneratedInstance inst = gen_bounded_width(spec);
    if (inst.decomp.num_bags() > 10) continue;
    TreeTopology topo = topology_of(inst.decomp);

    // random descent to a marked view
    SubtreeView view = full_view(topo);
    int hops = static_cast<int>(rng() % 3);
    for (int k = 0; k < hops; ++k) {
      std::vector<int> cands;
      for (int v : view.nodes)
        if (!(view.marked(v) && view.degree_in(v) <= 1)) cands.push_back(v);
      if (cands.empty()) break;
      SplitResult sr = split_at(view, cands[rng() % cands.size()]);
      view = sr.parts[rng() % sr.parts.size()];
    }
    Assignment r = make_assignment(view_scope(inst.decomp, view));
    for (size_t i = 0; i < r.bits.size(); ++i) r.bits[i] = rng() % 2;

    bool direct = test::def_satisfiable(inst.formula, inst.decomp, view, r);
    bool recursive = test::rec_satisfiable(inst.formula, inst.decomp, view, r);
    CHECK(direct == recursive);
    ++done;
  }
}

TEST_CASE("group cover equality holds for arbitrary parent fixed patterns") {
  std::mt19937_64 rng(20260810);
  int done = 0;
  for (uint64_t seed = 0; done < 150; ++seed) {
    GeneratorSpec spec;
    spec.target_width = 1 + static_cast<int>(rng() % 4);
    spec.tree_shape = rng() % 2 == 0;
    spec.num_vars = 3 + static_cast<int>(rng() % 5);
    spec.num_clauses = 2 + static_cast<int>(rng() % 5);
    spec.max_clause_len = std::min(3, spec.target_width);
    spec.seed = 90000 + seed;
    GeneratedInstance inst = gen_bounded_width(spec);
    TreeTopology topo = topology_of(inst.decomp);

    SubtreeView view = full_view(topo);
    for (int k = static_cast<int>(rng() % 3); k > 0; --k) {
      std::vector<int> cands;
      for (int v : view.nodes)
        if (!(view.marked(v) && view.degree_in(v) <= 1)) cands.push_back(v);
      if (cands.empty()) break;
      SplitResult sr = split_at(view, cands[rng() % cands.size()]);
      view = sr.parts[rng() % sr.parts.size()];
    }
    if (view.all_marked()) continue;
    std::vector<int> cands;
    for (int v : view.nodes)
      if (!(view.marked(v) && view.degree_in(v) <= 1)) cands.push_back(v);
    SplitResult split = split_at(view, cands[rng() % cands.size()]);
    SplitAssignContext ctx(inst.formula, inst.decomp, view, split);

    AssignmentGroup parent;
    parent.scope = view_scope(inst.decomp, view);
    parent.fixed.assign(parent.scope.size(), 0);
    parent.value.assign(parent.scope.size(), 0);
    for (size_t s = 0; s < parent.scope.size(); ++s) {
      if (rng() % 2) {
        parent.fixed[s] = 1;
        parent.value[s] = rng() % 2;
      } else {
        parent.free_pos.push_back(static_cast<int>(s));
      }
    }
    if (parent.free_pos.size() > 8) continue;
    ++done;

    double eps = 0.05 + 0.9 * ((rng() % 100) / 100.0);
    FixingEnumerator fe(ctx, parent, eps);
    CHECK(fe.count() <= fe.lemma_bound());
    uint64_t pick = 1 + rng() % group_size(parent);  // one member per view keeps this fast
    Assignment r = group_member(parent, pick);
    std::multiset<std::string> direct;
    enumerate_consistent(ctx, r, [&](const std::vector<Assignment>& t) {
      direct.insert(serialize(t));
      return true;
    });
    std::multiset<std::string> via;
    for (uint64_t fi = 0; fi < fe.count(); ++fi) {
      ConsistentTupleEnumerator en(ctx, fe.derive(fi), r);
      en.for_each([&](const std::vector<Assignment>& t) {
        via.insert(serialize(t));
        return true;
      });
    }
    CHECK(direct == via);
  }
}

TEST_CASE("consistent tuple unions give conflict-free variable bits") {
  Chain3 fx;
  SubtreeView view = full_view(fx.topo);
  SplitResult split = split_at(view, 2);
  SplitAssignContext ctx(fx.f, fx.td, view, split);
  Assignment parent = make_assignment({});
  enumerate_consistent(ctx, parent, [&](const std::vector<Assignment>& tuple) {
    std::map<int, bool> merged;
    for (const Assignment& a : tuple) {
      for (size_t i = 0; i < a.scope.size(); ++i) {
        if (a.scope[i] > fx.f.num_vars()) continue;
        auto [it, fresh] = merged.emplace(a.scope[i], a.bits[i] != 0);
        if (!fresh) CHECK(it->second == (a.bits[i] != 0));
      }
    }
    return true;
  });
}
