#include <doctest.h>

#include <random>
#include <sstream>

#include "test_util.hpp"
#include "twsat/formula.hpp"

using namespace twsat;

TEST_CASE("parse_dimacs smallest instance") {
  CnfFormula f = parse_dimacs(std::string("p cnf 1 1\n1 0"));
  CHECK(f.num_vars() == 1);
  CHECK(f.num_clauses() == 1);
  CHECK(f.size() == 2);
  REQUIRE(f.clause(1).literals.size() == 1);
  CHECK(f.clause(1).literals[0] == Literal{1, true});
}

TEST_CASE("parse_dimacs two clauses") {
  CnfFormula f = parse_dimacs(std::string("p cnf 2 2\n1 2 0\n-1 0"));
  CHECK(f.num_vars() == 2);
  CHECK(f.num_clauses() == 2);
  CHECK(f.clause(1).literals.size() == 2);
  CHECK(f.clause(2).literals[0] == Literal{1, false});
}

TEST_CASE("parse_dimacs phi1") {
  CnfFormula f =
      parse_dimacs(std::string("p cnf 6 7\n1 2 4 6 0\n-1 3 5 0\n-2 0\n-3 0\n-4 0\n-5 0\n-6 0"));
  CHECK(f.num_vars() == 6);
  CHECK(f.num_clauses() == 7);
  CHECK(f == test::make_phi(1).formula);
}

TEST_CASE("parse_dimacs error paths") {
  CHECK_THROWS_AS(parse_dimacs(std::string("p dnf 1 1\n1 0")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("1 0")), ParseError);
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 1 1\n2 0")), ParseError);       // out of range
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 2 2\n1 0")), ParseError);       // count mismatch
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 1 1\n1 -1 0")), ParseError);    // tautology
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 1 1\n1")), ParseError);         // unterminated
  CHECK_THROWS_AS(parse_dimacs(std::string("p cnf 1 1\nx 0")), ParseError);       // junk token
}

TEST_CASE("duplicate literals dropped, duplicate clauses kept, empty clause ok") {
  CnfFormula f = parse_dimacs(std::string("p cnf 2 3\n1 1 2 0\n1 2 0\n0"));
  CHECK(f.clause(1).literals.size() == 2);
  CHECK(f.clause(1) == f.clause(2));
  CHECK(f.clause(3).empty());
}

TEST_CASE("emit_dimacs exact bytes and round trips") {
  CnfFormula f(1, {make_clause({1})});
  CHECK(emit_dimacs(f) == "p cnf 1 1\n1 0\n");

  CnfFormula phi1 = test::make_phi(1).formula;
  CHECK(parse_dimacs(emit_dimacs(phi1)) == phi1);
}

TEST_CASE("fuzzed dimacs round trip is canonical") {
  std::mt19937_64 rng(20240817);
  for (int iter = 0; iter < 200; ++iter) {
    int n = 1 + static_cast<int>(rng() % 8);
    int m = static_cast<int>(rng() % 10);
    std::ostringstream text;
    if (rng() % 2) text << "c fuzz header comment\n";
    text << "p cnf " << n << ' ' << m << "\n";
    for (int j = 0; j < m; ++j) {
      int len = static_cast<int>(rng() % 4);
      std::vector<int> vars(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) vars[static_cast<size_t>(i)] = i + 1;
      bool at_line_start = true;
      for (int i = 0; i < len && i < n; ++i) {
        std::swap(vars[static_cast<size_t>(i)],
                  vars[static_cast<size_t>(i) + rng() % (static_cast<size_t>(n - i))]);
        int v = vars[static_cast<size_t>(i)];
        bool newline = rng() % 4 == 0;
        text << (rng() % 2 ? v : -v) << (newline ? "\n" : " ");
        at_line_start = newline;
      }
      if (rng() % 3 == 0) {
        if (!at_line_start) text << "\n";
        text << "c interleaved\n";
      }
      text << "0\n";
    }
    CnfFormula f1 = parse_dimacs(text.str());
    CnfFormula f2 = parse_dimacs(emit_dimacs(f1));
    CHECK(f1 == f2);
  }
}

TEST_CASE("clause_satisfied tri-state") {
  Clause c = make_clause({1, 2});
  TruthAssignment a(2);
  CHECK(clause_satisfied(c, a) == ClauseState::Undetermined);
  a.set(1, true);
  CHECK(clause_satisfied(c, a) == ClauseState::Satisfied);
  a.set(1, false);
  a.set(2, false);
  CHECK(clause_satisfied(c, a) == ClauseState::UnsatisfiableUnder);

  // C1 of the warm-up example under x2=x4=x6=0: x1 still free
  Clause c1 = make_clause({1, 2, 4, 6});
  TruthAssignment b(6);
  b.set(2, false);
  b.set(4, false);
  b.set(6, false);
  CHECK(clause_satisfied(c1, b) == ClauseState::Undetermined);
}

TEST_CASE("clause_satisfied is monotone under extension") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    int n = 1 + static_cast<int>(rng() % 6);
    std::vector<int> lits;
    for (int v = 1; v <= n; ++v) {
      int r = static_cast<int>(rng() % 3);
      if (r == 1) lits.push_back(v);
      if (r == 2) lits.push_back(-v);
    }
    if (lits.empty()) lits.push_back(1);
    Clause c = make_clause(lits);
    TruthAssignment a(n);
    ClauseState prev = clause_satisfied(c, a);
    for (int v = 1; v <= n; ++v) {
      a.set(v, rng() % 2 == 0);
      ClauseState cur = clause_satisfied(c, a);
      if (prev == ClauseState::Satisfied) CHECK(cur == ClauseState::Satisfied);
      prev = cur;
    }
  }
}

TEST_CASE("empty clause is never satisfiable") {
  Clause c = make_clause({});
  TruthAssignment a(3);
  CHECK(clause_satisfied(c, a) == ClauseState::UnsatisfiableUnder);
}
