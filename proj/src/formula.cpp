#include "twsat/formula.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace twsat {

bool Clause::contains_var(int var) const {
  return std::any_of(literals.begin(), literals.end(),
                     [var](const Literal& l) { return l.var == var; });
}

CnfFormula::CnfFormula(int num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
  if (num_vars_ < 0) throw ParseError("negative variable count");
  for (size_t i = 0; i < clauses_.size(); ++i) {
    for (const Literal& l : clauses_[i].literals) {
      if (l.var < 1 || l.var > num_vars_)
        throw ParseError("literal out of range in clause " + std::to_string(i + 1));
    }
  }
}

Clause make_clause(const std::vector<int>& encoded_lits) {
  Clause c;
  for (int lit : encoded_lits) {
    if (lit == 0) throw ParseError("literal 0 inside clause");
    Literal l = Literal::decode(lit);
    bool dup = false;
    for (const Literal& seen : c.literals) {
      if (seen.var == l.var) {
        if (seen.positive != l.positive)
          throw ParseError("tautological clause on variable " + std::to_string(l.var));
        dup = true;  // same (var, sign) twice: drop silently
      }
    }
    if (!dup) c.literals.push_back(l);
  }
  return c;
}

CnfFormula parse_dimacs(std::istream& in) {
  std::string line;
  int num_vars = -1;
  int num_clauses = -1;

  // Header, skipping leading comments.
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] != 'p') throw ParseError("expected 'p cnf' header, got: " + line);
    std::istringstream hs(line);
    std::string p, fmt;
    hs >> p >> fmt >> num_vars >> num_clauses;
    if (!hs || p != "p" || fmt != "cnf" || num_vars < 0 || num_clauses < 0)
      throw ParseError("malformed header: " + line);
    break;
  }
  if (num_vars < 0) throw ParseError("missing 'p cnf' header");

  std::vector<Clause> clauses;
  std::vector<int> current;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == 'c') continue;
    std::istringstream ls(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        clauses.push_back(make_clause(current));
        current.clear();
      } else {
        if (lit < -num_vars || lit > num_vars)
          throw ParseError("literal " + std::to_string(lit) + " out of range [1," +
                           std::to_string(num_vars) + "]");
        current.push_back(lit);
      }
    }
    std::string tail;
    ls.clear();
    if (ls >> tail) throw ParseError("unexpected token: " + tail);
  }
  if (!current.empty()) throw ParseError("clause not terminated by 0");
  if (static_cast<int>(clauses.size()) != num_clauses)
    throw ParseError("clause count mismatch: declared " + std::to_string(num_clauses) +
                     ", found " + std::to_string(clauses.size()));
  return CnfFormula(num_vars, std::move(clauses));
}

CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

std::string emit_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const Clause& c : f.clauses()) {
    for (const Literal& l : c.literals) out << l.encoded() << ' ';
    out << "0\n";
  }
  return out.str();
}

ClauseState clause_satisfied(const Clause& c, const TruthAssignment& a) {
  bool all_assigned = true;
  for (const Literal& l : c.literals) {
    std::optional<bool> v = a.get(l.var);
    if (!v.has_value()) {
      all_assigned = false;
    } else if (*v == l.positive) {
      return ClauseState::Satisfied;
    }
  }
  return all_assigned ? ClauseState::UnsatisfiableUnder : ClauseState::Undetermined;
}

}  // namespace twsat
