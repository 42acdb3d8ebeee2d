#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twsat {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A signed occurrence of a variable. Variables are 1-based.
struct Literal {
  int var = 0;
  bool positive = true;

  int encoded() const { return positive ? var : -var; }
  static Literal decode(int lit) { return Literal{lit < 0 ? -lit : lit, lit > 0}; }
  bool operator==(const Literal&) const = default;
};

/// Disjunction of literals. Duplicate (var, sign) pairs are removed on
/// construction; input order of the surviving literals is preserved.
struct Clause {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }
  bool contains_var(int var) const;
  bool operator==(const Clause&) const = default;
};

class CnfFormula {
 public:
  CnfFormula() = default;
  CnfFormula(int num_vars, std::vector<Clause> clauses);

  int num_vars() const { return num_vars_; }
  int num_clauses() const { return static_cast<int>(clauses_.size()); }
  /// |phi| = m + n.
  int size() const { return num_vars_ + num_clauses(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(int i) const { return clauses_[static_cast<size_t>(i - 1)]; }  // 1-based

  bool operator==(const CnfFormula&) const = default;

 private:
  int num_vars_ = 0;
  std::vector<Clause> clauses_;
};

enum class ClauseState { Satisfied, UnsatisfiableUnder, Undetermined };

/// Partial map variable -> {0,1} over 1..n.
class TruthAssignment {
 public:
  TruthAssignment() = default;
  explicit TruthAssignment(int num_vars) : val_(static_cast<size_t>(num_vars) + 1, -1) {}

  int num_vars() const { return static_cast<int>(val_.size()) - 1; }
  void set(int var, bool value) { val_.at(static_cast<size_t>(var)) = value ? 1 : 0; }
  void unset(int var) { val_.at(static_cast<size_t>(var)) = -1; }
  std::optional<bool> get(int var) const {
    int8_t v = val_.at(static_cast<size_t>(var));
    if (v < 0) return std::nullopt;
    return v != 0;
  }

 private:
  std::vector<int8_t> val_;
};

/// Normalizes a literal list: drops duplicates, rejects tautologies.
/// Throws ParseError on x and -x in the same clause.
Clause make_clause(const std::vector<int>& encoded_lits);

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(const std::string& text);
std::string emit_dimacs(const CnfFormula& f);

ClauseState clause_satisfied(const Clause& c, const TruthAssignment& a);

}  // namespace twsat
