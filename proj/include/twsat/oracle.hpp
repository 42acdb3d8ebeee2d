#pragma once

#include <cstdint>
#include <utility>

#include "twsat/decomp.hpp"
#include "twsat/formula.hpp"

namespace twsat {

enum class Verdict { Sat, Unsat };

/// Exhaustive 2^n check; guarded to n <= 24.
Verdict brute_force_sat(const CnfFormula& f);

struct GeneratorSpec {
  int target_width = 2;  // >= 1
  bool tree_shape = false;
  int num_vars = 6;
  int num_clauses = 5;
  int max_clause_len = 3;
  uint64_t seed = 0;
};

struct GeneratedInstance {
  CnfFormula formula;
  TreeDecomposition decomp;
};

/// Window-based instance generator: clauses draw their variables from a
/// sliding window (path shape) or a subtree-local window (tree shape), so
/// the emitted decomposition is valid with width <= target_width by
/// construction. Deterministic per seed.
GeneratedInstance gen_bounded_width(const GeneratorSpec& spec);

}  // namespace twsat
