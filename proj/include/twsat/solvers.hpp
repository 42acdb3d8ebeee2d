#pragma once

#include <cstdint>
#include <optional>

#include "twsat/assignment.hpp"
#include "twsat/decomp.hpp"
#include "twsat/formula.hpp"
#include "twsat/oracle.hpp"
#include "twsat/params.hpp"
#include "twsat/splitting.hpp"

namespace twsat {

enum class Engine { Dp, Recursive, Hybrid };
enum class SplitterKind { Path, H2, Hc, Optimal };

struct SolverConfig {
  Engine engine = Engine::Dp;
  std::optional<TradeoffParams> params;  // required for the hybrid engine
  SplitterKind splitter = SplitterKind::Hc;
};

struct SolveStats {
  uint64_t work_units = 0;        // consistency evaluations of tuples/fixings;
                                  // DP counts child-pair combination checks
  uint64_t peak_entries = 0;      // stored table bits / DP states plus live
                                  // assignment bits, maximum over the run
  int max_type_seen = 0;          // largest |S| of any processed view
  int measured_splitting_depth = 0;
  double wall_ms = 0.0;
  uint64_t counting_violations = 0;      // lemma-bound violations (must stay 0)
  uint64_t peak_assignment_frames = 0;   // live tuple frames, recursive/hybrid
};

struct SolveResult {
  Verdict verdict = Verdict::Unsat;
  SolveStats stats;
};

/// Bottom-up table filling over the rooted bag tree. Clause bits mean
/// "satisfied by the assignment chosen at or below this bag"; a clause must
/// carry bit 1 when its topmost bag is merged away.
SolveResult dp_solve(const CnfFormula& f, const TreeDecomposition& td, int root_bag = 1);

/// Algorithm: split at a half-splitting node, stream the consistent child
/// tuples, recurse. Stores one assignment tuple per recursion frame.
SolveResult recursive_solve(const CnfFormula& f, const TreeDecomposition& td);

SolveResult hybrid_solve(const CnfFormula& f, const TreeDecomposition& td,
                         const TradeoffParams& params, SplitterKind splitter);

/// Dispatch on a SolverConfig, enforcing its invariants (hybrid requires
/// params, the path splitter a path decomposition, H2 exactly c = 2).
SolveResult solve(const CnfFormula& f, const TreeDecomposition& td, const SolverConfig& config);

// Splitting strategies (exposed for tests and tree-only depth simulation).
int splitter_path(const SubtreeView& view);
int splitter_h2(const SubtreeView& view);
int splitter_hc(const SubtreeView& view, const Schedule& sched);
int splitter_optimal(const SubtreeView& view, int c);

/// SplitterFn adapter for a configured kind; sched may be null unless Hc.
SplitterFn make_splitter(SplitterKind kind, const Schedule* sched, int c);

}  // namespace twsat
