#pragma once

#include <string>
#include <vector>

#include "biabd/goal.hpp"

namespace biabd {

struct SearchConfig {
  long long timeoutMillis = 30000;
  int maxDepth = 64;
  bool inferenceEnabled = true;
  bool allSolutions = false;
  bool recordTrace = true;
  bool validate = true;
  bool allowFrame = true;
};

// Reads BIABD_TIMEOUT_MS when set.
SearchConfig default_config();

struct Solution {
  SymbolicHeap antiframe;
  SymbolicHeap frame;
  PureFormula guards;
  bool validated = false;
};

enum class Status { Solved, NoSolution, Timeout };
const char* status_name(Status s);

struct SolveResult {
  Status status = Status::NoSolution;
  std::vector<Solution> solutions;
  ProofTrace trace;
  // Normalized antecedents handed to the subtraction phase (when tracing).
  std::vector<QFHeap> normalForms;
  bool partial = false;     // some branch failed or did not validate
  int failedBranches = 0;
  int closedBranches = 0;
  int deepestPhase = 0;
  double solveMillis = 0;
  double validateMillis = 0;
};

// Skolemizes lhs existentials and renames rhs existentials apart.
Goal make_goal(const SymbolicHeap& lhs, const SymbolicHeap& rhs);

SolveResult solve(const SymbolicHeap& lhs, const SymbolicHeap& rhs, const SearchConfig& cfg = default_config());

// lhs |= rhs * F for some frame F, without abduction.
bool prove(const SymbolicHeap& lhs, const SymbolicHeap& rhs, const SearchConfig& cfg = default_config());

// lhs * M under the guards proves rhs * F exactly; sets sol.validated.
bool validate(const SymbolicHeap& lhs, const SymbolicHeap& rhs, Solution& sol,
              const SearchConfig& cfg = default_config());

// The validation query for a solution: (lhs * M & guards, rhs * F).
std::pair<SymbolicHeap, SymbolicHeap> validation_query(const SymbolicHeap& lhs, const SymbolicHeap& rhs,
                                                       const Solution& sol);

struct SearchTimeout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace biabd
