#pragma once

#include <vector>

#include "biabd/goal.hpp"
#include "biabd/subtract.hpp"

namespace biabd {

// Applicable inference rule instances, most precise first. The search keeps
// the first alternative whose subtree closes. Empty when nothing applies.
std::vector<RuleResult> infer_step(const Goal& g, const RuleEnv& env);

// Some model exists: every undetermined predicate is tried empty and
// non-empty; allocated roots must be non-null and pairwise distinct.
bool heap_satisfiable(const QFHeap& d);

// lhs * anti-frame * consumed cells, as a heap for satisfiability checks.
QFHeap antecedent_view(const Goal& g);

}  // namespace biabd
