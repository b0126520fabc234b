#pragma once

#include <utility>
#include <vector>

#include "biabd/goal.hpp"

namespace biabd {

// Rewrites until every lhs is in normal form. Returns the frontier of the
// case-split tree; branches whose antecedent is unsatisfiable are dropped.
std::vector<Goal> normalize(const Goal& g, const RuleEnv& env);

// Single rule applications; each throws NotApplicable when it does not fire.
Goal apply_subst(const Goal& g);
Goal apply_lident(const Goal& g);
Goal apply_lbase(const Goal& g);
Goal apply_node_ex(const Goal& g);
Goal apply_nodes_ex(const Goal& g);
// Returns (equal branch, disequal branch).
std::pair<Goal, Goal> apply_exclude_middle(const Goal& g, const Expr& e1, const Expr& e2);

// Equality elimination shared with the other phases: removes `eq` from the
// lhs and substitutes one side for the other everywhere.
Goal eliminate_equality(const Goal& g, const PureAtom& eq);

// Antecedent and anti-frame are jointly satisfiable, including allocation facts.
bool branch_feasible(const Goal& g);

}  // namespace biabd
