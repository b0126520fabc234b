#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "biabd/pure.hpp"
#include "biabd/slcore.hpp"

namespace biabd {

// lhs * [antiframe] |> rhs * [frame]
struct BiabductionGoal {
  QFHeap lhs;
  SymbolicHeap rhs;
  SymbolicHeap antiframe;
  SymbolicHeap frame;
  PureFormula branchGuards;
  int depth = 0;

  // Antecedent-internal variables: input lhs existentials and unfolding
  // witnesses. They may appear in guards and (quantified) in the frame, never
  // in the anti-frame.
  VarSet hidden;
  // Roots of cells already subtracted from the antecedent. They are allocated
  // in every model of lhs * M, disjointly from what remains.
  std::vector<Expr> footprint;
  // Every name ever used on this branch; fresh names avoid it.
  std::set<std::string> names;

  Expr fresh(const std::string& prefix);
  void noteNames();
  bool isExistential(const Expr& e) const { return rhs.exists.count(e) > 0; }
  bool isHidden(const Expr& e) const { return hidden.count(e) > 0; }
};

using Goal = BiabductionGoal;

std::string render(const Goal& g);

struct SizeTriple {
  long long rhsBudget = 0;
  long long lhsPureBudget = 0;
  long long length = 0;
  auto operator<=>(const SizeTriple&) const = default;
  bool operator==(const SizeTriple&) const = default;
};

// Static bounds fixed once per root goal.
struct SizeBudget {
  long long predBound = 0;
  long long pureBound = 0;
  static SizeBudget forGoal(const Goal& root);
};

// rhsBudget  = points-to atoms (both sides) * (predBound+1) + predicate weight
// lhsPureBudget = variables * (pureBound+1) + (pureBound - non-trivial lhs atoms)
// length     = number of simple formulas and rhs quantifiers
SizeTriple size(const Goal& g, const SizeBudget& b);

struct TraceStep {
  std::string rule;
  Goal before;
  std::vector<Goal> after;
};

struct ProofTrace {
  std::vector<TraceStep> steps;
};

struct RuleEnv {
  SizeBudget budget;
  bool inference = true;   // abduction into the anti-frame
  bool allowFrame = true;  // lhs material may be left over in the frame
  ProofTrace* trace = nullptr;

  void record(const std::string& rule, const Goal& before, const std::vector<Goal>& after) const;
};

struct NotApplicable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Facts about allocated cells in every model of lhs * M: consumed roots,
// guarded lhs roots and anti-frame roots are non-null and pairwise distinct.
PureFormula allocation_facts(const Goal& g);
// lhs pure + anti-frame pure + allocation facts
PureContext augmented_context(const Goal& g);
// Roots known to be allocated (see allocation_facts).
std::vector<Expr> allocated_roots(const Goal& g);

bool guard_present(const SpatialAtom& a, const PureFormula& pi);

// Applies a substitution to lhs, rhs body, footprint.
void subst_goal(Goal& g, const Subst& m);

}  // namespace biabd
