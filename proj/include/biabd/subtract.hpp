#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biabd/goal.hpp"

namespace biabd {

struct RuleResult {
  std::string rule;
  std::vector<Goal> goals;
  bool closed = false;  // the goal is a finished branch (EMP, IDENT, INF-PURE)
};

// EMP / IDENT. On success the returned goal is closed: its antiframe and frame
// are the branch's final answer.
std::optional<RuleResult> try_axioms(const Goal& g);

// First applicable subtraction rule by priority.
std::optional<RuleResult> subtract_step(const Goal& g, const RuleEnv& env);

// An existential binding that makes another subtraction rule applicable.
std::optional<std::pair<Expr, Expr>> find_rex_instance(const Goal& g);

// Points-to `rhs` is implied by `lhs` (same root, rhs fields a subset).
bool record_covers(const SpatialAtom& lhs, const SpatialAtom& rhs);

// E is null or the root of a cell allocated apart from `except`.
bool allocated_elsewhere(const Goal& g, const Expr& e, const SpatialAtom* except);

}  // namespace biabd
