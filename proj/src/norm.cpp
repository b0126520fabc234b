#include "biabd/norm.hpp"

#include <optional>

namespace biabd {

namespace {

// The pair whose (dis)equality decides emptiness of a predicate.
std::pair<Expr, Expr> discriminator(const SpatialAtom& a) {
  return {a.root(), a.end()};
}

bool lhsHas(const Goal& g, const PureAtom& a) { return g.lhs.pure.count(a) > 0; }

std::vector<const SpatialAtom*> guardedAtoms(const Goal& g) {
  std::vector<const SpatialAtom*> out;
  for (auto& a : g.lhs.spatial)
    if (guard_present(a, g.lhs.pure)) out.push_back(&a);
  return out;
}

}  // namespace

bool branch_feasible(const Goal& g) { return augmented_context(g).consistent(); }

Goal eliminate_equality(const Goal& g, const PureAtom& eq) {
  Goal r = g;
  r.lhs.pure.erase(eq);
  Expr victim = eq.lhs, repl = eq.rhs;
  if (victim.isConst()) std::swap(victim, repl);
  if (victim.isConst()) return r;  // two constants: nothing to substitute
  if (!repl.isConst() && !g.isHidden(victim) && g.isHidden(repl)) std::swap(victim, repl);

  Subst m{{victim, repl}};
  subst_goal(r, m);
  r.antiframe.body = subst(r.antiframe.body, m);
  r.frame.body = subst(r.frame.body, m);
  if (!g.isHidden(victim) && !g.isHidden(repl)) {
    r.antiframe.body.pure.insert(PureAtom::eq(victim, repl));
    r.frame.body.pure.insert(PureAtom::eq(victim, repl));
  }
  // an eliminated witness stays hidden so guards over it are projected away
  r.branchGuards.insert(PureAtom::eq(victim, repl));
  return r;
}

Goal apply_subst(const Goal& g) {
  for (auto& a : g.lhs.pure)
    if (a.rel == Rel::Eq && !a.trivial()) return eliminate_equality(g, a);
  throw NotApplicable("SUBST");
}

Goal apply_lident(const Goal& g) {
  for (auto& a : g.lhs.pure)
    if (a.trivial()) {
      Goal r = g;
      r.lhs.pure.erase(a);
      return r;
    }
  throw NotApplicable("LIDENT=");
}

Goal apply_lbase(const Goal& g) {
  for (auto& a : g.lhs.spatial) {
    if (!a.isPred()) continue;
    auto [root, end] = discriminator(a);
    if (!PureAtom::eq(root, end).trivial()) continue;
    Goal r = g;
    r.lhs.remove(a);
    if (a.hasValues()) {
      PureAtom e = PureAtom::eq(a.args[1], a.args[2]);
      if (!e.trivial()) r.lhs.pure.insert(e);
    }
    return r;
  }
  throw NotApplicable("LBASE");
}

Goal apply_node_ex(const Goal& g) {
  for (auto* a : guardedAtoms(g)) {
    PureAtom nn = PureAtom::neq(a->root(), Expr::null());
    if (!lhsHas(g, nn)) {
      Goal r = g;
      r.lhs.pure.insert(nn);
      return r;
    }
  }
  throw NotApplicable("NODE-EX");
}

Goal apply_nodes_ex(const Goal& g) {
  auto guarded = guardedAtoms(g);
  for (size_t i = 0; i < guarded.size(); ++i)
    for (size_t j = i + 1; j < guarded.size(); ++j) {
      PureAtom ne = PureAtom::neq(guarded[i]->root(), guarded[j]->root());
      if (!lhsHas(g, ne)) {
        Goal r = g;
        r.lhs.pure.insert(ne);
        return r;
      }
    }
  throw NotApplicable("NODES-EX");
}

std::pair<Goal, Goal> apply_exclude_middle(const Goal& g, const Expr& e1, const Expr& e2) {
  PureAtom eq = PureAtom::eq(e1, e2), ne = PureAtom::neq(e1, e2);
  PureContext ctx = PureContext::build(g.lhs.pure);
  if (ctx.entails_atom(eq) || ctx.entails_atom(ne)) throw NotApplicable("EXCLUDE-MIDDLE");
  Goal a = g, b = g;
  a.lhs.pure.insert(eq);
  a.branchGuards.insert(eq);
  b.lhs.pure.insert(ne);
  b.branchGuards.insert(ne);
  return {a, b};
}

namespace {

// One rewrite; children in the order they should be explored.
std::optional<std::pair<std::string, std::vector<Goal>>> step(const Goal& g) {
  using R = std::pair<std::string, std::vector<Goal>>;
  try { return R{"SUBST", {apply_subst(g)}}; } catch (const NotApplicable&) {}
  try { return R{"LIDENT=", {apply_lident(g)}}; } catch (const NotApplicable&) {}
  try { return R{"LBASE", {apply_lbase(g)}}; } catch (const NotApplicable&) {}
  try { return R{"NODE-EX", {apply_node_ex(g)}}; } catch (const NotApplicable&) {}
  try { return R{"NODES-EX", {apply_nodes_ex(g)}}; } catch (const NotApplicable&) {}

  for (auto& a : g.lhs.spatial) {
    if (!a.isPred() || guard_present(a, g.lhs.pure)) continue;
    auto [e1, e2] = discriminator(a);
    PureAtom eq = PureAtom::eq(e1, e2), ne = PureAtom::neq(e1, e2);
    PureContext ctx = augmented_context(g);
    // already decided: the other branch would be infeasible
    if (ctx.entails_atom(eq) || ctx.entails_atom(ne)) {
      Goal r = g;
      r.lhs.pure.insert(ctx.entails_atom(eq) ? eq : ne);
      return R{"EXCLUDE-MIDDLE", {r}};
    }
    auto [eqGoal, neGoal] = apply_exclude_middle(g, e1, e2);
    return R{"EXCLUDE-MIDDLE", {neGoal, eqGoal}};
  }
  return std::nullopt;
}

}  // namespace

std::vector<Goal> normalize(const Goal& g, const RuleEnv& env) {
  std::vector<Goal> out;
  std::vector<Goal> work{g};
  while (!work.empty()) {
    Goal cur = std::move(work.back());
    work.pop_back();
    if (!branch_feasible(cur)) continue;
    auto r = step(cur);
    if (!r) {
      out.push_back(std::move(cur));
      continue;
    }
    SizeTriple before = size(cur, env.budget);
    for (auto& c : r->second)
      if (!(size(c, env.budget) < before)) throw BudgetExhausted(r->first + " did not decrease the size");
    env.record(r->first, cur, r->second);
    for (auto it = r->second.rbegin(); it != r->second.rend(); ++it) work.push_back(std::move(*it));
  }
  return out;
}

}  // namespace biabd
