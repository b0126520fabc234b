#include "biabd/goal.hpp"

#include <algorithm>

namespace biabd {

namespace {

void addNames(const VarSet& vs, std::set<std::string>& out) {
  for (auto& v : vs) out.insert(v.name);
}

long long predWeight(const SpatialAtom& a) {
  if (a.isPointsTo()) return 0;
  return a.hasValues() ? 2 : 1;
}

}  // namespace

void Goal::noteNames() {
  VarSet vs = vars(lhs);
  collectVars(rhs.body, vs);
  vs.insert(rhs.exists.begin(), rhs.exists.end());
  collectVars(antiframe.body, vs);
  vs.insert(antiframe.exists.begin(), antiframe.exists.end());
  collectVars(frame.body, vs);
  vs.insert(frame.exists.begin(), frame.exists.end());
  for (auto& a : branchGuards) collectVars(a, vs);
  vs.insert(hidden.begin(), hidden.end());
  addNames(vs, names);
}

Expr Goal::fresh(const std::string& prefix) {
  Expr v = fresh_var(prefix, names);
  names.insert(v.name);
  return v;
}

std::string render(const Goal& g) {
  return render(g.lhs) + " * [" + render(g.antiframe) + "] |> " + render(g.rhs) + " * [" + render(g.frame) + "]";
}

SizeBudget SizeBudget::forGoal(const Goal& g) {
  long long pto = 0, weight = 0;
  std::set<long long> consts;
  auto scan = [&](const QFHeap& h) {
    for (auto& a : h.spatial) {
      if (a.isPointsTo()) ++pto;
      weight += predWeight(a);
    }
  };
  scan(g.lhs);
  scan(g.rhs.body);
  VarSet vs = vars(g.lhs);
  collectVars(g.rhs.body, vs);
  auto countConsts = [&](const QFHeap& h) {
    for (auto& a : h.pure) {
      if (a.lhs.kind == Expr::Kind::Int) consts.insert(a.lhs.value);
      if (a.rhs.kind == Expr::Kind::Int) consts.insert(a.rhs.value);
    }
    for (auto& s : h.spatial)
      for (auto& e : s.args)
        if (e.kind == Expr::Kind::Int) consts.insert(e.value);
  };
  countConsts(g.lhs);
  countConsts(g.rhs.body);
  SizeBudget b;
  // tree unfoldings add at most weight 2 per consumed points-to
  b.predBound = weight + 2 * pto + 1;
  long long maxVars = static_cast<long long>(vs.size()) + 4 * pto + 4 * b.predBound + 4;
  long long terms = maxVars + static_cast<long long>(consts.size()) + 1;
  b.pureBound = 4 * terms * terms;
  return b;
}

SizeTriple size(const Goal& g, const SizeBudget& b) {
  long long pto = 0, weight = 0;
  for (auto* h : {&g.lhs, &g.rhs.body})
    for (auto& a : h->spatial) {
      if (a.isPointsTo()) ++pto;
      weight += predWeight(a);
    }
  VarSet vs = vars(g.lhs);
  collectVars(g.rhs.body, vs);
  long long ne = 0;
  for (auto& a : g.lhs.pure)
    if (!a.trivial()) ++ne;
  SizeTriple t;
  t.rhsBudget = pto * (b.predBound + 1) + weight;
  t.lhsPureBudget = static_cast<long long>(vs.size()) * (b.pureBound + 1) + (b.pureBound - ne);
  t.length = static_cast<long long>(g.lhs.pure.size() + g.lhs.spatial.size() + g.rhs.body.pure.size() +
                                    g.rhs.body.spatial.size() + g.rhs.exists.size());
  return t;
}

void RuleEnv::record(const std::string& rule, const Goal& before, const std::vector<Goal>& after) const {
  if (trace) trace->steps.push_back({rule, before, after});
}

bool guard_present(const SpatialAtom& a, const PureFormula& pi) {
  for (auto& x : guard(a))
    if (!pi.count(x)) return false;
  return true;
}

std::vector<Expr> allocated_roots(const Goal& g) {
  std::vector<Expr> roots = g.footprint;
  for (auto& a : g.lhs.spatial)
    if (guard_present(a, g.lhs.pure)) roots.push_back(a.root());
  PureFormula mp = g.antiframe.body.pure;
  mp.insert(g.lhs.pure.begin(), g.lhs.pure.end());
  for (auto& a : g.antiframe.body.spatial)
    if (guard_present(a, mp)) roots.push_back(a.root());
  return roots;
}

PureFormula allocation_facts(const Goal& g) {
  std::vector<Expr> roots = allocated_roots(g);
  PureFormula f;
  for (size_t i = 0; i < roots.size(); ++i) {
    f.insert(PureAtom::neq(roots[i], Expr::null()));
    for (size_t j = i + 1; j < roots.size(); ++j) f.insert(PureAtom::neq(roots[i], roots[j]));
  }
  return f;
}

PureContext augmented_context(const Goal& g) {
  PureFormula all = g.lhs.pure;
  all.insert(g.antiframe.body.pure.begin(), g.antiframe.body.pure.end());
  PureFormula alloc = allocation_facts(g);
  all.insert(alloc.begin(), alloc.end());
  return PureContext::build(all);
}

void subst_goal(Goal& g, const Subst& m) {
  g.lhs = subst(g.lhs, m);
  g.rhs.body = subst(g.rhs.body, m);
  for (auto& e : g.footprint) e = subst(e, m);
}

}  // namespace biabd
