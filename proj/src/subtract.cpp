#include "biabd/subtract.hpp"

#include <algorithm>
#include <cctype>

namespace biabd {

namespace {

bool mentionsExistential(const Goal& g, const SpatialAtom& a) {
  return std::any_of(a.args.begin(), a.args.end(), [&](const Expr& e) { return g.isExistential(e); });
}
bool mentionsExistential(const Goal& g, const PureAtom& a) {
  return g.isExistential(a.lhs) || g.isExistential(a.rhs);
}

void addObligation(Goal& g, const PureAtom& a) {
  if (a.trivial()) return;
  if (!mentionsExistential(g, a) && augmented_context(g).entails_atom(a)) return;
  g.rhs.body.pure.insert(a);
}

// Removes the matched pair and records the consumed root.
Goal consume(const Goal& g, const SpatialAtom& lhsAtom, const SpatialAtom& rhsAtom) {
  Goal r = g;
  r.lhs.remove(lhsAtom);
  r.rhs.body.remove(rhsAtom);
  r.footprint.push_back(lhsAtom.root());
  return r;
}

std::optional<RuleResult> ridentEq(const Goal& g) {
  for (auto& a : g.rhs.body.pure)
    if (a.trivial()) {
      Goal r = g;
      r.rhs.body.pure.erase(a);
      return RuleResult{"RIDENT=", {r}};
    }
  VarSet used;
  collectVars(g.rhs.body, used);
  for (auto& x : g.rhs.exists)
    if (!used.count(x)) {
      Goal r = g;
      r.rhs.exists.erase(x);
      return RuleResult{"RIDENT=", {r}};
    }
  return std::nullopt;
}

std::optional<RuleResult> hypothesis(const Goal& g) {
  std::optional<PureContext> ctx;
  for (auto& a : g.rhs.body.pure) {
    if (mentionsExistential(g, a)) continue;
    if (!ctx) ctx = augmented_context(g);
    if (ctx->entails_atom(a)) {
      Goal r = g;
      r.rhs.body.pure.erase(a);
      return RuleResult{"HYPOTHESIS", {r}};
    }
  }
  return std::nullopt;
}

std::optional<RuleResult> rightExists(const Goal& g) {
  auto inst = find_rex_instance(g);
  if (!inst) return std::nullopt;
  Goal r = g;
  r.rhs.exists.erase(inst->first);
  r.rhs.body = subst(r.rhs.body, Subst{{inst->first, inst->second}});
  return RuleResult{"R-EX", {r}};
}

std::optional<RuleResult> base(const Goal& g) {
  for (auto& q : g.rhs.body.spatial) {
    if (!q.isPred() || !PureAtom::eq(q.root(), q.end()).trivial()) continue;
    Goal r = g;
    r.rhs.body.remove(q);
    std::string name = std::string(predName(q.kind)) + "-BASE";
    if (q.hasValues()) {
      const Expr &lo = q.args[1], &hi = q.args[2];
      if (g.isExistential(lo) || g.isExistential(hi)) {
        Expr x = g.isExistential(lo) ? lo : hi, t = g.isExistential(lo) ? hi : lo;
        r.rhs.exists.erase(x);
        r.rhs.body = subst(r.rhs.body, Subst{{x, t}});
      } else {
        PureAtom e = PureAtom::eq(lo, hi);
        addObligation(r, e);
        if (!e.trivial()) r.frame.body.pure.insert(e);
      }
    }
    for (auto& c : name) c = static_cast<char>(std::toupper(c));
    return RuleResult{name, {r}};
  }
  return std::nullopt;
}

std::optional<RuleResult> recNode(Goal g) {
  for (auto& q : g.rhs.body.spatial) {
    if (!q.isPred() || g.isExistential(q.root())) continue;
    for (auto& p : g.lhs.spatial) {
      if (!p.isPointsTo() || p.root() != q.root()) continue;
      const Expr& e1 = q.root();
      auto n = p.field("n"), l = p.field("l"), rt = p.field("r"), v = p.field("v");
      switch (q.kind) {
        case SpatialKind::Ls: {
          if (!n) continue;
          Goal r = consume(g, p, q);
          r.rhs.body.add(SpatialAtom::ls(*n, q.args[1]));
          addObligation(r, PureAtom::neq(e1, q.args[1]));
          return RuleResult{"LS-REC(Node)", {r}};
        }
        case SpatialKind::Sls: {
          if (!n || !v) continue;
          Goal r = consume(g, p, q);
          Expr next = r.fresh("V");
          r.rhs.exists.insert(next);
          r.rhs.body.add(SpatialAtom::sls(*n, next, q.args[2], q.args[3]));
          r.rhs.body.pure.insert(PureAtom::leq(q.args[1], next));
          addObligation(r, PureAtom::eq(q.args[1], *v));
          addObligation(r, PureAtom::neq(e1, q.args[3]));
          return RuleResult{"SLS-REC(Node)", {r}};
        }
        case SpatialKind::Tree: {
          if (!l || !rt) continue;
          Goal r = consume(g, p, q);
          r.rhs.body.add(SpatialAtom::tree(*l));
          r.rhs.body.add(SpatialAtom::tree(*rt));
          return RuleResult{"TREE-REC(Node)", {r}};
        }
        case SpatialKind::Stree: {
          if (!l || !rt || !v) continue;
          Goal r = consume(g, p, q);
          Expr leftMax = r.fresh("V"), rightMin = r.fresh("V");
          r.rhs.exists.insert(leftMax);
          r.rhs.exists.insert(rightMin);
          r.rhs.body.pure.insert(PureAtom::leq(leftMax, *v));
          r.rhs.body.pure.insert(PureAtom::leq(*v, rightMin));
          r.rhs.body.add(SpatialAtom::stree(*l, q.args[1], leftMax));
          r.rhs.body.add(SpatialAtom::stree(*rt, rightMin, q.args[2]));
          return RuleResult{"STREE-REC(Node)", {r}};
        }
        case SpatialKind::PointsTo:
          break;
      }
    }
  }
  return std::nullopt;
}

// Segment composition: lhs segment E1..E2 followed by the rest of the rhs
// segment E2..E3, valid when E3 cannot lie inside the consumed segment.
std::optional<RuleResult> rec(Goal g) {
  for (auto& q : g.rhs.body.spatial) {
    if (q.kind != SpatialKind::Ls && q.kind != SpatialKind::Sls) continue;
    if (g.isExistential(q.root())) continue;
    for (auto& p : g.lhs.spatial) {
      if (p.kind != q.kind || p.root() != q.root() || p == q) continue;
      if (!guard_present(p, g.lhs.pure)) continue;
      const Expr& e3 = q.end();
      if (e3 == p.end() || !allocated_elsewhere(g, e3, &p)) continue;
      Goal r = consume(g, p, q);
      if (q.kind == SpatialKind::Ls) {
        r.rhs.body.add(SpatialAtom::ls(p.end(), e3));
        addObligation(r, PureAtom::neq(q.root(), e3));
        return RuleResult{"LS-REC", {r}};
      }
      Expr next = r.fresh("V");
      r.rhs.exists.insert(next);
      r.rhs.body.add(SpatialAtom::sls(p.end(), next, q.args[2], e3));
      r.rhs.body.pure.insert(PureAtom::leq(p.args[2], next));
      addObligation(r, PureAtom::eq(q.args[1], p.args[1]));
      addObligation(r, PureAtom::neq(q.root(), e3));
      return RuleResult{"SLS-REC", {r}};
    }
  }
  return std::nullopt;
}

std::optional<RuleResult> generalize(const Goal& g) {
  for (auto& q : g.rhs.body.spatial) {
    if (q.kind != SpatialKind::Ls && q.kind != SpatialKind::Tree) continue;
    SpatialKind sorted = q.kind == SpatialKind::Ls ? SpatialKind::Sls : SpatialKind::Stree;
    for (auto& p : g.lhs.spatial) {
      if (p.kind != sorted || p.root() != q.root()) continue;
      Goal r = g;
      r.lhs.remove(p);
      r.lhs.add(q.kind == SpatialKind::Ls ? SpatialAtom::ls(p.root(), p.end()) : SpatialAtom::tree(p.root()));
      PureAtom inv = PureAtom::leq(p.args[1], p.args[2]);
      if (!inv.trivial()) r.lhs.pure.insert(inv);
      return RuleResult{q.kind == SpatialKind::Ls ? "LS-GENERALIZE" : "TREE-GENERALIZE", {r}};
    }
  }
  return std::nullopt;
}

std::optional<RuleResult> paramEq(const Goal& g) {
  for (auto& q : g.rhs.body.spatial) {
    if (!q.hasValues()) continue;
    for (auto& p : g.lhs.spatial) {
      if (p.kind != q.kind || p == q || p.root() != q.root() || p.end() != q.end()) continue;
      if (!guard_present(p, g.lhs.pure)) continue;
      Goal r = consume(g, p, q);
      if (q.kind == SpatialKind::Sls) {
        addObligation(r, PureAtom::eq(q.args[1], p.args[1]));
        addObligation(r, PureAtom::leq(p.args[2], q.args[2]));
        return RuleResult{"SLS-PARAM-EQ", {r}};
      }
      addObligation(r, PureAtom::leq(q.args[1], p.args[1]));
      addObligation(r, PureAtom::leq(p.args[2], q.args[2]));
      return RuleResult{"STREE-PARAM-EQ", {r}};
    }
  }
  return std::nullopt;
}

std::optional<RuleResult> orderInvariant(const Goal& g) {
  for (auto& p : g.lhs.spatial) {
    if (!p.hasValues() || !guard_present(p, g.lhs.pure)) continue;
    PureAtom inv = PureAtom::leq(p.args[1], p.args[2]);
    if (inv.trivial() || g.lhs.pure.count(inv)) continue;
    Goal r = g;
    r.lhs.pure.insert(inv);
    return RuleResult{p.kind == SpatialKind::Sls ? "SLS-INV" : "STREE-INV", {r}};
  }
  return std::nullopt;
}

std::optional<RuleResult> starIntro(const Goal& g) {
  for (auto& q : g.rhs.body.spatial) {
    if (mentionsExistential(g, q)) continue;
    for (auto& p : g.lhs.spatial) {
      bool match = p == q || (p.isPointsTo() && q.isPointsTo() && record_covers(p, q));
      if (!match) continue;
      return RuleResult{"*-INTRODUCTION", {consume(g, p, q)}};
    }
  }
  return std::nullopt;
}

// An rhs atom rooted at an rhs existential that occurs nowhere else: the root is bound to a compatible
// lhs atom of the same kind, or to the empty instance when there is none.
std::optional<RuleResult> existentialRoot(const Goal& g) {
  auto compatible = [&](const SpatialAtom& p, const SpatialAtom& q) {
    if (p.kind != q.kind) return false;
    if (q.isPointsTo()) {
      for (auto& f : q.fields) {
        auto want = q.field(f), have = p.field(f);
        if (!have || (!g.isExistential(*want) && *want != *have)) return false;
      }
      return true;
    }
    for (size_t i = 1; i < q.args.size(); ++i)
      if (!g.isExistential(q.args[i]) && q.args[i] != p.args[i]) return false;
    return true;
  };
  // atoms with known roots are matched (or inferred) first
  for (auto& q : g.rhs.body.spatial)
    if (!g.isExistential(q.root())) return std::nullopt;
  for (auto& q : g.rhs.body.spatial) {
    const Expr& x = q.root();
    if (!g.isExistential(x)) continue;
    int uses = 0;
    for (auto& a : g.rhs.body.spatial) uses += static_cast<int>(std::count(a.args.begin(), a.args.end(), x));
    for (auto& a : g.rhs.body.pure) uses += a.mentions(x) ? 1 : 0;
    if (uses != 1) continue;
    std::optional<Expr> target;
    for (auto& p : g.lhs.spatial)
      if (compatible(p, q)) {
        target = p.root();
        break;
      }
    if (!target && q.isPred()) target = q.end();
    if (!target || *target == x) continue;
    Goal r = g;
    r.rhs.exists.erase(x);
    r.rhs.body = subst(r.rhs.body, Subst{{x, *target}});
    return RuleResult{"R-EX", {r}};
  }
  return std::nullopt;
}

}  // namespace

bool record_covers(const SpatialAtom& lhs, const SpatialAtom& rhs) {
  if (!lhs.isPointsTo() || !rhs.isPointsTo() || lhs.root() != rhs.root()) return false;
  for (auto& f : rhs.fields)
    if (lhs.field(f) != rhs.field(f)) return false;
  return true;
}

bool allocated_elsewhere(const Goal& g, const Expr& e, const SpatialAtom* except) {
  if (e.isNull() || (e.kind == Expr::Kind::Int && e.value == 0)) return true;
  if (std::find(g.footprint.begin(), g.footprint.end(), e) != g.footprint.end()) return true;
  for (auto& a : g.lhs.spatial)
    if (&a != except && a.root() == e && guard_present(a, g.lhs.pure)) return true;
  PureFormula mp = g.antiframe.body.pure;
  mp.insert(g.lhs.pure.begin(), g.lhs.pure.end());
  for (auto& a : g.antiframe.body.spatial)
    if (a.root() == e && guard_present(a, mp)) return true;
  return false;
}

std::optional<std::pair<Expr, Expr>> find_rex_instance(const Goal& g) {
  if (g.rhs.exists.empty()) return std::nullopt;
  auto bindable = [&](const Expr& x, const std::optional<Expr>& t) {
    return g.isExistential(x) && t && !g.isExistential(*t);
  };
  for (auto& q : g.rhs.body.spatial) {
    if (g.isExistential(q.root())) continue;
    for (auto& p : g.lhs.spatial) {
      if (p.root() != q.root()) continue;
      if (p.kind == q.kind && q.isPointsTo()) {
        for (auto& f : q.fields) {
          Expr x = *q.field(f);
          if (bindable(x, p.field(f))) return std::pair{x, *p.field(f)};
        }
      } else if (p.kind == q.kind) {
        for (size_t i = 1; i < q.args.size(); ++i)
          if (bindable(q.args[i], p.args[i])) return std::pair{q.args[i], p.args[i]};
      } else if (q.kind == SpatialKind::Sls && p.isPointsTo()) {
        if (bindable(q.args[1], p.field("v"))) return std::pair{q.args[1], *p.field("v")};
      }
    }
  }
  for (auto& a : g.rhs.body.pure) {
    if (a.rel != Rel::Eq) continue;
    if (bindable(a.lhs, a.rhs)) return std::pair{a.lhs, a.rhs};
    if (bindable(a.rhs, a.lhs)) return std::pair{a.rhs, a.lhs};
  }
  return std::nullopt;
}

std::optional<RuleResult> try_axioms(const Goal& g) {
  const QFHeap& rb = g.rhs.body;
  if (g.lhs.spatial.empty() && rb.spatial.empty() && rb.pure.empty()) {
    Goal r = g;
    r.frame.body.pure.insert(g.lhs.pure.begin(), g.lhs.pure.end());
    return RuleResult{"EMP", {r}, true};
  }
  if (g.rhs.exists.empty() && g.lhs == rb) return RuleResult{"IDENT", {g}, true};
  return std::nullopt;
}

std::optional<RuleResult> subtract_step(const Goal& g, const RuleEnv&) {
  if (auto r = ridentEq(g)) return r;
  if (auto r = hypothesis(g)) return r;
  if (auto r = rightExists(g)) return r;
  if (auto r = base(g)) return r;
  if (auto r = recNode(g)) return r;
  if (auto r = rec(g)) return r;
  if (auto r = generalize(g)) return r;
  if (auto r = paramEq(g)) return r;
  if (auto r = orderInvariant(g)) return r;
  if (auto r = starIntro(g)) return r;
  if (auto r = existentialRoot(g)) return r;
  return std::nullopt;
}

}  // namespace biabd
