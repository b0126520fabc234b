#include "biabd/infer.hpp"

#include <algorithm>
#include <optional>

namespace biabd {

namespace {

bool mentionsHidden(const Goal& g, const SpatialAtom& a) {
  return std::any_of(a.args.begin(), a.args.end(), [&](const Expr& e) { return g.isHidden(e); });
}

bool pureAllowedInAntiframe(const Goal& g, const PureAtom& a) {
  return !g.isHidden(a.lhs) && !g.isHidden(a.rhs) && !g.isExistential(a.lhs) && !g.isExistential(a.rhs);
}

bool consistentWith(const Goal& g, const PureFormula& extra) {
  return augmented_context(g).with(extra).consistent();
}

void abduce(Goal& g, const PureAtom& a) {
  if (a.trivial()) return;
  g.antiframe.body.pure.insert(a);
  g.lhs.pure.insert(a);
}

bool fieldsWithin(const SpatialAtom& q, std::initializer_list<const char*> allowed) {
  for (auto& f : q.fields)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return f == a; })) return false;
  return true;
}

// Binds the rhs existential `x` (if it is one) to `t`.
void bindExistential(Goal& g, const std::optional<Expr>& x, const Expr& t) {
  if (!x || !g.isExistential(*x)) return;
  g.rhs.exists.erase(*x);
  g.rhs.body = subst(g.rhs.body, Subst{{*x, t}});
}

std::optional<RuleResult> infPointsTo(const Goal& g) {
  for (auto& q : g.rhs.body.spatial) {
    if (!q.isPointsTo()) continue;
    for (auto& p : g.lhs.spatial) {
      if (!p.isPointsTo() || p.root() != q.root()) continue;
      for (auto& f : q.fields) {
        auto have = p.field(f);
        Expr want = *q.field(f);
        if (!have || *have == want) continue;
        PureAtom eq = PureAtom::eq(*have, want);
        if (!pureAllowedInAntiframe(g, eq) || !consistentWith(g, {eq})) return std::nullopt;
        Goal r = g;
        abduce(r, eq);
        return RuleResult{"INF-PTO", {r}};
      }
    }
  }
  return std::nullopt;
}

// Unfolds an lhs predicate once against an rhs cell at its root and
// subtracts the cell. Link fields of the rhs cell must be existentials.
std::optional<RuleResult> infUnfold(const Goal& g, SpatialKind kind, bool allowAbduction) {
  for (auto& p : g.lhs.spatial) {
    if (p.kind != kind || !guard_present(p, g.lhs.pure)) continue;
    for (auto& q : g.rhs.body.spatial) {
      if (!q.isPointsTo() || q.root() != p.root()) continue;
      auto linkOk = [&](const char* f) {
        auto x = q.field(f);
        return !x || g.isExistential(*x);
      };
      Goal r = g;
      r.lhs.remove(p);
      r.rhs.body.remove(q);
      r.footprint.push_back(p.root());
      auto hiddenVar = [&](const char* prefix) {
        Expr v = r.fresh(prefix);
        r.hidden.insert(v);
        return v;
      };
      switch (kind) {
        case SpatialKind::Ls: {
          if (!fieldsWithin(q, {"n"}) || !linkOk("n")) continue;
          Expr next = hiddenVar("E");
          r.lhs.add(SpatialAtom::ls(next, p.end()));
          bindExistential(r, q.field("n"), next);
          return RuleResult{"INF-LS", {r}};
        }
        case SpatialKind::Sls: {
          if (!fieldsWithin(q, {"n", "v"}) || !linkOk("n")) continue;
          const Expr& first = p.args[1];
          auto val = q.field("v");
          if (val && !g.isExistential(*val) && *val != first) {
            PureAtom eq = PureAtom::eq(first, *val);
            if (!allowAbduction || !pureAllowedInAntiframe(g, eq) || !consistentWith(g, {eq})) continue;
            abduce(r, eq);
          }
          Expr next = hiddenVar("E"), nextVal = hiddenVar("V");
          r.lhs.add(SpatialAtom::sls(next, nextVal, p.args[2], p.end()));
          r.lhs.pure.insert(PureAtom::leq(first, nextVal));
          bindExistential(r, q.field("n"), next);
          bindExistential(r, val, first);
          return RuleResult{"INF-SLS", {r}};
        }
        case SpatialKind::Tree: {
          if (!fieldsWithin(q, {"l", "r"}) || !linkOk("l") || !linkOk("r")) continue;
          Expr left = hiddenVar("L"), right = hiddenVar("R");
          r.lhs.add(SpatialAtom::tree(left));
          r.lhs.add(SpatialAtom::tree(right));
          bindExistential(r, q.field("l"), left);
          bindExistential(r, q.field("r"), right);
          return RuleResult{"INF-TREE", {r}};
        }
        case SpatialKind::Stree: {
          if (!fieldsWithin(q, {"l", "r", "v"}) || !linkOk("l") || !linkOk("r")) continue;
          const Expr &lo = p.args[1], &hi = p.args[2];
          auto want = q.field("v");
          std::optional<Expr> nodeVal;
          if (want && !g.isExistential(*want)) {
            // the only pure condition on lo/hi forcing the root value
            PureAtom a = PureAtom::eq(lo, *want), b = PureAtom::eq(*want, hi);
            if (!a.trivial() || !b.trivial()) {
              if (!allowAbduction || !pureAllowedInAntiframe(g, a) || !pureAllowedInAntiframe(g, b) ||
                  !consistentWith(g, {a, b}))
                continue;
              abduce(r, a);
              abduce(r, b);
            }
            nodeVal = *want;
          }
          Expr left = hiddenVar("L"), right = hiddenVar("R");
          Expr leftMax = hiddenVar("V"), rightMin = hiddenVar("V");
          Expr val = nodeVal ? *nodeVal : hiddenVar("V");
          r.lhs.add(SpatialAtom::stree(left, lo, leftMax));
          r.lhs.add(SpatialAtom::stree(right, rightMin, hi));
          r.lhs.pure.insert(PureAtom::leq(leftMax, val));
          r.lhs.pure.insert(PureAtom::leq(val, rightMin));
          bindExistential(r, q.field("l"), left);
          bindExistential(r, q.field("r"), right);
          bindExistential(r, want, val);
          return RuleResult{"INF-STREE", {r}};
        }
        case SpatialKind::PointsTo:
          break;
      }
    }
  }
  return std::nullopt;
}

std::optional<RuleResult> infMissing(const Goal& g) {
  QFHeap view = antecedent_view(g);
  for (auto& q : g.rhs.body.spatial) {
    if (mentionsHidden(g, q)) continue;
    QFHeap with = view;
    with.add(q);
    if (!heap_satisfiable(with)) continue;
    Goal r = g;
    r.rhs.body.remove(q);
    for (auto& e : q.args)
      if (r.isExistential(e)) {
        r.rhs.exists.erase(e);
        r.antiframe.exists.insert(e);
      }
    r.antiframe.body.add(q);
    // the cell's allocation is stated explicitly in the anti-frame
    if (q.isPointsTo() && !q.root().isConst()) r.antiframe.body.pure.insert(PureAtom::neq(q.root(), Expr::null()));
    return RuleResult{"INF-MISSING", {r}};
  }
  return std::nullopt;
}

std::optional<RuleResult> infExtra(const Goal& g) {
  for (auto& p : g.lhs.spatial) {
    QFHeap with = g.rhs.body;
    with.add(p);
    if (!heap_satisfiable(with)) continue;
    Goal r = g;
    r.lhs.remove(p);
    r.frame.body.add(p);
    if (guard_present(p, g.lhs.pure)) r.footprint.push_back(p.root());
    return RuleResult{"INF-EXTRA", {r}};
  }
  return std::nullopt;
}

// Instantiates rhs existentials that only occur in pure obligations with a
// term they are compared against.
bool groundPureExistentials(Goal& g) {
  while (!g.rhs.exists.empty()) {
    std::optional<std::pair<Expr, Expr>> pick;
    for (auto& a : g.rhs.body.pure) {
      if (g.isExistential(a.lhs) && !g.isExistential(a.rhs)) pick = std::pair{a.lhs, a.rhs};
      else if (g.isExistential(a.rhs) && !g.isExistential(a.lhs)) pick = std::pair{a.rhs, a.lhs};
      if (pick) break;
    }
    if (!pick) {
      VarSet used;
      collectVars(g.rhs.body, used);
      bool anyUsed = std::any_of(g.rhs.exists.begin(), g.rhs.exists.end(), [&](const Expr& x) { return used.count(x) > 0; });
      if (anyUsed) return false;
      g.rhs.exists.clear();
      return true;
    }
    g.rhs.exists.erase(pick->first);
    g.rhs.body = subst(g.rhs.body, Subst{{pick->first, pick->second}});
  }
  return true;
}

std::optional<RuleResult> infPure(const Goal& g, bool allowAbduction) {
  if (!g.lhs.spatial.empty() || !g.rhs.body.spatial.empty()) return std::nullopt;
  Goal r = g;
  if (!groundPureExistentials(r)) return std::nullopt;
  PureContext ctx = augmented_context(r);
  PureFormula residue;
  for (auto& a : r.rhs.body.pure)
    if (!ctx.entails_atom(a)) residue.insert(a);
  if (!residue.empty()) {
    if (!allowAbduction) return std::nullopt;
    for (auto& a : residue)
      if (!pureAllowedInAntiframe(r, a)) return std::nullopt;
    if (!ctx.with(residue).consistent()) return std::nullopt;
  }
  r.antiframe.body.pure.insert(residue.begin(), residue.end());
  r.frame.body.pure.insert(r.lhs.pure.begin(), r.lhs.pure.end());
  r.rhs.body.pure.clear();
  return RuleResult{"INF-PURE", {r}, true};
}

bool satRec(const QFHeap& d, size_t i, PureFormula& pure, std::vector<Expr>& roots) {
  if (!satisfiable(pure)) return false;
  if (i == d.spatial.size()) {
    PureFormula all = pure;
    for (size_t a = 0; a < roots.size(); ++a) {
      all.insert(PureAtom::neq(roots[a], Expr::null()));
      for (size_t b = a + 1; b < roots.size(); ++b) all.insert(PureAtom::neq(roots[a], roots[b]));
    }
    return satisfiable(all);
  }
  const SpatialAtom& a = d.spatial[i];
  if (a.isPointsTo()) {
    roots.push_back(a.root());
    bool ok = satRec(d, i + 1, pure, roots);
    roots.pop_back();
    return ok;
  }
  // empty case
  {
    PureFormula p = pure;
    p.insert(PureAtom::eq(a.root(), a.end()));
    if (a.hasValues()) p.insert(PureAtom::eq(a.args[1], a.args[2]));
    if (satRec(d, i + 1, p, roots)) return true;
  }
  PureFormula p = pure;
  for (auto& x : guard(a)) p.insert(x);
  if (a.hasValues()) p.insert(PureAtom::leq(a.args[1], a.args[2]));
  roots.push_back(a.root());
  bool ok = satRec(d, i + 1, p, roots);
  roots.pop_back();
  return ok;
}

}  // namespace

bool heap_satisfiable(const QFHeap& d) {
  PureFormula pure = d.pure;
  std::vector<Expr> roots;
  return satRec(d, 0, pure, roots);
}

QFHeap antecedent_view(const Goal& g) {
  QFHeap v = g.lhs;
  v.pure.insert(g.antiframe.body.pure.begin(), g.antiframe.body.pure.end());
  for (auto& a : g.antiframe.body.spatial) v.add(a);
  for (auto& root : g.footprint) v.add(SpatialAtom::pointsTo(root, {}));
  return v;
}

std::vector<RuleResult> infer_step(const Goal& g, const RuleEnv& env) {
  std::vector<RuleResult> out;
  auto push = [&](std::optional<RuleResult> r) {
    if (r) out.push_back(std::move(*r));
  };
  if (env.inference) push(infPointsTo(g));
  push(infUnfold(g, SpatialKind::Sls, env.inference));
  push(infUnfold(g, SpatialKind::Ls, env.inference));
  push(infUnfold(g, SpatialKind::Stree, env.inference));
  push(infUnfold(g, SpatialKind::Tree, env.inference));
  if (env.inference) push(infMissing(g));
  if (env.inference || env.allowFrame) push(infExtra(g));
  push(infPure(g, env.inference));
  return out;
}

}  // namespace biabd
