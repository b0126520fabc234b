#include "biabd/slcore.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "biabd/pure.hpp"

namespace biabd {

Expr Expr::var(const std::string& n) {
  if (!n.empty() && std::isupper(static_cast<unsigned char>(n[0]))) return log(n);
  return prog(n);
}

PureAtom PureAtom::make(Rel r, Expr a, Expr b) {
  if ((r == Rel::Eq || r == Rel::Neq) && b < a) std::swap(a, b);
  return {r, std::move(a), std::move(b)};
}

PureAtom PureAtom::negate() const {
  switch (rel) {
    case Rel::Eq: return neq(lhs, rhs);
    case Rel::Neq: return eq(lhs, rhs);
    case Rel::Lt: return leq(rhs, lhs);
    case Rel::Leq: return lt(rhs, lhs);
  }
  return *this;
}

bool PureAtom::trivial() const {
  if (lhs == rhs) return rel == Rel::Eq || rel == Rel::Leq;
  if (!lhs.isConst() || !rhs.isConst()) return false;
  // null is 0
  long long a = lhs.isNull() ? 0 : lhs.value, b = rhs.isNull() ? 0 : rhs.value;
  switch (rel) {
    case Rel::Eq: return a == b;
    case Rel::Neq: return a != b;
    case Rel::Lt: return a < b;
    case Rel::Leq: return a <= b;
  }
  return false;
}

SpatialAtom SpatialAtom::pointsTo(Expr root, std::vector<std::pair<std::string, Expr>> record) {
  std::stable_sort(record.begin(), record.end(), [](const auto& x, const auto& y) {
    int rx = fieldRank(x.first), ry = fieldRank(y.first);
    return rx != ry ? rx < ry : x.first < y.first;
  });
  SpatialAtom a;
  a.kind = SpatialKind::PointsTo;
  a.args.push_back(std::move(root));
  for (auto& [f, e] : record) {
    a.fields.push_back(f);
    a.args.push_back(e);
  }
  return a;
}

std::optional<Expr> SpatialAtom::field(const std::string& f) const {
  for (size_t i = 0; i < fields.size(); ++i)
    if (fields[i] == f) return args[i + 1];
  return std::nullopt;
}

Expr SpatialAtom::end() const {
  switch (kind) {
    case SpatialKind::Ls: return args[1];
    case SpatialKind::Sls: return args[3];
    default: return Expr::null();
  }
}

int arity(SpatialKind k) {
  switch (k) {
    case SpatialKind::Ls: return 2;
    case SpatialKind::Sls: return 4;
    case SpatialKind::Tree: return 1;
    case SpatialKind::Stree: return 3;
    default: return -1;
  }
}

const char* predName(SpatialKind k) {
  switch (k) {
    case SpatialKind::Ls: return "ls";
    case SpatialKind::Sls: return "sls";
    case SpatialKind::Tree: return "tree";
    case SpatialKind::Stree: return "stree";
    default: return "pto";
  }
}

int fieldRank(const std::string& f) {
  if (f == "n") return 0;
  if (f == "l") return 1;
  if (f == "r") return 2;
  if (f == "v") return 3;
  return 4;
}

void QFHeap::canonicalize() { std::sort(spatial.begin(), spatial.end()); }

void QFHeap::add(SpatialAtom a) {
  spatial.insert(std::upper_bound(spatial.begin(), spatial.end(), a), std::move(a));
}

void QFHeap::remove(const SpatialAtom& a) {
  auto it = std::find(spatial.begin(), spatial.end(), a);
  if (it != spatial.end()) spatial.erase(it);
}

void collectVars(const Expr& e, VarSet& out) {
  if (e.isVar()) out.insert(e);
}
void collectVars(const PureAtom& a, VarSet& out) {
  collectVars(a.lhs, out);
  collectVars(a.rhs, out);
}
void collectVars(const SpatialAtom& a, VarSet& out) {
  for (auto& e : a.args) collectVars(e, out);
}
void collectVars(const QFHeap& h, VarSet& out) {
  for (auto& a : h.pure) collectVars(a, out);
  for (auto& a : h.spatial) collectVars(a, out);
}

VarSet vars(const QFHeap& h) {
  VarSet v;
  collectVars(h, v);
  return v;
}

VarSet free_vars(const SymbolicHeap& h) {
  VarSet v = vars(h.body);
  for (auto& x : h.exists) v.erase(x);
  return v;
}

Expr subst(const Expr& e, const Subst& m) {
  if (!e.isVar()) return e;
  auto it = m.find(e);
  return it == m.end() ? e : it->second;
}

PureAtom subst(const PureAtom& a, const Subst& m) {
  return PureAtom::make(a.rel, subst(a.lhs, m), subst(a.rhs, m));
}

SpatialAtom subst(const SpatialAtom& a, const Subst& m) {
  SpatialAtom r = a;
  for (auto& e : r.args) e = subst(e, m);
  return r;
}

PureFormula subst(const PureFormula& p, const Subst& m) {
  PureFormula r;
  for (auto& a : p) r.insert(subst(a, m));
  return r;
}

QFHeap subst(const QFHeap& h, const Subst& m) {
  QFHeap r;
  r.pure = subst(h.pure, m);
  for (auto& a : h.spatial) r.spatial.push_back(subst(a, m));
  r.canonicalize();
  return r;
}

SymbolicHeap subst(const SymbolicHeap& h, const Subst& m) {
  Subst inner;
  VarSet range;
  for (auto& [k, v] : m) {
    if (h.exists.count(k)) continue;
    inner[k] = v;
    collectVars(v, range);
  }
  VarSet avoid = vars(h.body);
  avoid.insert(range.begin(), range.end());
  for (auto& [k, v] : inner) avoid.insert(k);
  SymbolicHeap r;
  for (auto& x : h.exists) {
    if (range.count(x)) {
      Expr y = fresh_var(x.name, avoid);
      avoid.insert(y);
      inner[x] = y;
      r.exists.insert(y);
    } else {
      r.exists.insert(x);
    }
  }
  r.body = subst(h.body, inner);
  return r;
}

Expr fresh_var(const std::string& prefix, const VarSet& avoid) {
  std::set<std::string> names;
  for (auto& v : avoid) names.insert(v.name);
  return fresh_var(prefix, names);
}

Expr fresh_var(const std::string& prefix, const std::set<std::string>& avoid) {
  std::string p = prefix.empty() ? "X" : prefix;
  if (!std::isupper(static_cast<unsigned char>(p[0]))) p[0] = static_cast<char>(std::toupper(p[0]));
  if (!avoid.count(p)) return Expr::log(p);
  for (int i = 0;; ++i) {
    std::string n = p + std::to_string(i);
    if (!avoid.count(n)) return Expr::log(n);
  }
}

Unfolding unfold(const SpatialAtom& p, const VarSet& avoid0) {
  VarSet avoid = avoid0;
  collectVars(p, avoid);
  auto fresh = [&](const char* pre) {
    Expr v = fresh_var(pre, avoid);
    avoid.insert(v);
    return v;
  };
  Unfolding u;
  auto addEq = [&](const Expr& a, const Expr& b) {
    PureAtom e = PureAtom::eq(a, b);
    if (!e.trivial()) u.base.pure.insert(e);
  };
  const auto& a = p.args;
  switch (p.kind) {
    case SpatialKind::Ls: {
      addEq(a[0], a[1]);
      Expr e = fresh("E");
      u.rec.exists = {e};
      u.rec.body.pure.insert(PureAtom::neq(a[0], a[1]));
      u.rec.body.add(SpatialAtom::pointsTo(a[0], {{"n", e}}));
      u.rec.body.add(SpatialAtom::ls(e, a[1]));
      break;
    }
    case SpatialKind::Sls: {
      addEq(a[0], a[3]);
      addEq(a[1], a[2]);
      Expr e = fresh("E"), v = fresh("V");
      u.rec.exists = {e, v};
      u.rec.body.pure.insert(PureAtom::leq(a[1], v));
      u.rec.body.pure.insert(PureAtom::neq(a[0], a[3]));
      u.rec.body.add(SpatialAtom::pointsTo(a[0], {{"n", e}, {"v", a[1]}}));
      u.rec.body.add(SpatialAtom::sls(e, v, a[2], a[3]));
      break;
    }
    case SpatialKind::Tree: {
      addEq(a[0], Expr::null());
      Expr l = fresh("L"), r = fresh("R");
      u.rec.exists = {l, r};
      u.rec.body.add(SpatialAtom::pointsTo(a[0], {{"l", l}, {"r", r}}));
      u.rec.body.add(SpatialAtom::tree(l));
      u.rec.body.add(SpatialAtom::tree(r));
      break;
    }
    case SpatialKind::Stree: {
      addEq(a[0], Expr::null());
      addEq(a[1], a[2]);
      Expr lo = fresh("V"), hi = fresh("V"), val = fresh("V"), l = fresh("L"), r = fresh("R");
      u.rec.exists = {lo, hi, val, l, r};
      u.rec.body.pure.insert(PureAtom::leq(lo, val));
      u.rec.body.pure.insert(PureAtom::leq(val, hi));
      u.rec.body.add(SpatialAtom::pointsTo(a[0], {{"l", l}, {"r", r}, {"v", val}}));
      u.rec.body.add(SpatialAtom::stree(l, a[1], lo));
      u.rec.body.add(SpatialAtom::stree(r, hi, a[2]));
      break;
    }
    case SpatialKind::PointsTo:
      break;
  }
  return u;
}

PureFormula guard(const SpatialAtom& a) {
  switch (a.kind) {
    case SpatialKind::Ls:
    case SpatialKind::Sls:
      return {PureAtom::neq(a.root(), a.end())};
    case SpatialKind::Tree:
    case SpatialKind::Stree:
      return {PureAtom::neq(a.root(), Expr::null())};
    default:
      return {};
  }
}

namespace {
bool guardPresent(const SpatialAtom& a, const PureFormula& pi) {
  for (auto& g : guard(a))
    if (!pi.count(g)) return false;
  return true;
}
}  // namespace

NfReport is_normal_form(const QFHeap& d) {
  NfReport rep;
  auto fail = [&](NfClause c, std::string why) {
    rep.ok = false;
    rep.violations.emplace_back(c, std::move(why));
  };
  std::vector<const SpatialAtom*> guarded;
  for (auto& a : d.spatial) {
    if (!guardPresent(a, d.pure)) {
      fail(NfClause::GuardPresent, "guard of " + render(a) + " missing");
      continue;
    }
    guarded.push_back(&a);
    if (!d.pure.count(PureAtom::neq(a.root(), Expr::null())))
      fail(NfClause::RootNonNull, render(a.root()) + "!=null missing");
  }
  for (size_t i = 0; i < guarded.size(); ++i)
    for (size_t j = i + 1; j < guarded.size(); ++j) {
      PureAtom ne = PureAtom::neq(guarded[i]->root(), guarded[j]->root());
      if (!d.pure.count(ne)) fail(NfClause::RootsDistinct, render(ne) + " missing");
    }
  for (auto& a : d.pure) {
    if (a.rel == Rel::Eq) fail(NfClause::NoEquality, render(a));
    if (a.rel == Rel::Neq && a.lhs == a.rhs) fail(NfClause::NoSelfDiseq, render(a));
  }
  if (!PureContext::build(d.pure).consistent()) fail(NfClause::Satisfiable, "pure part unsatisfiable");
  return rep;
}

std::string render(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Null: return "null";
    case Expr::Kind::Int: return std::to_string(e.value);
    default: return e.name;
  }
}

std::string render(const PureAtom& a) {
  static const char* ops[] = {"=", "!=", "<", "<="};
  return render(a.lhs) + ops[static_cast<int>(a.rel)] + render(a.rhs);
}

std::string render(const SpatialAtom& a) {
  std::string s;
  if (a.isPointsTo()) {
    s = render(a.root()) + "->[";
    for (size_t i = 0; i < a.fields.size(); ++i) {
      if (i) s += ",";
      s += a.fields[i] + ":" + render(a.args[i + 1]);
    }
    return s + "]";
  }
  s = std::string(predName(a.kind)) + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += render(a.args[i]);
  }
  return s + ")";
}

std::string render(const PureFormula& p) {
  if (p.empty()) return "true";
  std::string s;
  for (auto& a : p) {
    if (!s.empty()) s += " & ";
    s += render(a);
  }
  return s;
}

std::string render(const QFHeap& h) {
  std::string s = render(h.pure) + " : ";
  if (h.spatial.empty()) return s + "emp";
  for (size_t i = 0; i < h.spatial.size(); ++i) {
    if (i) s += " * ";
    s += render(h.spatial[i]);
  }
  return s;
}

std::string render(const SymbolicHeap& h) {
  std::string s;
  if (!h.exists.empty()) {
    s = "Ex ";
    bool first = true;
    for (auto& x : h.exists) {
      if (!first) s += ",";
      s += render(x);
      first = false;
    }
    s += ". ";
  }
  return s + render(h.body);
}

SymbolicHeap alpha_canonical(const SymbolicHeap& h) {
  std::vector<Expr> bound(h.exists.begin(), h.exists.end());
  // only names occurring in the body matter
  VarSet occ = vars(h.body);
  bound.erase(std::remove_if(bound.begin(), bound.end(), [&](const Expr& x) { return !occ.count(x); }),
              bound.end());
  std::vector<size_t> perm(bound.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<SymbolicHeap> best;
  std::string bestText;
  size_t tries = 0;
  do {
    Subst m;
    SymbolicHeap cand;
    for (size_t i = 0; i < perm.size(); ++i) {
      Expr b = Expr::log("?" + std::to_string(i));
      m[bound[perm[i]]] = b;
      cand.exists.insert(b);
    }
    cand.body = subst(h.body, m);
    std::string t = render(cand);
    if (!best || t < bestText) {
      best = cand;
      bestText = t;
    }
  } while (++tries < 5040 && std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

}  // namespace biabd
