#include "biabd/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "biabd/pure.hpp"

namespace biabd {

std::string render(const HeapModel& m) {
  std::string s = "stack{";
  bool first = true;
  for (auto& [v, x] : m.stack) {
    s += (first ? "" : ", ") + render(v) + ":" + std::to_string(x);
    first = false;
  }
  s += "} heap{";
  first = true;
  for (auto& [loc, cell] : m.heap) {
    s += (first ? "" : ", ") + std::to_string(loc) + ":[";
    bool f2 = true;
    for (auto& [f, v] : cell) {
      s += (f2 ? "" : ",") + f + ":" + std::to_string(v);
      f2 = false;
    }
    s += "]";
    first = false;
  }
  return s + "}";
}

namespace {

// ---------------------------------------------------------------------------
// Satisfaction

struct MatchState {
  std::map<Expr, long long> env;
  std::vector<bool> done;
  std::set<long long> free;
  std::vector<PureAtom> pending;
};

class Matcher {
 public:
  Matcher(const HeapModel& m, const QFHeap& h, const std::set<Expr>& exists) : m_(m), h_(h), exists_(exists) {}

  bool run() {
    MatchState s;
    for (auto& [v, x] : m_.stack)
      if (!exists_.count(v)) s.env[v] = x;
    s.done.assign(h_.spatial.size(), false);
    for (auto& [loc, cell] : m_.heap) s.free.insert(loc);
    return step(s);
  }

 private:
  std::optional<long long> val(const MatchState& s, const Expr& e) const {
    if (e.isNull()) return 0;
    if (e.kind == Expr::Kind::Int) return e.value;
    auto it = s.env.find(e);
    if (it == s.env.end()) return std::nullopt;
    return it->second;
  }

  // Binds an unbound expression or compares a bound one.
  bool unify(MatchState& s, const Expr& e, long long v) const {
    auto cur = val(s, e);
    if (cur) return *cur == v;
    s.env[e] = v;
    return true;
  }

  const std::map<std::string, long long>* cell(long long loc) const {
    auto it = m_.heap.find(loc);
    return it == m_.heap.end() ? nullptr : &it->second;
  }

  bool finish(const MatchState& s) const {
    if (!s.free.empty()) return false;
    Subst bound;
    for (auto& [v, x] : s.env) bound[v] = Expr::num(x);
    PureFormula all;
    for (auto& a : h_.pure) all.insert(subst(a, bound));
    for (auto& a : s.pending) all.insert(subst(a, bound));
    // remaining variables are unconstrained existentials over the integers
    return satisfiable(all);
  }

  bool step(MatchState s) const {
    size_t pick = s.done.size();
    for (size_t i = 0; i < s.done.size(); ++i)
      if (!s.done[i] && val(s, h_.spatial[i].root())) {
        pick = i;
        break;
      }
    if (pick == s.done.size()) {
      for (size_t i = 0; i < s.done.size(); ++i)
        if (!s.done[i]) {
          pick = i;
          break;
        }
      if (pick == s.done.size()) return finish(s);
      // unbound root: empty predicate, or some remaining location
      const SpatialAtom& a = h_.spatial[pick];
      if (a.isPred()) {
        MatchState e = s;
        e.done[pick] = true;
        e.pending.push_back(PureAtom::eq(a.root(), a.end()));
        if (a.hasValues()) e.pending.push_back(PureAtom::eq(a.args[1], a.args[2]));
        if (step(e)) return true;
      }
      for (long long loc : s.free) {
        MatchState t = s;
        t.env[a.root()] = loc;
        if (process(pick, t)) return true;
      }
      return false;
    }
    return process(pick, s);
  }

  bool process(size_t i, MatchState s) const {
    const SpatialAtom& a = h_.spatial[i];
    s.done[i] = true;
    long long root = *val(s, a.root());
    switch (a.kind) {
      case SpatialKind::PointsTo: {
        auto* c = cell(root);
        if (!c || !s.free.count(root)) return false;
        for (size_t k = 0; k < a.fields.size(); ++k) {
          auto it = c->find(a.fields[k]);
          if (it == c->end() || !unify(s, a.args[k + 1], it->second)) return false;
        }
        s.free.erase(root);
        return step(s);
      }
      case SpatialKind::Ls:
      case SpatialKind::Sls:
        return walk(s, a, root, std::nullopt);
      case SpatialKind::Tree:
      case SpatialKind::Stree: {
        std::vector<long long> inorder;
        if (!collectTree(s, root, a.kind == SpatialKind::Stree, inorder)) return false;
        if (a.kind == SpatialKind::Stree) {
          if (root == 0) {
            s.pending.push_back(PureAtom::eq(a.args[1], a.args[2]));
          } else {
            for (size_t k = 1; k < inorder.size(); ++k)
              if (inorder[k - 1] > inorder[k]) return false;
            s.pending.push_back(PureAtom::leq(a.args[1], Expr::num(inorder.front())));
            s.pending.push_back(PureAtom::leq(Expr::num(inorder.back()), a.args[2]));
          }
        }
        return step(s);
      }
    }
    return false;
  }

  bool collectTree(MatchState& s, long long loc, bool values, std::vector<long long>& inorder) const {
    if (loc == 0) return true;
    auto* c = cell(loc);
    if (!c || !s.free.count(loc)) return false;
    auto l = c->find("l"), r = c->find("r");
    if (l == c->end() || r == c->end()) return false;
    s.free.erase(loc);
    if (!collectTree(s, l->second, values, inorder)) return false;
    if (values) {
      auto v = c->find("v");
      if (v == c->end()) return false;
      inorder.push_back(v->second);
    }
    return collectTree(s, r->second, values, inorder);
  }

  // Follows the n-links from `cur`; `last` is the previous cell value (sls).
  bool walk(MatchState s, const SpatialAtom& a, long long cur, std::optional<long long> last) const {
    bool sorted = a.kind == SpatialKind::Sls;
    const Expr& end = a.end();
    auto endVal = val(s, end);
    // stop here
    if (!endVal || *endVal == cur) {
      MatchState t = s;
      t.env[end] = cur;
      if (sorted) {
        if (!last) t.pending.push_back(PureAtom::eq(a.args[1], a.args[2]));
        else t.pending.push_back(PureAtom::leq(Expr::num(*last), a.args[2]));
      }
      if (step(t)) return true;
      if (endVal) return false;  // a segment stops at the first occurrence of its end
    }
    // one more cell
    auto* c = cell(cur);
    if (!c || !s.free.count(cur)) return false;
    if (!endVal) s.pending.push_back(PureAtom::neq(end, Expr::num(cur)));
    auto n = c->find("n");
    if (n == c->end()) return false;
    if (sorted) {
      auto v = c->find("v");
      if (v == c->end()) return false;
      if (!last) {
        if (!unify(s, a.args[1], v->second)) return false;
      } else if (v->second < *last) {
        return false;
      }
      last = v->second;
    }
    s.free.erase(cur);
    return walk(s, a, n->second, last);
  }

  const HeapModel& m_;
  const QFHeap& h_;
  const std::set<Expr>& exists_;
};

// ---------------------------------------------------------------------------
// Sorts

struct Sorts {
  std::map<Expr, Expr> parent;
  std::set<Expr> valueMarked;
  std::set<Expr> addrMarked;

  Expr find(const Expr& e) {
    auto it = parent.find(e);
    if (it == parent.end() || it->second == e) return e;
    Expr r = find(it->second);
    parent[e] = r;
    return r;
  }
  void unite(const Expr& a, const Expr& b) {
    Expr x = find(a), y = find(b);
    if (x != y) parent[x] = y;
  }
  void addr(const Expr& e) {
    if (e.isVar()) addrMarked.insert(e);
  }
  void value(const Expr& e) {
    if (e.isVar()) valueMarked.insert(e);
  }
  void scan(const QFHeap& h) {
    for (auto& a : h.pure) {
      if (a.rel == Rel::Lt || a.rel == Rel::Leq) {
        value(a.lhs);
        value(a.rhs);
        continue;
      }
      if (a.lhs.isVar() && a.rhs.isVar()) unite(a.lhs, a.rhs);
      for (auto [x, y] : {std::pair{a.lhs, a.rhs}, std::pair{a.rhs, a.lhs}}) {
        if (x.isNull()) addr(y);
        if (x.kind == Expr::Kind::Int) value(y);
      }
    }
    for (auto& s : h.spatial) {
      addr(s.root());
      switch (s.kind) {
        case SpatialKind::PointsTo:
          for (size_t k = 0; k < s.fields.size(); ++k) {
            if (s.fields[k] == "v") value(s.args[k + 1]);
            else addr(s.args[k + 1]);
          }
          break;
        case SpatialKind::Ls:
          addr(s.args[1]);
          break;
        case SpatialKind::Sls:
          value(s.args[1]);
          value(s.args[2]);
          addr(s.args[3]);
          break;
        case SpatialKind::Tree:
          break;
        case SpatialKind::Stree:
          value(s.args[1]);
          value(s.args[2]);
          break;
      }
    }
  }
  bool isValue(const Expr& e) {
    Expr r = find(e);
    for (auto& v : valueMarked)
      if (find(v) == r) return true;
    return false;
  }
};

void collectConstants(const QFHeap& h, std::set<long long>& out) {
  for (auto& a : h.pure)
    for (auto& e : {a.lhs, a.rhs})
      if (e.kind == Expr::Kind::Int) out.insert(e.value);
  for (auto& s : h.spatial)
    for (auto& e : s.args)
      if (e.kind == Expr::Kind::Int) out.insert(e.value);
}

// Weak orderings of `n` elements, as rank vectors with contiguous ranks.
void weakOrderings(size_t n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> rank(n, 0);
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == n) {
      std::set<int> used(rank.begin(), rank.end());
      if (used.empty() || (*used.begin() == 0 && *used.rbegin() == static_cast<int>(used.size()) - 1)) f(rank);
      return;
    }
    for (int r = 0; r < static_cast<int>(n); ++r) {
      rank[i] = r;
      go(i + 1);
    }
  };
  go(0);
}

// Concrete integers for ranks; elements [0, pinned.size()) of `rank` are the
// constants in increasing order.
std::optional<std::vector<long long>> realize(const std::vector<int>& rank, const std::vector<long long>& pinned,
                                              long long gap) {
  int levels = rank.empty() ? 0 : *std::max_element(rank.begin(), rank.end()) + 1;
  std::vector<std::optional<long long>> at(levels);
  for (size_t c = 0; c < pinned.size(); ++c) {
    if (at[rank[c]] && *at[rank[c]] != pinned[c]) return std::nullopt;
    at[rank[c]] = pinned[c];
  }
  for (size_t c = 1; c < pinned.size(); ++c)
    if (rank[c] <= rank[c - 1]) return std::nullopt;
  std::vector<long long> value(levels);
  int firstPinned = -1;
  for (int l = 0; l < levels; ++l)
    if (at[l]) {
      firstPinned = l;
      break;
    }
  if (firstPinned < 0) {
    for (int l = 0; l < levels; ++l) value[l] = gap * (l + 1);
  } else {
    for (int l = 0; l < firstPinned; ++l) value[l] = *at[firstPinned] - gap * (firstPinned - l);
    int prev = firstPinned;
    value[prev] = *at[prev];
    for (int l = firstPinned + 1; l < levels; ++l) {
      if (!at[l]) continue;
      long long span = *at[l] - *at[prev];
      long long step = span / (l - prev);
      if (step < 1) return std::nullopt;
      step = std::min(step, gap);
      for (int k = prev + 1; k < l; ++k) value[k] = *at[prev] + step * (k - prev);
      value[l] = *at[l];
      prev = l;
    }
    for (int l = prev + 1; l < levels; ++l) value[l] = *at[prev] + gap * (l - prev);
  }
  std::vector<long long> out(rank.size());
  for (size_t i = 0; i < rank.size(); ++i) out[i] = value[rank[i]];
  return out;
}

// ---------------------------------------------------------------------------
// Model generation

class Generator {
 public:
  Generator(const SymbolicHeap& h, int bound, const std::map<Expr, long long>& env, const std::vector<long long>& levels,
            std::set<long long> slots, long long firstFresh, const std::function<bool(const HeapModel&)>& emit)
      : h_(h), bound_(bound), env_(env), levels_(levels), nextFresh_(firstFresh), emit_(emit),
        reusable_(std::move(slots)) {
    reusable_.erase(0);
  }

  // false when the consumer asked to stop
  bool run() { return atom(0); }

 private:
  long long ev(const Expr& e) const {
    if (e.isNull()) return 0;
    if (e.kind == Expr::Kind::Int) return e.value;
    return env_.at(e);
  }

  bool fits() const { return static_cast<int>(heap_.size()) < bound_; }

  std::vector<long long> nodeChoices(const std::set<long long>& exclude) const {
    std::vector<long long> out;
    for (long long x : reusable_)
      if (!heap_.count(x) && !exclude.count(x)) out.push_back(x);
    out.push_back(nextFresh_);
    return out;
  }

  // Non-decreasing successors of `prev` up to `hi`, one representative per
  // order type relative to the stack values.
  std::vector<long long> nextValues(long long prev, long long hi) const {
    std::set<long long> out;
    auto above = [&](long long x) {
      auto it = std::upper_bound(levels_.begin(), levels_.end(), x);
      return it == levels_.end() ? std::optional<long long>{} : std::optional<long long>{*it};
    };
    auto addGapStart = [&](long long x) {
      auto nxt = above(x);
      if (x + 1 <= hi && (!nxt || x + 1 < *nxt)) out.insert(x + 1);
    };
    if (prev <= hi) out.insert(prev);
    addGapStart(prev);
    for (long long l : levels_)
      if (l > prev && l <= hi) {
        out.insert(l);
        addGapStart(l);
      }
    return {out.begin(), out.end()};
  }

  bool atom(size_t i) {
    if (i == h_.body.spatial.size()) return finish();
    const SpatialAtom& a = h_.body.spatial[i];
    long long root = ev(a.root());
    switch (a.kind) {
      case SpatialKind::PointsTo: {
        if (root == 0 || heap_.count(root) || !fits()) return true;
        std::map<std::string, long long> c;
        for (size_t k = 0; k < a.fields.size(); ++k) c[a.fields[k]] = ev(a.args[k + 1]);
        heap_[root] = c;
        bool go = atom(i + 1);
        heap_.erase(root);
        return go;
      }
      case SpatialKind::Ls:
      case SpatialKind::Sls: {
        long long end = ev(a.end());
        bool sorted = a.kind == SpatialKind::Sls;
        if (root == end) {
          if (sorted && ev(a.args[1]) != ev(a.args[2])) return true;
          return atom(i + 1);
        }
        if (sorted) return chain(i, root, end, ev(a.args[1]), ev(a.args[2]), true);
        return chain(i, root, end, 0, 0, false);
      }
      case SpatialKind::Tree:
      case SpatialKind::Stree: {
        if (root == 0) {
          if (a.kind == SpatialKind::Stree && ev(a.args[1]) != ev(a.args[2])) return true;
          return atom(i + 1);
        }
        std::vector<long long> pending{root};
        std::vector<long long> nodes;
        return shape(i, pending, nodes);
      }
    }
    return true;
  }

  bool chain(size_t i, long long cur, long long end, long long value, long long hi, bool sorted) {
    if (cur == 0 || heap_.count(cur) || !fits()) return true;
    if (sorted && value > hi) return true;
    std::map<std::string, long long> c{{"n", end}};
    if (sorted) c["v"] = value;
    heap_[cur] = c;
    bool go = atom(i + 1);
    heap_.erase(cur);
    if (!go) return false;
    for (long long next : nodeChoices({cur, end})) {
      if (next == end) continue;
      bool fresh = next == nextFresh_;
      c["n"] = next;
      heap_[cur] = c;
      if (fresh) ++nextFresh_;
      if (sorted) {
        for (long long v : nextValues(value, hi)) {
          go = chain(i, next, end, v, hi, true);
          if (!go) break;
        }
      } else {
        go = chain(i, next, end, 0, 0, false);
      }
      if (fresh) --nextFresh_;
      heap_.erase(cur);
      if (!go) return false;
    }
    return true;
  }

  // Builds a tree shape; `pending` roots still need a cell.
  bool shape(size_t i, std::vector<long long> pending, std::vector<long long>& nodes) {
    if (pending.empty()) {
      const SpatialAtom& a = h_.body.spatial[i];
      if (a.kind == SpatialKind::Tree) return atom(i + 1);
      return label(i);
    }
    long long cur = pending.back();
    pending.pop_back();
    if (heap_.count(cur) || !fits()) return true;
    heap_[cur] = {};
    nodes.push_back(cur);
    std::set<long long> taken(pending.begin(), pending.end());
    taken.insert(cur);
    bool go = true;
    auto leftOptions = nodeChoices(taken);
    leftOptions.insert(leftOptions.begin(), 0);
    for (long long l : leftOptions) {
      long long saved = nextFresh_;
      if (l == nextFresh_) ++nextFresh_;
      std::set<long long> taken2 = taken;
      if (l != 0) taken2.insert(l);
      auto rightOptions = nodeChoices(taken2);
      rightOptions.insert(rightOptions.begin(), 0);
      for (long long r : rightOptions) {
        long long saved2 = nextFresh_;
        if (r == nextFresh_) ++nextFresh_;
        heap_[cur] = {{"l", l}, {"r", r}};
        std::vector<long long> next = pending;
        if (r != 0) next.push_back(r);
        if (l != 0) next.push_back(l);
        go = shape(i, next, nodes);
        nextFresh_ = saved2;
        if (!go) break;
      }
      nextFresh_ = saved;
      if (!go) break;
    }
    heap_.erase(cur);
    nodes.pop_back();
    return go;
  }

  void inorder(long long loc, std::vector<long long>& out) const {
    if (loc == 0) return;
    auto& c = heap_.at(loc);
    inorder(c.at("l"), out);
    out.push_back(loc);
    inorder(c.at("r"), out);
  }

  bool label(size_t i) {
    const SpatialAtom& a = h_.body.spatial[i];
    std::vector<long long> order;
    inorder(ev(a.root()), order);
    long long lo = ev(a.args[1]), hi = ev(a.args[2]);
    std::function<bool(size_t, long long)> go = [&](size_t k, long long prev) {
      if (k == order.size()) return atom(i + 1);
      for (long long v : nextValues(prev, hi)) {
        heap_[order[k]]["v"] = v;
        if (!go(k + 1, v)) return false;
      }
      heap_[order[k]].erase("v");
      return true;
    };
    return go(0, lo);
  }

  bool finish() {
    HeapModel m;
    for (auto& [v, x] : env_)
      if (!h_.exists.count(v)) m.stack[v] = x;
    m.heap = heap_;
    if (!holds(m, h_)) return true;
    return emit_(m);
  }

  const SymbolicHeap& h_;
  int bound_;
  const std::map<Expr, long long>& env_;
  const std::vector<long long>& levels_;
  long long nextFresh_;
  const std::function<bool(const HeapModel&)>& emit_;
  std::set<long long> reusable_;
  std::map<long long, std::map<std::string, long long>> heap_;
};

bool pureHolds(const PureFormula& pi, const std::map<Expr, long long>& env) {
  Subst s;
  for (auto& [v, x] : env) s[v] = Expr::num(x);
  return satisfiable(subst(pi, s));
}

}  // namespace

bool holds(const HeapModel& m, const SymbolicHeap& h) { return Matcher(m, h.body, h.exists).run(); }

bool holds(const HeapModel& m, const QFHeap& h) {
  static const std::set<Expr> none;
  return Matcher(m, h, none).run();
}

void for_each_model(const SymbolicHeap& h, const std::vector<SymbolicHeap>& context, int bound,
                    const std::function<bool(const HeapModel&)>& visit) {
  Sorts sorts;
  sorts.scan(h.body);
  for (auto& c : context) sorts.scan(c.body);
  VarSet all = free_vars(h);
  all.insert(h.exists.begin(), h.exists.end());
  for (auto& c : context) {
    VarSet fv = free_vars(c);
    all.insert(fv.begin(), fv.end());
  }
  std::vector<Expr> addrVars, valueVars;
  for (auto& v : all) (sorts.isValue(v) ? valueVars : addrVars).push_back(v);

  std::set<long long> constSet;
  collectConstants(h.body, constSet);
  for (auto& c : context) collectConstants(c.body, constSet);
  std::vector<long long> pinned(constSet.begin(), constSet.end());
  long long gap = bound + 1;

  // value assignments (weak orderings interleaved with the constants)
  std::vector<std::map<Expr, long long>> valueEnvs;
  std::set<std::vector<long long>> seen;
  weakOrderings(pinned.size() + valueVars.size(), [&](const std::vector<int>& rank) {
    auto vals = realize(rank, pinned, gap);
    if (!vals || !seen.insert(*vals).second) return;
    std::map<Expr, long long> env;
    for (size_t k = 0; k < valueVars.size(); ++k) env[valueVars[k]] = (*vals)[pinned.size() + k];
    valueEnvs.push_back(env);
  });

  bool stop = false;
  std::map<Expr, long long> env;
  // restricted growth over {null, 1, 2, ...}
  std::function<void(size_t, long long)> addresses = [&](size_t k, long long used) {
    if (stop) return;
    if (k == addrVars.size()) {
      for (auto& venv : valueEnvs) {
        std::map<Expr, long long> full = env;
        full.insert(venv.begin(), venv.end());
        if (!pureHolds(h.body.pure, full)) continue;
        std::vector<long long> levels;
        for (auto& v : valueVars) levels.push_back(full[v]);
        levels.insert(levels.end(), pinned.begin(), pinned.end());
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        std::set<long long> slots;
        for (auto& v : addrVars) slots.insert(full[v]);
        Generator gen(h, bound, full, levels, slots, used + 1, visit);
        if (!gen.run()) {
          stop = true;
          return;
        }
      }
      return;
    }
    for (long long slot = 0; slot <= used + 1 && !stop; ++slot) {
      env[addrVars[k]] = slot;
      addresses(k + 1, std::max(used, slot));
    }
    env.erase(addrVars[k]);
  };
  addresses(0, 0);
}

std::optional<HeapModel> counter_model(const SymbolicHeap& lhs0, const SymbolicHeap& rhs, int bound) {
  // keep lhs witnesses apart from the rhs's free names
  SymbolicHeap lhs = lhs0;
  VarSet avoid = free_vars(rhs);
  avoid.insert(rhs.exists.begin(), rhs.exists.end());
  collectVars(lhs0.body, avoid);
  Subst ren;
  for (auto& x : lhs0.exists)
    if (free_vars(rhs).count(x)) {
      Expr y = fresh_var(x.name, avoid);
      avoid.insert(y);
      ren[x] = y;
    }
  if (!ren.empty()) {
    lhs.exists.clear();
    for (auto& x : lhs0.exists) lhs.exists.insert(ren.count(x) ? ren[x] : x);
    lhs.body = subst(lhs0.body, ren);
  }
  std::optional<HeapModel> cex;
  for_each_model(lhs, {rhs}, bound, [&](const HeapModel& m) {
    if (holds(m, rhs)) return true;
    cex = m;
    return false;
  });
  return cex;
}

bool entails_bounded(const SymbolicHeap& lhs, const SymbolicHeap& rhs, int bound) {
  return !counter_model(lhs, rhs, bound).has_value();
}

}  // namespace biabd
