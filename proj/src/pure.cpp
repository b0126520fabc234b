#include "biabd/pure.hpp"

#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace biabd {

namespace {

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Difference constraints x_dst - x_src <= w stored as shortest paths d[src][dst].
struct Graph {
  int n = 0;
  std::vector<long long> d;
  explicit Graph(int n_) : n(n_), d(static_cast<size_t>(n_) * n_, kInf) {
    for (int i = 0; i < n; ++i) at(i, i) = 0;
  }
  long long& at(int i, int j) { return d[static_cast<size_t>(i) * n + j]; }
  long long get(int i, int j) const { return d[static_cast<size_t>(i) * n + j]; }

  // x_dst - x_src <= w; false on negative cycle
  bool add(int src, int dst, long long w) {
    if (get(dst, src) + w < 0) return false;
    if (get(src, dst) <= w) return true;
    for (int i = 0; i < n; ++i) {
      long long a = get(i, src);
      if (a >= kInf) continue;
      for (int j = 0; j < n; ++j) {
        long long b = get(dst, j);
        if (b >= kInf) continue;
        if (a + w + b < at(i, j)) at(i, j) = a + w + b;
      }
    }
    return true;
  }
};

Expr norm(const Expr& e) { return e.isNull() ? Expr::num(0) : e; }

bool solveDiseqs(const Graph& g, const std::vector<std::pair<int, int>>& diseqs, size_t from) {
  for (size_t k = from; k < diseqs.size(); ++k) {
    auto [a, b] = diseqs[k];
    // separated when a path forces x_b - x_a <= -1 or x_a - x_b <= -1
    if (g.get(a, b) < 0 || g.get(b, a) < 0) continue;
    Graph lo = g;
    if (lo.add(b, a, -1) && solveDiseqs(lo, diseqs, k + 1)) return true;
    Graph hi = g;
    return hi.add(a, b, -1) && solveDiseqs(hi, diseqs, k + 1);
  }
  return true;
}

}  // namespace

bool satisfiable(const PureFormula& pi) {
  std::map<Expr, int> idx;
  auto id = [&](const Expr& e) {
    Expr n = norm(e);
    auto it = idx.find(n);
    if (it != idx.end()) return it->second;
    int k = static_cast<int>(idx.size());
    idx.emplace(n, k);
    return k;
  };
  for (auto& a : pi) {
    id(a.lhs);
    id(a.rhs);
  }
  UnionFind uf(idx.size());
  for (auto& a : pi)
    if (a.rel == Rel::Eq) uf.unite(id(a.lhs), id(a.rhs));

  // class representative -> constant value
  std::map<int, long long> constOf;
  for (auto& [e, k] : idx) {
    if (e.kind != Expr::Kind::Int) continue;
    int r = uf.find(k);
    auto it = constOf.find(r);
    if (it != constOf.end() && it->second != e.value) return false;
    constOf[r] = e.value;
  }

  std::map<int, int> node;  // class rep -> graph node
  auto nodeOf = [&](int rep) {
    auto it = node.find(rep);
    if (it != node.end()) return it->second;
    int k = static_cast<int>(node.size());
    node.emplace(rep, k);
    return k;
  };
  for (auto& [rep, v] : constOf) nodeOf(rep);
  for (auto& a : pi)
    if (a.rel == Rel::Lt || a.rel == Rel::Leq) {
      nodeOf(uf.find(id(a.lhs)));
      nodeOf(uf.find(id(a.rhs)));
    }

  Graph g(static_cast<int>(node.size()));
  for (auto& [r1, v1] : constOf)
    for (auto& [r2, v2] : constOf)
      if (r1 != r2 && !g.add(node[r1], node[r2], v2 - v1)) return false;
  for (auto& a : pi) {
    if (a.rel != Rel::Lt && a.rel != Rel::Leq) continue;
    int x = node[uf.find(id(a.lhs))], y = node[uf.find(id(a.rhs))];
    // x <= y  :  x - y <= 0 ;  x < y  :  x - y <= -1
    if (!g.add(y, x, a.rel == Rel::Lt ? -1 : 0)) return false;
  }

  std::vector<std::pair<int, int>> diseqs;
  for (auto& a : pi) {
    if (a.rel != Rel::Neq) continue;
    int x = uf.find(id(a.lhs)), y = uf.find(id(a.rhs));
    if (x == y) return false;
    auto nx = node.find(x), ny = node.find(y);
    // a class outside the ordering graph can always take a fresh value
    if (nx == node.end() || ny == node.end()) continue;
    if (g.get(nx->second, ny->second) == 0 && g.get(ny->second, nx->second) == 0) return false;
    diseqs.emplace_back(nx->second, ny->second);
  }
  return solveDiseqs(g, diseqs, 0);
}

PureContext PureContext::build(const PureFormula& pi) {
  PureContext c;
  c.atoms_ = pi;
  c.consistent_ = satisfiable(pi);
  return c;
}

bool PureContext::entails_atom(const PureAtom& a) const {
  if (!consistent_) return true;
  if (a.trivial() || atoms_.count(a)) return true;
  if (a.lhs.isConst() && a.rhs.isConst()) {
    PureFormula only{a.negate()};
    return !satisfiable(only);
  }
  PureFormula ext = atoms_;
  ext.insert(a.negate());
  return !satisfiable(ext);
}

bool PureContext::entails(const PureFormula& pi) const {
  for (auto& a : pi)
    if (!entails_atom(a)) return false;
  return true;
}

PureContext PureContext::with(const PureFormula& extra) const {
  PureFormula all = atoms_;
  all.insert(extra.begin(), extra.end());
  return build(all);
}

}  // namespace biabd
