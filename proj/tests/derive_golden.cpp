// Derives the spatial anti-frame/frame of a problem with the bounded model
// checker alone: the smallest candidate M (predicate atoms over the problem's
// variables) and then the smallest F (a sub-multiset of the lhs) such that
// lhs * M has a model and lhs * M |= rhs * F up to the bound.
//
//   derive_golden <problem.sl> <bound>              print the golden text
//   derive_golden <problem.sl> <bound> <golden>     compare with a frozen file

#include <fstream>
#include <iostream>
#include <sstream>

#include "biabd/frontend.hpp"
#include "biabd/oracle.hpp"

using namespace biabd;

namespace {

std::vector<SpatialAtom> candidates(const Problem& p) {
  std::set<SpatialKind> kinds;
  VarSet vs = vars(p.lhs.body);
  collectVars(p.rhs.body, vs);
  for (auto* h : {&p.lhs, &p.rhs})
    for (auto& a : h->body.spatial)
      if (a.isPred()) kinds.insert(a.kind);
  // value variables are those used in value positions
  VarSet values;
  for (auto* h : {&p.lhs, &p.rhs})
    for (auto& a : h->body.spatial) {
      if (a.hasValues()) values.insert(a.args.begin() + 1, a.args.begin() + 3);
      if (auto v = a.field("v")) values.insert(*v);
    }
  for (auto* h : {&p.lhs, &p.rhs})
    for (auto& x : h->exists) vs.erase(x);
  std::vector<Expr> addrs, vals;
  for (auto& v : vs) (values.count(v) ? vals : addrs).push_back(v);

  std::vector<SpatialAtom> out;
  for (auto k : kinds)
    for (auto& a : addrs) switch (k) {
        case SpatialKind::Tree: out.push_back(SpatialAtom::tree(a)); break;
        case SpatialKind::Ls:
          for (auto& b : addrs)
            if (a != b) out.push_back(SpatialAtom::ls(a, b));
          out.push_back(SpatialAtom::ls(a, Expr::null()));
          break;
        case SpatialKind::Stree:
          for (auto& lo : vals)
            for (auto& hi : vals) out.push_back(SpatialAtom::stree(a, lo, hi));
          break;
        case SpatialKind::Sls:
          for (auto& lo : vals)
            for (auto& hi : vals) out.push_back(SpatialAtom::sls(a, lo, hi, Expr::null()));
          break;
        default: break;
      }
  return out;
}

std::string spatialText(const std::vector<SpatialAtom>& atoms) {
  QFHeap h;
  for (auto& a : atoms) h.add(a);
  if (h.spatial.empty()) return "emp";
  std::string out;
  for (auto& a : h.spatial) out += (out.empty() ? "" : " * ") + render(a);
  return out;
}

template <class F>
void subsets(const std::vector<SpatialAtom>& pool, size_t size, size_t from, std::vector<SpatialAtom>& cur, F&& visit) {
  if (cur.size() == size) {
    visit(cur);
    return;
  }
  for (size_t i = from; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    subsets(pool, size, i + 1, cur, visit);
    cur.pop_back();
  }
}

std::string derive(const Problem& p, int bound) {
  auto pool = candidates(p);
  std::vector<std::string> found;
  for (size_t m = 0; m <= 4 && found.empty(); ++m) {
    std::vector<SpatialAtom> cur;
    subsets(pool, m, 0, cur, [&](const std::vector<SpatialAtom>& ms) {
      SymbolicHeap l = p.lhs;
      for (auto& a : ms) l.body.add(a);
      bool sat = false;
      for_each_model(l, {p.rhs}, bound, [&](const HeapModel&) { return !(sat = true); });
      if (!sat) return;
      for (size_t f = 0; f <= p.lhs.body.spatial.size(); ++f) {
        bool hit = false;
        std::vector<SpatialAtom> fc;
        subsets(p.lhs.body.spatial, f, 0, fc, [&](const std::vector<SpatialAtom>& fs) {
          SymbolicHeap r = p.rhs;
          for (auto& a : fs) r.body.add(a);
          if (!entails_bounded(l, r, bound)) return;
          found.push_back("M: " + spatialText(ms) + "\nF: " + spatialText(fs));
          hit = true;
        });
        if (hit) break;
      }
    });
  }
  std::string out;
  for (auto& s : found) out += s + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: derive_golden <problem> <bound> [golden]\n";
    return 3;
  }
  Problem p = load_problem(argv[1]);
  std::string got = derive(p, std::stoi(argv[2]));
  if (argc == 3) {
    std::cout << got;
    return 0;
  }
  std::ifstream in(argv[3]);
  std::stringstream want;
  want << in.rdbuf();
  if (want.str() != got) {
    std::cerr << "derived:\n" << got << "frozen:\n" << want.str();
    return 1;
  }
  std::cout << p.name << ": frozen golden re-derived\n";
  return 0;
}
