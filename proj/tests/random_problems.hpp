#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "biabd/frontend.hpp"

namespace biabd::testing {

// Small problems over one data-structure family: lists (ls, sls, cells with n
// or n,v) or trees (tree, stree, cells with l,r or l,r,v). At most
// `maxAtoms` spatial atoms per side and `maxVars` variables overall.
class ProblemGenerator {
 public:
  explicit ProblemGenerator(unsigned seed, int maxAtoms = 3, int maxVars = 4)
      : rng_(seed), maxAtoms_(maxAtoms), maxVars_(maxVars) {}

  Problem next() {
    Problem p;
    p.name = "random" + std::to_string(count_++);
    trees_ = pick(2) == 1;
    sorted_ = pick(2) == 1;
    int addrCount = 1 + pick(sorted_ ? 2 : 3);
    int valCount = sorted_ ? 1 + pick(std::max(1, maxVars_ - addrCount)) : 0;
    if (addrCount + valCount > maxVars_) valCount = maxVars_ - addrCount;
    addrs_.clear();
    vals_.clear();
    const char* an[] = {"x", "y", "z", "w"};
    const char* vn[] = {"a", "b", "c"};
    for (int i = 0; i < addrCount; ++i) addrs_.push_back(Expr::prog(an[i]));
    for (int i = 0; i < valCount; ++i) vals_.push_back(Expr::prog(vn[i]));
    p.lhs.body = side(true);
    p.rhs.body = side(false);
    return p;
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  Expr addr(bool allowNull = true) {
    if (allowNull && pick(4) == 0) return Expr::null();
    return addrs_[pick(static_cast<int>(addrs_.size()))];
  }
  Expr val() { return vals_[pick(static_cast<int>(vals_.size()))]; }

  // Antecedent cells get distinct roots so that most antecedents are consistent.
  SpatialAtom atom(std::vector<Expr>* usedRoots) {
    int k = pick(3);
    if (k == 0 && usedRoots && usedRoots->size() == addrs_.size()) k = 1;
    if (k == 0) {
      std::vector<std::pair<std::string, Expr>> rec;
      if (trees_) {
        rec = {{"l", addr()}, {"r", addr()}};
      } else {
        rec = {{"n", addr()}};
      }
      if (sorted_) rec.emplace_back("v", val());
      Expr root = addr(false);
      if (usedRoots) {
        while (std::find(usedRoots->begin(), usedRoots->end(), root) != usedRoots->end()) root = addr(false);
        usedRoots->push_back(root);
      }
      return SpatialAtom::pointsTo(root, rec);
    }
    if (trees_) {
      if (sorted_ && k == 2) return SpatialAtom::stree(addr(), val(), val());
      return SpatialAtom::tree(addr());
    }
    if (sorted_ && k == 2) return SpatialAtom::sls(addr(), val(), val(), addr());
    return SpatialAtom::ls(addr(), addr());
  }

  QFHeap side(bool antecedent) {
    QFHeap h;
    std::vector<Expr> roots;
    int n = pick(maxAtoms_ + 1);
    for (int i = 0; i < n; ++i) h.add(atom(antecedent ? &roots : nullptr));
    int pures = pick(3);
    for (int i = 0; i < pures; ++i) {
      if (!vals_.empty() && pick(2) == 0) {
        Expr a = val(), b = val();
        if (a == b && vals_.size() > 1) continue;
        h.pure.insert(pick(2) ? PureAtom::leq(a, b) : PureAtom::lt(a, b));
      } else {
        Expr a = addr(), b = addr();
        if (a == b) continue;
        h.pure.insert(pick(2) ? PureAtom::eq(a, b) : PureAtom::neq(a, b));
      }
    }
    std::erase_if(h.pure, [](const PureAtom& a) { return a.trivial(); });
    h.canonicalize();
    return h;
  }

  std::mt19937 rng_;
  int maxAtoms_;
  int maxVars_;
  int count_ = 0;
  bool trees_ = false;
  bool sorted_ = false;
  std::vector<Expr> addrs_;
  std::vector<Expr> vals_;
};

}  // namespace biabd::testing
