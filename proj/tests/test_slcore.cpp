#include <gtest/gtest.h>

#include "biabd/frontend.hpp"
#include "biabd/slcore.hpp"

using namespace biabd;

namespace {

Expr v(const char* n) { return Expr::var(n); }
const Expr nil = Expr::null();

QFHeap heap(const std::string& text) { return parse_heap(text).body; }

bool violates(const QFHeap& h, NfClause c) {
  auto rep = is_normal_form(h);
  for (auto& [clause, _] : rep.violations)
    if (clause == c) return true;
  return false;
}

}  // namespace

TEST(Expr, CanonicalOrderPutsNullFirstAndLogicalLast) {
  EXPECT_LT(nil, Expr::num(3));
  EXPECT_LT(Expr::num(3), v("x"));
  EXPECT_LT(v("x"), v("X"));
  EXPECT_EQ(v("X").kind, Expr::Kind::Log);
  EXPECT_EQ(v("x").kind, Expr::Kind::Prog);
}

TEST(PureAtom, EqualitiesAreStoredInCanonicalOrder) {
  EXPECT_EQ(PureAtom::eq(v("y"), v("x")), PureAtom::eq(v("x"), v("y")));
  EXPECT_EQ(PureAtom::neq(v("x"), nil).lhs, nil);
  EXPECT_NE(PureAtom::lt(v("y"), v("x")), PureAtom::lt(v("x"), v("y")));
}

TEST(PureAtom, NegationFlipsRelations) {
  EXPECT_EQ(PureAtom::eq(v("x"), v("y")).negate(), PureAtom::neq(v("x"), v("y")));
  EXPECT_EQ(PureAtom::lt(v("a"), v("b")).negate(), PureAtom::leq(v("b"), v("a")));
  EXPECT_EQ(PureAtom::leq(v("a"), v("b")).negate(), PureAtom::lt(v("b"), v("a")));
}

TEST(PureAtom, TrivialAtomsAreValidOnTheirOwn) {
  EXPECT_TRUE(PureAtom::eq(v("x"), v("x")).trivial());
  EXPECT_TRUE(PureAtom::leq(v("a"), v("a")).trivial());
  EXPECT_TRUE(PureAtom::lt(Expr::num(100), Expr::num(200)).trivial());
  EXPECT_TRUE(PureAtom::eq(nil, Expr::num(0)).trivial());
  EXPECT_FALSE(PureAtom::lt(v("a"), v("a")).trivial());
  EXPECT_FALSE(PureAtom::neq(nil, Expr::num(0)).trivial());
  EXPECT_FALSE(PureAtom::eq(v("x"), v("y")).trivial());
}

TEST(Render, UsesTheNativeSyntax) {
  SymbolicHeap h = parse_heap("Ex K. x != null & x->[n:y,v:K] * sls(y,K,b,null)");
  EXPECT_EQ(render(h), "Ex K. null!=x : x->[n:y,v:K] * sls(y,K,b,null)");
  EXPECT_EQ(render(QFHeap{}), "true : emp");
}

TEST(Subst, AvoidsCapturingBoundNames) {
  SymbolicHeap h = parse_heap("Ex Y. x->Y");
  SymbolicHeap r = subst(h, Subst{{v("x"), v("Y")}});
  ASSERT_EQ(r.exists.size(), 1u);
  Expr bound = *r.exists.begin();
  EXPECT_NE(bound, v("Y"));
  EXPECT_EQ(r.body.spatial[0].root(), v("Y"));
  EXPECT_EQ(*r.body.spatial[0].field("n"), bound);
}

TEST(FreshVar, IsDeterministic) {
  VarSet avoid{v("E"), v("E0")};
  EXPECT_EQ(fresh_var("E", avoid).name, "E1");
  EXPECT_EQ(fresh_var("F", avoid).name, "F");
}

TEST(AlphaCanonical, IdentifiesRenamedBoundVariables) {
  auto a = alpha_canonical(parse_heap("Ex U,W. x->U * ls(U,W)"));
  auto b = alpha_canonical(parse_heap("Ex P,Q. x->P * ls(P,Q)"));
  EXPECT_EQ(render(a), render(b));
  auto c = alpha_canonical(parse_heap("Ex P,Q. x->Q * ls(P,Q)"));
  EXPECT_NE(render(a), render(c));
}

TEST(Unfold, ListSegment) {
  auto u = unfold(SpatialAtom::ls(v("x"), v("y")), {});
  EXPECT_TRUE(u.base.spatial.empty());
  EXPECT_TRUE(u.base.pure.count(PureAtom::eq(v("x"), v("y"))));
  ASSERT_EQ(u.rec.exists.size(), 1u);
  EXPECT_TRUE(u.rec.body.pure.count(PureAtom::neq(v("x"), v("y"))));
  EXPECT_EQ(u.rec.body.spatial.size(), 2u);
}

TEST(Unfold, SortedTreeBoundsTheNodeValue) {
  auto u = unfold(SpatialAtom::stree(v("x"), v("a"), v("b")), {});
  EXPECT_TRUE(u.base.pure.count(PureAtom::eq(v("x"), nil)));
  EXPECT_TRUE(u.base.pure.count(PureAtom::eq(v("a"), v("b"))));
  EXPECT_EQ(u.rec.body.spatial.size(), 3u);
  int orderings = 0;
  for (auto& a : u.rec.body.pure)
    if (a.rel == Rel::Leq) ++orderings;
  EXPECT_EQ(orderings, 2);
}

TEST(Unfold, FreshNamesAvoidTheContext) {
  VarSet avoid{v("E"), v("V")};
  auto u = unfold(SpatialAtom::sls(v("x"), v("a"), v("b"), nil), avoid);
  for (auto& e : u.rec.exists) EXPECT_FALSE(avoid.count(e)) << e.name;
}

TEST(Guard, PerPredicate) {
  EXPECT_EQ(guard(SpatialAtom::ls(v("x"), v("y"))), PureFormula{PureAtom::neq(v("x"), v("y"))});
  EXPECT_EQ(guard(SpatialAtom::tree(v("x"))), PureFormula{PureAtom::neq(v("x"), nil)});
  EXPECT_TRUE(guard(SpatialAtom::pointsTo(v("x"), {{"n", v("y")}})).empty());
}

// One check per normal-form clause: a violating heap and a conforming one.
TEST(NormalForm, GuardPresent) {
  EXPECT_TRUE(violates(heap("ls(x,y)"), NfClause::GuardPresent));
  EXPECT_FALSE(violates(heap("x!=y & null!=x & ls(x,y)"), NfClause::GuardPresent));
}

TEST(NormalForm, RootNonNull) {
  EXPECT_TRUE(violates(heap("x->y"), NfClause::RootNonNull));
  EXPECT_FALSE(violates(heap("x!=null & x->y"), NfClause::RootNonNull));
}

TEST(NormalForm, RootsDistinct) {
  EXPECT_TRUE(violates(heap("x!=null & y!=null & x->z * y->z"), NfClause::RootsDistinct));
  EXPECT_FALSE(violates(heap("x!=null & y!=null & x!=y & x->z * y->z"), NfClause::RootsDistinct));
}

TEST(NormalForm, NoEquality) {
  EXPECT_TRUE(violates(heap("x=y & x!=null & x->z"), NfClause::NoEquality));
  EXPECT_FALSE(violates(heap("x!=null & x->z"), NfClause::NoEquality));
}

TEST(NormalForm, NoSelfDisequality) {
  QFHeap h;
  h.pure.insert(PureAtom::neq(v("x"), v("x")));
  EXPECT_TRUE(violates(h, NfClause::NoSelfDiseq));
  EXPECT_FALSE(violates(heap("x!=y"), NfClause::NoSelfDiseq));
}

TEST(NormalForm, Satisfiable) {
  EXPECT_TRUE(violates(heap("a<b & b<a"), NfClause::Satisfiable));
  EXPECT_FALSE(violates(heap("a<b & b<=c"), NfClause::Satisfiable));
}

TEST(NormalForm, FullyNormalizedHeapPasses) {
  auto rep = is_normal_form(heap("w!=null & x!=null & w!=x & y!=null & y!=w & y!=x & y!=z & k<=l & "
                                 "w->[x,i] * x->[y,j] * sls(y,k,l,z)"));
  EXPECT_TRUE(rep.ok);
}
