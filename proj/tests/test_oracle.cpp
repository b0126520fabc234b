#include <gtest/gtest.h>

#include "biabd/frontend.hpp"
#include "biabd/oracle.hpp"

using namespace biabd;

namespace {

int countModels(const std::string& text, int bound) {
  int n = 0;
  for_each_model(parse_heap(text), {}, bound, [&](const HeapModel&) {
    ++n;
    return true;
  });
  return n;
}

HeapModel model(std::map<std::string, long long> stack, std::map<long long, std::map<std::string, long long>> heap) {
  HeapModel m;
  for (auto& [k, v] : stack) m.stack[Expr::var(k)] = v;
  m.heap = std::move(heap);
  return m;
}

}  // namespace

TEST(Holds, PointsToNeedsExactlyOneCell) {
  auto m = model({{"x", 1}, {"y", 0}}, {{1, {{"n", 0}}}});
  EXPECT_TRUE(holds(m, parse_heap("x->y")));
  EXPECT_TRUE(holds(m, parse_heap("ls(x,null)")));
  EXPECT_FALSE(holds(m, parse_heap("emp")));
  EXPECT_FALSE(holds(model({{"x", 1}, {"y", 0}}, {}), parse_heap("x->y")));
}

TEST(Holds, SortedListChecksOrder) {
  auto m = model({{"x", 1}, {"a", 3}, {"b", 7}}, {{1, {{"n", 2}, {"v", 3}}}, {2, {{"n", 0}, {"v", 7}}}});
  EXPECT_TRUE(holds(m, parse_heap("sls(x,a,b,null)")));
  auto bad = model({{"x", 1}, {"a", 7}, {"b", 3}}, {{1, {{"n", 2}, {"v", 7}}}, {2, {{"n", 0}, {"v", 3}}}});
  EXPECT_FALSE(holds(bad, parse_heap("sls(x,a,b,null)")));
}

TEST(Holds, ExistentialWitnessesAreSearched) {
  auto m = model({{"x", 1}}, {{1, {{"n", 2}}}, {2, {{"n", 0}}}});
  EXPECT_TRUE(holds(m, parse_heap("Ex Y. x->Y * Y->null")));
  EXPECT_FALSE(holds(m, parse_heap("Ex Y. x->Y * Y->Y")));
}

TEST(Enumeration, CountsShapesUpToRenaming) {
  EXPECT_EQ(countModels("ls(x,null)", 3), 4);  // lengths 0..3
  EXPECT_EQ(countModels("tree(x)", 3), 9);     // 1 + 1 + 2 + 5 shapes
  EXPECT_EQ(countModels("x->y", 3), 3);        // y dangling, y = x or y = null
}

TEST(Enumeration, EveryModelSatisfiesTheFormula) {
  for (auto text : {"ls(x,y) * ls(y,z)", "sls(x,a,b,null)", "stree(x,a,b)", "x->[l:y,r:null] * tree(y)"}) {
    SymbolicHeap h = parse_heap(text);
    for_each_model(h, {}, 3, [&](const HeapModel& m) {
      EXPECT_TRUE(holds(m, h)) << text << " " << render(m);
      return true;
    });
  }
}

TEST(CounterModel, KnownEntailments) {
  EXPECT_TRUE(entails_bounded(parse_heap("x->y * y->null"), parse_heap("ls(x,null)"), 4));
  EXPECT_TRUE(entails_bounded(parse_heap("stree(x,a,b)"), parse_heap("a<=b : tree(x)"), 4));
  EXPECT_FALSE(entails_bounded(parse_heap("ls(x,y) * ls(y,z)"), parse_heap("ls(x,z)"), 4));
  EXPECT_FALSE(entails_bounded(parse_heap("x->[n:y,v:a] * y->[n:null,v:b]"), parse_heap("sls(x,a,b,null)"), 4));
  EXPECT_TRUE(entails_bounded(parse_heap("a<=b : x->[n:y,v:a] * y->[n:null,v:b]"), parse_heap("sls(x,a,b,null)"), 4));
}

// A predicate has the same bounded models as its two unfolding cases.
TEST(Unfolding, MatchesThePredicateSemantics) {
  for (auto text : {"ls(x,y)", "sls(x,a,b,y)", "tree(x)", "stree(x,a,b)"}) {
    SymbolicHeap p = parse_heap(text);
    auto u = unfold(p.body.spatial[0], vars(p.body));
    SymbolicHeap base(u.base);
    for_each_model(p, {base, u.rec}, 3, [&](const HeapModel& m) {
      EXPECT_TRUE(holds(m, base) || holds(m, u.rec)) << text << " " << render(m);
      return true;
    });
    for (auto* c : {&base, &u.rec})
      for_each_model(*c, {p}, 3, [&](const HeapModel& m) {
        EXPECT_TRUE(holds(m, p)) << text << " " << render(m);
        return true;
      });
  }
}
