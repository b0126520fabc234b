#include <gtest/gtest.h>

#include <filesystem>

#include "biabd/frontend.hpp"
#include "biabd/oracle.hpp"
#include "random_problems.hpp"

using namespace biabd;

namespace {

const std::string fixtures = FIXTURE_DIR;

Problem fixture(const std::string& rel) { return load_problem(fixtures + "/" + rel); }

SearchConfig tracing() {
  SearchConfig c;
  c.recordTrace = true;
  c.timeoutMillis = 10000;
  return c;
}

std::vector<Problem> allFixtures() {
  std::vector<Problem> out;
  for (auto dir : {"", "smallfoot", "trees", "sls"})
    for (auto& e : std::filesystem::directory_iterator(fixtures + "/" + dir))
      if (e.path().extension() == ".sl") out.push_back(load_problem(e.path().string()));
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.sourcePath < b.sourcePath; });
  return out;
}

std::string answerText(const SolveResult& r) {
  std::string s = status_name(r.status);
  for (auto& sol : r.solutions)
    s += "\n" + render(sol.guards) + " | " + render(sol.antiframe) + " | " + render(sol.frame) +
         (sol.validated ? " ok" : " -");
  return s;
}

bool closingRule(const std::string& rule) { return rule == "EMP" || rule == "IDENT" || rule == "INF-PURE"; }

void expectDecreasing(const Problem& p, const SolveResult& r) {
  SizeBudget budget = SizeBudget::forGoal(make_goal(p.lhs, p.rhs));
  for (auto& step : r.trace.steps) {
    if (closingRule(step.rule)) continue;
    SizeTriple before = size(step.before, budget);
    for (auto& child : step.after)
      ASSERT_LT(size(child, budget), before) << p.name << " " << step.rule << "\n  " << render(step.before)
                                             << "\n  " << render(child);
  }
}

}  // namespace

TEST(Solve, OverviewFindsFrameAndAntiFrame) {
  Problem p = fixture("overview.sl");
  SolveResult r = solve(p.lhs, p.rhs);
  ASSERT_EQ(r.status, Status::Solved);
  ASSERT_EQ(r.solutions.size(), 1u);
  EXPECT_EQ(render(r.solutions[0].antiframe.body.spatial[0]), "y->[n:z]");
  EXPECT_EQ(render(r.solutions[0].frame.body.spatial[0]), "a->[n:b]");
  EXPECT_TRUE(r.solutions[0].validated);
}

TEST(Solve, PointerAliasProblemHasNoSolution) {
  Problem p = fixture("smallfoot/vc37.sl");
  EXPECT_EQ(solve(p.lhs, p.rhs).status, Status::NoSolution);
}

TEST(Solve, ValidEntailmentNeedsNoAntiFrame) {
  Problem p = fixture("smallfoot/vc21.sl");
  SolveResult r = solve(p.lhs, p.rhs);
  ASSERT_EQ(r.status, Status::Solved);
  ASSERT_EQ(r.solutions.size(), 1u);
  EXPECT_EQ(render(r.solutions[0].antiframe), "true : emp");
  EXPECT_EQ(render(r.solutions[0].frame), "null!=x1 : emp");
}

TEST(Solve, TreeNodeNeedsItsSubtrees) {
  Problem p = fixture("trees/row01.sl");
  SolveResult r = solve(p.lhs, p.rhs);
  ASSERT_EQ(r.status, Status::Solved);
  EXPECT_EQ(render(r.solutions[0].antiframe), "true : tree(l) * tree(r)");
}

TEST(Solve, InconsistentAntecedentIsVacuouslySolved) {
  SolveResult r = solve(parse_heap("x->y * x->z"), parse_heap("ls(w,null)"));
  EXPECT_EQ(r.status, Status::Solved);
  EXPECT_TRUE(r.solutions.empty());
}

TEST(Solve, TimeoutIsReported) {
  Problem p = fixture("sls/join3_alloc.sl");
  SearchConfig c;
  c.timeoutMillis = 0;
  EXPECT_EQ(solve(p.lhs, p.rhs, c).status, Status::Timeout);
}

TEST(Prove, ExactEntailments) {
  EXPECT_TRUE(prove(parse_heap("x->y * y->null"), parse_heap("ls(x,null)")));
  EXPECT_TRUE(prove(parse_heap("x!=null & tree(x)"), parse_heap("Ex L,R. x->[l:L,r:R] * tree(L) * tree(R)")));
  EXPECT_TRUE(prove(parse_heap("stree(x,a,b)"), parse_heap("tree(x)")));
  EXPECT_FALSE(prove(parse_heap("ls(x,null)"), parse_heap("x->null")));
  EXPECT_FALSE(prove(parse_heap("x->[n:y,v:a] * y->[n:null,v:b]"), parse_heap("sls(x,a,b,null)")));
}

TEST(Prove, AgreesWithBoundedModelsWhenItSaysValid) {
  biabd::testing::ProblemGenerator gen(31);
  SearchConfig c;
  c.allowFrame = false;
  c.timeoutMillis = 5000;
  int proved = 0;
  for (int i = 0; i < 300; ++i) {
    Problem p = gen.next();
    if (!prove(p.lhs, p.rhs, c)) continue;
    ++proved;
    auto cm = counter_model(p.lhs, p.rhs, 4);
    ASSERT_FALSE(cm) << render_native(p) << "\n  " << render(*cm);
  }
  EXPECT_GT(proved, 10);
}

TEST(Search, IsDeterministic) {
  for (auto& p : allFixtures()) {
    auto a = solve(p.lhs, p.rhs, tracing()), b = solve(p.lhs, p.rhs, tracing());
    ASSERT_EQ(answerText(a), answerText(b)) << p.name;
    ASSERT_EQ(a.trace.steps.size(), b.trace.steps.size()) << p.name;
    for (size_t i = 0; i < a.trace.steps.size(); ++i) ASSERT_EQ(a.trace.steps[i].rule, b.trace.steps[i].rule);
  }
}

TEST(Search, SizeDecreasesOnFixtureTraces) {
  for (auto& p : allFixtures()) {
    SearchConfig c = tracing();
    auto r = solve(p.lhs, p.rhs, c);
    EXPECT_LE(r.deepestPhase, c.maxDepth);
    expectDecreasing(p, r);
  }
}

TEST(Search, SizeDecreasesOnRandomTraces) {
  biabd::testing::ProblemGenerator gen(32);
  for (int i = 0; i < 200; ++i) {
    Problem p = gen.next();
    auto r = solve(p.lhs, p.rhs, tracing());
    expectDecreasing(p, r);
  }
}

TEST(Search, SolutionsHoldInBoundedModels) {
  biabd::testing::ProblemGenerator gen(33);
  for (int i = 0; i < 150; ++i) {
    Problem p = gen.next();
    SearchConfig c;
    c.timeoutMillis = 5000;
    auto r = solve(p.lhs, p.rhs, c);
    for (auto& s : r.solutions) {
      auto [l, rr] = validation_query(p.lhs, p.rhs, s);
      auto cm = counter_model(l, rr, 3);
      ASSERT_FALSE(cm) << render_native(p) << "\n  M=" << render(s.antiframe) << " F=" << render(s.frame);
    }
  }
}

TEST(Search, AntiFrameNeverMentionsAntecedentWitnesses) {
  Problem p = fixture("trees/row06.sl");
  auto r = solve(p.lhs, p.rhs);
  ASSERT_EQ(r.status, Status::Solved);
  VarSet inputs = vars(p.lhs.body);
  collectVars(p.rhs.body, inputs);
  for (auto& s : r.solutions) {
    VarSet mv = vars(s.antiframe.body);
    for (auto& x : mv) EXPECT_TRUE(inputs.count(x) || s.antiframe.exists.count(x)) << x.name;
  }
}
