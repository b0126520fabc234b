#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "biabd/frontend.hpp"
#include "random_problems.hpp"

using namespace biabd;

namespace {

const std::string fixtures = FIXTURE_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "biabd");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(NativeParser, ListProblem) {
  Problem p = parse_native("x!=null & x->[y] * ls(y,null) |- ls(x,null)");
  EXPECT_EQ(render(p.lhs), "null!=x : x->[n:y] * ls(y,null)");
  EXPECT_EQ(render(p.rhs), "true : ls(x,null)");
}

TEST(NativeParser, SortedListProblemUsesValueFields) {
  Problem p = parse_native("w->[x,i] * x->[y,j] * sls(y,k,l,z) |- sls(x,j,l,z) * z->[null]");
  EXPECT_EQ(render(p.lhs), "true : w->[n:x,v:i] * x->[n:y,v:j] * sls(y,k,l,z)");
  EXPECT_EQ(render(p.rhs), "true : z->[n:null] * sls(x,j,l,z)");
}

TEST(NativeParser, TwoFieldsInTreeProblemsAreChildren) {
  Problem p = parse_native("x->[a,b] |- tree(x)");
  EXPECT_EQ(render(p.lhs), "true : x->[l:a,r:b]");
  Problem q = parse_native("x->[a,b,c] |- stree(x,c,c)");
  EXPECT_EQ(render(q.lhs), "true : x->[l:a,r:b,v:c]");
}

TEST(NativeParser, CommentsAndStatus) {
  Problem p = parse_native("# a comment\n# status: invalid\nx->y # trailing\n|- emp\n", "named");
  EXPECT_EQ(p.name, "named");
  EXPECT_EQ(p.expectedStatus, "invalid");
  EXPECT_EQ(render(p.rhs), "true : emp");
}

TEST(NativeParser, OrderingsAndExistentials) {
  Problem p = parse_native("a > b & c >= d |- Ex X,Y. x->[n:X,v:Y] & Y<=a");
  EXPECT_TRUE(p.lhs.body.pure.count(PureAtom::lt(Expr::prog("b"), Expr::prog("a"))));
  EXPECT_TRUE(p.lhs.body.pure.count(PureAtom::leq(Expr::prog("d"), Expr::prog("c"))));
  EXPECT_EQ(p.rhs.exists.size(), 2u);
}

TEST(NativeParser, ErrorsCarryPositions) {
  EXPECT_THROW(parse_native(""), ParseError);
  EXPECT_THROW(parse_native("# only a comment\n"), ParseError);
  try {
    parse_native("x->y |-\n  ls(x,y,z)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_EQ(e.column, 3);
  }
  EXPECT_THROW(parse_native("x->y"), ParseError);
  EXPECT_THROW(parse_native("x->y |- foo(x)"), ParseError);
  EXPECT_THROW(parse_native("x->[n:y,n:z] |- emp"), ParseError);
  EXPECT_THROW(parse_native("x $ y |- emp"), ParseError);
}

TEST(NativeParser, RoundTripsRenderedHeaps) {
  biabd::testing::ProblemGenerator gen(41);
  for (int i = 0; i < 300; ++i) {
    Problem p = gen.next();
    SymbolicHeap h = p.lhs;
    // quantify one variable now and then
    VarSet vs = vars(h.body);
    if (!vs.empty() && gen.pick(3) == 0) h.exists.insert(*vs.begin());
    std::string text = render(h);
    SymbolicHeap back = parse_heap(text);
    ASSERT_EQ(back, h) << text << " vs " << render(back);
    ASSERT_EQ(render(back), text);
  }
}

TEST(NativeParser, ProblemRoundTrip) {
  Problem p = load_problem(fixtures + "/illustration.sl");
  Problem q = parse_native(render_native(p));
  EXPECT_EQ(q.lhs, p.lhs);
  EXPECT_EQ(q.rhs, p.rhs);
}

TEST(SmtlibParser, AgreesWithNativeTranscriptions) {
  for (auto name : {"vc21", "vc65", "join2_null", "row08"}) {
    Problem s = load_problem(fixtures + "/smtlib/" + name + ".smt2");
    Problem n = load_problem(fixtures + "/smtlib/" + name + ".sl");
    EXPECT_EQ(s.lhs, n.lhs) << name << ": " << render(s.lhs) << " vs " << render(n.lhs);
    EXPECT_EQ(s.rhs, n.rhs) << name << ": " << render(s.rhs) << " vs " << render(n.rhs);
    EXPECT_EQ(s.name, name);
  }
}

TEST(SmtlibParser, ReadsStatus) {
  EXPECT_EQ(load_problem(fixtures + "/smtlib/vc21.smt2").expectedStatus, "valid");
}

TEST(SmtlibParser, RejectsUnsupportedConstructs) {
  EXPECT_THROW(load_problem(fixtures + "/smtlib/undeclared_pred.smt2"), UnsupportedFeature);
  EXPECT_THROW(load_problem(fixtures + "/smtlib/wand.smt2"), UnsupportedFeature);
  EXPECT_THROW(parse_smtlib("(define-fun-rec dll ((x Int)) Bool true)"), UnsupportedFeature);
  EXPECT_THROW(parse_smtlib("(assert (pto x nil)"), ParseError);
  EXPECT_THROW(parse_smtlib(""), ParseError);
}

TEST(Cli, SolveOverviewAsJson) {
  auto r = cli({"solve", fixtures + "/overview.sl", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  auto& prob = doc["problems"][0];
  EXPECT_EQ(prob["name"], "overview");
  EXPECT_EQ(prob["status"], "solved");
  EXPECT_TRUE(prob.contains("solveMs"));
  EXPECT_TRUE(prob.contains("validateMs"));
  auto& sol = prob["solutions"][0];
  EXPECT_NE(sol["antiframe"].get<std::string>().find("y->[n:z]"), std::string::npos);
  EXPECT_NE(sol["frame"].get<std::string>().find("a->[n:b]"), std::string::npos);
  EXPECT_EQ(sol["validated"], true);
  EXPECT_TRUE(sol.contains("guards"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"solve", fixtures + "/smallfoot/vc37.sl"}).code, 1);
  EXPECT_EQ(cli({"prove", fixtures + "/smallfoot/vc29.sl"}).code, 1);
  EXPECT_EQ(cli({"prove", fixtures + "/smallfoot/vc21.sl"}).code, 0);
  EXPECT_EQ(cli({"solve", fixtures + "/missing.sl"}).code, 3);
  EXPECT_EQ(cli({"solve", fixtures + "/smtlib/wand.smt2"}).code, 3);
  EXPECT_EQ(cli({"solve", fixtures + "/overview.sl", "--format", "yaml"}).code, 3);
  EXPECT_EQ(cli({"frobnicate"}).code, 3);
  EXPECT_EQ(cli({"solve", fixtures + "/sls/join3_alloc.sl", "--timeout", "0"}).code, 0);
}

TEST(Cli, BenchWritesOneCsvRowPerFile) {
  auto r = cli({"bench", fixtures + "/smallfoot", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "name,status,solutionCount,bestM,bestF,solveMillis,validateMillis,validated");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Cli, OracleCheck) {
  auto r = cli({"oracle-check", fixtures + "/overview.sl", "--bound", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("ok (bound 3)"), std::string::npos);
}
