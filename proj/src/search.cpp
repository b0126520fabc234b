#include "biabd/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>

#include "biabd/infer.hpp"
#include "biabd/norm.hpp"
#include "biabd/subtract.hpp"

namespace biabd {

namespace {

using Clock = std::chrono::steady_clock;

double millisSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
  std::vector<Goal> closed;
  int failed = 0;
};

class Engine {
 public:
  Engine(const SearchConfig& cfg, const Goal& root, SolveResult& res)
      : cfg_(cfg), res_(res), deadline_(Clock::now() + std::chrono::milliseconds(cfg.timeoutMillis)) {
    env_.budget = SizeBudget::forGoal(root);
    env_.inference = cfg.inferenceEnabled;
    env_.allowFrame = cfg.allowFrame;
    env_.trace = cfg.recordTrace ? &res.trace : nullptr;
  }

  // Phase 1, then the rest of the loop for every resulting branch.
  Outcome run(const Goal& g) {
    checkDeadline();
    res_.deepestPhase = std::max(res_.deepestPhase, g.depth);
    if (g.depth > cfg_.maxDepth) return {{}, 1};
    Outcome out;
    for (auto& n : normalize(g, env_)) merge(out, afterNormalize(n));
    return out;
  }

 private:
  // Phases 2 and 3 on a normalized goal.
  Outcome afterNormalize(const Goal& n) {
    checkDeadline();
    if (cfg_.recordTrace) res_.normalForms.push_back(n.lhs);
    if (auto r = try_axioms(n)) {
      env_.record(r->rule, n, r->goals);
      return {{r->goals[0]}, 0};
    }
    if (auto r = subtract_step(n, env_)) {
      checkDecrease(n, *r);
      env_.record(r->rule, n, r->goals);
      Outcome out;
      for (auto& child : r->goals)
        for (auto& m : normalize(child, env_)) merge(out, afterNormalize(m));
      return out;
    }
    auto alternatives = infer_step(n, env_);
    if (alternatives.empty()) return {{}, 1};
    std::optional<Outcome> fallback;
    for (auto& alt : alternatives) {
      Outcome out;
      if (alt.closed) {
        env_.record(alt.rule, n, alt.goals);
        out.closed.push_back(alt.goals[0]);
      } else {
        checkDecrease(n, alt);
        env_.record(alt.rule, n, alt.goals);
        for (auto child : alt.goals) {
          child.depth = n.depth + 1;
          merge(out, run(child));
        }
      }
      if (out.failed == 0) return out;
      if (!fallback) fallback = std::move(out);
    }
    return *fallback;
  }

  void checkDecrease(const Goal& before, const RuleResult& r) const {
    SizeTriple s = size(before, env_.budget);
    for (auto& c : r.goals)
      if (!(size(c, env_.budget) < s)) throw BudgetExhausted(r.rule + " did not decrease the size");
  }

  void checkDeadline() const {
    if (Clock::now() > deadline_) throw SearchTimeout("timeout");
  }

  static void merge(Outcome& into, Outcome from) {
    into.failed += from.failed;
    for (auto& g : from.closed) into.closed.push_back(std::move(g));
  }

  const SearchConfig& cfg_;
  SolveResult& res_;
  RuleEnv env_;
  Clock::time_point deadline_;
};

bool mentionsAny(const PureAtom& a, const VarSet& vs) { return vs.count(a.lhs) || vs.count(a.rhs); }

// Removes antecedent-internal variables from a closed branch's answer.
Solution project(const Goal& g) {
  Solution s;
  for (auto& a : g.branchGuards)
    if (!mentionsAny(a, g.hidden) && !a.trivial()) s.guards.insert(a);
  s.antiframe = g.antiframe;
  std::erase_if(s.antiframe.body.pure, [](const PureAtom& a) { return a.trivial(); });
  for (auto& a : g.frame.body.pure)
    if (!mentionsAny(a, g.hidden) && !a.trivial()) s.frame.body.pure.insert(a);
  for (auto& a : g.frame.body.spatial) {
    s.frame.body.add(a);
    for (auto& e : a.args)
      if (g.isHidden(e)) s.frame.exists.insert(e);
  }
  return s;
}

// Frame atoms rooted at antecedent-internal variables may be empty in some
// sibling branches; the rest of the answer must agree.
std::string solutionKey(const Solution& s) {
  SymbolicHeap spatialOnly;
  spatialOnly.exists = s.frame.exists;
  for (auto& a : s.frame.body.spatial)
    if (!(a.isPred() && s.frame.exists.count(a.root()))) spatialOnly.body.add(a);
  return render(s.guards) + "|" + render(s.antiframe) + "|" + render(alpha_canonical(spatialOnly));
}

// Branches that differ only in splits on internal variables share guards and
// anti-frame; keep the largest frame and the pure frame facts common to all.
std::vector<Solution> mergeSiblings(std::vector<Solution> sols) {
  std::vector<Solution> out;
  std::map<std::string, size_t> index;
  for (auto& s : sols) {
    std::string key = solutionKey(s);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      out.push_back(std::move(s));
      continue;
    }
    Solution& kept = out[it->second];
    PureFormula common;
    for (auto& a : kept.frame.body.pure)
      if (s.frame.body.pure.count(a)) common.insert(a);
    if (s.frame.body.spatial.size() > kept.frame.body.spatial.size()) {
      kept.frame.exists = s.frame.exists;
      kept.frame.body.spatial = s.frame.body.spatial;
    }
    kept.frame.body.pure = common;
  }
  return out;
}

void rankSolutions(std::vector<Solution>& sols) {
  auto key = [](const Solution& s) {
    return std::tuple(s.antiframe.body.spatial.size(), s.frame.body.spatial.size(),
                      render(s.guards) + " " + render(s.antiframe) + " " + render(s.frame));
  };
  std::stable_sort(sols.begin(), sols.end(), [&](const Solution& a, const Solution& b) { return key(a) < key(b); });
}

SymbolicHeap renameBound(const SymbolicHeap& h, const std::set<std::string>& clash, std::set<std::string>& names) {
  SymbolicHeap r = h;
  Subst m;
  for (auto& x : h.exists)
    if (clash.count(x.name)) {
      Expr y = fresh_var(x.name, names);
      names.insert(y.name);
      m[x] = y;
    }
  if (m.empty()) return r;
  r.exists.clear();
  for (auto& x : h.exists) r.exists.insert(m.count(x) ? m[x] : x);
  r.body = subst(h.body, m);
  return r;
}

std::set<std::string> namesOf(const VarSet& vs) {
  std::set<std::string> out;
  for (auto& v : vs) out.insert(v.name);
  return out;
}

}  // namespace

SearchConfig default_config() {
  SearchConfig c;
  if (const char* t = std::getenv("BIABD_TIMEOUT_MS")) {
    long long v = std::atoll(t);
    if (v > 0) c.timeoutMillis = v;
  }
  return c;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Solved: return "solved";
    case Status::NoSolution: return "no-solution";
    case Status::Timeout: return "timeout";
  }
  return "?";
}

Goal make_goal(const SymbolicHeap& lhs0, const SymbolicHeap& rhs0) {
  std::set<std::string> names;
  VarSet all = vars(lhs0.body);
  all.insert(lhs0.exists.begin(), lhs0.exists.end());
  collectVars(rhs0.body, all);
  all.insert(rhs0.exists.begin(), rhs0.exists.end());
  names = namesOf(all);

  SymbolicHeap lhs = renameBound(lhs0, namesOf(free_vars(rhs0)), names);
  VarSet lhsAll = vars(lhs.body);
  lhsAll.insert(lhs.exists.begin(), lhs.exists.end());
  SymbolicHeap rhs = renameBound(rhs0, namesOf(lhsAll), names);

  Goal g;
  g.lhs = lhs.body;
  g.lhs.canonicalize();
  g.rhs = rhs;
  g.rhs.body.canonicalize();
  g.hidden = lhs.exists;
  g.names = names;
  g.noteNames();
  return g;
}

SolveResult solve(const SymbolicHeap& lhs, const SymbolicHeap& rhs, const SearchConfig& cfg) {
  SolveResult res;
  auto t0 = Clock::now();
  Goal root = make_goal(lhs, rhs);
  Outcome out;
  try {
    Engine engine(cfg, root, res);
    out = engine.run(root);
  } catch (const SearchTimeout&) {
    res.status = Status::Timeout;
    res.solveMillis = millisSince(t0);
    return res;
  }
  res.solveMillis = millisSince(t0);
  res.failedBranches = out.failed;
  res.closedBranches = static_cast<int>(out.closed.size());

  std::vector<Solution> sols;
  for (auto& g : out.closed) sols.push_back(project(g));
  sols = mergeSiblings(std::move(sols));

  auto t1 = Clock::now();
  std::vector<Solution> kept;
  for (auto& s : sols) {
    if (cfg.validate) {
      SearchConfig vc = cfg;
      vc.recordTrace = false;
      long long left = cfg.timeoutMillis - static_cast<long long>(millisSince(t0));
      vc.timeoutMillis = std::max<long long>(1, left);
      try {
        validate(lhs, rhs, s, vc);
      } catch (const SearchTimeout&) {
        res.status = Status::Timeout;
        res.validateMillis = millisSince(t1);
        return res;
      }
    }
    if (s.validated || cfg.allSolutions || !cfg.validate) kept.push_back(std::move(s));
  }
  res.validateMillis = millisSince(t1);
  rankSolutions(kept);
  res.solutions = std::move(kept);

  bool anyGood = std::any_of(res.solutions.begin(), res.solutions.end(),
                             [&](const Solution& s) { return s.validated || !cfg.validate; });
  bool vacuous = out.closed.empty() && out.failed == 0;
  res.status = anyGood || vacuous ? Status::Solved : Status::NoSolution;
  bool someRejected = std::any_of(sols.begin(), sols.end(), [](const Solution& s) { return !s.validated; });
  res.partial = res.status == Status::Solved && (out.failed > 0 || (cfg.validate && someRejected));
  return res;
}

bool prove(const SymbolicHeap& lhs, const SymbolicHeap& rhs, const SearchConfig& cfg) {
  SearchConfig pc = cfg;
  pc.inferenceEnabled = false;
  pc.validate = false;
  SolveResult r = solve(lhs, rhs, pc);
  if (r.status == Status::Timeout) throw SearchTimeout("timeout");
  if (r.failedBranches > 0) return false;
  for (auto& s : r.solutions)
    if (!s.antiframe.body.spatial.empty()) return false;
  return true;
}

std::pair<SymbolicHeap, SymbolicHeap> validation_query(const SymbolicHeap& lhs, const SymbolicHeap& rhs,
                                                       const Solution& sol) {
  SymbolicHeap l = lhs;
  l.body.pure.insert(sol.antiframe.body.pure.begin(), sol.antiframe.body.pure.end());
  l.body.pure.insert(sol.guards.begin(), sol.guards.end());
  for (auto& a : sol.antiframe.body.spatial) l.body.add(a);
  l.exists.insert(sol.antiframe.exists.begin(), sol.antiframe.exists.end());

  // frame witnesses are antecedent-internal names; keep them apart from rhs ones
  std::set<std::string> names;
  VarSet all = vars(l.body);
  all.insert(l.exists.begin(), l.exists.end());
  collectVars(rhs.body, all);
  all.insert(rhs.exists.begin(), rhs.exists.end());
  collectVars(sol.frame.body, all);
  names = namesOf(all);
  SymbolicHeap frame = renameBound(sol.frame, namesOf(rhs.exists), names);

  SymbolicHeap r = rhs;
  r.exists.insert(frame.exists.begin(), frame.exists.end());
  r.body.pure.insert(frame.body.pure.begin(), frame.body.pure.end());
  for (auto& a : frame.body.spatial) r.body.add(a);
  return {l, r};
}

bool validate(const SymbolicHeap& lhs, const SymbolicHeap& rhs, Solution& sol, const SearchConfig& cfg) {
  auto [l, r] = validation_query(lhs, rhs, sol);
  SearchConfig vc = cfg;
  vc.allowFrame = false;
  vc.recordTrace = false;
  sol.validated = prove(l, r, vc);
  return sol.validated;
}

}  // namespace biabd
