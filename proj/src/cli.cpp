#include <algorithm>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "biabd/frontend.hpp"
#include "biabd/oracle.hpp"

namespace biabd {

namespace {

enum Exit { Ok = 0, Negative = 1, TimedOut = 2, InputError = 3 };

struct Options {
  std::string file;
  std::string dir;
  long long timeout = 0;
  int maxDepth = 64;
  bool all = false;
  std::string format = "text";
  bool noValidate = false;
  int bound = 3;
};

SearchConfig configFrom(const Options& o) {
  SearchConfig c = default_config();
  if (o.timeout > 0) c.timeoutMillis = o.timeout;
  c.maxDepth = o.maxDepth;
  c.allSolutions = o.all;
  c.validate = !o.noValidate;
  c.recordTrace = false;
  return c;
}

std::string formatRows(const std::vector<ReportRow>& rows, const std::string& fmt) {
  if (fmt == "json") return report_json(rows);
  if (fmt == "csv") return report_csv(rows);
  return report_text(rows);
}

int exitFor(Status s) {
  switch (s) {
    case Status::Solved: return Ok;
    case Status::NoSolution: return Negative;
    case Status::Timeout: return TimedOut;
  }
  return InputError;
}

int solveCmd(const Options& o, std::ostream& out) {
  Problem p = load_problem(o.file);
  SolveResult r = solve(p.lhs, p.rhs, configFrom(o));
  out << formatRows({make_row(p, r)}, o.format);
  return exitFor(r.status);
}

int proveCmd(const Options& o, std::ostream& out) {
  Problem p = load_problem(o.file);
  try {
    bool ok = prove(p.lhs, p.rhs, configFrom(o));
    out << p.name << ": " << (ok ? "valid" : "invalid") << "\n";
    return ok ? Ok : Negative;
  } catch (const SearchTimeout&) {
    out << p.name << ": timeout\n";
    return TimedOut;
  }
}

int benchCmd(const Options& o, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(o.dir)) {
    err << "not a directory: " << o.dir << "\n";
    return InputError;
  }
  std::vector<std::string> files;
  for (auto& e : fs::directory_iterator(o.dir)) {
    auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".sl" || ext == ".smt2" || ext == ".smt")) files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  std::vector<ReportRow> rows;
  SearchConfig cfg = configFrom(o);
  for (auto& f : files) {
    try {
      Problem p = load_problem(f);
      rows.push_back(make_row(p, solve(p.lhs, p.rhs, cfg)));
    } catch (const std::exception& e) {
      err << f << ": " << e.what() << "\n";
      ReportRow row;
      row.name = fs::path(f).stem().string();
      row.status = "error";
      rows.push_back(row);
    }
  }
  out << formatRows(rows, o.format);
  return Ok;
}

int oracleCmd(const Options& o, std::ostream& out) {
  Problem p = load_problem(o.file);
  SearchConfig cfg = configFrom(o);
  cfg.allSolutions = true;
  SolveResult r = solve(p.lhs, p.rhs, cfg);
  out << p.name << ": " << status_name(r.status) << "\n";
  if (r.status == Status::Timeout) return TimedOut;
  int bad = 0;
  for (auto& s : r.solutions) {
    auto [l, rr] = validation_query(p.lhs, p.rhs, s);
    auto cm = counter_model(l, rr, o.bound);
    out << "  M = " << render(s.antiframe) << "  F = " << render(s.frame);
    if (cm) {
      ++bad;
      out << "  COUNTERMODEL " << render(*cm) << "\n";
    } else {
      out << "  ok (bound " << o.bound << ")\n";
    }
  }
  return bad ? Negative : Ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bi-abductive entailment prover for symbolic heaps"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--timeout", o.timeout, "timeout in milliseconds (default 30000 or BIABD_TIMEOUT_MS)");
    sub->add_option("--max-depth", o.maxDepth, "maximum number of inference phases on a branch");
    sub->add_flag("--all-solutions", o.all, "also report solutions that failed validation");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_flag("--no-validate", o.noValidate, "skip re-proving the solutions");
  };

  auto* solveSub = app.add_subcommand("solve", "compute anti-frames and frames");
  solveSub->add_option("file", o.file)->required();
  common(solveSub);
  auto* proveSub = app.add_subcommand("prove", "check the entailment without abduction");
  proveSub->add_option("file", o.file)->required();
  common(proveSub);
  auto* benchSub = app.add_subcommand("bench", "solve every .sl/.smt2 file in a directory");
  benchSub->add_option("dir", o.dir)->required();
  common(benchSub);
  auto* oracleSub = app.add_subcommand("oracle-check", "check solutions against bounded models");
  oracleSub->add_option("file", o.file)->required();
  oracleSub->add_option("--bound", o.bound, "maximum heap size")->check(CLI::Range(0, 6));
  common(oracleSub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return Ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return InputError;
  }

  try {
    if (*solveSub) return solveCmd(o, out);
    if (*proveSub) return proveCmd(o, out);
    if (*benchSub) return benchCmd(o, out, err);
    return oracleCmd(o, out);
  } catch (const ParseError& e) {
    err << o.file << ":" << e.what() << "\n";
  } catch (const UnsupportedFeature& e) {
    err << o.file << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << e.what() << "\n";
  }
  return InputError;
}

}  // namespace biabd
