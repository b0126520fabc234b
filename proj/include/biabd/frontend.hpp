#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biabd/search.hpp"
#include "biabd/slcore.hpp"

namespace biabd {

struct Problem {
  std::string name;
  SymbolicHeap lhs;
  SymbolicHeap rhs;
  std::optional<std::string> expectedStatus;  // valid | invalid | unknown
  std::string sourcePath;
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}
};

struct UnsupportedFeature : std::runtime_error {
  std::string construct;
  explicit UnsupportedFeature(const std::string& what)
      : std::runtime_error("unsupported: " + what), construct(what) {}
};

// Native format: `lhs |- rhs`, each side `[Ex X,Y.] atoms` with atoms joined
// by `&`, `*` or `:`. `#` starts a comment; `# status: valid|invalid` sets the
// expected status.
Problem parse_native(const std::string& text, const std::string& name = "");
// One side of a problem, with positional records resolved as in a problem
// that mentions only this heap.
SymbolicHeap parse_heap(const std::string& text);
std::string render_native(const Problem& p);

// SL-COMP style SMT-LIB subset.
Problem parse_smtlib(const std::string& text, const std::string& name = "");

// Chooses the parser by extension (.smt2 / .smt -> SMT-LIB, otherwise native).
Problem load_problem(const std::string& path);

// Positional record fields, by count: 1 -> n; 2 -> n,v (l,r for tree-only
// problems); 3 -> l,r,v. Fields named "#0", "#1", ... are positional.
void resolve_positional(SymbolicHeap& lhs, SymbolicHeap& rhs);

struct ReportRow {
  std::string name;
  std::string status;
  int solutionCount = 0;
  std::string bestM;
  std::string bestF;
  double solveMillis = 0;
  double validateMillis = 0;
  bool validated = false;
  bool partial = false;
  SolveResult result;
};

ReportRow make_row(const Problem& p, const SolveResult& r);
std::string report_json(const std::vector<ReportRow>& rows);
std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_text(const std::vector<ReportRow>& rows);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace biabd
