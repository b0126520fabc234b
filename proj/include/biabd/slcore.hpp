#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace biabd {

// Null < IntConst < ProgVar < LogVar in the canonical order.
struct Expr {
  enum class Kind : std::uint8_t { Null, Int, Prog, Log };

  Kind kind = Kind::Null;
  std::string name;
  long long value = 0;

  static Expr null() { return {}; }
  static Expr num(long long v) { return {Kind::Int, {}, v}; }
  static Expr prog(std::string n) { return {Kind::Prog, std::move(n), 0}; }
  static Expr log(std::string n) { return {Kind::Log, std::move(n), 0}; }
  // lower-case initial -> program variable, upper-case -> logical variable
  static Expr var(const std::string& n);

  bool isVar() const { return kind == Kind::Prog || kind == Kind::Log; }
  bool isNull() const { return kind == Kind::Null; }
  bool isConst() const { return kind == Kind::Null || kind == Kind::Int; }

  auto operator<=>(const Expr&) const = default;
  bool operator==(const Expr&) const = default;
};

enum class Rel : std::uint8_t { Eq, Neq, Lt, Leq };

struct PureAtom {
  Rel rel = Rel::Eq;
  Expr lhs;
  Expr rhs;

  // Eq/Neq operands are stored in canonical order.
  static PureAtom make(Rel r, Expr a, Expr b);
  static PureAtom eq(Expr a, Expr b) { return make(Rel::Eq, std::move(a), std::move(b)); }
  static PureAtom neq(Expr a, Expr b) { return make(Rel::Neq, std::move(a), std::move(b)); }
  static PureAtom lt(Expr a, Expr b) { return make(Rel::Lt, std::move(a), std::move(b)); }
  static PureAtom leq(Expr a, Expr b) { return make(Rel::Leq, std::move(a), std::move(b)); }

  PureAtom negate() const;
  // valid on its own: E=E, E<=E, or a true comparison of constants
  bool trivial() const;
  bool mentions(const Expr& e) const { return lhs == e || rhs == e; }

  auto operator<=>(const PureAtom&) const = default;
  bool operator==(const PureAtom&) const = default;
};

using PureFormula = std::set<PureAtom>;

enum class SpatialKind : std::uint8_t { PointsTo, Ls, Sls, Tree, Stree };

// Points-to: args[0] is the root, args[i+1] holds the value of fields[i].
// Predicates: args as in the definitions, fields empty.
struct SpatialAtom {
  SpatialKind kind = SpatialKind::PointsTo;
  std::vector<Expr> args;
  std::vector<std::string> fields;

  static SpatialAtom pointsTo(Expr root, std::vector<std::pair<std::string, Expr>> record);
  static SpatialAtom ls(Expr a, Expr b) { return {SpatialKind::Ls, {a, b}, {}}; }
  static SpatialAtom sls(Expr a, Expr lo, Expr hi, Expr b) { return {SpatialKind::Sls, {a, lo, hi, b}, {}}; }
  static SpatialAtom tree(Expr a) { return {SpatialKind::Tree, {a}, {}}; }
  static SpatialAtom stree(Expr a, Expr lo, Expr hi) { return {SpatialKind::Stree, {a, lo, hi}, {}}; }

  bool isPointsTo() const { return kind == SpatialKind::PointsTo; }
  bool isPred() const { return kind != SpatialKind::PointsTo; }
  bool hasValues() const { return kind == SpatialKind::Sls || kind == SpatialKind::Stree; }
  const Expr& root() const { return args[0]; }
  std::optional<Expr> field(const std::string& f) const;
  // end point for ls/sls, null for the trees
  Expr end() const;

  auto operator<=>(const SpatialAtom&) const = default;
  bool operator==(const SpatialAtom&) const = default;
};

int arity(SpatialKind k);
const char* predName(SpatialKind k);
// n < l < r < v, unknown names sort after alphabetically
int fieldRank(const std::string& f);

struct QFHeap {
  PureFormula pure;
  std::vector<SpatialAtom> spatial;  // kept sorted

  void canonicalize();
  void add(SpatialAtom a);
  void remove(const SpatialAtom& a);  // one occurrence
  bool operator==(const QFHeap&) const = default;
};

struct SymbolicHeap {
  std::set<Expr> exists;
  QFHeap body;

  SymbolicHeap() = default;
  explicit SymbolicHeap(QFHeap b) : body(std::move(b)) {}
  bool operator==(const SymbolicHeap&) const = default;
};

using VarSet = std::set<Expr>;
using Subst = std::map<Expr, Expr>;

void collectVars(const Expr& e, VarSet& out);
void collectVars(const PureAtom& a, VarSet& out);
void collectVars(const SpatialAtom& a, VarSet& out);
void collectVars(const QFHeap& h, VarSet& out);
VarSet vars(const QFHeap& h);
VarSet free_vars(const SymbolicHeap& h);

Expr subst(const Expr& e, const Subst& m);
PureAtom subst(const PureAtom& a, const Subst& m);
SpatialAtom subst(const SpatialAtom& a, const Subst& m);
PureFormula subst(const PureFormula& p, const Subst& m);
QFHeap subst(const QFHeap& h, const Subst& m);
// Capture-avoiding: bound names that collide with the range are renamed.
SymbolicHeap subst(const SymbolicHeap& h, const Subst& m);

// Deterministic: prefix itself if unused, else prefix0, prefix1, ...
Expr fresh_var(const std::string& prefix, const VarSet& avoid);
// Same, but avoids names of either variable kind.
Expr fresh_var(const std::string& prefix, const std::set<std::string>& avoid);

struct Unfolding {
  QFHeap base;
  SymbolicHeap rec;
};
// Definition-local variables are freshened against `avoid`.
Unfolding unfold(const SpatialAtom& p, const VarSet& avoid);

PureFormula guard(const SpatialAtom& a);

enum class NfClause : std::uint8_t { GuardPresent = 1, RootNonNull, RootsDistinct, NoEquality, NoSelfDiseq, Satisfiable };

struct NfReport {
  bool ok = true;
  std::vector<std::pair<NfClause, std::string>> violations;
};
NfReport is_normal_form(const QFHeap& d);

std::string render(const Expr& e);
std::string render(const PureAtom& a);
std::string render(const SpatialAtom& a);
std::string render(const PureFormula& p);
std::string render(const QFHeap& h);
std::string render(const SymbolicHeap& h);

// Alpha-equivalence of symbolic heaps: bound names are compared positionally
// after canonical renaming.
SymbolicHeap alpha_canonical(const SymbolicHeap& h);

}  // namespace biabd
