#include <cctype>
#include <map>

#include "biabd/frontend.hpp"

namespace biabd {

namespace {

struct Sexp {
  std::string atom;  // empty for lists
  std::vector<Sexp> items;
  int line = 1;
  int col = 1;
  bool isList = false;

  bool is(const char* s) const { return !isList && atom == s; }
  const std::string& head() const {
    static const std::string none;
    return isList && !items.empty() && !items[0].isList ? items[0].atom : none;
  }
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  std::vector<Sexp> all() {
    std::vector<Sexp> out;
    while (true) {
      skip();
      if (i_ >= s_.size()) break;
      out.push_back(read());
    }
    return out;
  }

 private:
  void step() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        step();
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') step();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip();
    if (i_ >= s_.size()) throw ParseError(line_, col_, "unexpected end of input");
    Sexp e;
    e.line = line_;
    e.col = col_;
    char c = s_[i_];
    if (c == '(') {
      e.isList = true;
      step();
      while (true) {
        skip();
        if (i_ >= s_.size()) throw ParseError(e.line, e.col, "unbalanced '('");
        if (s_[i_] == ')') {
          step();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw ParseError(line_, col_, "unexpected ')'");
    if (c == '|' || c == '"') {
      char close = c;
      step();
      size_t start = i_;
      while (i_ < s_.size() && s_[i_] != close) step();
      if (i_ >= s_.size()) throw ParseError(e.line, e.col, "unterminated literal");
      e.atom = s_.substr(start, i_ - start);
      step();
      return e;
    }
    size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')' &&
           s_[i_] != ';')
      step();
    e.atom = s_.substr(start, i_ - start);
    return e;
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void unsupported(const Sexp& e, const std::string& what) {
  throw UnsupportedFeature(what + " at " + std::to_string(e.line) + ":" + std::to_string(e.col));
}

[[noreturn]] void bad(const Sexp& e, const std::string& msg) { throw ParseError(e.line, e.col, msg); }

std::string canonicalField(const std::string& sel) {
  static const std::map<std::string, std::string> known = {
      {"next", "n"}, {"n", "n"},     {"nxt", "n"},  {"left", "l"}, {"l", "l"},    {"lft", "l"},
      {"right", "r"}, {"r", "r"},    {"rgt", "r"},  {"val", "v"},  {"v", "v"},    {"data", "v"},
      {"value", "v"}, {"key", "v"}};
  auto it = known.find(sel);
  return it == known.end() ? "" : it->second;
}

class Translator {
 public:
  Problem run(const std::vector<Sexp>& cmds) {
    Problem p;
    bool haveLhs = false, haveRhs = false;
    for (auto& c : cmds) {
      if (!c.isList || c.items.empty()) bad(c, "expected a command");
      const std::string& h = c.head();
      if (h == "set-logic" || h == "check-sat" || h == "exit" || h == "get-model" || h == "declare-sort") {
        continue;
      } else if (h == "set-info") {
        info(c, p);
      } else if (h == "declare-datatypes") {
        datatypes(c);
      } else if (h == "declare-datatype") {
        if (c.items.size() != 3) bad(c, "malformed declare-datatype");
        constructors(c.items[2]);
      } else if (h == "declare-heap") {
        continue;
      } else if (h == "declare-const") {
        if (c.items.size() != 3) bad(c, "malformed declare-const");
        declared_.insert(c.items[1].atom);
      } else if (h == "declare-fun") {
        if (c.items.size() != 4 || !c.items[2].isList) bad(c, "malformed declare-fun");
        if (!c.items[2].items.empty()) unsupported(c, "uninterpreted function " + c.items[1].atom);
        declared_.insert(c.items[1].atom);
      } else if (h == "define-fun-rec") {
        if (c.items.size() < 2) bad(c, "malformed define-fun-rec");
        definePred(c.items[1]);
      } else if (h == "define-funs-rec") {
        if (c.items.size() < 2 || !c.items[1].isList) bad(c, "malformed define-funs-rec");
        for (auto& d : c.items[1].items) {
          if (!d.isList || d.items.empty()) bad(d, "malformed declaration");
          definePred(d.items[0]);
        }
      } else if (h == "assert") {
        if (c.items.size() != 2) bad(c, "malformed assert");
        const Sexp& f = c.items[1];
        if (f.head() == "not") {
          if (haveRhs) unsupported(c, "more than one negated assert");
          if (f.items.size() != 2) bad(f, "malformed not");
          p.rhs = heap(f.items[1]);
          haveRhs = true;
        } else {
          SymbolicHeap h2 = heap(f);
          p.lhs.exists.insert(h2.exists.begin(), h2.exists.end());
          p.lhs.body.pure.insert(h2.body.pure.begin(), h2.body.pure.end());
          for (auto& a : h2.body.spatial) p.lhs.body.add(a);
          haveLhs = true;
        }
      } else {
        unsupported(c, "command " + h);
      }
    }
    if (!haveRhs) throw ParseError(1, 1, "no negated assert for the consequent");
    (void)haveLhs;
    p.lhs.body.canonicalize();
    p.rhs.body.canonicalize();
    resolve_positional(p.lhs, p.rhs);
    p.expectedStatus = status_;
    return p;
  }

 private:
  void info(const Sexp& c, Problem&) {
    if (c.items.size() >= 3 && c.items[1].is(":status")) {
      const std::string& s = c.items[2].atom;
      if (s == "unsat") status_ = "valid";
      else if (s == "sat") status_ = "invalid";
      else status_ = "unknown";
    }
  }

  void datatypes(const Sexp& c) {
    if (c.items.size() != 3 || !c.items[2].isList) bad(c, "malformed declare-datatypes");
    for (auto& dt : c.items[2].items) constructors(dt);
  }

  void constructors(const Sexp& dt) {
    if (!dt.isList) bad(dt, "malformed datatype");
    for (auto& con : dt.items) {
      if (!con.isList || con.items.empty()) bad(con, "malformed constructor");
      std::vector<std::string> fields;
      bool named = true;
      for (size_t i = 1; i < con.items.size(); ++i) {
        const Sexp& sel = con.items[i];
        if (!sel.isList || sel.items.empty()) bad(sel, "malformed selector");
        std::string f = canonicalField(sel.items[0].atom);
        if (f.empty()) named = false;
        fields.push_back(f);
      }
      if (!named) fields.clear();
      ctors_[con.items[0].atom] = fields;
    }
  }

  void definePred(const Sexp& nameTok) {
    const std::string& n = nameTok.atom;
    if (n != "ls" && n != "lseg" && n != "sls" && n != "tree" && n != "stree")
      unsupported(nameTok, "predicate definition " + n);
    preds_.insert(n);
  }

  SymbolicHeap heap(const Sexp& f) {
    SymbolicHeap h;
    const Sexp* body = &f;
    while (body->head() == "exists") {
      if (body->items.size() != 3 || !body->items[1].isList) bad(*body, "malformed exists");
      for (auto& b : body->items[1].items) {
        if (!b.isList || b.items.empty()) bad(b, "malformed binder");
        h.exists.insert(Expr::var(b.items[0].atom));
        bound_.insert(b.items[0].atom);
      }
      body = &body->items[2];
    }
    formula(*body, h.body);
    for (auto& x : h.exists) bound_.erase(x.name);
    return h;
  }

  void formula(const Sexp& f, QFHeap& out) {
    if (!f.isList) {
      if (f.is("true") || f.is("emp")) return;
      unsupported(f, "formula " + f.atom);
    }
    const std::string& h = f.head();
    if (h == "and" || h == "sep") {
      for (size_t i = 1; i < f.items.size(); ++i) formula(f.items[i], out);
    } else if (h == "_" && f.items.size() >= 2 && f.items[1].is("emp")) {
      return;
    } else if (h == "emp") {
      return;
    } else if (h == "=" || h == "<" || h == "<=" || h == ">" || h == ">=") {
      if (f.items.size() != 3) unsupported(f, "chained " + h);
      Expr a = term(f.items[1]), b = term(f.items[2]);
      if (h == "=") out.pure.insert(PureAtom::eq(a, b));
      else if (h == "<") out.pure.insert(PureAtom::lt(a, b));
      else if (h == "<=") out.pure.insert(PureAtom::leq(a, b));
      else if (h == ">") out.pure.insert(PureAtom::lt(b, a));
      else out.pure.insert(PureAtom::leq(b, a));
    } else if (h == "distinct") {
      std::vector<Expr> ts;
      for (size_t i = 1; i < f.items.size(); ++i) ts.push_back(term(f.items[i]));
      for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j) out.pure.insert(PureAtom::neq(ts[i], ts[j]));
    } else if (h == "not") {
      if (f.items.size() != 2 || f.items[1].head() != "=" || f.items[1].items.size() != 3)
        unsupported(f, "negation of a non-equality");
      out.pure.insert(PureAtom::neq(term(f.items[1].items[1]), term(f.items[1].items[2])));
    } else if (h == "pto") {
      out.add(pto(f));
    } else if (preds_.count(h)) {
      out.add(pred(f));
    } else if (h == "ls" || h == "lseg" || h == "sls" || h == "tree" || h == "stree") {
      unsupported(f, "undeclared predicate " + h);
    } else {
      unsupported(f, h.empty() ? std::string("formula") : h);
    }
  }

  SpatialAtom pto(const Sexp& f) {
    if (f.items.size() != 3) bad(f, "pto expects two arguments");
    Expr root = term(f.items[1]);
    const Sexp& rec = f.items[2];
    std::vector<std::pair<std::string, Expr>> fields;
    if (rec.isList && rec.head() != "as") {
      auto it = ctors_.find(rec.head());
      if (it == ctors_.end()) unsupported(rec, "undeclared constructor " + rec.head());
      size_t n = rec.items.size() - 1;
      if (!it->second.empty() && it->second.size() != n) bad(rec, "wrong number of constructor arguments");
      if (n > 3) unsupported(rec, "record with more than three fields");
      for (size_t i = 0; i < n; ++i) {
        std::string name = it->second.empty() ? "#" + std::to_string(i) : it->second[i];
        fields.emplace_back(name, term(rec.items[i + 1]));
      }
    } else {
      fields.emplace_back("#0", term(rec));
    }
    return SpatialAtom::pointsTo(root, fields);
  }

  SpatialAtom pred(const Sexp& f) {
    std::string h = f.head();
    SpatialKind k = h == "sls" ? SpatialKind::Sls
                    : h == "tree" ? SpatialKind::Tree
                    : h == "stree" ? SpatialKind::Stree
                                   : SpatialKind::Ls;
    if (static_cast<int>(f.items.size()) - 1 != arity(k)) bad(f, h + " expects " + std::to_string(arity(k)) + " arguments");
    std::vector<Expr> args;
    for (size_t i = 1; i < f.items.size(); ++i) args.push_back(term(f.items[i]));
    return {k, args, {}};
  }

  Expr term(const Sexp& t) {
    if (t.isList) {
      if (t.head() == "as" && t.items.size() == 3 && t.items[1].is("nil")) return Expr::null();
      if (t.head() == "-" && t.items.size() == 2 && !t.items[1].isList)
        return Expr::num(-std::stoll(t.items[1].atom));
      unsupported(t, "term " + t.head());
    }
    if (t.atom == "nil" || t.atom == "null") return Expr::null();
    if (std::isdigit(static_cast<unsigned char>(t.atom[0]))) return Expr::num(std::stoll(t.atom));
    if (!declared_.count(t.atom) && !bound_.count(t.atom)) bad(t, "undeclared symbol " + t.atom);
    return Expr::var(t.atom);
  }

  std::set<std::string> declared_;
  std::set<std::string> bound_;
  std::set<std::string> preds_;
  std::map<std::string, std::vector<std::string>> ctors_;
  std::optional<std::string> status_;
};

}  // namespace

Problem parse_smtlib(const std::string& text, const std::string& name) {
  Reader r(text);
  auto cmds = r.all();
  if (cmds.empty()) throw ParseError(1, 1, "empty input");
  Problem p = Translator().run(cmds);
  p.name = name;
  return p;
}

}  // namespace biabd
