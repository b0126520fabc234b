#include <cctype>
#include <fstream>
#include <sstream>

#include "biabd/frontend.hpp"

namespace biabd {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { run(); }
  std::vector<Token> tokens;
  std::optional<std::string> status;

 private:
  void run() {
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t k) {
      for (size_t j = 0; j < k; ++j, ++i) {
        if (src_[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      if (c == '#') {
        size_t e = src_.find('\n', i);
        if (e == std::string::npos) e = src_.size();
        comment(src_.substr(i + 1, e - i - 1));
        advance(e - i);
        continue;
      }
      Token t;
      t.line = line;
      t.col = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_' || src_[j] == '\''))
          ++j;
        t.kind = Tok::Ident;
        t.text = src_.substr(i, j - i);
        advance(j - i);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i + 1])))) {
        size_t j = i + 1;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        t.kind = Tok::Number;
        t.text = src_.substr(i, j - i);
        advance(j - i);
      } else {
        static const char* twoChar[] = {"->", "|-", "!=", "<=", ">="};
        t.kind = Tok::Sym;
        for (auto s : twoChar)
          if (src_.compare(i, 2, s) == 0) t.text = s;
        if (t.text.empty()) {
          if (std::string("=<>&*:,.()[]").find(c) == std::string::npos)
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, c);
        }
        advance(t.text.size());
      }
      tokens.push_back(t);
    }
    Token end;
    end.line = line;
    end.col = col;
    tokens.push_back(end);
  }

  void comment(std::string body) {
    size_t k = body.find_first_not_of(" \t");
    if (k == std::string::npos) return;
    body = body.substr(k);
    if (body.rfind("status:", 0) != 0) return;
    std::istringstream in(body.substr(7));
    std::string s;
    in >> s;
    if (s == "sat" || s == "invalid") s = "invalid";
    else if (s == "unsat" || s == "valid") s = "valid";
    status = s;
  }

  const std::string& src_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  // Returns true when a `|-` separated the two sides.
  bool problem(SymbolicHeap& lhs, SymbolicHeap& rhs) {
    if (peek().kind == Tok::End) fail("empty input");
    if (isSym("|-")) {
      next();
    } else {
      lhs = heap();
      if (!isSym("|-")) fail("expected '|-'");
      next();
    }
    rhs = heap();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return true;
  }

  SymbolicHeap heap() {
    SymbolicHeap h;
    if (peek().kind == Tok::Ident && peek().text == "Ex" && peekAt(1).kind == Tok::Ident) {
      next();
      while (true) {
        Token v = expect(Tok::Ident, "variable");
        h.exists.insert(Expr::var(v.text));
        if (isSym(",")) {
          next();
          continue;
        }
        break;
      }
      if (!isSym(".")) fail("expected '.' after existential variables");
      next();
    }
    while (true) {
      atom(h.body);
      if (isSym("&") || isSym("*") || isSym(":")) {
        next();
        continue;
      }
      break;
    }
    h.body.canonicalize();
    return h;
  }

  const Token& peek() const { return t_[pos_]; }

 private:
  const Token& peekAt(size_t k) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
  Token next() { return t_[pos_ < t_.size() - 1 ? pos_++ : pos_]; }
  bool isSym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().col, msg); }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return next();
  }

  void expectSym(const char* s) {
    if (!isSym(s)) fail(std::string("expected '") + s + "'");
    next();
  }

  Expr expr() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Expr::num(std::stoll(t.text));
    }
    if (t.kind == Tok::Ident) {
      Token v = next();
      if (v.text == "null" || v.text == "nil") return Expr::null();
      return Expr::var(v.text);
    }
    fail("expected an expression");
  }

  void atom(QFHeap& h) {
    const Token& t = peek();
    if (t.kind == Tok::Ident && (t.text == "true" || t.text == "emp") && !nextIsOperator()) {
      next();
      return;
    }
    if (t.kind == Tok::Ident && peekAt(1).kind == Tok::Sym && peekAt(1).text == "(") {
      h.add(predicate());
      return;
    }
    Expr a = expr();
    if (isSym("->")) {
      next();
      h.add(pointsTo(a));
      return;
    }
    if (peek().kind != Tok::Sym) fail("expected a relation or '->'");
    std::string op = next().text;
    Expr b = expr();
    if (op == "=") h.pure.insert(PureAtom::eq(a, b));
    else if (op == "!=") h.pure.insert(PureAtom::neq(a, b));
    else if (op == "<") h.pure.insert(PureAtom::lt(a, b));
    else if (op == "<=") h.pure.insert(PureAtom::leq(a, b));
    else if (op == ">") h.pure.insert(PureAtom::lt(b, a));
    else if (op == ">=") h.pure.insert(PureAtom::leq(b, a));
    else throw ParseError(t.line, t.col, "unknown relation '" + op + "'");
  }

  bool nextIsOperator() const {
    const Token& n = peekAt(1);
    if (n.kind != Tok::Sym) return false;
    return n.text == "=" || n.text == "!=" || n.text == "<" || n.text == "<=" || n.text == ">" ||
           n.text == ">=" || n.text == "->";
  }

  SpatialAtom predicate() {
    Token name = next();
    expectSym("(");
    std::vector<Expr> args;
    if (!isSym(")")) {
      args.push_back(expr());
      while (isSym(",")) {
        next();
        args.push_back(expr());
      }
    }
    expectSym(")");
    SpatialKind k;
    if (name.text == "ls" || name.text == "lseg") k = SpatialKind::Ls;
    else if (name.text == "sls") k = SpatialKind::Sls;
    else if (name.text == "tree") k = SpatialKind::Tree;
    else if (name.text == "stree") k = SpatialKind::Stree;
    else throw ParseError(name.line, name.col, "unknown predicate '" + name.text + "'");
    if (static_cast<int>(args.size()) != arity(k))
      throw ParseError(name.line, name.col,
                       name.text + " expects " + std::to_string(arity(k)) + " arguments");
    return {k, args, {}};
  }

  // `[n:y, v:k]`, `[y, k]` (positional) or a bare value for the single field.
  SpatialAtom pointsTo(const Expr& root) {
    std::vector<std::pair<std::string, Expr>> rec;
    if (!isSym("[")) {
      rec.emplace_back("#0", expr());
      return SpatialAtom::pointsTo(root, rec);
    }
    next();
    int positional = 0;
    if (!isSym("]")) {
      while (true) {
        if (peek().kind == Tok::Ident && peekAt(1).kind == Tok::Sym && peekAt(1).text == ":") {
          std::string f = next().text;
          next();
          rec.emplace_back(f, expr());
        } else {
          rec.emplace_back("#" + std::to_string(positional++), expr());
        }
        if (isSym(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expectSym("]");
    std::set<std::string> seen;
    for (auto& [f, _] : rec)
      if (!seen.insert(f).second) fail("duplicate field '" + f + "'");
    if (positional > 0 && positional != static_cast<int>(rec.size())) fail("mixed named and positional fields");
    if (positional > 3) fail("too many positional fields");
    return SpatialAtom::pointsTo(root, rec);
  }

  std::vector<Token> t_;
  size_t pos_ = 0;
};

bool uses(const SymbolicHeap& h, SpatialKind k) {
  for (auto& a : h.body.spatial)
    if (a.kind == k) return true;
  return false;
}

void resolveIn(SymbolicHeap& h, bool treeShaped) {
  for (auto& a : h.body.spatial) {
    if (!a.isPointsTo() || a.fields.empty() || a.fields[0][0] != '#') continue;
    std::vector<std::string> names;
    switch (a.fields.size()) {
      case 1: names = {"n"}; break;
      case 2: names = treeShaped ? std::vector<std::string>{"l", "r"} : std::vector<std::string>{"n", "v"}; break;
      default: names = {"l", "r", "v"}; break;
    }
    std::vector<std::pair<std::string, Expr>> rec;
    for (size_t i = 0; i < a.fields.size(); ++i) {
      int pos = std::stoi(a.fields[i].substr(1));
      rec.emplace_back(names[pos], a.args[i + 1]);
    }
    a = SpatialAtom::pointsTo(a.args[0], rec);
  }
  h.body.canonicalize();
}

}  // namespace

void resolve_positional(SymbolicHeap& lhs, SymbolicHeap& rhs) {
  bool trees = uses(lhs, SpatialKind::Tree) || uses(lhs, SpatialKind::Stree) || uses(rhs, SpatialKind::Tree) ||
               uses(rhs, SpatialKind::Stree);
  bool sorted = uses(lhs, SpatialKind::Sls) || uses(rhs, SpatialKind::Sls);
  resolveIn(lhs, trees && !sorted);
  resolveIn(rhs, trees && !sorted);
}

Problem parse_native(const std::string& text, const std::string& name) {
  Lexer lex(text);
  Parser p(lex.tokens);
  Problem prob;
  prob.name = name;
  p.problem(prob.lhs, prob.rhs);
  resolve_positional(prob.lhs, prob.rhs);
  prob.expectedStatus = lex.status;
  return prob;
}

SymbolicHeap parse_heap(const std::string& text) {
  Lexer lex(text);
  Parser p(lex.tokens);
  if (p.peek().kind == Tok::End) throw ParseError(1, 1, "empty input");
  SymbolicHeap h = p.heap();
  if (p.peek().kind != Tok::End) throw ParseError(p.peek().line, p.peek().col, "unexpected '" + p.peek().text + "'");
  SymbolicHeap none;
  resolve_positional(h, none);
  return h;
}

std::string render_native(const Problem& p) { return render(p.lhs) + " |- " + render(p.rhs); }

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (auto s = stem.find_last_of('/'); s != std::string::npos) stem = stem.substr(s + 1);
  std::string ext;
  if (auto d = stem.find_last_of('.'); d != std::string::npos) {
    ext = stem.substr(d);
    stem = stem.substr(0, d);
  }
  Problem p = (ext == ".smt2" || ext == ".smt") ? parse_smtlib(ss.str(), stem) : parse_native(ss.str(), stem);
  p.sourcePath = path;
  return p;
}

}  // namespace biabd
