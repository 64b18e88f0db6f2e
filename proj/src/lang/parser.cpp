#include "recsynth/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace recsynth {

ParseError::ParseError(Kind k, int line, int col, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      kind_(k), line_(line), col_(col) {}

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int64_t value = 0;
  int line = 0;
  int col = 0;
};

const std::set<std::string> kKeywords = {
    "data", "measure", "axiom", "aux", "size", "goal", "if", "then", "else", "match",
    "with", "fix", "tick", "true", "false", "mod", "ceil", "log", "O"};

const std::set<std::string> kDeclKeywords = {"data", "measure", "axiom", "aux", "size", "goal"};

bool is_reserved_symbol(const std::string& s) { return s == kNu || s == kMu; }

std::vector<Token> lex(const std::string& src) {
  static const char* syms[] = {"==>", "<=>", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "<", ">",
                               "=",   "+",   "-",  "*",  "/",  "%",  "(",  ")",  "{",  "}",  "|", ":",
                               ",",   ".",   "\\", "^",  "!",  ";",  "[",  "]"};
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      if (t.text.size() > 18) throw ParseError(ParseError::Kind::Syntax, line, col, "integer literal too large");
      t.value = std::stoll(t.text);
      adv(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* s : syms) {
      size_t n = std::char_traits<char>::length(s);
      if (src.compare(i, n, s) == 0) {
        t.kind = Tok::Sym;
        t.text = s;
        adv(n);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(ParseError::Kind::Syntax, line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(const std::string& s, size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const std::string& s, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg, ParseError::Kind k = ParseError::Kind::Syntax) const {
    throw ParseError(k, peek().line, peek().col, msg);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg, ParseError::Kind k) const {
    throw ParseError(k, t.line, t.col, msg);
  }

  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "' but found '" + describe(peek()) + "'");
    next();
  }
  void expect_kw(const std::string& s) {
    if (!is_kw(s)) fail("expected '" + s + "' but found '" + describe(peek()) + "'");
    next();
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  bool is_ident() const { return peek().kind == Tok::Ident && !kKeywords.count(peek().text); }

  // Plain identifier; reserved logical symbols are rejected when `binder` is set.
  std::string ident(bool binder = false) {
    if (peek().kind != Tok::Ident) fail("expected identifier but found '" + describe(peek()) + "'");
    if (kKeywords.count(peek().text)) fail("keyword '" + peek().text + "' used as identifier");
    if (binder && is_reserved_symbol(peek().text))
      fail("reserved symbol '" + peek().text + "' cannot be bound", ParseError::Kind::Reserved);
    return next().text;
  }

  int64_t integer() {
    if (peek().kind != Tok::Int) fail("expected integer but found '" + describe(peek()) + "'");
    return next().value;
  }

  // ---- logical expressions ----

  bool logic_atom_start() const {
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (t.kind == Tok::Ident) return !kKeywords.count(t.text) || t.text == "true" || t.text == "false" || t.text == "ceil";
    return t.kind == Tok::Sym && t.text == "(";
  }

  LExpr formula() {
    if (is_kw("if")) {
      next();
      LExpr c = formula();
      expect_kw("then");
      LExpr a = formula();
      expect_kw("else");
      LExpr b = formula();
      return lx::ite(c, a, b);
    }
    LExpr lhs = disjunction();
    if (is_sym("==>")) {
      next();
      return lx::implies(lhs, formula());
    }
    if (is_sym("<=>")) {
      next();
      return lx::eq(lhs, formula());
    }
    return lhs;
  }

  LExpr disjunction() {
    LExpr l = conjunction();
    if (is_sym("||")) {
      next();
      return lx::disj(l, disjunction());
    }
    return l;
  }

  LExpr conjunction() {
    LExpr l = negation();
    if (is_sym("&&")) {
      next();
      return mk_and(l, conjunction());
    }
    return l;
  }

  static LExpr mk_and(LExpr a, LExpr b) {
    auto n = std::make_shared<LNode>();
    n->op = LOp::And;
    n->kids = {std::move(a), std::move(b)};
    return n;
  }

  LExpr negation() {
    if (is_sym("!")) {
      next();
      return lx::negate(negation());
    }
    return comparison();
  }

  LExpr comparison() {
    LExpr l = arith();
    if (peek().kind == Tok::Sym) {
      const std::string op = peek().text;
      if (op == "=" || op == "!=" || op == "<=" || op == "<" || op == ">=" || op == ">") {
        next();
        LExpr r = arith();
        if (op == "=") return lx::eq(l, r);
        if (op == "!=") return lx::negate(lx::eq(l, r));
        if (op == "<=") return lx::le(l, r);
        if (op == "<") return lx::lt(l, r);
        if (op == ">=") return lx::ge(l, r);
        return lx::gt(l, r);
      }
    }
    return l;
  }

  LExpr arith() {
    LExpr l = term_mul();
    while (is_sym("+") || is_sym("-")) {
      bool plus = next().text == "+";
      LExpr r = term_mul();
      l = plus ? lx::add(l, r) : lx::sub(l, r);
    }
    return l;
  }

  LExpr term_mul() {
    LExpr l = unary();
    while (is_sym("*") || is_sym("/") || is_kw("mod")) {
      std::string op = next().text;
      LExpr r = unary();
      l = op == "*" ? lx::mul(l, r) : op == "/" ? lx::div(l, r) : lx::mod(l, r);
    }
    return l;
  }

  LExpr unary() {
    if (is_sym("-")) {
      next();
      if (peek().kind == Tok::Int) return lx::num(-next().value);
      return lx::neg(unary());
    }
    return application();
  }

  LExpr application() {
    if (is_ident() && (peek(1).kind == Tok::Int || (peek(1).kind == Tok::Ident && (!kKeywords.count(peek(1).text) ||
                                                                                   peek(1).text == "true" || peek(1).text == "false" ||
                                                                                   peek(1).text == "ceil")) ||
                       (peek(1).kind == Tok::Sym && peek(1).text == "("))) {
      std::string f = ident();
      std::vector<LExpr> args;
      while (logic_atom_start()) args.push_back(logic_atom());
      return lx::app(f, std::move(args));
    }
    return logic_atom();
  }

  LExpr logic_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return lx::num(next().value);
    if (is_kw("true")) { next(); return lx::tru(); }
    if (is_kw("false")) { next(); return lx::fls(); }
    if (is_kw("ceil")) {
      next();
      expect_sym("(");
      LExpr a = unary();
      expect_sym("/");
      LExpr b = unary();
      expect_sym(")");
      return lx::cdiv(a, b);
    }
    if (is_sym("(")) {
      next();
      LExpr e = formula();
      expect_sym(")");
      return e;
    }
    if (is_ident()) {
      std::string n = ident();
      if (is_ctor_name(n)) return lx::app(n, {});
      return lx::var(n);
    }
    fail("expected logical expression but found '" + describe(t) + "'");
  }

  // ---- bounds ----

  BoundExpr bound_body() {
    BoundExpr b;
    b.c = 0;
    bool any = false;
    if (peek().kind == Tok::Int && !is_sym("+", 1) && (peek(1).kind != Tok::Ident || peek(1).text != "u")) {
      int64_t k = next().value;
      if (k <= 0) fail("constant bound must be positive");
      return BoundExpr::constant(k);
    }
    if (is_kw(kMu) || peek().text == kMu) {
      next();
      any = true;
      b.a_num = 1;
      if (is_sym("^")) {
        next();
        b.a_num = integer();
        if (is_sym("/")) {
          next();
          b.a_den = integer();
          if (b.a_den == 0) fail("zero denominator in exponent");
        }
      }
    }
    if (is_kw("log")) {
      next();
      any = true;
      b.b = 1;
      if (is_sym("^")) {
        next();
        b.b = static_cast<int>(integer());
      }
      if (peek().text != kMu) fail("expected 'u' after log");
      next();
    }
    if (!any) fail("expected bound expression");
    if (is_sym("+")) {
      next();
      b.c = integer();
    }
    return b.canonical();
  }

  BoundExpr big_o() {
    if (!is_kw("O")) fail("expected O(...) bound");
    next();
    expect_sym("(");
    BoundExpr b = bound_body();
    expect_sym(")");
    return b;
  }

  // ---- terms ----

  bool term_atom_start() const {
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (t.kind == Tok::Ident)
      return !kKeywords.count(t.text) || t.text == "true" || t.text == "false" || t.text == "tick";
    return t.kind == Tok::Sym && t.text == "(";
  }

  Term term() {
    if (is_kw("if")) {
      next();
      Term c = term();
      expect_kw("then");
      Term a = term();
      expect_kw("else");
      Term b = term();
      return tm::ite(c, a, b);
    }
    if (is_kw("match")) {
      next();
      Term s = term();
      expect_kw("with");
      if (is_sym("|")) next();
      std::vector<MatchCase> cases;
      for (;;) {
        MatchCase mc;
        const Token& ct = peek();
        mc.ctor = ident();
        if (!is_ctor_name(mc.ctor)) fail_at(ct, "match case must start with a constructor", ParseError::Kind::Syntax);
        while (!is_sym("->")) mc.vars.push_back(ident(true));
        expect_sym("->");
        mc.body = term();
        cases.push_back(std::move(mc));
        if (!is_sym("|")) break;
        next();
      }
      return tm::match(s, std::move(cases));
    }
    if (is_kw("fix")) {
      next();
      std::string f = ident(true);
      expect_sym(".");
      auto [params, body] = lambda();
      return tm::fix(f, params, body);
    }
    return op_or();
  }

  // "\x y. body", with "\x. \y. body" merged.
  std::pair<std::vector<std::string>, Term> lambda() {
    std::vector<std::string> params;
    expect_sym("\\");
    while (!is_sym(".")) params.push_back(ident(true));
    if (params.empty()) fail("lambda needs at least one parameter");
    expect_sym(".");
    while (is_sym("\\")) {
      next();
      while (!is_sym(".")) params.push_back(ident(true));
      expect_sym(".");
    }
    return {params, term()};
  }

  Term op_or() {
    Term l = op_and();
    while (is_sym("||")) {
      next();
      l = tm::app("||", {l, op_and()});
    }
    return l;
  }

  Term op_and() {
    Term l = op_cmp();
    while (is_sym("&&")) {
      next();
      l = tm::app("&&", {l, op_cmp()});
    }
    return l;
  }

  Term op_cmp() {
    Term l = op_add();
    if (peek().kind == Tok::Sym) {
      std::string op = peek().text;
      if (op == "==" || op == "<=" || op == "<" || op == ">=" || op == ">") {
        next();
        Term r = op_add();
        if (op == ">=") return tm::app("<=", {r, l});
        if (op == ">") return tm::app("<", {r, l});
        return tm::app(op, {l, r});
      }
    }
    return l;
  }

  Term op_add() {
    Term l = op_mul();
    while (is_sym("+") || is_sym("-")) {
      std::string op = next().text;
      l = tm::app(op, {l, op_mul()});
    }
    return l;
  }

  Term op_mul() {
    Term l = term_app();
    while (is_sym("*") || is_sym("/") || is_sym("%")) {
      std::string op = next().text;
      l = tm::app(op, {l, term_app()});
    }
    return l;
  }

  Term term_app() {
    if (is_ident()) {
      std::string head = ident();
      std::vector<Term> args;
      while (term_atom_start()) args.push_back(term_atom());
      if (args.empty() && !is_ctor_name(head)) return tm::var(head);
      return tm::app(head, std::move(args));
    }
    return term_atom();
  }

  Term term_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return tm::num(next().value);
    if (is_kw("true")) { next(); return tm::boolean(true); }
    if (is_kw("false")) { next(); return tm::boolean(false); }
    if (is_kw("tick")) {
      next();
      expect_sym("(");
      int64_t c = integer();
      expect_sym(",");
      Term body = term();
      expect_sym(")");
      return tm::tick(c, body);
    }
    if (is_sym("(")) {
      next();
      if (is_sym("-") && peek(1).kind == Tok::Int && peek(2).kind == Tok::Sym && peek(2).text == ")") {
        next();
        int64_t v = next().value;
        next();
        return tm::num(-v);
      }
      Term e = term();
      expect_sym(")");
      return e;
    }
    if (is_ident()) {
      std::string n = ident();
      return is_ctor_name(n) ? tm::app(n, {}) : tm::var(n);
    }
    fail("expected term but found '" + describe(t) + "'");
  }

  // ---- types ----

  BaseType base_type(const SynthesisProblem* p) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail("expected a base type");
    std::string n = next().text;
    if (n == "Int") return BaseType::integer();
    if (n == "Bool") return BaseType::boolean();
    if (p && p->find_data(n)) return BaseType::data(n);
    if (!p && is_ctor_name(n)) return BaseType::data(n);
    fail_at(t, "unknown type '" + n + "'", ParseError::Kind::Unbound);
  }

  ScalarType scalar(const SynthesisProblem* p) {
    if (is_sym("{")) {
      next();
      BaseType b = base_type(p);
      expect_sym("|");
      LExpr r = formula();
      expect_sym("}");
      return {b, r};
    }
    return {base_type(p), lx::tru()};
  }

  RType rtype(const SynthesisProblem* p) {
    RType t;
    for (;;) {
      if (peek().kind == Tok::Ident && is_sym(":", 1)) {
        std::string n = ident(true);
        expect_sym(":");
        ScalarType s = scalar(p);
        expect_sym("->");
        t.params.emplace_back(n, s);
        continue;
      }
      t.result = scalar(p);
      if (is_sym("->")) fail("arrow parameters must be named (x:T -> ...)");
      return t;
    }
  }

  size_t pos() const { return pos_; }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---- scope and sort checking for problems ----

struct Scope {
  const SynthesisProblem& p;
  std::map<std::string, Sort> vars;
};

struct Loc {
  int line, col;
};

void check_logic(const Scope& s, const LExpr& e, Loc loc, bool allow_nu, bool allow_mu) {
  switch (e->op) {
    case LOp::Var:
      if (e->name == kNu) {
        if (!allow_nu) throw ParseError(ParseError::Kind::Reserved, loc.line, loc.col, "'v' not allowed here");
        return;
      }
      if (e->name == kMu) {
        if (!allow_mu) throw ParseError(ParseError::Kind::Reserved, loc.line, loc.col, "'u' not allowed here");
        return;
      }
      if (!s.vars.count(e->name))
        throw ParseError(ParseError::Kind::Unbound, loc.line, loc.col, "unbound variable '" + e->name + "'");
      return;
    case LOp::App: {
      size_t arity;
      if (const MeasureDecl* m = s.p.find_measure(e->name)) {
        arity = m->args.size();
      } else if (auto [d, c] = s.p.find_ctor(e->name); c) {
        arity = c->fields.size();
      } else {
        throw ParseError(ParseError::Kind::Unbound, loc.line, loc.col, "unknown measure or constructor '" + e->name + "'");
      }
      if (arity != e->kids.size())
        throw ParseError(ParseError::Kind::Syntax, loc.line, loc.col, "wrong number of arguments to '" + e->name + "'");
      break;
    }
    default: break;
  }
  for (const auto& k : e->kids) check_logic(s, k, loc, allow_nu, allow_mu);
}

// Infers sorts of free variables in an axiom from measure and constructor signatures.
std::vector<std::pair<std::string, Sort>> infer_axiom_sorts(const SynthesisProblem& p, const LExpr& body, Loc loc) {
  std::map<std::string, Sort> sorts;
  std::function<void(const LExpr&)> walk = [&](const LExpr& e) {
    if (e->op == LOp::App) {
      std::vector<BaseType> sig;
      if (const MeasureDecl* m = p.find_measure(e->name)) sig = m->args;
      else if (auto [d, c] = p.find_ctor(e->name); c) sig = c->fields;
      for (size_t i = 0; i < e->kids.size() && i < sig.size(); ++i)
        if (e->kids[i]->op == LOp::Var) sorts.emplace(e->kids[i]->name, sig[i].sort);
    }
    for (const auto& k : e->kids) walk(k);
  };
  walk(body);
  std::vector<std::pair<std::string, Sort>> out;
  for (const auto& v : free_vars(body)) {
    if (is_reserved_symbol(v))
      throw ParseError(ParseError::Kind::Reserved, loc.line, loc.col, "reserved symbol '" + v + "' in axiom");
    auto it = sorts.find(v);
    out.emplace_back(v, it == sorts.end() ? Sort::integer() : it->second);
  }
  return out;
}

void check_rtype(const SynthesisProblem& p, const RType& t, Loc loc) {
  Scope s{p, {}};
  std::set<std::string> seen;
  for (const auto& [n, st] : t.params) {
    if (!seen.insert(n).second)
      throw ParseError(ParseError::Kind::Duplicate, loc.line, loc.col, "duplicate parameter '" + n + "'");
    check_logic(s, st.refinement, loc, true, false);
    s.vars[n] = st.base.sort;
  }
  check_logic(s, t.result.refinement, loc, true, false);
}

void check_term_scope(const SynthesisProblem& p, const Term& t, std::set<std::string> vars,
                      const std::set<std::string>& funs, Loc loc) {
  auto unbound = [&](const std::string& what, const std::string& n) {
    throw ParseError(ParseError::Kind::Unbound, loc.line, loc.col, "unbound " + what + " '" + n + "'");
  };
  switch (t->kind) {
    case TKind::Var:
      if (!vars.count(t->name)) unbound("variable", t->name);
      return;
    case TKind::Int: case TKind::Bool: return;
    case TKind::App:
      if (is_ctor_name(t->name)) {
        auto [d, c] = p.find_ctor(t->name);
        if (!c) unbound("constructor", t->name);
        if (c->fields.size() != t->kids.size())
          throw ParseError(ParseError::Kind::Syntax, loc.line, loc.col, "constructor '" + t->name + "' arity mismatch");
      } else if (!is_operator_name(t->name) && !funs.count(t->name) && t->name != "not") {
        unbound("function", t->name);
      }
      break;
    case TKind::Fix: {
      auto f2 = funs;
      f2.insert(t->name);
      for (const auto& x : t->params) vars.insert(x);
      check_term_scope(p, t->kids[0], vars, f2, loc);
      return;
    }
    case TKind::Match:
      check_term_scope(p, t->kids[0], vars, funs, loc);
      for (const auto& c : t->cases) {
        auto [d, cd] = p.find_ctor(c.ctor);
        if (!cd) unbound("constructor", c.ctor);
        if (cd->fields.size() != c.vars.size())
          throw ParseError(ParseError::Kind::Syntax, loc.line, loc.col, "pattern '" + c.ctor + "' arity mismatch");
        auto v2 = vars;
        v2.insert(c.vars.begin(), c.vars.end());
        check_term_scope(p, c.body, v2, funs, loc);
      }
      return;
    default: break;
  }
  for (const auto& k : t->kids) check_term_scope(p, k, vars, funs, loc);
}

}  // namespace

SynthesisProblem parse_problem(const std::string& text) {
  Parser ps(lex(text));
  SynthesisProblem p;
  std::set<std::string> names;  // functions, measures, data types, constructors
  bool have_goal = false;
  struct PendingAux {
    size_t index;
    Loc loc;
  };
  std::vector<PendingAux> pending;
  std::vector<std::pair<std::string, Loc>> size_locs;

  auto declare = [&](const std::string& n, const Token& t) {
    if (is_reserved_symbol(n)) throw ParseError(ParseError::Kind::Reserved, t.line, t.col, "reserved symbol '" + n + "'");
    if (!names.insert(n).second) throw ParseError(ParseError::Kind::Duplicate, t.line, t.col, "duplicate definition of '" + n + "'");
  };

  while (!ps.at_end()) {
    const Token kw = ps.peek();
    if (kw.kind != Tok::Ident || !kDeclKeywords.count(kw.text)) {
      if (kw.kind == Tok::Ident && is_reserved_symbol(kw.text))
        ps.fail("reserved symbol '" + kw.text + "' used as a declaration", ParseError::Kind::Reserved);
      ps.fail("expected a declaration (data, measure, axiom, aux, size, goal)");
    }
    ps.next();
    Loc loc{kw.line, kw.col};
    if (kw.text == "data") {
      DataDecl d;
      const Token nt = ps.peek();
      d.name = ps.ident(true);
      if (!is_ctor_name(d.name)) ps.fail_at(nt, "data type names are capitalized", ParseError::Kind::Syntax);
      declare(d.name, nt);
      ps.expect_kw("with");
      const Token mt = ps.peek();
      d.measure = ps.ident(true);
      declare(d.measure, mt);
      ps.expect_sym("=");
      p.data.push_back(d);  // visible to recursive field types
      std::vector<CtorDecl> ctors;
      for (;;) {
        const Token ct = ps.peek();
        CtorDecl c;
        c.name = ps.ident(true);
        if (!is_ctor_name(c.name)) ps.fail_at(ct, "constructor names are capitalized", ParseError::Kind::Syntax);
        declare(c.name, ct);
        while (ps.peek().kind == Tok::Ident && !kKeywords.count(ps.peek().text)) c.fields.push_back(ps.base_type(&p));
        ctors.push_back(c);
        if (!ps.is_sym("|")) break;
        ps.next();
      }
      p.data.back().ctors = ctors;
      p.measures.push_back({d.measure, {BaseType::data(d.name)}, BaseType::integer()});
    } else if (kw.text == "measure") {
      MeasureDecl m;
      const Token nt = ps.peek();
      m.name = ps.ident(true);
      declare(m.name, nt);
      ps.expect_sym("::");
      std::vector<BaseType> sig{ps.base_type(&p)};
      while (ps.is_sym("->")) {
        ps.next();
        sig.push_back(ps.base_type(&p));
      }
      if (sig.size() < 2) ps.fail_at(nt, "measure needs at least one argument", ParseError::Kind::Syntax);
      m.result = sig.back();
      sig.pop_back();
      m.args = sig;
      p.measures.push_back(m);
    } else if (kw.text == "axiom") {
      LExpr body = ps.formula();
      Scope s{p, {}};
      auto vars = infer_axiom_sorts(p, body, loc);
      for (const auto& [n, so] : vars) s.vars[n] = so;
      check_logic(s, body, loc, false, false);
      p.axioms.push_back({vars, body});
    } else if (kw.text == "aux") {
      AuxDecl a;
      const Token nt = ps.peek();
      a.name = ps.ident(true);
      declare(a.name, nt);
      ps.expect_sym("::");
      a.type.type = ps.rtype(&p);
      if (!a.type.type.is_arrow()) ps.fail_at(nt, "auxiliary must have a function type", ParseError::Kind::Syntax);
      check_rtype(p, a.type.type, loc);
      ps.expect_sym(",");
      a.type.ann.bound = ps.big_o();
      if (ps.is_sym("=")) {
        ps.next();
        a.impl = ps.term();
      }
      pending.push_back({p.auxiliaries.size(), loc});
      p.auxiliaries.push_back(a);
    } else if (kw.text == "size") {
      const Token nt = ps.peek();
      std::string f = ps.ident();
      if (p.sizes.count(f)) ps.fail_at(nt, "duplicate size function for '" + f + "'", ParseError::Kind::Duplicate);
      ps.expect_sym("=");
      ps.expect_sym("\\");
      SizeFunction sf;
      while (!ps.is_sym(".")) sf.params.push_back(ps.ident(true));
      ps.expect_sym(".");
      sf.body = ps.formula();
      p.sizes[f] = sf;
      size_locs.emplace_back(f, Loc{nt.line, nt.col});
    } else {  // goal
      if (have_goal) ps.fail_at(kw, "duplicate goal", ParseError::Kind::Duplicate);
      const Token nt = ps.peek();
      p.goal_name = ps.ident(true);
      declare(p.goal_name, nt);
      ps.expect_sym("::");
      p.goal.type = ps.rtype(&p);
      if (!p.goal.type.is_arrow()) ps.fail_at(nt, "goal must have a function type", ParseError::Kind::Syntax);
      check_rtype(p, p.goal.type, loc);
      ps.expect_sym(",");
      p.goal.ann.bound = ps.big_o();
      have_goal = true;
    }
  }
  if (!have_goal) ps.fail("missing goal declaration");

  std::set<std::string> funs;
  for (const auto& a : p.auxiliaries) funs.insert(a.name);
  for (const auto& pa : pending) {
    const AuxDecl& a = p.auxiliaries[pa.index];
    if (!a.impl) continue;
    std::set<std::string> vars;
    for (const auto& [n, s] : a.type.type.params) vars.insert(n);
    check_term_scope(p, *a.impl, vars, funs, pa.loc);
  }

  for (const auto& [f, loc] : size_locs) {
    const RType* t = nullptr;
    if (f == p.goal_name) t = &p.goal.type;
    else if (const AuxDecl* a = p.find_aux(f)) t = &a->type.type;
    if (!t) throw ParseError(ParseError::Kind::Unbound, loc.line, loc.col, "size function for unknown function '" + f + "'");
    const SizeFunction& sf = p.sizes[f];
    if (sf.params.size() != t->params.size())
      throw ParseError(ParseError::Kind::Syntax, loc.line, loc.col, "size function arity does not match '" + f + "'");
    Scope s{p, {}};
    for (size_t i = 0; i < sf.params.size(); ++i) s.vars[sf.params[i]] = t->params[i].second.base.sort;
    check_logic(s, sf.body, loc, false, false);
    for (size_t i = 0; i < sf.params.size(); ++i)
      if (t->params[i].second.base.sort.is_bool() && mentions(sf.body, sf.params[i]))
        throw ParseError(ParseError::Kind::Syntax, loc.line, loc.col, "size function may not use Bool parameter '" + sf.params[i] + "'");
  }
  if (!p.sizes.count(p.goal_name)) ps.fail("missing size function for goal '" + p.goal_name + "'", ParseError::Kind::Unbound);
  return p;
}

Term parse_term(const std::string& text) {
  Parser ps(lex(text));
  Term t = ps.term();
  if (!ps.at_end()) ps.fail("unexpected '" + Parser::describe(ps.peek()) + "' after term");
  return t;
}

LExpr parse_logic(const std::string& text) {
  Parser ps(lex(text));
  LExpr e = ps.formula();
  if (!ps.at_end()) ps.fail("unexpected '" + Parser::describe(ps.peek()) + "' after formula");
  return e;
}

BoundExpr parse_bound(const std::string& text) {
  Parser ps(lex(text));
  BoundExpr b = ps.bound_body();
  if (!ps.at_end()) ps.fail("unexpected '" + Parser::describe(ps.peek()) + "' after bound");
  return b;
}

Term parse_program(const std::string& text) {
  Parser ps(lex(text));
  std::string name = ps.ident(true);
  ps.expect_sym("=");
  Term t;
  if (ps.is_kw("fix")) {
    t = ps.term();
    if (t->name != name) ps.fail("fix name does not match definition name '" + name + "'");
  } else {
    auto [params, body] = ps.lambda();
    t = tm::fix(name, params, body);
  }
  if (!ps.at_end()) ps.fail("unexpected '" + Parser::describe(ps.peek()) + "' after program");
  return t;
}

void check_program_scope(const SynthesisProblem& p, const Term& program) {
  std::set<std::string> funs;
  for (const auto& a : p.auxiliaries) funs.insert(a.name);
  check_term_scope(p, program, {}, funs, Loc{1, 1});
}

// ---- printing ----

namespace {

int op_prec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "<=" || op == "<") return 3;
  if (op == "+" || op == "-") return 4;
  if (op == "*" || op == "/" || op == "%") return 5;
  return 6;
}

int tprec(const Term& t) {
  switch (t->kind) {
    case TKind::If: case TKind::Match: case TKind::Fix: return 0;
    case TKind::App:
      if (is_operator_name(t->name) && t->kids.size() == 2) return op_prec(t->name);
      return t->kids.empty() ? 7 : 6;
    default: return 7;
  }
}

void tp(const Term& t, std::ostringstream& os, bool tail);

void twrap(const Term& t, int ctx, std::ostringstream& os) {
  if (tprec(t) < ctx) {
    os << '(';
    tp(t, os, true);
    os << ')';
  } else {
    tp(t, os, false);
  }
}

// `tail`: the term extends to the end of its enclosing construct, so a match needs no parentheses.
void tp(const Term& t, std::ostringstream& os, bool tail) {
  switch (t->kind) {
    case TKind::Var: os << t->name; return;
    case TKind::Int:
      if (t->value < 0) os << "(-" << -t->value << ')';
      else os << t->value;
      return;
    case TKind::Bool: os << (t->value ? "true" : "false"); return;
    case TKind::App: {
      if (is_operator_name(t->name) && t->kids.size() == 2) {
        int p = op_prec(t->name);
        bool nonassoc = p == 3;
        twrap(t->kids[0], nonassoc ? p + 1 : p, os);
        os << ' ' << t->name << ' ';
        twrap(t->kids[1], p + 1, os);
        return;
      }
      os << t->name;
      for (const auto& k : t->kids) {
        os << ' ';
        twrap(k, 7, os);
      }
      return;
    }
    case TKind::Tick:
      os << "tick(" << t->value << ", ";
      tp(t->kids[0], os, true);
      os << ')';
      return;
    case TKind::If:
      os << "if ";
      tp(t->kids[0], os, false);
      os << " then ";
      tp(t->kids[1], os, false);
      os << " else ";
      tp(t->kids[2], os, tail);
      return;
    case TKind::Match:
      if (!tail) {
        os << '(';
        tp(t, os, true);
        os << ')';
        return;
      }
      os << "match ";
      tp(t->kids[0], os, false);
      os << " with";
      for (size_t i = 0; i < t->cases.size(); ++i) {
        const auto& c = t->cases[i];
        os << " | " << c.ctor;
        for (const auto& v : c.vars) os << ' ' << v;
        os << " -> ";
        tp(c.body, os, i + 1 == t->cases.size());
      }
      return;
    case TKind::Fix:
      if (!tail) {
        os << '(';
        tp(t, os, true);
        os << ')';
        return;
      }
      os << "fix " << t->name << ". \\";
      for (size_t i = 0; i < t->params.size(); ++i) os << (i ? " " : "") << t->params[i];
      os << ". ";
      tp(t->kids[0], os, true);
      return;
  }
}

}  // namespace

std::string pretty_print(const Term& t) {
  std::ostringstream os;
  tp(t, os, true);
  return os.str();
}

std::string print_program(const Term& fix) {
  if (fix->kind != TKind::Fix) return pretty_print(fix);
  std::ostringstream os;
  os << fix->name << " = \\";
  for (size_t i = 0; i < fix->params.size(); ++i) os << (i ? " " : "") << fix->params[i];
  os << ". ";
  tp(fix->kids[0], os, true);
  return os.str();
}

std::string print_problem(const SynthesisProblem& p) {
  std::ostringstream os;
  for (const auto& d : p.data) {
    os << "data " << d.name << " with " << d.measure << " =";
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      os << (i ? " |" : "") << ' ' << d.ctors[i].name;
      for (const auto& f : d.ctors[i].fields) os << ' ' << f.sort.name();
    }
    os << '\n';
  }
  for (const auto& m : p.measures) {
    bool intrinsic = false;
    for (const auto& d : p.data) intrinsic = intrinsic || d.measure == m.name;
    if (intrinsic) continue;
    os << "measure " << m.name << " ::";
    for (const auto& a : m.args) os << ' ' << a.sort.name() << " ->";
    os << ' ' << m.result.sort.name() << '\n';
  }
  for (const auto& a : p.axioms) os << "axiom " << print_logic(a.body) << '\n';
  for (const auto& a : p.auxiliaries) {
    os << "aux " << a.name << " :: " << print_rtype(a.type.type) << ", " << print_bound_o(a.type.ann.bound);
    if (a.impl) os << " = " << pretty_print(*a.impl);
    os << '\n';
  }
  for (const auto& [f, s] : p.sizes) {
    os << "size " << f << " = \\";
    for (size_t i = 0; i < s.params.size(); ++i) os << (i ? " " : "") << s.params[i];
    os << ". " << print_logic(s.body) << '\n';
  }
  os << "goal " << p.goal_name << " :: " << print_rtype(p.goal.type) << ", " << print_bound_o(p.goal.ann.bound) << '\n';
  return os.str();
}

}  // namespace recsynth
