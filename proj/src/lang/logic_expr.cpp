#include "recsynth/logic_expr.hpp"

#include <sstream>

namespace recsynth {

std::string Sort::name() const {
  switch (kind) {
    case Kind::Int: return "Int";
    case Kind::Bool: return "Bool";
    case Kind::Data: return data;
  }
  return "?";
}

namespace {
LExpr mk(LOp op, std::vector<LExpr> kids, std::string name = {}, int64_t value = 0) {
  auto n = std::make_shared<LNode>();
  n->op = op;
  n->kids = std::move(kids);
  n->name = std::move(name);
  n->value = value;
  return n;
}
}  // namespace

namespace lx {
LExpr var(const std::string& n) { return mk(LOp::Var, {}, n); }
LExpr num(int64_t v) { return mk(LOp::Int, {}, {}, v); }
LExpr boolean(bool b) { return mk(LOp::Bool, {}, {}, b ? 1 : 0); }
LExpr tru() { static const LExpr t = boolean(true); return t; }
LExpr fls() { static const LExpr f = boolean(false); return f; }
LExpr app(const std::string& f, std::vector<LExpr> args) { return mk(LOp::App, std::move(args), f); }
LExpr add(LExpr a, LExpr b) { return mk(LOp::Add, {std::move(a), std::move(b)}); }
LExpr sub(LExpr a, LExpr b) { return mk(LOp::Sub, {std::move(a), std::move(b)}); }
LExpr mul(LExpr a, LExpr b) { return mk(LOp::Mul, {std::move(a), std::move(b)}); }
LExpr div(LExpr a, LExpr b) { return mk(LOp::Div, {std::move(a), std::move(b)}); }
LExpr cdiv(LExpr a, LExpr b) { return mk(LOp::CeilDiv, {std::move(a), std::move(b)}); }
LExpr mod(LExpr a, LExpr b) { return mk(LOp::Mod, {std::move(a), std::move(b)}); }
LExpr neg(LExpr a) {
  if (a->op == LOp::Int) return num(-a->value);
  return mk(LOp::Neg, {std::move(a)});
}
LExpr eq(LExpr a, LExpr b) { return mk(LOp::Eq, {std::move(a), std::move(b)}); }
LExpr le(LExpr a, LExpr b) { return mk(LOp::Le, {std::move(a), std::move(b)}); }
LExpr lt(LExpr a, LExpr b) { return mk(LOp::Lt, {std::move(a), std::move(b)}); }
LExpr ge(LExpr a, LExpr b) { return le(std::move(b), std::move(a)); }
LExpr gt(LExpr a, LExpr b) { return lt(std::move(b), std::move(a)); }
LExpr conj(LExpr a, LExpr b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  return mk(LOp::And, {std::move(a), std::move(b)});
}
LExpr disj(LExpr a, LExpr b) { return mk(LOp::Or, {std::move(a), std::move(b)}); }
LExpr negate(LExpr a) {
  if (a->op == LOp::Bool) return boolean(a->value == 0);
  return mk(LOp::Not, {std::move(a)});
}
LExpr implies(LExpr a, LExpr b) { return mk(LOp::Implies, {std::move(a), std::move(b)}); }
LExpr ite(LExpr c, LExpr a, LExpr b) { return mk(LOp::Ite, {std::move(c), std::move(a), std::move(b)}); }
LExpr conj_all(const std::vector<LExpr>& xs) {
  LExpr acc;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
    if (is_true(*it)) continue;
    acc = acc ? mk(LOp::And, {*it, acc}) : *it;
  }
  return acc ? acc : tru();
}
}  // namespace lx

bool is_true(const LExpr& e) { return e->op == LOp::Bool && e->value != 0; }
bool is_false(const LExpr& e) { return e->op == LOp::Bool && e->value == 0; }

int lcompare(const LExpr& a, const LExpr& b) {
  if (a.get() == b.get()) return 0;
  if (a->op != b->op) return a->op < b->op ? -1 : 1;
  if (a->value != b->value) return a->value < b->value ? -1 : 1;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (int c = lcompare(a->kids[i], b->kids[i])) return c;
  return 0;
}

bool lequal(const LExpr& a, const LExpr& b) { return lcompare(a, b) == 0; }

namespace {
void fv(const LExpr& e, std::set<std::string>& out) {
  if (e->op == LOp::Var) out.insert(e->name);
  for (const auto& k : e->kids) fv(k, out);
}
}  // namespace

std::set<std::string> free_vars(const LExpr& e) {
  std::set<std::string> out;
  fv(e, out);
  return out;
}

bool mentions(const LExpr& e, const std::string& var) {
  if (e->op == LOp::Var && e->name == var) return true;
  for (const auto& k : e->kids)
    if (mentions(k, var)) return true;
  return false;
}

void collect_apps(const LExpr& e, std::vector<LExpr>& out) {
  for (const auto& k : e->kids) collect_apps(k, out);
  if (e->op == LOp::App) out.push_back(e);
}

LExpr subst_logic_all(const LExpr& phi, const std::map<std::string, LExpr>& m) {
  if (phi->op == LOp::Var) {
    auto it = m.find(phi->name);
    return it == m.end() ? phi : it->second;
  }
  if (phi->kids.empty()) return phi;
  bool changed = false;
  std::vector<LExpr> kids;
  kids.reserve(phi->kids.size());
  for (const auto& k : phi->kids) {
    kids.push_back(subst_logic_all(k, m));
    changed = changed || kids.back().get() != k.get();
  }
  if (!changed) return phi;
  auto n = std::make_shared<LNode>(*phi);
  n->kids = std::move(kids);
  return n;
}

LExpr subst_logic(const LExpr& phi, const std::string& x, const LExpr& e) {
  return subst_logic_all(phi, {{x, e}});
}

void conjuncts(const LExpr& e, std::vector<LExpr>& out) {
  if (e->op == LOp::And) {
    for (const auto& k : e->kids) conjuncts(k, out);
  } else if (!is_true(e)) {
    out.push_back(e);
  }
}

namespace {

int prec(const LExpr& e) {
  switch (e->op) {
    case LOp::Ite: return 0;
    case LOp::Implies: return 1;
    case LOp::Or: return 2;
    case LOp::And: return 3;
    case LOp::Not: return 4;
    case LOp::Eq: case LOp::Le: case LOp::Lt: return 5;
    case LOp::Add: case LOp::Sub: return 6;
    case LOp::Mul: case LOp::Div: case LOp::Mod: return 7;
    case LOp::Neg: return 8;
    case LOp::Int: return e->value < 0 ? 8 : 10;
    case LOp::App: return e->kids.empty() ? 10 : 9;
    default: return 10;
  }
}

void pr(const LExpr& e, int ctx, std::ostringstream& os);

void wrap(const LExpr& e, int ctx, std::ostringstream& os) {
  if (prec(e) < ctx) {
    os << '(';
    pr(e, 0, os);
    os << ')';
  } else {
    pr(e, ctx, os);
  }
}

void binop(const LExpr& e, const char* sym, int p, bool right_assoc, std::ostringstream& os) {
  wrap(e->kids[0], right_assoc ? p + 1 : p, os);
  os << ' ' << sym << ' ';
  wrap(e->kids[1], right_assoc ? p : p + 1, os);
}

void pr(const LExpr& e, int, std::ostringstream& os) {
  switch (e->op) {
    case LOp::Var: os << e->name; return;
    case LOp::Int: os << e->value; return;
    case LOp::Bool: os << (e->value ? "true" : "false"); return;
    case LOp::App:
      os << e->name;
      for (const auto& k : e->kids) {
        os << ' ';
        wrap(k, 10, os);
      }
      return;
    case LOp::Add: binop(e, "+", 6, false, os); return;
    case LOp::Sub: binop(e, "-", 6, false, os); return;
    case LOp::Mul: binop(e, "*", 7, false, os); return;
    case LOp::Div: binop(e, "/", 7, false, os); return;
    case LOp::Mod: binop(e, "mod", 7, false, os); return;
    case LOp::CeilDiv:
      os << "ceil(";
      binop(e, "/", 7, false, os);
      os << ')';
      return;
    case LOp::Neg: os << '-'; wrap(e->kids[0], 8, os); return;
    case LOp::Eq: binop(e, "=", 6, false, os); return;
    case LOp::Le: binop(e, "<=", 6, false, os); return;
    case LOp::Lt: binop(e, "<", 6, false, os); return;
    case LOp::And: binop(e, "&&", 3, true, os); return;
    case LOp::Or: binop(e, "||", 2, true, os); return;
    case LOp::Not: os << '!'; wrap(e->kids[0], 5, os); return;
    case LOp::Implies: binop(e, "==>", 1, true, os); return;
    case LOp::Ite:
      os << "if ";
      pr(e->kids[0], 0, os);
      os << " then ";
      pr(e->kids[1], 0, os);
      os << " else ";
      pr(e->kids[2], 0, os);
      return;
  }
}

}  // namespace

std::string print_logic(const LExpr& e) {
  std::ostringstream os;
  pr(e, 0, os);
  return os.str();
}

}  // namespace recsynth
