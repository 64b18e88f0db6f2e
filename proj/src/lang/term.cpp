#include "recsynth/term.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace recsynth {

namespace tm {
namespace {
std::shared_ptr<TermNode> node(TKind k) {
  auto n = std::make_shared<TermNode>();
  n->kind = k;
  return n;
}
}  // namespace

Term var(const std::string& n) {
  auto t = node(TKind::Var);
  t->name = n;
  return t;
}
Term num(int64_t v) {
  auto t = node(TKind::Int);
  t->value = v;
  return t;
}
Term boolean(bool b) {
  auto t = node(TKind::Bool);
  t->value = b ? 1 : 0;
  return t;
}
Term app(const std::string& head, std::vector<Term> args) {
  auto t = node(TKind::App);
  t->name = head;
  t->kids = std::move(args);
  return t;
}
Term ite(Term c, Term a, Term b) {
  auto t = node(TKind::If);
  t->kids = {std::move(c), std::move(a), std::move(b)};
  return t;
}
Term match(Term scrut, std::vector<MatchCase> cases) {
  auto t = node(TKind::Match);
  t->kids = {std::move(scrut)};
  t->cases = std::move(cases);
  return t;
}
Term fix(const std::string& f, std::vector<std::string> params, Term body) {
  auto t = node(TKind::Fix);
  t->name = f;
  t->params = std::move(params);
  t->kids = {std::move(body)};
  return t;
}
Term tick(int64_t cost, Term body) {
  auto t = node(TKind::Tick);
  t->value = cost;
  t->kids = {std::move(body)};
  return t;
}
}  // namespace tm

bool is_operator_name(const std::string& s) {
  return !s.empty() && !std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_';
}

bool is_ctor_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

bool is_eterm(const Term& t) {
  switch (t->kind) {
    case TKind::Var: case TKind::Int: case TKind::Bool: return true;
    case TKind::App:
      return std::all_of(t->kids.begin(), t->kids.end(), [](const Term& k) { return is_eterm(k); });
    default: return false;
  }
}

bool term_equal(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->name != b->name || a->value != b->value || a->params != b->params ||
      a->kids.size() != b->kids.size() || a->cases.size() != b->cases.size())
    return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!term_equal(a->kids[i], b->kids[i])) return false;
  for (size_t i = 0; i < a->cases.size(); ++i) {
    const auto& x = a->cases[i];
    const auto& y = b->cases[i];
    if (x.ctor != y.ctor || x.vars != y.vars || !term_equal(x.body, y.body)) return false;
  }
  return true;
}

namespace {

using Renaming = std::map<std::string, std::string>;

bool alpha_rec(const Term& a, const Term& b, Renaming ra, Renaming rb, int& counter) {
  if (a->kind != b->kind) return false;
  auto look = [](const Renaming& r, const std::string& n) {
    auto it = r.find(n);
    return it == r.end() ? n : it->second;
  };
  auto bind = [&](const std::vector<std::string>& xs, const std::vector<std::string>& ys) {
    if (xs.size() != ys.size()) return false;
    for (size_t i = 0; i < xs.size(); ++i) {
      std::string fresh = "#" + std::to_string(counter++);
      ra[xs[i]] = fresh;
      rb[ys[i]] = fresh;
    }
    return true;
  };
  switch (a->kind) {
    case TKind::Var: return look(ra, a->name) == look(rb, b->name);
    case TKind::Int: case TKind::Bool: return a->value == b->value;
    case TKind::App:
      if (look(ra, a->name) != look(rb, b->name) || a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!alpha_rec(a->kids[i], b->kids[i], ra, rb, counter)) return false;
      return true;
    case TKind::If:
      for (int i = 0; i < 3; ++i)
        if (!alpha_rec(a->kids[i], b->kids[i], ra, rb, counter)) return false;
      return true;
    case TKind::Tick:
      return a->value == b->value && alpha_rec(a->kids[0], b->kids[0], ra, rb, counter);
    case TKind::Fix: {
      std::vector<std::string> xs = a->params, ys = b->params;
      xs.insert(xs.begin(), a->name);
      ys.insert(ys.begin(), b->name);
      if (!bind(xs, ys)) return false;
      return alpha_rec(a->kids[0], b->kids[0], ra, rb, counter);
    }
    case TKind::Match: {
      if (!alpha_rec(a->kids[0], b->kids[0], ra, rb, counter)) return false;
      if (a->cases.size() != b->cases.size()) return false;
      for (size_t i = 0; i < a->cases.size(); ++i) {
        const auto& x = a->cases[i];
        const auto& y = b->cases[i];
        if (x.ctor != y.ctor) return false;
        Renaming sa = ra, sb = rb;
        if (!bind(x.vars, y.vars)) return false;
        bool ok = alpha_rec(x.body, y.body, ra, rb, counter);
        ra = sa;
        rb = sb;
        if (!ok) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
  int counter = 0;
  return alpha_rec(a, b, {}, {}, counter);
}

int term_size(const Term& t) {
  int n = 1;
  for (const auto& k : t->kids) n += term_size(k);
  for (const auto& c : t->cases) n += term_size(c.body);
  return n;
}

int term_depth(const Term& t) {
  int d = 0;
  for (const auto& k : t->kids) d = std::max(d, term_depth(k));
  for (const auto& c : t->cases) d = std::max(d, term_depth(c.body));
  return d + 1;
}

namespace {
void ftv(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case TKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TKind::Fix: {
      auto saved = bound;
      bound.insert(t->name);
      bound.insert(t->params.begin(), t->params.end());
      ftv(t->kids[0], bound, out);
      bound = saved;
      return;
    }
    case TKind::Match: {
      ftv(t->kids[0], bound, out);
      for (const auto& c : t->cases) {
        auto saved = bound;
        bound.insert(c.vars.begin(), c.vars.end());
        ftv(c.body, bound, out);
        bound = saved;
      }
      return;
    }
    default:
      for (const auto& k : t->kids) ftv(k, bound, out);
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

void all_names(const Term& t, std::set<std::string>& out) {
  if (t->kind == TKind::Var || t->kind == TKind::Fix) out.insert(t->name);
  out.insert(t->params.begin(), t->params.end());
  for (const auto& k : t->kids) all_names(k, out);
  for (const auto& c : t->cases) {
    out.insert(c.vars.begin(), c.vars.end());
    all_names(c.body, out);
  }
}

// Renames binders in `names` that collide with `danger`; returns the renaming applied.
std::vector<std::string> rename_binders(std::vector<std::string> names, const std::set<std::string>& danger,
                                        std::set<std::string>& avoid, std::vector<std::pair<std::string, std::string>>& ren) {
  for (auto& n : names) {
    if (danger.count(n)) {
      std::string f = fresh_name(n, avoid);
      avoid.insert(f);
      ren.emplace_back(n, f);
      n = f;
    }
  }
  return names;
}

}  // namespace

std::set<std::string> free_term_vars(const Term& t) {
  std::set<std::string> bound, out;
  ftv(t, bound, out);
  return out;
}

Term substitute(const Term& t, const std::string& x, const Term& s) {
  switch (t->kind) {
    case TKind::Var: return t->name == x ? s : t;
    case TKind::Int: case TKind::Bool: return t;
    case TKind::App: case TKind::If: case TKind::Tick: {
      auto n = std::make_shared<TermNode>(*t);
      for (auto& k : n->kids) k = substitute(k, x, s);
      return n;
    }
    case TKind::Fix: {
      if (t->name == x || std::find(t->params.begin(), t->params.end(), x) != t->params.end()) return t;
      auto fv_s = free_term_vars(s);
      std::set<std::string> avoid = fv_s;
      all_names(t, avoid);
      avoid.insert(x);
      std::vector<std::pair<std::string, std::string>> ren;
      std::vector<std::string> binders = t->params;
      binders.insert(binders.begin(), t->name);
      binders = rename_binders(binders, fv_s, avoid, ren);
      Term body = t->kids[0];
      for (const auto& [from, to] : ren) body = substitute(body, from, tm::var(to));
      std::vector<std::string> params(binders.begin() + 1, binders.end());
      return tm::fix(binders[0], params, substitute(body, x, s));
    }
    case TKind::Match: {
      std::vector<MatchCase> cases;
      auto fv_s = free_term_vars(s);
      for (const auto& c : t->cases) {
        if (std::find(c.vars.begin(), c.vars.end(), x) != c.vars.end()) {
          cases.push_back(c);
          continue;
        }
        std::set<std::string> avoid = fv_s;
        all_names(c.body, avoid);
        avoid.insert(x);
        std::vector<std::pair<std::string, std::string>> ren;
        auto vars = rename_binders(c.vars, fv_s, avoid, ren);
        Term body = c.body;
        for (const auto& [from, to] : ren) body = substitute(body, from, tm::var(to));
        cases.push_back({c.ctor, vars, substitute(body, x, s)});
      }
      return tm::match(substitute(t->kids[0], x, s), std::move(cases));
    }
  }
  return t;
}

int count_calls(const Term& t, const std::string& f) {
  int n = (t->kind == TKind::App && t->name == f) ? 1 : 0;
  for (const auto& k : t->kids) n += count_calls(k, f);
  for (const auto& c : t->cases) n += count_calls(c.body, f);
  return n;
}

}  // namespace recsynth
