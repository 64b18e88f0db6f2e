#include "recsynth/logic_eval.hpp"

#include <functional>
#include <sstream>

namespace recsynth {

bool LVal::operator<(const LVal& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (i != o.i) return i < o.i;
  if (ctor != o.ctor) return ctor < o.ctor;
  return fields < o.fields;
}

std::string print_lval(const LVal& v) {
  switch (v.kind) {
    case LVal::Kind::Int: return std::to_string(v.i);
    case LVal::Kind::Bool: return v.i ? "true" : "false";
    case LVal::Kind::Data: {
      std::string s = v.ctor;
      for (const auto& f : v.fields) {
        std::string fs = print_lval(f);
        bool wrap = (f.kind == LVal::Kind::Data && !f.fields.empty()) || (f.kind == LVal::Kind::Int && f.i < 0);
        s += " " + (wrap ? "(" + fs + ")" : fs);
      }
      return s;
    }
  }
  return "?";
}

Theory Theory::from_problem(const SynthesisProblem& p) { return Theory{p.data, p.measures, p.axioms}; }

const DataDecl* Theory::find_data(const std::string& n) const {
  for (const auto& d : data)
    if (d.name == n) return &d;
  return nullptr;
}

const MeasureDecl* Theory::find_measure(const std::string& n) const {
  for (const auto& m : measures)
    if (m.name == n) return &m;
  return nullptr;
}

std::pair<const DataDecl*, const CtorDecl*> Theory::find_ctor(const std::string& n) const {
  for (const auto& d : data)
    for (const auto& c : d.ctors)
      if (c.name == n) return {&d, &c};
  return {nullptr, nullptr};
}

std::optional<Sort> Theory::app_sort(const std::string& head) const {
  if (const MeasureDecl* m = find_measure(head)) return m->result.sort;
  if (auto [d, c] = find_ctor(head); d) return Sort::of_data(d->name);
  return std::nullopt;
}

namespace {

std::optional<int64_t> as_int(const std::optional<LVal>& v) {
  if (!v || v->kind != LVal::Kind::Int) return std::nullopt;
  return v->i;
}

std::optional<bool> as_bool(const std::optional<LVal>& v) {
  if (!v || v->kind != LVal::Kind::Bool) return std::nullopt;
  return v->i != 0;
}

// Euclidean quotient, as in SMT-LIB.
std::optional<int64_t> euclid_div(int64_t a, int64_t b) {
  if (b == 0 || (a == INT64_MIN && b == -1)) return std::nullopt;
  int64_t ab = b < 0 ? -b : b;
  int64_t q = a / ab;
  if (a % ab != 0 && a < 0) --q;  // floor(a / |b|)
  return b < 0 ? -q : q;
}

// One way an axiom defines a measure on a constructor.
struct Definition {
  size_t pos;                         // argument position holding the constructor pattern
  std::string ctor;
  std::vector<std::string> ctor_vars;
  std::vector<std::string> arg_vars;  // names of the other arguments ("" at pos)
  LExpr condition;                    // may be true
  LExpr rhs;
};

std::optional<Definition> as_definition(const std::string& m, const LExpr& lhs, const LExpr& rhs, const LExpr& cond,
                                        const Theory& th) {
  if (lhs->op != LOp::App || lhs->name != m) return std::nullopt;
  Definition d;
  bool found = false;
  for (size_t i = 0; i < lhs->kids.size(); ++i) {
    const LExpr& a = lhs->kids[i];
    if (a->op == LOp::Var) {
      d.arg_vars.push_back(a->name);
      continue;
    }
    if (a->op != LOp::App || found || !th.find_ctor(a->name).second) return std::nullopt;
    for (const auto& k : a->kids) {
      if (k->op != LOp::Var) return std::nullopt;
      d.ctor_vars.push_back(k->name);
    }
    d.pos = i;
    d.ctor = a->name;
    d.arg_vars.push_back("");
    found = true;
  }
  if (!found) return std::nullopt;
  d.condition = cond;
  d.rhs = rhs;
  return d;
}

struct Evaluator {
  const Theory& th;
  std::map<std::string, std::vector<Definition>> defs;

  explicit Evaluator(const Theory& t) : th(t) {
    for (const auto& m : th.measures) {
      std::vector<Definition> plain, conditional;
      for (const auto& ax : th.axioms) {
        LExpr body = ax.body, cond = lx::tru();
        if (body->op == LOp::Implies) {
          cond = body->kids[0];
          body = body->kids[1];
        }
        if (body->op != LOp::Eq) continue;
        auto d = as_definition(m.name, body->kids[0], body->kids[1], cond, th);
        if (!d) d = as_definition(m.name, body->kids[1], body->kids[0], cond, th);
        if (d) (is_true(cond) ? plain : conditional).push_back(*d);
      }
      plain.insert(plain.end(), conditional.begin(), conditional.end());
      defs[m.name] = std::move(plain);
    }
  }

  std::optional<LVal> measure(const std::string& m, const std::vector<LVal>& args) {
    auto it = defs.find(m);
    if (it == defs.end()) return std::nullopt;
    for (const auto& d : it->second) {
      if (d.pos >= args.size()) continue;
      const LVal& a = args[d.pos];
      if (a.kind != LVal::Kind::Data || a.ctor != d.ctor || a.fields.size() != d.ctor_vars.size()) continue;
      LModel local;
      bool ok = true;
      for (size_t i = 0; i < d.ctor_vars.size() && ok; ++i) ok = local.emplace(d.ctor_vars[i], a.fields[i]).second || local[d.ctor_vars[i]] == a.fields[i];
      for (size_t i = 0; i < args.size() && ok; ++i) {
        if (i == d.pos) continue;
        auto [pos, fresh] = local.emplace(d.arg_vars[i], args[i]);
        ok = fresh || pos->second == args[i];
      }
      if (!ok) continue;
      if (!is_true(d.condition)) {
        auto c = as_bool(eval(d.condition, local));
        if (!c || !*c) continue;
      }
      if (auto r = eval(d.rhs, local)) return r;
    }
    return std::nullopt;
  }

  std::optional<LVal> eval(const LExpr& e, const LModel& m) {
    auto ints = [&](auto f) -> std::optional<LVal> {
      auto a = as_int(eval(e->kids[0], m));
      if (!a) return std::nullopt;
      auto b = as_int(eval(e->kids[1], m));
      if (!b) return std::nullopt;
      return f(*a, *b);
    };
    switch (e->op) {
      case LOp::Var: {
        auto it = m.find(e->name);
        if (it == m.end()) return std::nullopt;
        return it->second;
      }
      case LOp::Int: return LVal::integer(e->value);
      case LOp::Bool: return LVal::boolean(e->value != 0);
      case LOp::App: {
        std::vector<LVal> args;
        for (const auto& k : e->kids) {
          auto v = eval(k, m);
          if (!v) return std::nullopt;
          args.push_back(std::move(*v));
        }
        if (th.find_ctor(e->name).second) return LVal::data(e->name, std::move(args));
        return measure(e->name, args);
      }
      case LOp::Add:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          int64_t r;
          if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
          return LVal::integer(r);
        });
      case LOp::Sub:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          int64_t r;
          if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
          return LVal::integer(r);
        });
      case LOp::Mul:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          int64_t r;
          if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
          return LVal::integer(r);
        });
      case LOp::Div:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          auto q = euclid_div(a, b);
          if (!q) return std::nullopt;
          return LVal::integer(*q);
        });
      case LOp::CeilDiv:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          if (a == INT64_MIN) return std::nullopt;
          auto q = euclid_div(-a, b);
          if (!q) return std::nullopt;
          return LVal::integer(-*q);
        });
      case LOp::Mod:
        return ints([](int64_t a, int64_t b) -> std::optional<LVal> {
          auto q = euclid_div(a, b);
          if (!q) return std::nullopt;
          return LVal::integer(a - b * *q);
        });
      case LOp::Neg: {
        auto a = as_int(eval(e->kids[0], m));
        if (!a || *a == INT64_MIN) return std::nullopt;
        return LVal::integer(-*a);
      }
      case LOp::Eq: {
        auto a = eval(e->kids[0], m);
        if (!a) return std::nullopt;
        auto b = eval(e->kids[1], m);
        if (!b) return std::nullopt;
        return LVal::boolean(*a == *b);
      }
      case LOp::Le: return ints([](int64_t a, int64_t b) -> std::optional<LVal> { return LVal::boolean(a <= b); });
      case LOp::Lt: return ints([](int64_t a, int64_t b) -> std::optional<LVal> { return LVal::boolean(a < b); });
      case LOp::And:
      case LOp::Or: {
        bool is_and = e->op == LOp::And;
        bool undefined = false;
        for (const auto& k : e->kids) {
          auto v = as_bool(eval(k, m));
          if (!v) undefined = true;
          else if (*v != is_and) return LVal::boolean(!is_and);
        }
        if (undefined) return std::nullopt;
        return LVal::boolean(is_and);
      }
      case LOp::Implies: {
        auto a = as_bool(eval(e->kids[0], m));
        auto b = as_bool(eval(e->kids[1], m));
        if ((a && !*a) || (b && *b)) return LVal::boolean(true);
        if (a && b) return LVal::boolean(false);
        return std::nullopt;
      }
      case LOp::Not: {
        auto a = as_bool(eval(e->kids[0], m));
        if (!a) return std::nullopt;
        return LVal::boolean(!*a);
      }
      case LOp::Ite: {
        auto c = as_bool(eval(e->kids[0], m));
        if (c) return eval(e->kids[*c ? 1 : 2], m);
        auto a = eval(e->kids[1], m);
        auto b = eval(e->kids[2], m);
        if (a && b && *a == *b) return a;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<LVal> eval_logic(const Theory& th, const LExpr& e, const LModel& m) {
  Evaluator ev(th);
  return ev.eval(e, m);
}

struct LogicEvaluator::Impl {
  Evaluator ev;
};

LogicEvaluator::LogicEvaluator(const Theory& th) : impl_(std::make_unique<Impl>(Impl{Evaluator(th)})) {}
LogicEvaluator::~LogicEvaluator() = default;

std::optional<LVal> LogicEvaluator::eval(const LExpr& e, const LModel& m) const { return impl_->ev.eval(e, m); }

std::optional<Sort> sort_of(const Theory& th, const LExpr& e, const std::map<std::string, Sort>& vars) {
  switch (e->op) {
    case LOp::Var: {
      auto it = vars.find(e->name);
      if (it == vars.end()) return std::nullopt;
      return it->second;
    }
    case LOp::Int: case LOp::Add: case LOp::Sub: case LOp::Mul: case LOp::Div: case LOp::CeilDiv: case LOp::Mod:
    case LOp::Neg:
      return Sort::integer();
    case LOp::Bool: case LOp::Eq: case LOp::Le: case LOp::Lt: case LOp::And: case LOp::Or: case LOp::Not:
    case LOp::Implies:
      return Sort::boolean();
    case LOp::App: return th.app_sort(e->name);
    case LOp::Ite: {
      auto s = sort_of(th, e->kids[1], vars);
      return s ? s : sort_of(th, e->kids[2], vars);
    }
  }
  return std::nullopt;
}

std::vector<LVal> enumerate_data(const Theory& th, const std::string& d, int depth, const std::vector<int64_t>& ints,
                                 size_t limit) {
  std::vector<LVal> out;
  const DataDecl* decl = th.find_data(d);
  if (!decl || depth < 0) return out;
  for (const auto& c : decl->ctors) {
    std::vector<std::vector<LVal>> choices;
    bool possible = true;
    for (const auto& f : c.fields) {
      std::vector<LVal> opts;
      if (f.sort.is_int()) {
        for (int64_t i : ints) opts.push_back(LVal::integer(i));
      } else if (f.sort.is_bool()) {
        opts = {LVal::boolean(false), LVal::boolean(true)};
      } else {
        opts = enumerate_data(th, f.sort.data, depth - 1, ints, limit);
      }
      if (opts.empty()) possible = false;
      choices.push_back(std::move(opts));
    }
    if (!possible) continue;
    std::vector<LVal> cur;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (out.size() >= limit) return;
      if (i == choices.size()) {
        out.push_back(LVal::data(c.name, cur));
        return;
      }
      for (const auto& v : choices[i]) {
        cur.push_back(v);
        rec(i + 1);
        cur.pop_back();
        if (out.size() >= limit) return;
      }
    };
    rec(0);
  }
  return out;
}

}  // namespace recsynth
