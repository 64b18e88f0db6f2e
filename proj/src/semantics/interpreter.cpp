#include <pthread.h>

#include <exception>
#include <functional>
#include <sstream>

#include "recsynth/semantics.hpp"

namespace recsynth {

bool Value::operator==(const Value& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Closure) return term_equal(closure, o.closure);
  return i == o.i && ctor == o.ctor && fields == o.fields;
}

std::string print_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Bool: return v.i ? "true" : "false";
    case Value::Kind::Closure: return "<" + v.closure->name + ">";
    case Value::Kind::Data: {
      std::string s = v.ctor;
      for (const auto& f : v.fields) {
        std::string fs = print_value(f);
        bool wrap = (f.kind == Value::Kind::Data && !f.fields.empty()) || (f.kind == Value::Kind::Int && f.i < 0);
        s += " " + (wrap ? "(" + fs + ")" : fs);
      }
      return s;
    }
  }
  return "?";
}

Term value_to_term(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return tm::num(v.i);
    case Value::Kind::Bool: return tm::boolean(v.i != 0);
    case Value::Kind::Closure: return v.closure;
    case Value::Kind::Data: {
      std::vector<Term> kids;
      for (const auto& f : v.fields) kids.push_back(value_to_term(f));
      return tm::app(v.ctor, std::move(kids));
    }
  }
  return nullptr;
}

bool is_value(const Term& t) {
  switch (t->kind) {
    case TKind::Int: case TKind::Bool: case TKind::Fix: return true;
    case TKind::App:
      if (!is_ctor_name(t->name)) return false;
      for (const auto& k : t->kids)
        if (!is_value(k)) return false;
      return true;
    default: return false;
  }
}

Value term_to_value(const Term& t) {
  switch (t->kind) {
    case TKind::Int: return Value::integer(t->value);
    case TKind::Bool: return Value::boolean(t->value != 0);
    case TKind::Fix: return Value::fun(t);
    case TKind::App:
      if (is_ctor_name(t->name)) {
        std::vector<Value> fs;
        for (const auto& k : t->kids) fs.push_back(term_to_value(k));
        return Value::data(t->name, std::move(fs));
      }
      break;
    default: break;
  }
  throw std::invalid_argument("not a value: " + t->name);
}

LVal to_lval(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return LVal::integer(v.i);
    case Value::Kind::Bool: return LVal::boolean(v.i != 0);
    case Value::Kind::Data: {
      std::vector<LVal> fs;
      for (const auto& f : v.fields) fs.push_back(to_lval(f));
      return LVal::data(v.ctor, std::move(fs));
    }
    case Value::Kind::Closure: break;
  }
  throw std::invalid_argument("closures have no logical value");
}

Defs make_defs(const SynthesisProblem& p) {
  Defs d;
  for (const auto& a : p.auxiliaries) {
    if (!a.impl) continue;
    std::vector<std::string> params;
    for (const auto& [n, s] : a.type.type.params) params.push_back(n);
    d[a.name] = tm::fix(a.name, params, tm::tick(1, *a.impl));
  }
  return d;
}

void add_program(Defs& defs, const Term& fix) {
  if (fix->kind != TKind::Fix) throw std::invalid_argument("program must be a fix term");
  defs[fix->name] = fix;
}

namespace {

[[noreturn]] void stuck(const std::string& msg) { throw EvalError(EvalError::Kind::Stuck, msg); }
[[noreturn]] void out_of_fuel() { throw EvalError(EvalError::Kind::FuelExhausted, "fuel exhausted"); }

// Euclidean division, matching the logic.
int64_t ediv(int64_t a, int64_t b) {
  if (b == 0) stuck("division by zero");
  if (a == INT64_MIN && b == -1) stuck("integer overflow");
  int64_t ab = b < 0 ? -b : b;
  int64_t q = a / ab;
  if (a % ab != 0 && a < 0) --q;
  return b < 0 ? -q : q;
}

template <class Op>
int64_t checked(Op op, int64_t x, int64_t y) {
  int64_t r;
  if (op(x, y, &r)) stuck("integer overflow");
  return r;
}

bool is_primitive(const std::string& n) { return is_operator_name(n) || n == "not"; }

Value primitive(const std::string& op, const std::vector<Value>& a) {
  auto need = [&](size_t n, Value::Kind k) {
    if (a.size() != n) stuck("primitive '" + op + "' applied to " + std::to_string(a.size()) + " arguments");
    for (const auto& v : a)
      if (v.kind != k) stuck("primitive '" + op + "' applied to " + print_value(v));
  };
  if (op == "==") {
    if (a.size() != 2) stuck("'==' needs two arguments");
    return Value::boolean(a[0] == a[1]);
  }
  if (op == "not") {
    need(1, Value::Kind::Bool);
    return Value::boolean(a[0].i == 0);
  }
  if (op == "&&" || op == "||") {
    need(2, Value::Kind::Bool);
    return Value::boolean(op == "&&" ? (a[0].i && a[1].i) : (a[0].i || a[1].i));
  }
  need(2, Value::Kind::Int);
  int64_t x = a[0].i, y = a[1].i;
  if (op == "<=") return Value::boolean(x <= y);
  if (op == "<") return Value::boolean(x < y);
  if (op == "+") return Value::integer(checked([](int64_t p, int64_t q, int64_t* r) { return __builtin_add_overflow(p, q, r); }, x, y));
  if (op == "-") return Value::integer(checked([](int64_t p, int64_t q, int64_t* r) { return __builtin_sub_overflow(p, q, r); }, x, y));
  if (op == "*") return Value::integer(checked([](int64_t p, int64_t q, int64_t* r) { return __builtin_mul_overflow(p, q, r); }, x, y));
  if (op == "/") return Value::integer(ediv(x, y));
  if (op == "%") return Value::integer(x - y * ediv(x, y));
  stuck("unknown primitive '" + op + "'");
}

// Runs `f` on a thread with a large stack; evaluation recursion follows the
// recursion depth of the program under test.
template <class R>
R with_big_stack(const std::function<R()>& f) {
  struct Ctx {
    const std::function<R()>* f;
    std::optional<R> result;
    std::exception_ptr error;
  } ctx{&f, std::nullopt, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, size_t{1} << 30);
  pthread_t th;
  auto body = [](void* p) -> void* {
    auto* c = static_cast<Ctx*>(p);
    try {
      c->result.emplace((*c->f)());
    } catch (...) {
      c->error = std::current_exception();
    }
    return nullptr;
  };
  if (pthread_create(&th, &attr, body, &ctx) != 0) {
    pthread_attr_destroy(&attr);
    return f();
  }
  pthread_join(th, nullptr);
  pthread_attr_destroy(&attr);
  if (ctx.error) std::rethrow_exception(ctx.error);
  return std::move(*ctx.result);
}

struct Stepper {
  const Defs& defs;
  int64_t& fuel;

  void burn() {
    if (fuel <= 0) out_of_fuel();
    --fuel;
  }

  // Reduces a non-value to a value; returns the cost incurred.
  std::pair<Term, int64_t> run(Term t) {
    int64_t c = 0;
    while (!is_value(t)) {
      burn();
      auto [t2, d] = reduce(t);
      t = std::move(t2);
      c += d;
    }
    return {t, c};
  }

  std::pair<Term, int64_t> reduce(const Term& t) {
    switch (t->kind) {
      case TKind::Var: stuck("unbound variable '" + t->name + "'");
      case TKind::Int: case TKind::Bool: case TKind::Fix: stuck("a value cannot step");
      case TKind::Tick: return {t->kids[0], t->value};
      case TKind::If: {
        const Term& c = t->kids[0];
        if (!is_value(c)) {
          auto [b, d] = run(c);
          return {tm::ite(b, t->kids[1], t->kids[2]), d};
        }
        if (c->kind != TKind::Bool) stuck("if on non-boolean " + pretty_term(c));
        return {t->kids[c->value ? 1 : 2], 0};
      }
      case TKind::Match: {
        const Term& s = t->kids[0];
        if (!is_value(s)) {
          auto [v, d] = run(s);
          return {tm::match(v, t->cases), d};
        }
        if (s->kind != TKind::App) stuck("match on non-constructor " + pretty_term(s));
        for (const auto& mc : t->cases) {
          if (mc.ctor != s->name) continue;
          if (mc.vars.size() != s->kids.size()) stuck("pattern arity mismatch for '" + mc.ctor + "'");
          Term body = mc.body;
          for (size_t i = 0; i < mc.vars.size(); ++i) body = substitute(body, mc.vars[i], s->kids[i]);
          return {body, 0};
        }
        stuck("no case for constructor '" + s->name + "'");
      }
      case TKind::App: {
        for (size_t i = 0; i < t->kids.size(); ++i) {
          if (is_value(t->kids[i])) continue;
          auto [k, d] = reduce(t->kids[i]);
          std::vector<Term> kids = t->kids;
          kids[i] = k;
          return {tm::app(t->name, std::move(kids)), d};
        }
        if (is_ctor_name(t->name)) stuck("a value cannot step");
        if (is_primitive(t->name)) {
          std::vector<Value> args;
          for (const auto& k : t->kids) args.push_back(term_to_value(k));
          return {value_to_term(primitive(t->name, args)), 0};
        }
        auto it = defs.find(t->name);
        if (it == defs.end()) stuck("unknown function '" + t->name + "'");
        const Term& fix = it->second;
        if (fix->params.size() != t->kids.size()) stuck("arity mismatch calling '" + t->name + "'");
        Term body = fix->kids[0];
        for (size_t i = 0; i < fix->params.size(); ++i) body = substitute(body, fix->params[i], t->kids[i]);
        return {body, 0};
      }
    }
    stuck("unreachable");
  }

  static std::string pretty_term(const Term& t) { return t->kind == TKind::App ? t->name : "value"; }
};

struct FastEval {
  const Defs& defs;
  int64_t fuel;
  int64_t cost = 0;
  int64_t steps = 0;

  using Env = std::vector<std::pair<std::string, Value>>;

  void burn() {
    if (++steps > fuel) out_of_fuel();
  }

  const Value* lookup(const Env& env, const std::string& n) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == n) return &it->second;
    return nullptr;
  }

  // Nesting of ev beyond this would overflow the evaluation stack.
  static constexpr int kMaxNesting = 2'000'000;
  int nesting = 0;

  Value ev(const Term& t, Env& env) {
    if (++nesting > kMaxNesting) throw EvalError(EvalError::Kind::FuelExhausted, "recursion depth exhausted");
    struct Leave {
      int& n;
      ~Leave() { --n; }
    } leave{nesting};
    switch (t->kind) {
      case TKind::Var: {
        if (const Value* v = lookup(env, t->name)) return *v;
        if (auto it = defs.find(t->name); it != defs.end()) return Value::fun(it->second);
        stuck("unbound variable '" + t->name + "'");
      }
      case TKind::Int: return Value::integer(t->value);
      case TKind::Bool: return Value::boolean(t->value != 0);
      case TKind::Fix: return Value::fun(t);
      case TKind::Tick:
        burn();
        cost += t->value;
        return ev(t->kids[0], env);
      case TKind::If: {
        burn();
        Value c = ev(t->kids[0], env);
        if (c.kind != Value::Kind::Bool) stuck("if on non-boolean " + print_value(c));
        return ev(t->kids[c.i ? 1 : 2], env);
      }
      case TKind::Match: {
        burn();
        Value s = ev(t->kids[0], env);
        if (s.kind != Value::Kind::Data) stuck("match on non-constructor " + print_value(s));
        for (const auto& mc : t->cases) {
          if (mc.ctor != s.ctor) continue;
          if (mc.vars.size() != s.fields.size()) stuck("pattern arity mismatch for '" + mc.ctor + "'");
          size_t mark = env.size();
          for (size_t i = 0; i < mc.vars.size(); ++i) env.emplace_back(mc.vars[i], std::move(s.fields[i]));
          Value r = ev(mc.body, env);
          env.resize(mark);
          return r;
        }
        stuck("no case for constructor '" + s.ctor + "'");
      }
      case TKind::App: {
        std::vector<Value> args;
        args.reserve(t->kids.size());
        for (const auto& k : t->kids) args.push_back(ev(k, env));
        if (is_ctor_name(t->name)) return Value::data(t->name, std::move(args));
        burn();
        if (is_primitive(t->name)) return primitive(t->name, args);
        auto it = defs.find(t->name);
        if (it == defs.end()) stuck("unknown function '" + t->name + "'");
        const Term& fix = it->second;
        if (fix->params.size() != args.size()) stuck("arity mismatch calling '" + t->name + "'");
        Env callee;
        callee.reserve(args.size());
        for (size_t i = 0; i < args.size(); ++i) callee.emplace_back(fix->params[i], std::move(args[i]));
        return ev(fix->kids[0], callee);
      }
    }
    stuck("unreachable");
  }
};

}  // namespace

Configuration step(const Configuration& cfg, const Defs& defs, int64_t& fuel) {
  Stepper s{defs, fuel};
  s.burn();
  auto [t, d] = s.reduce(cfg.term);
  return {t, cfg.cost + d};
}

Configuration step(const Configuration& cfg, const Defs& defs) {
  int64_t fuel = kDefaultFuel;
  return step(cfg, defs, fuel);
}

EvalResult eval(const Term& t, const Defs& defs, int64_t fuel) {
  return with_big_stack<EvalResult>([&] {
    int64_t left = fuel;
    Stepper s{defs, left};
    auto [v, c] = s.run(t);
    return EvalResult{term_to_value(v), c, fuel - left};
  });
}

EvalResult eval_fast(const Term& t, const Defs& defs, int64_t fuel) {
  return with_big_stack<EvalResult>([&] {
    FastEval f{defs, fuel};
    FastEval::Env env;
    Value v = f.ev(t, env);
    return EvalResult{std::move(v), f.cost, f.steps};
  });
}

EvalResult call(const std::string& f, const std::vector<Value>& args, const Defs& defs, int64_t fuel, bool fast) {
  std::vector<Term> as;
  for (const auto& a : args) as.push_back(value_to_term(a));
  Term t = tm::app(f, std::move(as));
  return fast ? eval_fast(t, defs, fuel) : eval(t, defs, fuel);
}

}  // namespace recsynth
