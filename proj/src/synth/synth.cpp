#include <algorithm>
#include <bit>
#include <chrono>
#include <climits>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "recsynth/logic_eval.hpp"
#include "recsynth/semantics.hpp"
#include "recsynth/synth.hpp"

namespace recsynth {

std::string outcome_name(SynthOutcome o) {
  switch (o) {
    case SynthOutcome::Synthesized: return "synthesized";
    case SynthOutcome::NoSolution: return "no-solution";
    case SynthOutcome::Timeout: return "timeout";
  }
  return "?";
}

namespace {

constexpr int kUndef = -1;
constexpr int64_t kWitnessRange = 64;
constexpr int64_t kUnknownSize = INT64_MIN;
constexpr int64_t kEvalFuel = 200000;
constexpr size_t kPoolCap = 250000;
const char* const kSymbolic = "#sym";

struct TimeoutHit {};

// Accept: a complete program was accepted. Reject: try the next alternative.
// Abort: no alternative at this level can succeed.
enum class KR { Accept, Reject, Abort };
using Cont = std::function<KR(const Term&)>;

Value to_value(const LVal& v) {
  switch (v.kind) {
    case LVal::Kind::Int: return Value::integer(v.i);
    case LVal::Kind::Bool: return Value::boolean(v.i != 0);
    case LVal::Kind::Data: {
      std::vector<Value> f;
      for (const auto& x : v.fields) f.push_back(to_value(x));
      return Value::data(v.ctor, std::move(f));
    }
  }
  return Value::integer(0);
}

struct Sym {
  enum class Kind { Builtin, Ctor, Fun };
  Kind kind = Kind::Fun;
  std::string name;
  std::vector<BaseType> params;
  BaseType result;
  bool recursive = false;
};

// An enumerated E-term with its behaviour on the pool's samples.
struct Cand {
  Term term;
  BaseType base;
  int size = 1;
  int depth = 0;
  int rec = 0;
  std::vector<int> vals;                    // interned value per sample
  std::vector<std::vector<int64_t>> sites;  // size of each recursive call per sample
  uint64_t strict = ~0ull;                  // samples where every recursive call decreases the size
  uint64_t fits = ~0ull;                    // samples where every call fits some cost entry
  uint64_t truthy = 0, falsy = 0;
  bool cost_counted = false;
};

// E-terms over one set of bindings, grown by size on demand. Path conditions
// do not change values, so all frames over the same bindings share a pool.
struct Pool {
  Environment env;
  std::vector<LModel> samples;
  std::vector<int> parent_index;  // for case pools: sample index in the parent pool
  std::optional<Annotation> budget;
  int max_depth = 0;
  std::vector<int64_t> top;
  std::vector<std::vector<int64_t>> entry_bounds;  // [entry][sample], kUnknownSize if dependent
  std::vector<Sym> syms;
  std::vector<Cand> cands;
  std::map<std::pair<int, Sort>, std::vector<int>> by_size;
  std::map<Sort, std::map<std::vector<int64_t>, int>> seen;  // key -> smallest depth kept
  std::map<std::string, std::vector<uint64_t>> goal_masks;
  int built = 0;

  uint64_t all() const { return samples.size() >= 64 ? ~0ull : (1ull << samples.size()) - 1; }
};

// A search position: a pool, the typing context and the samples reaching it.
struct Frame {
  Pool* pool;
  Environment env;
  uint64_t mask;
};

std::vector<std::pair<std::string, BaseType>> scalars(const Environment& env) {
  std::map<std::string, size_t> latest;
  for (size_t i = 0; i < env.bindings.size(); ++i) latest[env.bindings[i].name] = i;
  std::vector<std::pair<std::string, BaseType>> out;
  for (size_t i = 0; i < env.bindings.size(); ++i) {
    const Binding& b = env.bindings[i];
    if (latest[b.name] == i && !b.type.type.is_arrow()) out.push_back({b.name, b.type.type.result.base});
  }
  return out;
}

}  // namespace

struct Synthesizer::Impl {
  ProblemRef problem;
  Checker& checker;
  SearchConfig cfg;
  TypeChecker tc;
  LogicEvaluator ev;
  Defs defs;
  SearchStats stats;
  CheckerStats base;
  std::chrono::steady_clock::time_point start, deadline;
  long ticks = 0;

  std::vector<LVal> table;
  std::vector<bool> symbolic;
  std::map<LVal, int> ids;
  int undef_id = 0;  // a callee precondition fails on this sample
  std::map<std::pair<std::string, std::vector<int>>, int> memo;
  std::map<std::string, std::vector<LVal>> domains;
  std::vector<std::unique_ptr<Pool>> pools;
  std::map<std::tuple<Pool*, std::string, std::string, std::vector<std::string>>, Pool*> case_pools;
  std::map<std::string, std::vector<LModel>> frame_samples;  // by hypothesis text

  Impl(ProblemRef p, Checker& c, SearchConfig conf)
      : problem(p),
        checker(c),
        cfg(conf),
        tc(p, c, TypeCheckerOptions{conf.range, conf.pruning}),
        ev(tc.theory()),
        defs(make_defs(*p)),
        base(c.stats()) {
    cfg.samples = std::clamp(cfg.samples, 1, 64);
    undef_id = intern(LVal::data("#undef", {}));
  }

  // ---- bookkeeping

  void arm() {
    start = std::chrono::steady_clock::now();
    deadline = start + std::chrono::milliseconds(cfg.timeout_ms);
  }

  void tick() {
    if ((++ticks & 63) == 0 && std::chrono::steady_clock::now() > deadline) throw TimeoutHit{};
  }

  void sync() {
    const CheckerStats& s = checker.stats();
    stats.validity_queries = s.queries - base.queries;
    stats.solver_calls = s.solver_calls - base.solver_calls;
    stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  void count_cost_rejection(Cand& c) {
    if (c.cost_counted) return;
    c.cost_counted = true;
    ++stats.eterms_rejected_by_cost;
  }

  // ---- values

  int intern(const LVal& v) {
    auto [it, fresh] = ids.emplace(v, static_cast<int>(table.size()));
    if (fresh) {
      table.push_back(v);
      symbolic.push_back(false);
    }
    return it->second;
  }

  // A value known only by the call that produced it.
  int fresh_symbolic() {
    int id = static_cast<int>(table.size());
    table.push_back(LVal::data(kSymbolic, {LVal::integer(id)}));
    symbolic.push_back(true);
    return id;
  }

  int apply(const Sym& s, const Environment& env, const std::vector<int>& args) {
    auto key = std::make_pair(s.name, args);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int r = compute(s, env, args);
    if (r == kUndef) r = undef_id;
    memo.emplace(std::move(key), r);
    return r;
  }

  int compute(const Sym& s, const Environment& env, const std::vector<int>& args) {
    for (int a : args)
      if (a == undef_id) return undef_id;
    for (int a : args)
      if (symbolic[a]) return fresh_symbolic();
    if (s.kind == Sym::Kind::Builtin) {
      bool r = s.name == "==" ? args[0] == args[1] : table[args[0]].i <= table[args[1]].i;
      return intern(LVal::boolean(r));
    }
    if (s.kind == Sym::Kind::Ctor) {
      std::vector<LVal> f;
      for (int a : args) f.push_back(table[a]);
      return intern(LVal::data(s.name, std::move(f)));
    }
    const RType& ft = env.lookup(s.name)->type.type;
    LModel m;
    for (size_t i = 0; i < args.size(); ++i) m[ft.params[i].first] = table[args[i]];
    for (const auto& [n, p] : ft.params) {
      if (is_true(p.refinement)) continue;
      auto r = ev.eval(subst_logic(p.refinement, kNu, lx::var(n)), m);
      if (r && r->i == 0) return kUndef;
    }
    // The refinement of the recursive function is its inductive hypothesis.
    if (auto f = split_functional(ft.result.refinement)) {
      auto r = ev.eval(f->first, m);
      return r ? intern(*r) : fresh_symbolic();
    }
    if (!s.recursive && defs.count(s.name)) {
      std::vector<Value> vs;
      for (int a : args) vs.push_back(to_value(table[a]));
      try {
        return intern(to_lval(call(s.name, vs, defs, kEvalFuel).value));
      } catch (const EvalError& e) {
        if (e.kind() == EvalError::Kind::Stuck) return kUndef;
      }
    }
    if (auto w = witness(ft.result, m)) return intern(*w);
    return fresh_symbolic();
  }

  // The only value in a search range that satisfies `r` under `m`, if there is
  // exactly one. Stands in for calls whose result is pinned down but not given
  // as an expression.
  std::optional<LVal> witness(const ScalarType& r, LModel m) {
    std::vector<LVal> range;
    if (r.base.sort.is_int())
      for (int64_t v = -kWitnessRange; v <= kWitnessRange; ++v) range.push_back(LVal::integer(v));
    const std::vector<LVal>& cands = r.base.sort.is_int() ? range : domain(r.base.sort);
    std::optional<LVal> found;
    for (const auto& c : cands) {
      m[kNu] = c;
      auto e = ev.eval(r.refinement, m);
      if (!e) return std::nullopt;
      if (e->i == 0) continue;
      if (found) return std::nullopt;
      found = c;
    }
    return found;
  }

  // ---- samples

  const std::vector<LVal>& domain(const Sort& s) {
    std::string key = s.name();
    auto it = domains.find(key);
    if (it != domains.end()) return it->second;
    std::vector<LVal> d;
    if (s.is_bool()) {
      d = {LVal::boolean(false), LVal::boolean(true)};
    } else if (s.is_int()) {
      for (int64_t v : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 16, -1, -2, -3}) d.push_back(LVal::integer(v));
    } else {
      d = enumerate_data(tc.theory(), s.data, 4, {0, 1, 2, 3}, 300);
    }
    return domains.emplace(key, std::move(d)).first->second;
  }

  // Environments for the scalar variables of `env` satisfying its evaluable
  // hypotheses, drawn with a fixed seed.
  std::vector<LModel> draw_samples(const Environment& env) {
    auto vars = scalars(env);
    std::vector<const std::vector<LVal>*> doms;
    for (const auto& [n, b] : vars) doms.push_back(&domain(b.sort));
    std::vector<LExpr> hyps;
    conjuncts(tc.hypothesis(env), hyps);
    std::mt19937 rng(0x5eed);
    std::set<std::vector<size_t>> tried;
    std::vector<LModel> out;
    for (int attempt = 0; attempt < 4000 && static_cast<int>(out.size()) < cfg.samples; ++attempt) {
      std::vector<size_t> pick(vars.size(), 0);
      bool empty = false;
      for (size_t i = 0; i < vars.size(); ++i) {
        if (doms[i]->empty()) empty = true;
        else if (attempt > 0) pick[i] = std::uniform_int_distribution<size_t>(0, doms[i]->size() - 1)(rng);
      }
      if (empty) break;
      if (!tried.insert(pick).second) continue;
      LModel m;
      for (size_t i = 0; i < vars.size(); ++i) m[vars[i].first] = (*doms[i])[pick[i]];
      bool ok = true;
      for (const auto& h : hyps) {
        auto r = ev.eval(h, m);
        if (r && r->i == 0) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(std::move(m));
    }
    return out;
  }

  // ---- pools

  std::vector<Sym> symbols(const Environment& env) {
    std::map<std::string, size_t> latest;
    for (size_t i = 0; i < env.bindings.size(); ++i) latest[env.bindings[i].name] = i;
    std::vector<Sym> out;
    for (size_t i = 0; i < env.bindings.size(); ++i) {
      const Binding& b = env.bindings[i];
      if (latest[b.name] != i || !b.type.type.is_arrow()) continue;
      Sym s;
      s.name = b.name;
      for (const auto& p : b.type.type.params) s.params.push_back(p.second.base);
      s.result = b.type.type.result.base;
      s.recursive = env.rec_fun && *env.rec_fun == b.name;
      out.push_back(std::move(s));
    }
    for (const auto& d : problem->data)
      for (const auto& c : d.ctors)
        if (!c.fields.empty()) out.push_back({Sym::Kind::Ctor, c.name, c.fields, BaseType::data(d.name), false});
    const BaseType I = BaseType::integer(), B = BaseType::boolean();
    out.push_back({Sym::Kind::Builtin, "==", {I, I}, B, false});
    out.push_back({Sym::Kind::Builtin, "<=", {I, I}, B, false});
    return out;
  }

  Pool* make_pool(const Environment& env, std::vector<LModel> samples, std::optional<Annotation> budget, int depth) {
    auto p = std::make_unique<Pool>();
    p->env = env;
    p->samples = std::move(samples);
    p->budget = std::move(budget);
    p->max_depth = depth;
    p->syms = symbols(env);
    if (env.rec_fun && env.sizes.count(*env.rec_fun)) {
      LExpr top = env.top_size();
      for (const auto& s : p->samples) {
        auto r = ev.eval(top, s);
        p->top.push_back(r && r->kind == LVal::Kind::Int ? r->i : kUnknownSize);
      }
      if (p->budget) {
        for (const auto& c : p->budget->costs) {
          std::vector<int64_t> b;
          bool dependent = mentions(c.size, kCorr);
          for (int64_t t : p->top) {
            std::optional<LVal> r;
            if (!dependent && t != kUnknownSize) r = ev.eval(c.size, {{kMu, LVal::integer(t)}});
            b.push_back(r && r->kind == LVal::Kind::Int ? r->i : kUnknownSize);
          }
          p->entry_bounds.push_back(std::move(b));
        }
      }
    }
    pools.push_back(std::move(p));
    return pools.back().get();
  }

  static std::vector<int64_t> dedup_key(const Cand& c) {
    std::vector<int64_t> key(c.vals.begin(), c.vals.end());
    auto sites = c.sites;
    std::sort(sites.begin(), sites.end());
    key.push_back(c.rec);
    for (const auto& s : sites) {
      key.push_back(INT64_MAX);
      key.insert(key.end(), s.begin(), s.end());
    }
    return key;
  }

  void add(Pool& P, Cand c) {
    // An equivalent term is still kept when it is shallower, since only
    // shallow terms can be extended within the depth bound.
    auto [it, fresh] = P.seen[c.base.sort].emplace(dedup_key(c), c.depth);
    if (!fresh) {
      if (it->second <= c.depth) return;
      it->second = c.depth;
    }
    ++stats.eterms_enumerated;
    if (c.rec > 0 && !P.samples.empty()) {
      bool drop = c.strict == 0;
      if (cfg.pruning && P.budget && (c.rec > P.budget->total_count() || c.fits == 0)) drop = true;
      if (drop) {
        ++stats.eterms_rejected_by_cost;
        return;
      }
    }
    for (size_t j = 0; j < c.vals.size(); ++j) {
      if (symbolic[c.vals[j]] || table[c.vals[j]].kind != LVal::Kind::Bool) continue;
      (table[c.vals[j]].i ? c.truthy : c.falsy) |= 1ull << j;
    }
    P.by_size[{c.size, c.base.sort}].push_back(static_cast<int>(P.cands.size()));
    P.cands.push_back(std::move(c));
  }

  void add_atom(Pool& P, Term t, BaseType b, const std::function<int(const LModel&)>& val) {
    Cand c;
    c.term = std::move(t);
    c.base = std::move(b);
    for (const auto& s : P.samples) c.vals.push_back(val(s));
    add(P, std::move(c));
  }

  void build(Pool& P, const Sym& s, const std::vector<int>& args) {
    tick();
    if (P.cands.size() >= kPoolCap) return;
    Cand c;
    c.base = s.result;
    c.rec = s.recursive;
    for (int i : args) {
      const Cand& a = P.cands[i];
      c.depth = std::max(c.depth, a.depth);
      c.rec += a.rec;
      c.size += a.size;
      c.strict &= a.strict;
      c.fits &= a.fits;
    }
    if (++c.depth > P.max_depth) return;
    const size_t ns = P.samples.size();
    c.vals.resize(ns);
    std::vector<int> av(args.size());
    size_t undefined = 0;
    for (size_t j = 0; j < ns; ++j) {
      for (size_t k = 0; k < args.size(); ++k) av[k] = P.cands[args[k]].vals[j];
      c.vals[j] = apply(s, P.env, av);
      if (c.vals[j] == undef_id) ++undefined;
    }
    if (ns > 0 && undefined == ns) return;
    for (int i : args)
      for (const auto& st : P.cands[i].sites) c.sites.push_back(st);
    if (s.recursive) record_site(P, c, args);
    std::vector<Term> kids;
    for (int i : args) kids.push_back(P.cands[i].term);
    c.term = tm::app(s.name, std::move(kids));
    add(P, std::move(c));
  }

  void record_site(const Pool& P, Cand& c, const std::vector<int>& args) {
    const size_t ns = P.samples.size();
    std::vector<int64_t> sz(ns, kUnknownSize);
    auto sf = P.env.sizes.find(*P.env.rec_fun);
    uint64_t strict = 0, fits = 0;
    for (size_t j = 0; j < ns; ++j) {
      const uint64_t bit = 1ull << j;
      bool known = sf != P.env.sizes.end();
      LModel m;
      for (size_t k = 0; k < args.size() && known; ++k) {
        int v = P.cands[args[k]].vals[j];
        if (symbolic[v]) known = false;
        else m[sf->second.params[k]] = table[v];
      }
      if (known) {
        auto r = ev.eval(sf->second.body, m);
        if (r && r->kind == LVal::Kind::Int) sz[j] = r->i;
      }
      if (sz[j] == kUnknownSize || P.top[j] == kUnknownSize) {
        strict |= bit;
        fits |= bit;
        continue;
      }
      if (sz[j] < P.top[j]) strict |= bit;
      bool ok = !P.budget;
      for (size_t e = 0; P.budget && e < P.entry_bounds.size() && !ok; ++e) {
        int64_t b = P.entry_bounds[e][j];
        ok = b == kUnknownSize || sz[j] <= b;
      }
      if (ok) fits |= bit;
    }
    c.strict &= strict;
    c.fits &= fits;
    c.sites.push_back(std::move(sz));
  }

  // Builds every candidate of the next size; false once the size bound is reached.
  bool grow(Pool& P) {
    if (P.built >= cfg.max_size || P.cands.size() >= kPoolCap) return false;
    int n = ++P.built;
    if (n == 1) {
      for (const auto& [x, b] : scalars(P.env))
        add_atom(P, tm::var(x), b, [&, x = x](const LModel& s) {
          auto it = s.find(x);
          return it == s.end() ? fresh_symbolic() : intern(it->second);
        });
      add_atom(P, tm::num(0), BaseType::integer(), [&](const LModel&) { return intern(LVal::integer(0)); });
      add_atom(P, tm::boolean(true), BaseType::boolean(), [&](const LModel&) { return intern(LVal::boolean(true)); });
      add_atom(P, tm::boolean(false), BaseType::boolean(), [&](const LModel&) { return intern(LVal::boolean(false)); });
      for (const auto& d : problem->data)
        for (const auto& c : d.ctors)
          if (c.fields.empty())
            add_atom(P, tm::app(c.name, {}), BaseType::data(d.name),
                     [&, n = c.name](const LModel&) { return intern(LVal::data(n, {})); });
      return true;
    }
    for (size_t si = 0; si < P.syms.size(); ++si) {
      const Sym s = P.syms[si];
      const int a = static_cast<int>(s.params.size());
      if (a == 0 || a > n - 1) continue;
      std::vector<int> parts(a);
      std::function<void(int, int)> split = [&](int i, int left) {
        if (i + 1 == a) {
          parts[i] = left;
          combine(P, s, parts);
          return;
        }
        for (int k = 1; k <= left - (a - i - 1); ++k) {
          parts[i] = k;
          split(i + 1, left - k);
        }
      };
      split(0, n - 1);
    }
    return true;
  }

  void combine(Pool& P, const Sym& s, const std::vector<int>& parts) {
    const size_t a = parts.size();
    std::vector<std::vector<int>> lists;
    for (size_t i = 0; i < a; ++i) {
      auto it = P.by_size.find({parts[i], s.params[i].sort});
      if (it == P.by_size.end() || it->second.empty()) return;
      lists.push_back(it->second);
    }
    std::vector<size_t> idx(a, 0);
    std::vector<int> args(a);
    while (true) {
      for (size_t i = 0; i < a; ++i) args[i] = lists[i][idx[i]];
      build(P, s, args);
      size_t i = a;
      while (i > 0) {
        --i;
        if (++idx[i] < lists[i].size()) break;
        idx[i] = 0;
        if (i == 0) return;
      }
    }
  }

  // Makes candidate `i` available, growing the pool if needed.
  bool reach(Pool& P, size_t i) {
    while (P.cands.size() <= i)
      if (!grow(P)) return false;
    return true;
  }

  uint64_t goal_mask(Pool& P, const ScalarType& want, size_t i) {
    if (is_true(want.refinement)) return P.cands[i].base == want.base ? ~0ull : 0;
    auto& gm = P.goal_masks[want.base.sort.name() + "|" + print_logic(want.refinement)];
    while (gm.size() <= i) {
      const Cand& c = P.cands[gm.size()];
      uint64_t m = 0;
      if (c.base == want.base) {
        for (size_t j = 0; j < c.vals.size(); ++j) {
          if (c.vals[j] == undef_id) continue;
          if (symbolic[c.vals[j]]) {
            m |= 1ull << j;
            continue;
          }
          LModel s = P.samples[j];
          s[kNu] = table[c.vals[j]];
          auto r = ev.eval(want.refinement, s);
          if (!r || r->i) m |= 1ull << j;
        }
      }
      gm.push_back(m);
    }
    return gm[i];
  }

  int eval_term(const Pool& P, const Term& t, const LModel& m) {
    switch (t->kind) {
      case TKind::Var: {
        auto it = m.find(t->name);
        return it == m.end() ? fresh_symbolic() : intern(it->second);
      }
      case TKind::Int: return intern(LVal::integer(t->value));
      case TKind::Bool: return intern(LVal::boolean(t->value != 0));
      case TKind::App: {
        if (t->kids.empty()) return intern(LVal::data(t->name, {}));
        std::vector<int> args;
        for (const auto& k : t->kids) {
          int v = eval_term(P, k, m);
          if (v == undef_id) return undef_id;
          args.push_back(v);
        }
        for (const auto& s : P.syms) {
          if (s.name != t->name) continue;
          if (s.recursive && !site_admissible(P, args, m)) return undef_id;
          return apply(s, P.env, args);
        }
        return fresh_symbolic();
      }
      default: return fresh_symbolic();
    }
  }

  // False when a recursive call with these arguments fails to shrink the
  // problem on `m`, or (when pruning) exceeds every size the budget allows.
  bool site_admissible(const Pool& P, const std::vector<int>& args, const LModel& m) {
    if (!P.env.rec_fun) return true;
    auto sf = P.env.sizes.find(*P.env.rec_fun);
    if (sf == P.env.sizes.end()) return true;
    LModel a;
    for (size_t k = 0; k < args.size(); ++k) {
      if (symbolic[args[k]]) return true;
      a[sf->second.params[k]] = table[args[k]];
    }
    auto sz = ev.eval(sf->second.body, a);
    auto top = ev.eval(P.env.top_size(), m);
    if (!sz || !top || sz->kind != LVal::Kind::Int || top->kind != LVal::Kind::Int) return true;
    if (sz->i >= top->i) return false;
    if (!cfg.pruning || !P.budget) return true;
    for (const auto& c : P.budget->costs) {
      if (mentions(c.size, kCorr)) return true;
      auto b = ev.eval(c.size, {{kMu, *top}});
      if (!b || b->kind != LVal::Kind::Int || sz->i <= b->i) return true;
    }
    return false;
  }

  // Frames narrower than their pool draw their own samples, so that candidates
  // are not sent to the solver on the strength of one or two points.
  bool refuted_in_frame(const Frame& f, const Term& t, const ScalarType& want) {
    if (f.mask == f.pool->all()) return false;
    std::string key = print_logic(tc.hypothesis(f.env));
    auto it = frame_samples.find(key);
    if (it == frame_samples.end()) it = frame_samples.emplace(key, draw_samples(f.env)).first;
    for (const auto& m : it->second) {
      int v = eval_term(*f.pool, t, m);
      if (v == undef_id) return true;
      if (symbolic[v]) continue;
      LModel s = m;
      s[kNu] = table[v];
      auto r = ev.eval(want.refinement, s);
      if (r && r->i == 0) return true;
    }
    return false;
  }

  static std::vector<int64_t> frame_key(const Cand& c, uint64_t mask) {
    std::vector<int64_t> key{c.rec};
    for (size_t j = 0; j < c.vals.size(); ++j)
      if (mask >> j & 1) key.push_back(c.vals[j]);
    auto sites = c.sites;
    for (auto& s : sites) {
      std::vector<int64_t> p;
      for (size_t j = 0; j < s.size(); ++j)
        if (mask >> j & 1) p.push_back(s[j]);
      s = std::move(p);
    }
    std::sort(sites.begin(), sites.end());
    for (const auto& s : sites) {
      key.push_back(INT64_MAX);
      key.insert(key.end(), s.begin(), s.end());
    }
    return key;
  }

  // ---- checks

  bool terminates(const Environment& env, const Inference& inf) {
    if (!env.rec_fun) return true;
    auto sf = env.sizes.find(*env.rec_fun);
    for (const auto& c : inf.calls) {
      if (!c.recursive) continue;
      if (sf == env.sizes.end()) return false;
      if (!tc.valid(env, inf.facts, lx::lt(sf->second.apply(c.args), env.top_size()), inf.ghosts)) return false;
    }
    return true;
  }

  // CheckE; without pruning only the decrease of recursive calls is checked on top.
  ECheck check(const Environment& env, const Term& t, const AnnotatedType& goal) {
    ECheck r = tc.check_e(env, t, goal);
    if (r.accepted() && !tc.options().check_costs && !terminates(env, r.inf)) r.stage = EStage::Size;
    return r;
  }

  // Sample-level cost filter for candidate `c` in a frame.
  bool cost_plausible(const Cand& c, uint64_t mask, int budget) const {
    if (c.rec == 0) return true;
    if ((c.strict & mask) != mask) return false;
    if (!cfg.pruning) return true;
    return c.rec <= budget && (c.fits & mask) == mask;
  }

  // ---- search

  KR gen_e(const Frame& f, const AnnotatedType& goal, const Cont& k) {
    Pool& P = *f.pool;
    const ScalarType& want = goal.type.result;
    const int budget = goal.ann.total_count();
    std::set<std::vector<int64_t>> done;
    for (size_t i = 0; reach(P, i); ++i) {
      tick();
      if (P.cands[i].base != want.base) continue;
      if (!cost_plausible(P.cands[i], f.mask, budget)) {
        count_cost_rejection(P.cands[i]);
        continue;
      }
      if ((goal_mask(P, want, i) & f.mask) != f.mask) continue;
      auto key = frame_key(P.cands[i], f.mask);
      if (done.count(key)) continue;
      Term t = P.cands[i].term;
      if (refuted_in_frame(f, t, want)) continue;
      ECheck r = check(f.env, t, goal);
      if (!r.accepted()) {
        if (r.stage != EStage::Refinement) count_cost_rejection(P.cands[i]);
        continue;
      }
      done.insert(std::move(key));
      KR kr = k(t);
      if (kr != KR::Reject) return kr;
    }
    return KR::Reject;
  }

  std::vector<std::string> field_names(const Environment& env, const CtorDecl& c, std::set<std::string>& used) {
    static const std::vector<std::string> kInt{"x", "y", "z", "n", "m", "k"};
    static const std::vector<std::string> kBool{"b", "c"};
    static const std::vector<std::string> kData{"xs", "ys", "zs", "ts"};
    static const std::vector<std::string> kBranch{"l", "r", "s", "t"};
    // Constructors with several subterms of one sort read better as l and r.
    auto branching = [&](const Sort& so) {
      return std::count_if(c.fields.begin(), c.fields.end(), [&](const auto& g) { return g.sort == so; }) > 1;
    };
    std::vector<std::string> out;
    for (const auto& fb : c.fields) {
      const auto& pool = fb.sort.is_int() ? kInt : fb.sort.is_bool() ? kBool : branching(fb.sort) ? kBranch : kData;
      auto free = [&](const std::string& n) { return !env.lookup(n) && !used.count(n); };
      std::string name;
      for (const auto& n : pool)
        if (free(n)) {
          name = n;
          break;
        }
      for (int i = 1; name.empty(); ++i)
        if (free(pool[0] + std::to_string(i))) name = pool[0] + std::to_string(i);
      used.insert(name);
      out.push_back(name);
    }
    return out;
  }

  // True when every conjunct of the hypothesis of `env` evaluates to true on `m`.
  bool satisfies(const Environment& env, const LModel& m) {
    std::vector<LExpr> hyps;
    conjuncts(tc.hypothesis(env), hyps);
    for (const auto& h : hyps) {
      auto r = ev.eval(h, m);
      if (!r || r->i == 0) return false;
    }
    return true;
  }

  // Case pools keep the parent's samples that reach the case and top up with
  // fresh ones, so that equivalence is not judged on a handful of points.
  Frame case_frame(const Frame& f, const std::string& x, const Inference& si, const std::string& ctor,
                   const std::vector<std::string>& vars) {
    Pool& P = *f.pool;
    auto key = std::make_tuple(&P, x, ctor, vars);
    auto it = case_pools.find(key);
    if (it == case_pools.end()) {
      std::vector<LModel> samples;
      std::vector<int> parent;
      for (size_t j = 0; j < P.samples.size(); ++j) {
        auto xv = P.samples[j].find(x);
        if (xv == P.samples[j].end() || xv->second.kind != LVal::Kind::Data || xv->second.ctor != ctor) continue;
        LModel m = P.samples[j];
        for (size_t k = 0; k < vars.size(); ++k) m[vars[k]] = xv->second.fields[k];
        samples.push_back(std::move(m));
        parent.push_back(static_cast<int>(j));
      }
      Environment ce = tc.case_env(P.env, si, ctor, vars);
      for (auto& m : draw_samples(ce)) {
        if (static_cast<int>(samples.size()) >= cfg.samples) break;
        if (std::find(samples.begin(), samples.end(), m) != samples.end()) continue;
        samples.push_back(std::move(m));
        parent.push_back(-1);
      }
      Pool* c = make_pool(ce, std::move(samples), P.budget, P.max_depth);
      c->parent_index = std::move(parent);
      it = case_pools.emplace(key, c).first;
    }
    Pool* C = it->second;
    Environment env = tc.case_env(f.env, si, ctor, vars);
    uint64_t mask = 0;
    for (size_t i = 0; i < C->parent_index.size(); ++i) {
      int j = C->parent_index[i];
      if (j >= 0 ? (f.mask >> j & 1) != 0 : satisfies(env, C->samples[i])) mask |= 1ull << i;
    }
    return {C, env, mask};
  }

  KR gen_match(const Frame& f, const AnnotatedType& goal, int ifs, int m, const Cont& kk, const bool& outer) {
    for (const auto& [x, b] : scalars(f.env)) {
      if (!b.sort.is_data()) continue;
      const DataDecl* d = problem->find_data(b.sort.data);
      if (!d) continue;
      Inference si = tc.infer(f.env, tm::var(x));
      std::set<std::string> used;
      std::vector<MatchCase> cases;
      std::vector<Frame> frames;
      for (const auto& c : d->ctors) {
        auto vars = field_names(f.env, c, used);
        frames.push_back(case_frame(f, x, si, c.name, vars));
        cases.push_back({c.name, vars, nullptr});
      }
      std::function<KR(size_t)> run = [&](size_t i) -> KR {
        if (i == cases.size()) return kk(tm::match(tm::var(x), cases));
        bool produced = false;
        KR r = gen_i(frames[i], goal, ifs, m - 1, true, [&](const Term& t) {
          produced = true;
          cases[i].body = t;
          return run(i + 1);
        });
        if (r == KR::Accept || outer) return r == KR::Accept ? r : KR::Abort;
        return produced ? r : KR::Abort;
      };
      KR r = run(0);
      if (r == KR::Accept) return r;
      if (outer) return KR::Abort;
    }
    return KR::Reject;
  }

  KR gen_if(const Frame& f, const AnnotatedType& goal, int ifs, int m, const Cont& kk, const bool& outer) {
    Pool& P = *f.pool;
    Annotation zero = goal.ann;
    for (auto& c : zero.costs) c.count = 0;
    const AnnotatedType gg{RType::scalar({BaseType::boolean(), lx::tru()}), zero};
    std::set<std::pair<uint64_t, uint64_t>> splits;
    for (size_t i = 0; reach(P, i); ++i) {
      tick();
      if (!P.cands[i].base.sort.is_bool()) continue;
      if (!cost_plausible(P.cands[i], f.mask, 0)) {
        count_cost_rejection(P.cands[i]);
        continue;
      }
      const uint64_t t = P.cands[i].truthy & f.mask, e = P.cands[i].falsy & f.mask;
      if (!t || !e || !splits.insert({t, e}).second) continue;
      Term g = P.cands[i].term;
      ECheck gc = check(f.env, g, gg);
      if (!gc.accepted()) {
        if (gc.stage != EStage::Refinement) count_cost_rejection(P.cands[i]);
        continue;
      }
      Environment ge = f.env.with_ghosts(gc.inf.ghosts);
      const Frame ft{&P, ge.with_path(TypeChecker::guard_path(gc.inf, true)), t};
      const Frame fe{&P, ge.with_path(TypeChecker::guard_path(gc.inf, false)), e};
      KR r = gen_i(ft, goal, ifs, m, false, [&](const Term& tt) -> KR {
        bool produced = false;
        KR re = gen_i(fe, goal, ifs - 1, m, true, [&](const Term& te) {
          produced = true;
          return kk(tm::ite(g, tt, te));
        });
        if (re == KR::Accept) return re;
        if (outer || !produced) return KR::Abort;
        return KR::Reject;
      });
      if (r == KR::Accept) return r;
      if (outer) return KR::Abort;
    }
    return KR::Reject;
  }

  KR gen_i(const Frame& f, const AnnotatedType& goal, int ifs, int m, bool allow_if, const Cont& k) {
    bool outer = false;
    const Cont kk = [&](const Term& t) {
      KR r = k(t);
      if (r == KR::Abort) outer = true;
      return r;
    };
    KR r = gen_e(f, goal, kk);
    if (r != KR::Reject) return r;
    if (m > 0) {
      r = gen_match(f, goal, ifs, m, kk, outer);
      if (r != KR::Reject) return r;
    }
    if (allow_if && ifs > 0) {
      r = gen_if(f, goal, ifs, m, kk, outer);
      if (r != KR::Reject) return r;
    }
    return KR::Reject;
  }

  Frame top_frame(const Environment& env, std::optional<Annotation> budget, int depth) {
    Pool* p = make_pool(env, draw_samples(env), std::move(budget), depth);
    return {p, env, p->all()};
  }

  std::optional<Pattern> validate(const TypingGoal& goal, const Term& fix) {
    bool prev = tc.options().check_costs;
    tc.set_check_costs(true);
    auto p = tc.check_fix(goal, fix);
    tc.set_check_costs(prev);
    return p;
  }

  SynthResult synthesize() {
    arm();
    SynthResult res;
    TypingGoal goal = tc.goal();
    std::vector<std::string> params;
    for (const auto& [n, s] : goal.type.type.params) params.push_back(n);
    const bool has_size = goal.env.sizes.count(problem->goal_name) > 0;
    try {
      if (!params.empty()) {
        for (const Pattern& p : candidate_patterns(goal.type.ann.bound, cfg.range)) {
          if (p.id != PatternId::NonRecursive && !has_size) continue;
          TypingGoal body = tc.enter_fix(goal, problem->goal_name, params, p.body);
          Frame top = top_frame(body.env, p.body, cfg.depth);
          KR r = gen_i(top, body.type, cfg.branch_bound, cfg.match_bound, true, [&](const Term& t) {
            Term fix = tm::fix(problem->goal_name, params, t);
            auto v = validate(goal, fix);
            if (!v) return KR::Reject;
            res.program = fix;
            res.pattern = v;
            return KR::Accept;
          });
          if (r == KR::Accept) {
            res.outcome = SynthOutcome::Synthesized;
            break;
          }
        }
      }
    } catch (const TimeoutHit&) {
      res.outcome = SynthOutcome::Timeout;
      res.program.reset();
      res.pattern.reset();
    }
    sync();
    res.stats = stats;
    return res;
  }

  std::optional<Term> first(const Environment& env, const AnnotatedType& goal, int depth, int m, bool branching) {
    arm();
    std::optional<Term> out;
    try {
      Frame f = top_frame(env, goal.ann, depth);
      auto k = [&](const Term& t) {
        out = t;
        return KR::Accept;
      };
      if (branching) gen_i(f, goal, cfg.branch_bound, m, true, k);
      else gen_e(f, goal, k);
    } catch (const TimeoutHit&) {
      out.reset();
    }
    sync();
    return out;
  }
};

Synthesizer::Synthesizer(ProblemRef problem, Checker& checker, SearchConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(problem), checker, cfg)) {}

Synthesizer::~Synthesizer() = default;

std::vector<Term> Synthesizer::enumerate_e(const Environment& env, int depth, const BaseType& base) {
  if (depth < 1) throw std::invalid_argument("enumeration depth must be at least 1");
  impl_->arm();
  Frame f = impl_->top_frame(env, std::nullopt, depth);
  std::vector<Term> out;
  for (size_t i = 0; impl_->reach(*f.pool, i); ++i)
    if (f.pool->cands[i].base == base) out.push_back(f.pool->cands[i].term);
  impl_->sync();
  return out;
}

bool Synthesizer::check_e(const Term& t, const Environment& env, const AnnotatedType& goal) {
  TypeChecker& tc = impl_->tc;
  bool prev = tc.options().check_costs;
  tc.set_check_costs(true);
  bool ok = tc.check_e(env, t, goal).accepted();
  tc.set_check_costs(prev);
  impl_->sync();
  return ok;
}

std::optional<Term> Synthesizer::generate_e(const Environment& env, const AnnotatedType& goal, int depth) {
  return impl_->first(env, goal, depth, 0, false);
}

std::optional<Term> Synthesizer::generate_i(const Environment& env, const AnnotatedType& goal, int depth, int m) {
  return impl_->first(env, goal, depth, m, true);
}

SynthResult Synthesizer::synthesize() { return impl_->synthesize(); }

TypeChecker& Synthesizer::type_checker() { return impl_->tc; }

const SearchStats& Synthesizer::stats() const {
  impl_->sync();
  return impl_->stats;
}

SynthResult synthesize(ProblemRef problem, const SearchConfig& cfg, Checker& checker) {
  Synthesizer s(std::move(problem), checker, cfg);
  return s.synthesize();
}

}  // namespace recsynth
