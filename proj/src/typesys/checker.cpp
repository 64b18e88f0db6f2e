#include <algorithm>
#include <functional>
#include <set>

#include "recsynth/typesys.hpp"

namespace recsynth {

LExpr Inference::refinement() const { return lx::conj(lx::eq(lx::var(kNu), value), facts); }

namespace {

bool is_var(const LExpr& e, const char* n) { return e->op == LOp::Var && e->name == n; }

// Renames the parameters of an arrow type, updating dependent refinements.
RType rename_params(const RType& t, const std::vector<std::string>& names) {
  std::map<std::string, LExpr> m;
  RType out;
  for (size_t i = 0; i < t.params.size(); ++i) {
    ScalarType s = t.params[i].second;
    s.refinement = subst_logic_all(s.refinement, m);
    out.params.push_back({names[i], s});
    m[t.params[i].first] = lx::var(names[i]);
  }
  out.result = t.result;
  out.result.refinement = subst_logic_all(t.result.refinement, m);
  return out;
}

struct Piece {
  BaseType base;
  LExpr value;
  LExpr facts;
};

struct InferCtx {
  const Environment& env;
  const SynthesisProblem& problem;
  Inference out;

  LExpr fresh(const Sort& s) {
    for (size_t n = env.ghosts.size() + out.ghosts.size();; ++n) {
      std::string name = "_z" + std::to_string(n);
      if (env.ghosts.count(name) || out.ghosts.count(name)) continue;
      out.ghosts[name] = s;
      return lx::var(name);
    }
  }

  Piece go(const Term& t) {
    switch (t->kind) {
      case TKind::Var: {
        const Binding* b = env.lookup(t->name);
        if (!b) throw TypeError("unbound variable '" + t->name + "'");
        if (b->type.type.is_arrow()) throw TypeError("function '" + t->name + "' used as a value");
        return {b->type.type.result.base, lx::var(t->name), lx::tru()};
      }
      case TKind::Int: return {BaseType::integer(), lx::num(t->value), lx::tru()};
      case TKind::Bool: return {BaseType::boolean(), lx::boolean(t->value != 0), lx::tru()};
      case TKind::App: return app(t);
      default: throw TypeError("not an E-term: " + std::string(t->kind == TKind::If ? "if" : "branching term"));
    }
  }

  Piece app(const Term& t) {
    std::vector<Piece> args;
    for (const auto& a : t->kids) args.push_back(go(a));
    std::vector<LExpr> vals, facts;
    for (const auto& a : args) {
      vals.push_back(a.value);
      facts.push_back(a.facts);
    }
    const std::string& h = t->name;
    auto expect = [&](size_t n, const BaseType* b) {
      if (args.size() != n) throw TypeError("'" + h + "' expects " + std::to_string(n) + " arguments");
      if (b)
        for (const auto& a : args)
          if (a.base != *b) throw TypeError("'" + h + "' applied to a " + a.base.sort.name());
    };
    static const BaseType kInt = BaseType::integer(), kBool = BaseType::boolean();
    if (h == "==") {
      expect(2, nullptr);
      if (args[0].base != args[1].base) throw TypeError("'==' on different types");
      return {kBool, lx::eq(vals[0], vals[1]), lx::conj_all(facts)};
    }
    if (h == "not") {
      expect(1, &kBool);
      return {kBool, lx::negate(vals[0]), lx::conj_all(facts)};
    }
    if (h == "&&" || h == "||") {
      expect(2, &kBool);
      return {kBool, h == "&&" ? lx::conj(vals[0], vals[1]) : lx::disj(vals[0], vals[1]), lx::conj_all(facts)};
    }
    if (h == "<=" || h == "<") {
      expect(2, &kInt);
      return {kBool, h == "<=" ? lx::le(vals[0], vals[1]) : lx::lt(vals[0], vals[1]), lx::conj_all(facts)};
    }
    if (h == "+" || h == "-" || h == "*" || h == "/" || h == "%") {
      expect(2, &kInt);
      LExpr v = h == "+" ? lx::add(vals[0], vals[1])
              : h == "-" ? lx::sub(vals[0], vals[1])
              : h == "*" ? lx::mul(vals[0], vals[1])
              : h == "/" ? lx::div(vals[0], vals[1])
                         : lx::mod(vals[0], vals[1]);
      return {kInt, v, lx::conj_all(facts)};
    }
    if (is_ctor_name(h)) {
      auto [d, c] = problem.find_ctor(h);
      if (!c) throw TypeError("unknown constructor '" + h + "'");
      if (c->fields.size() != args.size()) throw TypeError("'" + h + "' expects " + std::to_string(c->fields.size()) + " arguments");
      for (size_t i = 0; i < args.size(); ++i)
        if (args[i].base != c->fields[i]) throw TypeError("'" + h + "' field " + std::to_string(i + 1) + " type mismatch");
      return {BaseType::data(d->name), lx::app(h, vals), lx::conj_all(facts)};
    }
    const Binding* b = env.lookup(h);
    if (!b) throw TypeError("unbound function '" + h + "'");
    const RType& ft = b->type.type;
    if (ft.params.size() != args.size())
      throw TypeError("'" + h + "' expects " + std::to_string(ft.params.size()) + " arguments");
    std::map<std::string, LExpr> m;
    for (size_t i = 0; i < args.size(); ++i) {
      const ScalarType& p = ft.params[i].second;
      if (args[i].base != p.base) throw TypeError("argument " + std::to_string(i + 1) + " of '" + h + "' has the wrong type");
      // Owed under what the arguments establish, not under the callee's result.
      if (!is_true(p.refinement))
        out.obligations.push_back(
            lx::implies(lx::conj_all(facts), subst_logic_all(subst_logic(p.refinement, kNu, vals[i]), m)));
      m[ft.params[i].first] = vals[i];
    }
    out.calls.push_back({h, env.rec_fun && *env.rec_fun == h, vals});
    LExpr res = subst_logic_all(ft.result.refinement, m);
    if (auto f = split_functional(res)) {
      facts.push_back(f->second);
      return {ft.result.base, f->first, lx::conj_all(facts)};
    }
    LExpr z = fresh(ft.result.base.sort);
    facts.push_back(subst_logic(res, kNu, z));
    return {ft.result.base, z, lx::conj_all(facts)};
  }
};

// Replaces occurrences of `top` inside `e` by u.
LExpr abstract_top(const LExpr& e, const LExpr& top) {
  if (lequal(e, top)) return lx::var(kMu);
  if (e->kids.empty()) return e;
  auto n = std::make_shared<LNode>(*e);
  for (auto& k : n->kids) k = abstract_top(k, top);
  return n;
}

}  // namespace

std::optional<std::pair<LExpr, LExpr>> split_functional(const LExpr& phi) {
  std::vector<LExpr> cs;
  conjuncts(phi, cs);
  for (size_t i = 0; i < cs.size(); ++i) {
    const LExpr& c = cs[i];
    if (c->op != LOp::Eq) continue;
    LExpr e;
    if (is_var(c->kids[0], kNu) && !mentions(c->kids[1], kNu)) e = c->kids[1];
    else if (is_var(c->kids[1], kNu) && !mentions(c->kids[0], kNu)) e = c->kids[0];
    else continue;
    std::vector<LExpr> rest;
    for (size_t j = 0; j < cs.size(); ++j)
      if (j != i) rest.push_back(subst_logic(cs[j], kNu, e));
    return std::make_pair(e, lx::conj_all(rest));
  }
  return std::nullopt;
}

TypeChecker::TypeChecker(ProblemRef problem, Checker& checker, TypeCheckerOptions opts)
    : problem_(std::move(problem)),
      theory_(std::make_shared<const Theory>(Theory::from_problem(*problem_))),
      checker_(checker),
      opts_(opts) {}

TypingGoal TypeChecker::goal() const { return {initial_env(), problem_->goal}; }

LExpr TypeChecker::hypothesis(const Environment& env) const {
  std::vector<LExpr> hs;
  std::set<std::string> seen;
  for (auto it = env.bindings.rbegin(); it != env.bindings.rend(); ++it) {
    if (!seen.insert(it->name).second || it->type.type.is_arrow()) continue;
    const LExpr& r = it->type.type.result.refinement;
    if (!is_true(r)) hs.push_back(subst_logic(r, kNu, lx::var(it->name)));
  }
  std::reverse(hs.begin(), hs.end());
  for (const auto& p : env.path) hs.push_back(p);
  return lx::conj_all(hs);
}

ValidityQuery TypeChecker::query(const Environment& env, const LExpr& extra, const LExpr& concl,
                                 const std::map<std::string, Sort>& more, std::optional<Sort> nu) const {
  LExpr hyp = lx::conj(hypothesis(env), extra);
  std::map<std::string, Sort> sorts;
  std::set<std::string> seen;
  for (auto it = env.bindings.rbegin(); it != env.bindings.rend(); ++it)
    if (seen.insert(it->name).second && !it->type.type.is_arrow()) sorts[it->name] = it->type.type.result.base.sort;
  sorts.insert(env.ghosts.begin(), env.ghosts.end());
  sorts.insert(more.begin(), more.end());
  if (nu) sorts[kNu] = *nu;
  std::set<std::string> fv = free_vars(hyp);
  for (const auto& x : free_vars(concl)) fv.insert(x);
  ValidityQuery q{theory_, {}, hyp, concl};
  for (const auto& x : fv) {
    auto it = sorts.find(x);
    if (it == sorts.end()) throw TypeError("no sort for logical variable '" + x + "'");
    q.vars.push_back({x, it->second});
  }
  return q;
}

bool TypeChecker::valid(const Environment& env, const LExpr& extra, const LExpr& concl,
                        const std::map<std::string, Sort>& more, std::optional<Sort> nu) {
  return checker_.check(query(env, extra, concl, more, nu)).is_valid();
}

bool TypeChecker::size_dominated(const LExpr& a, const LExpr& b) {
  if (lequal(a, b)) return true;
  std::vector<std::pair<std::string, Sort>> vars{{kMu, Sort::integer()}};
  std::vector<LExpr> hyp{lx::le(lx::num(0), lx::var(kMu))};
  if (mentions(a, kCorr) || mentions(b, kCorr)) {
    vars.push_back({kCorr, Sort::integer()});
    hyp.push_back(lx::le(lx::num(0), lx::var(kCorr)));
    hyp.push_back(lx::lt(lx::var(kCorr), lx::var(kMu)));
  }
  ValidityQuery q{theory_, vars, lx::conj_all(hyp), lx::le(a, b)};
  return checker_.check(q).is_valid();
}

bool TypeChecker::annotation_subtype(const Annotation& a, const Annotation& b) {
  if (!check_big_o(a.bound, b.bound)) return false;
  std::vector<int> cap;
  for (const auto& c : b.costs) cap.push_back(c.count);
  std::map<std::pair<size_t, size_t>, bool> memo;
  auto dom = [&](size_t i, size_t j) {
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    return memo[key] = size_dominated(a.costs[i].size, b.costs[j].size);
  };
  // Places `left` units of entry i into entries j.. of b.
  std::function<bool(size_t, int, size_t)> place = [&](size_t i, int left, size_t j) -> bool {
    if (i == a.costs.size()) return true;
    if (left == 0) return place(i + 1, i + 1 < a.costs.size() ? a.costs[i + 1].count : 0, 0);
    if (j == b.costs.size()) return false;
    if (cap[j] > 0 && dom(i, j)) {
      int most = std::min(cap[j], left);
      for (int k = most; k >= 1; --k) {
        cap[j] -= k;
        bool ok = place(i, left - k, j + 1);
        cap[j] += k;
        if (ok) return true;
      }
    }
    return place(i, left, j + 1);
  };
  return place(0, a.costs.empty() ? 0 : a.costs[0].count, 0);
}

bool TypeChecker::subtype(const Environment& env, const AnnotatedType& a, const AnnotatedType& b) {
  const RType& tb = b.type;
  if (a.type.params.size() != tb.params.size()) return false;
  std::vector<std::string> names;
  for (const auto& p : tb.params) names.push_back(p.first);
  RType ta = rename_params(a.type, names);
  Environment e = env;
  for (size_t i = 0; i < tb.params.size(); ++i) {
    const ScalarType& pa = ta.params[i].second;
    const ScalarType& pb = tb.params[i].second;
    if (pa.base != pb.base) return false;
    if (!valid(e, pb.refinement, pa.refinement, {}, pb.base.sort)) return false;
    e = e.with_binding(names[i], {RType::scalar(pb), {}});
  }
  if (ta.result.base != tb.result.base) return false;
  if (!valid(e, ta.result.refinement, tb.result.refinement, {}, tb.result.base.sort)) return false;
  return annotation_subtype(a.ann, b.ann);
}

Inference TypeChecker::infer(const Environment& env, const Term& e) {
  InferCtx ctx{env, *problem_, {}};
  Piece p = ctx.go(e);
  Inference inf = std::move(ctx.out);
  inf.base = p.base;
  inf.value = p.value;
  inf.facts = p.facts;
  if (e->kind == TKind::Var) {
    const LExpr& r = env.lookup(e->name)->type.type.result.refinement;
    if (!is_true(r)) inf.facts = subst_logic(r, kNu, lx::var(e->name));
  }
  return inf;
}

namespace {

// Assigns each recursive call site of `inf` to a cost entry of `ann`.
struct SiteMatcher {
  TypeChecker& tc;
  const Environment& env;
  const Inference& inf;
  const Annotation& ann;

  std::vector<const CallSite*> sites;
  std::vector<LExpr> sizes;
  LExpr top;
  std::vector<int> cap;
  std::map<std::tuple<size_t, size_t, int>, bool> memo;
  std::vector<int> assignment;

  static bool binder(const LExpr& phi) { return is_var(phi, kCorr); }

  bool fits(size_t s, size_t k, int bound_site) {
    auto key = std::make_tuple(s, k, bound_site);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const LExpr& phi = ann.costs[k].size;
    LExpr strict = lx::lt(sizes[s], top);
    LExpr concl;
    if (binder(phi)) {
      concl = strict;
    } else {
      LExpr bound = subst_logic(phi, kMu, top);
      if (bound_site >= 0) bound = subst_logic(bound, kCorr, sizes[bound_site]);
      concl = lx::conj(lx::le(sizes[s], bound), strict);
    }
    return memo[key] = tc.valid(env, inf.facts, concl, inf.ghosts);
  }

  bool go(size_t i, int bound_site) {
    if (i == sites.size()) return true;
    for (size_t k = 0; k < ann.costs.size(); ++k) {
      if (cap[k] == 0) continue;
      const LExpr& phi = ann.costs[k].size;
      bool b = binder(phi);
      if (!b && mentions(phi, kCorr) && bound_site < 0) continue;
      if (b && bound_site >= 0) continue;
      if (!fits(i, k, b ? -1 : bound_site)) continue;
      --cap[k];
      assignment[i] = static_cast<int>(k);
      if (go(i + 1, b ? static_cast<int>(i) : bound_site)) return true;
      ++cap[k];
    }
    return false;
  }

  std::optional<std::vector<int>> run() {
    for (const auto& c : inf.calls)
      if (c.recursive) sites.push_back(&c);
    if (sites.empty()) return std::vector<int>{};
    if (!env.rec_fun) return std::nullopt;
    auto sf = env.sizes.find(*env.rec_fun);
    if (sf == env.sizes.end()) return std::nullopt;
    top = env.top_size();
    for (const auto* s : sites) sizes.push_back(sf->second.apply(s->args));
    for (const auto& c : ann.costs) cap.push_back(c.count);
    assignment.assign(sites.size(), -1);
    if (!go(0, -1)) return std::nullopt;
    return assignment;
  }
};

}  // namespace

bool TypeChecker::check_rec_sites(const Environment& env, const Inference& inf, const Annotation& ann) {
  return SiteMatcher{*this, env, inf, ann, {}, {}, nullptr, {}, {}, {}}.run().has_value();
}

bool TypeChecker::check_aux_sites(const Environment& env, const Inference& inf, const BoundExpr& psi) {
  for (const auto& c : inf.calls) {
    if (c.recursive) continue;
    const Binding* b = env.lookup(c.head);
    BoundExpr pg = b->type.ann.bound.canonical();
    if (pg.is_constant()) continue;
    if (!check_big_o(pg, psi)) return false;
    auto sg = env.sizes.find(c.head);
    if (!env.rec_fun || sg == env.sizes.end() || !env.sizes.count(*env.rec_fun)) return false;
    LExpr top = env.top_size();
    LExpr callee = sg->second.apply(c.args);
    bool ok = false;
    for (int64_t k = 1; k <= 2 && !ok; ++k) {
      if (!check_big_o(pg.scaled(k), psi)) continue;
      LExpr p = lx::mul(lx::num(16), k == 1 ? top : lx::mul(top, top));
      ValidityQuery q = query(env, inf.facts, lx::lt(callee, p), inf.ghosts);
      ok = check_poly_bound(checker_, q, {top}, callee, p).is_valid();
    }
    if (!ok) return false;
  }
  return true;
}

AnnotatedType TypeChecker::infer_eterm(const Environment& env, const Term& e) {
  Inference inf = infer(env, e);
  AnnotatedType out{RType::scalar({inf.base, inf.refinement()}), Annotation{{}, BoundExpr::constant()}};
  const SizeFunction* sf = nullptr;
  if (env.rec_fun)
    if (auto it = env.sizes.find(*env.rec_fun); it != env.sizes.end()) sf = &it->second;
  for (const auto& c : inf.calls) {
    if (!c.recursive) {
      BoundExpr pg = env.lookup(c.head)->type.ann.bound.canonical();
      if (check_big_o(out.ann.bound, pg)) out.ann.bound = pg;
      continue;
    }
    // Size of the sub-problem, relative to the enclosing call when possible.
    LExpr size = sf ? abstract_top(sf->apply(c.args), env.top_size()) : lx::num(0);
    out.ann.costs.push_back({1, size});
  }
  return out;
}

ECheck TypeChecker::check_e(const Environment& env, const Term& e, const AnnotatedType& goal) {
  if (goal.type.is_arrow()) throw TypeError("E-term checked against an arrow type");
  ECheck r;
  r.inf = infer(env, e);
  const Inference& inf = r.inf;
  if (opts_.check_costs) {
    int rec = 0;
    for (const auto& c : inf.calls) rec += c.recursive;
    if (rec > goal.ann.total_count()) return r.stage = EStage::Count, r;
    if (!check_rec_sites(env, inf, goal.ann)) return r.stage = EStage::Size, r;
    if (!check_aux_sites(env, inf, goal.ann.bound.canonical())) return r.stage = EStage::AuxBound, r;
  }
  const ScalarType& want = goal.type.result;
  if (inf.base != want.base) return r.stage = EStage::Refinement, r;
  std::vector<LExpr> concl{lx::implies(inf.refinement(), want.refinement)};
  for (const auto& o : inf.obligations) concl.push_back(o);
  LExpr c = lx::conj_all(concl);
  if (!is_true(c) && !valid(env, lx::tru(), c, inf.ghosts, inf.base.sort)) return r.stage = EStage::Refinement, r;
  r.stage = EStage::Accepted;
  return r;
}

LExpr TypeChecker::guard_path(const Inference& guard, bool taken) {
  return lx::conj(guard.facts, taken ? guard.value : lx::negate(guard.value));
}

Environment TypeChecker::case_env(const Environment& env, const Inference& scrut, const std::string& ctor,
                                  const std::vector<std::string>& vars) const {
  auto [d, c] = problem_->find_ctor(ctor);
  if (!c) throw TypeError("unknown constructor '" + ctor + "'");
  if (c->fields.size() != vars.size()) throw TypeError("pattern '" + ctor + "' binds the wrong number of fields");
  Environment e = env.with_ghosts(scrut.ghosts);
  std::vector<LExpr> fields;
  for (size_t i = 0; i < vars.size(); ++i) {
    e = e.with_binding(vars[i], {RType::scalar({c->fields[i], lx::tru()}), {}});
    fields.push_back(lx::var(vars[i]));
  }
  return e.with_path(lx::conj(scrut.facts, lx::eq(scrut.value, lx::app(ctor, fields))));
}

TypingGoal TypeChecker::enter_fix(const TypingGoal& goal, const std::string& f, const std::vector<std::string>& params,
                                  const Annotation& body) const {
  RType ft = rename_params(goal.type.type, params);
  Environment e = goal.env.with_rec(f, params);
  for (const auto& [n, s] : ft.params) e = e.with_binding(n, {RType::scalar(s), {}});
  e = e.with_binding(f, {ft, goal.type.ann});
  return {e, {RType::scalar(ft.result), body}};
}

std::string stage_name(EStage s) {
  switch (s) {
    case EStage::Accepted: return "accepted";
    case EStage::Count: return "recursive-call count";
    case EStage::Size: return "recursive-call size";
    case EStage::AuxBound: return "auxiliary bound";
    case EStage::Refinement: return "refinement";
  }
  return "?";
}

std::optional<Pattern> TypeChecker::check_fix(const TypingGoal& goal, const Term& fix) {
  if (fix->kind != TKind::Fix) throw TypeError("expected a function definition");
  if (!goal.env.rec_fun) rejection_.reset();
  const RType& ft = goal.type.type;
  if (ft.params.size() != fix->params.size() || goal.env.rec_fun) return std::nullopt;
  std::vector<Pattern> pats;
  if (goal.env.sizes.count(fix->name)) {
    pats = candidate_patterns(goal.type.ann.bound, opts_.range);
  } else {
    BoundExpr b = goal.type.ann.bound.canonical();
    pats.push_back(Pattern{PatternId::NonRecursive, 0, b, Annotation{{}, b}});
  }
  // The first pattern is the one the bound asks for; its failure is reported.
  std::optional<Rejection> first;
  for (const auto& p : pats) {
    TypingGoal g = enter_fix(goal, fix->name, fix->params, p.body);
    if (check_i(g, fix->kids[0])) return p;
    if (!first) first = rejection_;
  }
  if (first) rejection_ = first;
  return std::nullopt;
}

bool TypeChecker::check_term(const TypingGoal& goal, const Term& t) {
  rejection_.reset();
  return check_i(goal, t);
}

ECheck TypeChecker::check_e_noted(const Environment& env, const Term& e, const AnnotatedType& goal) {
  ECheck r = check_e(env, e, goal);
  if (!r.accepted()) rejection_ = Rejection{r.stage, e, hypothesis(env)};
  return r;
}

bool TypeChecker::check_i(const TypingGoal& goal, const Term& t) {
  const Environment& env = goal.env;
  switch (t->kind) {
    case TKind::Fix: return check_fix(goal, t).has_value();
    case TKind::Tick: return check_i(goal, t->kids[0]);
    case TKind::If: {
      if (goal.type.type.is_arrow()) return false;
      // Report the failure under the first share tried.
      std::optional<Rejection> first;
      for (const auto& parts : exact_shares(goal.type.ann, 2)) {
        AnnotatedType gt{RType::scalar({BaseType::boolean(), lx::tru()}), parts[0]};
        ECheck g = check_e_noted(env, t->kids[0], gt);
        if (g.accepted()) {
          AnnotatedType bt{goal.type.type, parts[1]};
          Environment et = env.with_ghosts(g.inf.ghosts);
          if (check_i({et.with_path(guard_path(g.inf, true)), bt}, t->kids[1]) &&
              check_i({et.with_path(guard_path(g.inf, false)), bt}, t->kids[2]))
            return true;
        }
        if (!first) first = rejection_;
      }
      if (first) rejection_ = first;
      return false;
    }
    case TKind::Match: {
      if (goal.type.type.is_arrow()) return false;
      Inference si = infer(env, t->kids[0]);
      if (!si.base.sort.is_data()) return false;
      const DataDecl* d = problem_->find_data(si.base.sort.data);
      std::set<std::string> covered;
      for (const auto& c : t->cases) {
        auto [cd, cc] = problem_->find_ctor(c.ctor);
        if (cd != d || !covered.insert(c.ctor).second || cc->fields.size() != c.vars.size()) return false;
      }
      if (covered.size() != d->ctors.size()) return false;
      std::optional<Rejection> first;
      for (const auto& parts : exact_shares(goal.type.ann, 2)) {
        ECheck s = check_e_noted(env, t->kids[0], {RType::scalar({si.base, lx::tru()}), parts[0]});
        if (!s.accepted()) {
          if (!first) first = rejection_;
          continue;
        }
        AnnotatedType bt{goal.type.type, parts[1]};
        bool all = true;
        for (const auto& c : t->cases) {
          // Rename pattern variables that would shadow names already in scope.
          Term body = c.body;
          std::vector<std::string> vars = c.vars;
          for (auto& x : vars) {
            if (!env.lookup(x) && !env.ghosts.count(x)) continue;
            std::string y;
            for (int k = 1;; ++k) {
              y = x + "_" + std::to_string(k);
              if (!env.lookup(y) && !env.ghosts.count(y) && !free_term_vars(body).count(y)) break;
            }
            body = substitute(body, x, tm::var(y));
            x = y;
          }
          if (!check_i({case_env(env, s.inf, c.ctor, vars), bt}, body)) {
            all = false;
            break;
          }
        }
        if (all) return true;
        if (!first) first = rejection_;
      }
      if (first) rejection_ = first;
      return false;
    }
    default:
      if (goal.type.type.is_arrow()) return false;
      return check_e_noted(env, t, goal.type).accepted();
  }
}

}  // namespace recsynth
