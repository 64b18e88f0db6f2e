#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "recsynth/semantics.hpp"

namespace recsynth {

std::vector<CostSample> measure(const Term& fix, const Defs& aux, const Theory& th, const SizeFunction& size,
                                const std::vector<std::vector<Value>>& inputs, int64_t fuel) {
  Defs defs = aux;
  add_program(defs, fix);
  LogicEvaluator ev(th);
  std::map<int64_t, int64_t> worst;
  for (const auto& args : inputs) {
    if (args.size() != size.params.size()) throw std::invalid_argument("input arity does not match size function");
    LModel m;
    for (size_t i = 0; i < args.size(); ++i)
      if (args[i].kind != Value::Kind::Closure) m[size.params[i]] = to_lval(args[i]);
    auto s = ev.eval(size.body, m);
    if (!s || s->kind != LVal::Kind::Int) throw std::invalid_argument("size function is undefined on an input");
    EvalResult r = call(fix->name, args, defs, fuel);
    auto [it, fresh] = worst.emplace(s->i, r.cost);
    if (!fresh) it->second = std::max(it->second, r.cost);
  }
  std::vector<CostSample> out;
  for (const auto& [s, c] : worst) out.push_back({s, c});
  return out;
}

FitResult fit_bound(std::vector<CostSample> samples, const BoundExpr& psi) {
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.size < b.size; });
  if (samples.size() < 8) throw std::invalid_argument("fit_bound needs at least 8 samples");
  int64_t lo = std::max<int64_t>(samples.front().size, 1);
  if (samples.back().size < 8 * lo) throw std::invalid_argument("samples must span at least 3 doublings of size");
  std::vector<double> ratios;
  for (size_t i = samples.size() / 2; i < samples.size(); ++i) {
    double b = std::max(psi.eval(static_cast<double>(samples[i].size)), 1.0);
    if (!(b > 0)) throw std::invalid_argument("bound evaluates to zero");
    ratios.push_back(static_cast<double>(samples[i].cost) / b);
  }
  double max = *std::max_element(ratios.begin(), ratios.end());
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  double median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
  // Ratios that fall across the tail belong to a smaller class than psi.
  double ref = std::max(median, ratios.front());
  return {max <= kTailTolerance * ref, max};
}

std::vector<int64_t> size_ladder(const BoundExpr& psi) {
  BoundExpr b = psi.canonical();
  int top;
  if (b.a_num == 0) top = 12;
  else if (b.exponent() <= 1) top = 10;
  else if (b.exponent() <= 2) top = 8;
  else top = 6;
  std::vector<int64_t> out;
  for (int k = 1; k <= top; ++k) {
    out.push_back(int64_t{1} << k);
    // Half steps keep 8 samples on the short ladders.
    if (top < 8 && k < top) out.push_back(3 * (int64_t{1} << (k - 1)));
  }
  return out;
}

Value build_data(const SynthesisProblem& p, const std::string& d, int64_t n, bool descending) {
  const DataDecl* decl = p.find_data(d);
  if (!decl) throw std::invalid_argument("unknown data type " + d);
  const CtorDecl* base = nullptr;
  const CtorDecl* rec = nullptr;
  size_t rec_fields = 0;
  for (const auto& c : decl->ctors) {
    size_t k = 0;
    for (const auto& f : c.fields) k += f.sort == Sort::of_data(d);
    if (k == 0 && !base) base = &c;
    if (k > 0 && !rec) {
      rec = &c;
      rec_fields = k;
    }
  }
  if (!base) throw std::invalid_argument("data type " + d + " has no base constructor");
  std::function<Value(const CtorDecl&, int64_t)> leaf = [&](const CtorDecl& c, int64_t key) {
    std::vector<Value> fs;
    for (const auto& f : c.fields) {
      if (f.sort.is_int()) fs.push_back(Value::integer(key));
      else if (f.sort.is_bool()) fs.push_back(Value::boolean(false));
      else if (f.sort.is_data() && f.sort.data != d) fs.push_back(build_data(p, f.sort.data, 0));
      else fs.push_back(Value{});
    }
    return Value::data(c.name, std::move(fs));
  };
  if (n <= 0 || !rec) return leaf(*base, 0);
  auto node = [&](int64_t key, std::vector<Value> subs) {
    Value v = leaf(*rec, key);
    size_t j = 0;
    for (size_t i = 0; i < rec->fields.size(); ++i)
      if (rec->fields[i].sort == Sort::of_data(d)) v.fields[i] = j < subs.size() ? std::move(subs[j++]) : leaf(*base, 0);
    return v;
  };
  if (rec_fields == 1) {
    Value acc = leaf(*base, 0);
    for (int64_t i = n; i >= 1; --i) acc = node(descending ? n + 1 - i : i, {std::move(acc)});
    return acc;
  }
  std::function<Value(int64_t, int64_t)> tree = [&](int64_t lo, int64_t hi) -> Value {
    if (lo > hi) return leaf(*base, 0);
    int64_t mid = lo + (hi - lo) / 2;
    return node(mid, {tree(lo, mid - 1), tree(mid + 1, hi)});
  };
  return tree(1, n);
}

std::vector<std::vector<Value>> generate_inputs(const SynthesisProblem& p, const std::vector<int64_t>& sizes) {
  const auto& params = p.goal.type.params;
  auto sit = p.sizes.find(p.goal_name);
  if (sit == p.sizes.end()) throw std::invalid_argument("goal has no size function");
  const SizeFunction& sf = sit->second;
  Theory th = Theory::from_problem(p);
  LogicEvaluator ev(th);
  std::vector<std::vector<Value>> out;
  for (int64_t n : sizes) {
    std::vector<std::vector<Value>> choices;
    for (size_t i = 0; i < params.size(); ++i) {
      const Sort& s = params[i].second.base.sort;
      bool driving = i < sf.params.size() && mentions(sf.body, sf.params[i]);
      std::vector<Value> c;
      if (s.is_int()) {
        if (driving) c = {Value::integer(0), Value::integer(1), Value::integer(n), Value::integer(n + 1), Value::integer(n + 2)};
        else c = {Value::integer(0), Value::integer(3), Value::integer(n + 1)};
      } else if (s.is_bool()) {
        c = {Value::boolean(false), Value::boolean(true)};
      } else if (driving) {
        c = {build_data(p, s.data, n), build_data(p, s.data, n, true)};
        if (c[0] == c[1]) c.pop_back();
      } else {
        c = {build_data(p, s.data, 0), build_data(p, s.data, 3)};
      }
      choices.push_back(std::move(c));
    }
    std::vector<Value> cur;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == params.size()) {
        LModel m;
        for (size_t j = 0; j < sf.params.size() && j < cur.size(); ++j) m[sf.params[j]] = to_lval(cur[j]);
        auto size = ev.eval(sf.body, m);
        if (!size || size->kind != LVal::Kind::Int || size->i == n) out.push_back(cur);
        return;
      }
      for (const auto& v : choices[i]) {
        LModel m;
        for (size_t j = 0; j < i; ++j) m[params[j].first] = to_lval(cur[j]);
        m[kNu] = to_lval(v);
        auto ok = ev.eval(params[i].second.refinement, m);
        if (ok && ok->kind == LVal::Kind::Bool && ok->i == 0) continue;
        cur.push_back(v);
        rec(i + 1);
        cur.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

}  // namespace recsynth
