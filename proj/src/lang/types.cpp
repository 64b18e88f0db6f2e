#include "recsynth/types.hpp"

#include <sstream>
#include <stdexcept>

#include "recsynth/problem.hpp"

namespace recsynth {

int Annotation::total_count() const {
  int n = 0;
  for (const auto& c : costs) n += c.count;
  return n;
}

std::string print_scalar(const ScalarType& s) {
  if (is_true(s.refinement)) return s.base.sort.name();
  return "{" + s.base.sort.name() + " | " + print_logic(s.refinement) + "}";
}

std::string print_rtype(const RType& t) {
  std::ostringstream os;
  for (const auto& [n, s] : t.params) os << n << ":" << print_scalar(s) << " -> ";
  os << print_scalar(t.result);
  return os.str();
}

std::string print_annotation(const Annotation& a) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < a.costs.size(); ++i) {
    if (i) os << ", ";
    os << '[' << a.costs[i].count << ", " << print_logic(a.costs[i].size) << ']';
  }
  os << "; " << print_bound_o(a.bound) << ')';
  return os.str();
}

std::string print_annotated(const AnnotatedType& g) {
  return "<" + print_rtype(g.type) + ", " + print_annotation(g.ann) + ">";
}

bool annotation_equal(const Annotation& a, const Annotation& b) {
  if (a.costs.size() != b.costs.size() || a.bound != b.bound) return false;
  for (size_t i = 0; i < a.costs.size(); ++i)
    if (a.costs[i].count != b.costs[i].count || !lequal(a.costs[i].size, b.costs[i].size)) return false;
  return true;
}

LExpr SizeFunction::apply(const std::vector<LExpr>& args) const {
  if (args.size() != params.size()) throw std::invalid_argument("size function arity mismatch");
  std::map<std::string, LExpr> m;
  for (size_t i = 0; i < params.size(); ++i) m[params[i]] = args[i];
  return subst_logic_all(body, m);
}

const DataDecl* SynthesisProblem::find_data(const std::string& n) const {
  for (const auto& d : data)
    if (d.name == n) return &d;
  return nullptr;
}

const MeasureDecl* SynthesisProblem::find_measure(const std::string& n) const {
  for (const auto& m : measures)
    if (m.name == n) return &m;
  return nullptr;
}

const AuxDecl* SynthesisProblem::find_aux(const std::string& n) const {
  for (const auto& a : auxiliaries)
    if (a.name == n) return &a;
  return nullptr;
}

std::pair<const DataDecl*, const CtorDecl*> SynthesisProblem::find_ctor(const std::string& n) const {
  for (const auto& d : data)
    for (const auto& c : d.ctors)
      if (c.name == n) return {&d, &c};
  return {nullptr, nullptr};
}

Environment Environment::from_problem(ProblemRef p) {
  Environment e;
  e.problem = p;
  e.sizes = p->sizes;
  for (const auto& a : p->auxiliaries) e.bindings.push_back({a.name, a.type});
  return e;
}

const Binding* Environment::lookup(const std::string& n) const {
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
    if (it->name == n) return &*it;
  return nullptr;
}

Environment Environment::with_binding(const std::string& n, AnnotatedType t) const {
  Environment e = *this;
  e.bindings.push_back({n, std::move(t)});
  return e;
}

Environment Environment::with_path(LExpr phi) const {
  Environment e = *this;
  e.path.push_back(std::move(phi));
  return e;
}

Environment Environment::with_ghosts(const std::map<std::string, Sort>& g) const {
  Environment e = *this;
  e.ghosts.insert(g.begin(), g.end());
  return e;
}

Environment Environment::with_rec(const std::string& f, std::vector<std::string> a) const {
  if (rec_fun) throw std::logic_error("recFun already set");
  Environment e = *this;
  e.rec_fun = f;
  e.args = std::move(a);
  return e;
}

LExpr Environment::top_size() const {
  if (!rec_fun) throw std::logic_error("no recursive function in scope");
  auto it = sizes.find(*rec_fun);
  if (it == sizes.end()) throw std::logic_error("no size function for " + *rec_fun);
  std::vector<LExpr> as;
  for (const auto& a : args) as.push_back(lx::var(a));
  return it->second.apply(as);
}

}  // namespace recsynth
