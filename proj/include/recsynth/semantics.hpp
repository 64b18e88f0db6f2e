#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "recsynth/logic_eval.hpp"
#include "recsynth/problem.hpp"

namespace recsynth {

inline constexpr int64_t kDefaultFuel = 10'000'000;

struct Value {
  enum class Kind { Int, Bool, Data, Closure };
  Kind kind = Kind::Int;
  int64_t i = 0;  // Int value, or 0/1 for Bool
  std::string ctor;
  std::vector<Value> fields;
  Term closure;  // Fix term when Closure

  static Value integer(int64_t v) { return {Kind::Int, v, {}, {}, nullptr}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0, {}, {}, nullptr}; }
  static Value data(std::string c, std::vector<Value> f) { return {Kind::Data, 0, std::move(c), std::move(f), nullptr}; }
  static Value fun(Term fix) { return {Kind::Closure, 0, {}, {}, std::move(fix)}; }

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }
};

std::string print_value(const Value& v);
Term value_to_term(const Value& v);
bool is_value(const Term& t);
// Value denoted by a value term; throws std::invalid_argument otherwise.
Value term_to_value(const Term& t);
// Closures have no logical counterpart and are rejected.
LVal to_lval(const Value& v);

// Function definitions by name, each a Fix term.
using Defs = std::map<std::string, Term>;

// Auxiliary implementations, each wrapped so that every call costs one tick.
Defs make_defs(const SynthesisProblem& p);
void add_program(Defs& defs, const Term& fix);

struct Configuration {
  Term term;
  int64_t cost = 0;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { Stuck, FuelExhausted };
  EvalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// One reduction step. Guards and scrutinees that are not yet values are
// reduced to values within the step, as in the rules for conditionals and
// matches; arguments take single steps. `fuel` is decremented per step taken,
// including nested ones.
Configuration step(const Configuration& cfg, const Defs& defs, int64_t& fuel);
Configuration step(const Configuration& cfg, const Defs& defs);

struct EvalResult {
  Value value;
  int64_t cost = 0;
  int64_t steps = 0;
};

// Small-step evaluation to a value.
EvalResult eval(const Term& t, const Defs& defs, int64_t fuel = kDefaultFuel);
// Environment-based big-step evaluation; same value and cost as eval, much faster.
EvalResult eval_fast(const Term& t, const Defs& defs, int64_t fuel = kDefaultFuel);
// Calls `f` (which must be in defs) on argument values.
EvalResult call(const std::string& f, const std::vector<Value>& args, const Defs& defs, int64_t fuel = kDefaultFuel,
                bool fast = true);

struct CostSample {
  int64_t size = 0;
  int64_t cost = 0;
};

// Runs `fix` on each input tuple and keeps the maximum cost per input size.
std::vector<CostSample> measure(const Term& fix, const Defs& aux, const Theory& th, const SizeFunction& size,
                                const std::vector<std::vector<Value>>& inputs, int64_t fuel = kDefaultFuel);

struct FitResult {
  bool pass = false;
  double witness = 0;  // largest tail ratio cost / bound(size)
};

inline constexpr double kTailTolerance = 1.25;

// Heuristic check that costs grow no faster than `psi`: over the upper half of
// the sizes, the largest ratio cost / max(psi(size), 1) is within 1.25 times
// the median ratio, or of the ratio at the smallest of those sizes. Needs at
// least 8 samples spanning 3 doublings of size.
FitResult fit_bound(std::vector<CostSample> samples, const BoundExpr& psi);

// Problem sizes used to measure a program against `psi`: powers of two up to
// 2^12 for logarithmic bounds, 2^10 below quadratic, 2^8 otherwise.
std::vector<int64_t> size_ladder(const BoundExpr& psi);

// A value of data type `d` whose recursive structure has `n` nodes: a chain
// for one recursive field, a balanced tree for more. Int fields hold keys
// 1..n in order, descending when `descending` is set.
Value build_data(const SynthesisProblem& p, const std::string& d, int64_t n, bool descending = false);

// Goal inputs for each size: data arguments mentioned by the size function are
// built at that size, integer ones range over values near 0 and the size, the
// others over a few small candidates. Tuples violating the goal's parameter
// refinements, or whose size is not the requested one, are dropped.
std::vector<std::vector<Value>> generate_inputs(const SynthesisProblem& p, const std::vector<int64_t>& sizes);

}  // namespace recsynth
