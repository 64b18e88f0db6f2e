#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/problem.hpp"

namespace recsynth {

// Concrete value of a logical expression.
struct LVal {
  enum class Kind { Int, Bool, Data };
  Kind kind = Kind::Int;
  int64_t i = 0;  // Int value, or 0/1 for Bool
  std::string ctor;
  std::vector<LVal> fields;

  static LVal integer(int64_t v) { return {Kind::Int, v, {}, {}}; }
  static LVal boolean(bool b) { return {Kind::Bool, b ? 1 : 0, {}, {}}; }
  static LVal data(std::string c, std::vector<LVal> f) { return {Kind::Data, 0, std::move(c), std::move(f)}; }

  bool operator==(const LVal& o) const { return kind == o.kind && i == o.i && ctor == o.ctor && fields == o.fields; }
  bool operator!=(const LVal& o) const { return !(*this == o); }
  bool operator<(const LVal& o) const;
};

std::string print_lval(const LVal& v);

using LModel = std::map<std::string, LVal>;

// Data declarations, measures and measure axioms shared by every query of a problem.
struct Theory {
  std::vector<DataDecl> data;
  std::vector<MeasureDecl> measures;
  std::vector<Axiom> axioms;

  static Theory from_problem(const SynthesisProblem& p);
  const DataDecl* find_data(const std::string& n) const;
  const MeasureDecl* find_measure(const std::string& n) const;
  std::pair<const DataDecl*, const CtorDecl*> find_ctor(const std::string& n) const;
  // Sort of an application head (measure result or constructor's data type).
  std::optional<Sort> app_sort(const std::string& head) const;
};

// Evaluates `e` under `m` with SMT-LIB integer semantics (Euclidean div/mod,
// division by zero and overflow are undefined). Measures are evaluated by
// unfolding axioms of the form `m ... (C x1 .. xn) ... = rhs`. Returns nullopt
// when the value is undefined or a variable is unassigned.
std::optional<LVal> eval_logic(const Theory& th, const LExpr& e, const LModel& m);

// Same as eval_logic, with the measure definitions indexed once.
class LogicEvaluator {
 public:
  explicit LogicEvaluator(const Theory& th);
  ~LogicEvaluator();
  LogicEvaluator(const LogicEvaluator&) = delete;
  LogicEvaluator& operator=(const LogicEvaluator&) = delete;
  std::optional<LVal> eval(const LExpr& e, const LModel& m) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Sort of `e` given variable sorts; nullopt if it cannot be determined.
std::optional<Sort> sort_of(const Theory& th, const LExpr& e, const std::map<std::string, Sort>& vars);

// All values of data type `d` with constructor nesting at most `depth`, Int
// fields drawn from `ints`, capped at `limit` values.
std::vector<LVal> enumerate_data(const Theory& th, const std::string& d, int depth,
                                 const std::vector<int64_t>& ints, size_t limit);

}  // namespace recsynth
