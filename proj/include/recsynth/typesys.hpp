#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recsynth/problem.hpp"
#include "recsynth/validity.hpp"

namespace recsynth {

// Correlation variable of the tree pattern ([1,l],[1,u-1-l]).
inline constexpr const char* kCorr = "_l";

enum class PatternId { MasterLog, MasterNLogN, AkraBazzi, CFiniteLinear, CFiniteQuadratic, TreeCorrelated, NonRecursive };

std::string pattern_name(PatternId id);

// Instantiation range of the parameter d: divide patterns use [div_min, div_max],
// subtract patterns [sub_min, sub_max].
struct PatternRange {
  int div_min = 2;
  int div_max = 3;
  int sub_min = 1;
  int sub_max = 2;
};

// A function bound together with the body annotation that establishes it.
struct Pattern {
  PatternId id = PatternId::NonRecursive;
  int d = 0;
  BoundExpr bound;
  Annotation body;
};

// Body annotations whose bound class equals psi, fewest recursive calls first,
// ending with the non-recursive fallback ([ ]; O(psi)).
std::vector<Pattern> match_patterns(const BoundExpr& psi, const PatternRange& range = {});

// match_patterns(psi) followed by the recursive patterns of every smaller
// standard class (log u, u, u log u, u^2). Accepting at psi then implies
// accepting at any larger bound.
std::vector<Pattern> candidate_patterns(const BoundExpr& psi, const PatternRange& range = {});

// Subtracts `used` from the entries of `a` with the same size expression.
// Throws std::invalid_argument when a count would go negative or no entry matches.
Annotation update_cost(const Annotation& a, const std::vector<RecCost>& used);

// All ways of splitting the counts of `a` into `ways` parts with per-entry sums
// at most the original count. Every part keeps all size entries and the bound.
// Ordered by the first part's total count, then by decreasing overall total.
std::vector<std::vector<Annotation>> share(const Annotation& a, int ways);

// Parts whose counts add up exactly to the original.
std::vector<std::vector<Annotation>> exact_shares(const Annotation& a, int ways);

// Splits `phi` into `v = E` and the remaining conjuncts with E substituted for v.
std::optional<std::pair<LExpr, LExpr>> split_functional(const LExpr& phi);

struct TypingGoal {
  Environment env;
  AnnotatedType type;
};

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One application of the recursive function or an auxiliary inside an E-term.
struct CallSite {
  std::string head;
  bool recursive = false;
  std::vector<LExpr> args;  // logical values of the arguments
};

// Typing information for an E-term. Its refinement is `v = value && facts`;
// `ghosts` are the fresh variables the facts introduce.
struct Inference {
  BaseType base;
  LExpr value;
  LExpr facts;
  std::map<std::string, Sort> ghosts;
  std::vector<CallSite> calls;     // evaluation order
  std::vector<LExpr> obligations;  // argument refinements owed to callees, each under its arguments' facts

  LExpr refinement() const;
};

// Outcome of CheckE; the stage names the first failing check.
enum class EStage { Accepted, Count, Size, AuxBound, Refinement };

std::string stage_name(EStage s);

// The most recent failed E-term check inside a program check.
struct Rejection {
  EStage stage = EStage::Refinement;
  Term term;
  LExpr context;  // hypothesis of the context it was checked in
};

struct ECheck {
  EStage stage = EStage::Refinement;
  Inference inf;
  bool accepted() const { return stage == EStage::Accepted; }
};

struct TypeCheckerOptions {
  PatternRange range;
  // When false, CheckE skips the cost stages and only checks refinements.
  bool check_costs = true;
};

// Checks terms against annotated refinement types. Solver Unknown counts as
// failure. Holds a reference to the validity checker; not thread-safe.
class TypeChecker {
 public:
  TypeChecker(ProblemRef problem, Checker& checker, TypeCheckerOptions opts = {});

  Environment initial_env() const { return Environment::from_problem(problem_); }
  TypingGoal goal() const;

  bool subtype(const Environment& env, const AnnotatedType& a, const AnnotatedType& b);
  bool annotation_subtype(const Annotation& a, const Annotation& b);

  Inference infer(const Environment& env, const Term& e);
  AnnotatedType infer_eterm(const Environment& env, const Term& e);

  ECheck check_e(const Environment& env, const Term& e, const AnnotatedType& goal);
  bool check_term(const TypingGoal& goal, const Term& t);
  // T-Abs: the first pattern under which the body checks.
  std::optional<Pattern> check_fix(const TypingGoal& goal, const Term& fix);

  // Context and body goal produced by T-Abs for a given body annotation.
  TypingGoal enter_fix(const TypingGoal& goal, const std::string& f, const std::vector<std::string>& params,
                       const Annotation& body) const;
  // Path condition established by a guard that evaluates to `taken`.
  static LExpr guard_path(const Inference& guard, bool taken);
  // Context of the case `ctor vars` for a scrutinee with the given inference.
  Environment case_env(const Environment& env, const Inference& scrut, const std::string& ctor,
                       const std::vector<std::string>& vars) const;

  // Conjunction of binding refinements and path conditions.
  LExpr hypothesis(const Environment& env) const;
  // hyp(env) && extra ==> concl over the variables it mentions.
  ValidityQuery query(const Environment& env, const LExpr& extra, const LExpr& concl,
                      const std::map<std::string, Sort>& more = {}, std::optional<Sort> nu = std::nullopt) const;
  // Validity of hyp(env) && extra ==> concl, with v of sort `nu` when given.
  bool valid(const Environment& env, const LExpr& extra, const LExpr& concl,
             const std::map<std::string, Sort>& more = {}, std::optional<Sort> nu = std::nullopt);

  const Theory& theory() const { return *theory_; }
  std::shared_ptr<const Theory> theory_ptr() const { return theory_; }
  const SynthesisProblem& problem() const { return *problem_; }
  ProblemRef problem_ref() const { return problem_; }
  Checker& checker() { return checker_; }
  const TypeCheckerOptions& options() const { return opts_; }
  // Set by check_term and check_fix when they reject; cleared when they start.
  const std::optional<Rejection>& last_rejection() const { return rejection_; }
  void set_check_costs(bool on) { opts_.check_costs = on; }

 private:
  bool size_dominated(const LExpr& a, const LExpr& b);
  bool check_i(const TypingGoal& goal, const Term& t);
  ECheck check_e_noted(const Environment& env, const Term& e, const AnnotatedType& goal);
  bool check_rec_sites(const Environment& env, const Inference& inf, const Annotation& ann);
  bool check_aux_sites(const Environment& env, const Inference& inf, const BoundExpr& psi);

  ProblemRef problem_;
  std::shared_ptr<const Theory> theory_;
  Checker& checker_;
  TypeCheckerOptions opts_;
  std::optional<Rejection> rejection_;
};

}  // namespace recsynth
