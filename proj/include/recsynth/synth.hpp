#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/typesys.hpp"

namespace recsynth {

struct SearchConfig {
  int depth = 4;        // application nesting of E-terms; atoms have depth 0
  int max_size = 8;     // node count of E-terms
  int match_bound = 1;  // nested matches
  int branch_bound = 2; // conditionals along one else-chain
  int64_t timeout_ms = 600000;
  PatternRange range;
  // When false, cost annotations are not used while searching (recursive calls
  // still have to decrease the size); they are checked on complete programs.
  bool pruning = true;
  int samples = 24;  // concrete environments used for equivalence and refutation, at most 64
};

struct SearchStats {
  long eterms_enumerated = 0;
  long eterms_rejected_by_cost = 0;
  long validity_queries = 0;
  long solver_calls = 0;
  double elapsed_ms = 0;
};

enum class SynthOutcome { Synthesized, NoSolution, Timeout };
std::string outcome_name(SynthOutcome o);

struct SynthResult {
  SynthOutcome outcome = SynthOutcome::NoSolution;
  std::optional<Term> program;   // Fix term named after the goal
  std::optional<Pattern> pattern;
  SearchStats stats;
};

// Type-directed enumerative search. Deterministic for a given problem and
// configuration. Not thread-safe.
class Synthesizer {
 public:
  Synthesizer(ProblemRef problem, Checker& checker, SearchConfig cfg = {});
  ~Synthesizer();
  Synthesizer(const Synthesizer&) = delete;
  Synthesizer& operator=(const Synthesizer&) = delete;

  // E-terms of type `base` over env, by nondecreasing size, keeping the first
  // of each group that agrees on sampled environments.
  std::vector<Term> enumerate_e(const Environment& env, int depth, const BaseType& base);
  bool check_e(const Term& t, const Environment& env, const AnnotatedType& goal);
  std::optional<Term> generate_e(const Environment& env, const AnnotatedType& goal, int depth);
  std::optional<Term> generate_i(const Environment& env, const AnnotatedType& goal, int depth, int m);
  SynthResult synthesize();

  TypeChecker& type_checker();
  const SearchStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper owning the type checker.
SynthResult synthesize(ProblemRef problem, const SearchConfig& cfg, Checker& checker);

}  // namespace recsynth
