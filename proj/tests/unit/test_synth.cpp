#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "recsynth/parser.hpp"
#include "recsynth/semantics.hpp"
#include "recsynth/synth.hpp"

using namespace recsynth;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemRef load_problem(const std::string& name) {
  return std::make_shared<const SynthesisProblem>(parse_problem(slurp(RECSYNTH_CORPUS_DIR "/" + name)));
}

ProblemRef with_bound(const ProblemRef& p, const BoundExpr& b) {
  auto q = std::make_shared<SynthesisProblem>(*p);
  q->goal.ann.bound = b;
  return q;
}

std::vector<std::string> params_of(const SynthesisProblem& p) {
  std::vector<std::string> out;
  for (const auto& [n, s] : p.goal.type.params) out.push_back(n);
  return out;
}

struct Fixture {
  explicit Fixture(const std::string& file = "prod.problem", SearchConfig cfg = {})
      : problem(load_problem(file)), synth(problem, checker, cfg) {}

  // Body context of the goal under its first candidate pattern.
  TypingGoal body() {
    TypeChecker& tc = synth.type_checker();
    Pattern p = candidate_patterns(problem->goal.ann.bound).front();
    return tc.enter_fix(tc.goal(), problem->goal_name, params_of(*problem), p.body);
  }

  ProblemRef problem;
  Checker checker{std::make_shared<Z3Process>()};
  Synthesizer synth;
};

std::set<std::string> printed(const std::vector<Term>& ts) {
  std::set<std::string> s;
  for (const auto& t : ts) s.insert(pretty_print(t));
  return s;
}

// Every well-sorted application term over the problem's signatures up to
// `depth` nested applications, independent of the search's enumerator.
std::set<std::string> closure(const SynthesisProblem& p, const Environment& env, int depth, const Sort& want) {
  struct Sig {
    std::string name;
    std::vector<Sort> args;
    Sort result;
  };
  std::vector<Sig> sigs;
  auto add_fun = [&](const std::string& n, const RType& t) {
    Sig s{n, {}, t.result.base.sort};
    for (const auto& [pn, pt] : t.params) s.args.push_back(pt.base.sort);
    sigs.push_back(s);
  };
  for (const auto& a : p.auxiliaries) add_fun(a.name, a.type.type);
  add_fun(p.goal_name, p.goal.type);
  const Sort i = Sort::integer(), b = Sort::boolean();
  sigs.push_back({"<=", {i, i}, b});
  sigs.push_back({"==", {i, i}, b});
  sigs.push_back({"==", {b, b}, b});

  std::map<std::string, std::vector<Term>> level;  // by sort name
  for (const auto& bd : env.bindings)
    if (!bd.type.type.is_arrow()) level[bd.type.type.result.base.sort.name()].push_back(tm::var(bd.name));
  level[i.name()].push_back(tm::num(0));
  level[b.name()].push_back(tm::boolean(true));
  level[b.name()].push_back(tm::boolean(false));
  for (int d = 1; d <= depth; ++d) {
    auto next = level;
    for (const auto& s : sigs) {
      std::vector<std::vector<Term>> args{{}};
      for (const auto& a : s.args) {
        std::vector<std::vector<Term>> grown;
        for (const auto& prefix : args)
          for (const auto& t : level[a.name()]) {
            auto q = prefix;
            q.push_back(t);
            grown.push_back(std::move(q));
          }
        args = std::move(grown);
      }
      for (auto& a : args) next[s.result.name()].push_back(tm::app(s.name, std::move(a)));
    }
    level = std::move(next);
  }
  return printed(level[want.name()]);
}

// ---- enumerate_e

TEST(Synth, EnumerateIntDepthTwoWithinGrammarClosure) {
  Fixture f;
  Environment env = f.body().env;
  auto ts = f.synth.enumerate_e(env, 2, BaseType::integer());
  auto got = printed(ts);
  for (const char* t : {"x", "y", "0", "dec x", "div2 x", "plus x y"}) EXPECT_TRUE(got.count(t)) << t;
  auto oracle = closure(*f.problem, env, 2, Sort::integer());
  for (const auto& t : got) EXPECT_TRUE(oracle.count(t)) << t;
  EXPECT_EQ(got.size(), ts.size());
}

TEST(Synth, EnumerateNondecreasingSize) {
  Fixture f;
  auto ts = f.synth.enumerate_e(f.body().env, 2, BaseType::integer());
  size_t prev = 0;
  for (const auto& t : ts) {
    size_t n = static_cast<size_t>(term_size(t));
    EXPECT_LE(prev, n) << pretty_print(t);
    prev = n;
  }
}

TEST(Synth, EnumerateBoolDepthOneAtoms) {
  auto p = std::make_shared<const SynthesisProblem>(
      parse_problem("size f = \\b. 0\ngoal f :: b:Bool -> {Bool | v = b}, O(1)\n"));
  Checker ch(std::make_shared<Z3Process>());
  Synthesizer s(p, ch);
  TypeChecker& tc = s.type_checker();
  Environment env = tc.enter_fix(tc.goal(), "f", {"b"}, {{}, BoundExpr::constant()}).env;
  auto ts = s.enumerate_e(env, 1, BaseType::boolean());
  std::set<std::string> atoms;
  for (const auto& t : ts)
    if (t->kind != TKind::App) atoms.insert(pretty_print(t));
  EXPECT_EQ(atoms, (std::set<std::string>{"true", "false", "b"}));
  auto oracle = closure(*p, env, 1, Sort::boolean());
  for (const auto& t : printed(ts)) EXPECT_TRUE(oracle.count(t)) << t;
}

TEST(Synth, EnumerateDeterministic) {
  Fixture a, b;
  auto x = a.synth.enumerate_e(a.body().env, 3, BaseType::integer());
  auto y = b.synth.enumerate_e(b.body().env, 3, BaseType::integer());
  ASSERT_EQ(x.size(), y.size());
  for (size_t i = 0; i < x.size(); ++i) EXPECT_EQ(pretty_print(x[i]), pretty_print(y[i]));
}

TEST(Synth, EnumerateRejectsDepthZero) {
  Fixture f;
  EXPECT_THROW(f.synth.enumerate_e(f.body().env, 0, BaseType::integer()), std::invalid_argument);
}

// ---- check_e

TEST(Synth, CheckEOddCase) {
  Fixture f;
  TypingGoal g = f.body();
  Environment env = g.env.with_path(parse_logic("!(x = 0) && x mod 2 = 1"));
  EXPECT_TRUE(f.synth.check_e(parse_term("plus y (double (prod (div2 x) y))"), env, g.type));
}

TEST(Synth, CheckEPredecessorCallTooLarge) {
  Fixture f;
  TypingGoal g = f.body();
  Environment env = g.env.with_path(parse_logic("!(x = 0) && x mod 2 = 1"));
  EXPECT_FALSE(f.synth.check_e(parse_term("plus y (prod (dec x) y)"), env, g.type));
  // The size query x - 1 <= x / 2 fails at x = 3.
  ECheck r = f.synth.type_checker().check_e(env, parse_term("plus y (prod (dec x) y)"), g.type);
  EXPECT_EQ(r.stage, EStage::Size);
}

TEST(Synth, CheckETwoCallsFailCountingWithoutSolver) {
  Fixture f;
  TypingGoal g = f.body();
  const long before = f.checker.stats().solver_calls;
  ECheck r = f.synth.type_checker().check_e(g.env, parse_term("plus (prod (div2 x) y) (prod (div2 x) y)"), g.type);
  EXPECT_EQ(r.stage, EStage::Count);
  EXPECT_FALSE(f.synth.check_e(parse_term("plus (prod (div2 x) y) (prod (div2 x) y)"), g.env, g.type));
  EXPECT_EQ(f.checker.stats().solver_calls, before);
}

// ---- generate_e

TEST(Synth, GenerateEZeroCase) {
  Fixture f;
  TypingGoal g = f.body();
  auto t = f.synth.generate_e(g.env.with_path(parse_logic("x = 0")), g.type, 4);
  ASSERT_TRUE(t);
  EXPECT_EQ(pretty_print(*t), "x");
}

TEST(Synth, GenerateEUnsatisfiableGoal) {
  Fixture f;
  TypingGoal g = f.body();
  AnnotatedType goal{RType::scalar({BaseType::integer(), parse_logic("v = x && v = x + 1")}), g.type.ann};
  EXPECT_FALSE(f.synth.generate_e(g.env, goal, 2));
}

TEST(Synth, GenerateEEvenCase) {
  Fixture f;
  TypingGoal g = f.body();
  auto t = f.synth.generate_e(g.env.with_path(parse_logic("!(x = 0) && x mod 2 = 0")), g.type, 4);
  ASSERT_TRUE(t);
  EXPECT_EQ(pretty_print(*t), "double (prod (div2 x) y)");
}

// ---- generate_i

TEST(Synth, GenerateIProdPassesCheck) {
  Fixture f;
  TypingGoal g = f.body();
  auto t = f.synth.generate_i(g.env, g.type, 3, 1);
  ASSERT_TRUE(t);
  TypeChecker& tc = f.synth.type_checker();
  EXPECT_TRUE(tc.check_term(tc.goal(), tm::fix("prod", {"x", "y"}, *t))) << pretty_print(*t);
  EXPECT_NE(pretty_print(*t).find("prod (div2 x)"), std::string::npos) << pretty_print(*t);
}

TEST(Synth, GenerateIIdentityNeedsNoBranch) {
  Fixture f;
  TypingGoal g = f.body();
  AnnotatedType goal{RType::scalar({BaseType::integer(), parse_logic("v = x")}), {{}, BoundExpr::constant()}};
  auto t = f.synth.generate_i(g.env, goal, 3, 1);
  ASSERT_TRUE(t);
  EXPECT_EQ(pretty_print(*t), "x");
}

TEST(Synth, GenerateIAppendMatches) {
  Fixture f("append.problem");
  TypingGoal g = f.body();
  auto t = f.synth.generate_i(g.env, g.type, 4, 1);
  ASSERT_TRUE(t);
  EXPECT_EQ((*t)->kind, TKind::Match) << pretty_print(*t);
  TypeChecker& tc = f.synth.type_checker();
  EXPECT_TRUE(tc.check_term(tc.goal(), tm::fix("append", {"xs", "ys"}, *t)));
}

// ---- synthesize

void expect_fits(const SynthesisProblem& p, const Term& prog, const BoundExpr& b) {
  auto inputs = generate_inputs(p, size_ladder(b));
  auto samples = measure(prog, make_defs(p), Theory::from_problem(p), p.sizes.at(p.goal_name), inputs);
  EXPECT_TRUE(fit_bound(samples, b).pass) << print_program(prog);
}

TEST(Synth, SynthesizeProdLog) {
  Fixture f;
  SynthResult r = f.synth.synthesize();
  ASSERT_EQ(r.outcome, SynthOutcome::Synthesized);
  ASSERT_TRUE(r.program && r.pattern);
  EXPECT_EQ(r.pattern->id, PatternId::MasterLog);
  TypeChecker& tc = f.synth.type_checker();
  EXPECT_TRUE(tc.check_term(tc.goal(), *r.program));
  expect_fits(*f.problem, *r.program, BoundExpr::log());
  EXPECT_LE(r.stats.eterms_rejected_by_cost, r.stats.eterms_enumerated);
  EXPECT_LE(r.stats.solver_calls, r.stats.validity_queries);
}

TEST(Synth, SynthesizeProdConstantHasNoSolution) {
  Checker ch(std::make_shared<Z3Process>());
  SynthResult r = synthesize(with_bound(load_problem("prod.problem"), BoundExpr::constant()), {}, ch);
  EXPECT_EQ(r.outcome, SynthOutcome::NoSolution);
  EXPECT_FALSE(r.program);
}

TEST(Synth, SynthesizeProdLinearFits) {
  auto p = with_bound(load_problem("prod.problem"), BoundExpr::linear());
  Checker ch(std::make_shared<Z3Process>());
  SynthResult r = synthesize(p, {}, ch);
  ASSERT_EQ(r.outcome, SynthOutcome::Synthesized);
  expect_fits(*p, *r.program, BoundExpr::linear());
}

TEST(Synth, TimeoutIsDistinctOutcome) {
  SearchConfig cfg;
  cfg.timeout_ms = 1;
  Checker ch(std::make_shared<Z3Process>());
  SynthResult r = synthesize(load_problem("binary_search.problem"), cfg, ch);
  EXPECT_EQ(r.outcome, SynthOutcome::Timeout);
  EXPECT_EQ(outcome_name(r.outcome), "timeout");
}

// ---- properties

TEST(SynthProperty, Deterministic) {
  Checker c1(std::make_shared<Z3Process>()), c2(std::make_shared<Z3Process>());
  SynthResult a = synthesize(load_problem("prod.problem"), {}, c1);
  SynthResult b = synthesize(load_problem("prod.problem"), {}, c2);
  ASSERT_TRUE(a.program && b.program);
  EXPECT_EQ(print_program(*a.program), print_program(*b.program));
  EXPECT_EQ(a.stats.eterms_enumerated, b.stats.eterms_enumerated);
  EXPECT_EQ(a.stats.eterms_rejected_by_cost, b.stats.eterms_rejected_by_cost);
  EXPECT_EQ(a.stats.validity_queries, b.stats.validity_queries);
}

TEST(SynthProperty, PruningNeverEnumeratesMore) {
  bool strict = false;
  for (const char* file : {"prod.problem", "append.problem", "replicate.problem", "is_member.problem"}) {
    SearchConfig on, off;
    off.pruning = false;
    Checker c1(std::make_shared<Z3Process>()), c2(std::make_shared<Z3Process>());
    SynthResult a = synthesize(load_problem(file), on, c1);
    SynthResult b = synthesize(load_problem(file), off, c2);
    ASSERT_EQ(a.outcome, SynthOutcome::Synthesized) << file;
    ASSERT_EQ(b.outcome, SynthOutcome::Synthesized) << file;
    EXPECT_LE(a.stats.eterms_enumerated, b.stats.eterms_enumerated) << file;
    if (std::string(file) == "prod.problem") EXPECT_LT(a.stats.eterms_enumerated, b.stats.eterms_enumerated);
    strict = strict || a.stats.eterms_enumerated < b.stats.eterms_enumerated;
    // Without pruning the program still has to pass the full check.
    TypeChecker tc(load_problem(file), c2);
    EXPECT_TRUE(tc.check_term(tc.goal(), *b.program)) << file;
  }
  EXPECT_TRUE(strict);
}

struct CorpusCase {
  std::string file;
  PatternId pattern;
};

void PrintTo(const CorpusCase& c, std::ostream* os) { *os << c.file; }

class CorpusSoundness : public ::testing::TestWithParam<CorpusCase> {};

TEST_P(CorpusSoundness, SynthesizedProgramChecksAndFits) {
  const CorpusCase& c = GetParam();
  ProblemRef p = load_problem(c.file);
  Checker ch(std::make_shared<Z3Process>());
  SynthResult r = synthesize(p, {}, ch);
  ASSERT_EQ(r.outcome, SynthOutcome::Synthesized) << c.file;
  EXPECT_EQ(r.pattern->id, c.pattern) << pattern_name(r.pattern->id);
  TypeChecker tc(p, ch);
  EXPECT_TRUE(tc.check_term(tc.goal(), *r.program));
  expect_fits(*p, *r.program, p->goal.ann.bound);
  EXPECT_LE(r.stats.eterms_rejected_by_cost, r.stats.eterms_enumerated);
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusSoundness,
                         ::testing::Values(CorpusCase{"is_empty.problem", PatternId::NonRecursive},
                                           CorpusCase{"is_member.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"replicate.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"append.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"take.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"reverse.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"insert_sorted.problem", PatternId::CFiniteLinear},
                                           CorpusCase{"insertion_sort.problem", PatternId::CFiniteQuadratic},
                                           CorpusCase{"tree_count.problem", PatternId::TreeCorrelated},
                                           CorpusCase{"prod.problem", PatternId::MasterLog},
                                           CorpusCase{"binary_search.problem", PatternId::MasterLog}),
                         [](const auto& info) {
                           std::string n = info.param.file;
                           return n.substr(0, n.find('.'));
                         });

}  // namespace
