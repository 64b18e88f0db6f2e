#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "recsynth/parser.hpp"
#include "recsynth/validity.hpp"

using namespace recsynth;

namespace {

std::shared_ptr<const Theory> empty_theory() { return std::make_shared<Theory>(); }

std::shared_ptr<const Theory> list_theory() {
  SynthesisProblem p = parse_problem(
      "data List with len = Nil | Cons Int List\n"
      "measure sum :: List -> Int\n"
      "axiom len Nil = 0\n"
      "axiom len (Cons h t) = 1 + len t\n"
      "axiom sum Nil = 0\n"
      "axiom sum (Cons h t) = h + sum t\n"
      "size f = \\xs. len xs\n"
      "goal f :: xs:List -> Int, O(u)\n");
  return std::make_shared<Theory>(Theory::from_problem(p));
}

ValidityQuery int_query(const std::vector<std::string>& vars, const std::string& hyp, const std::string& concl,
                        std::shared_ptr<const Theory> th = empty_theory()) {
  ValidityQuery q;
  q.theory = std::move(th);
  for (const auto& v : vars) q.vars.emplace_back(v, Sort::integer());
  q.hypothesis = parse_logic(hyp);
  q.conclusion = parse_logic(concl);
  return q;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Checker solver_checker(bool concrete = false) {
  CheckerOptions o;
  o.concrete_refutation = concrete;
  return Checker(std::make_shared<Z3Process>(), o);
}

}  // namespace

TEST(Validity, HalvedArgumentIsValid) {
  Checker c = solver_checker();
  EXPECT_TRUE(c.check(int_query({"x", "y", "z", "w"}, "z = x / 2 && w = y", "z = x / 2")).is_valid());
  // The same query also passes through the solver when the precheck cannot fire.
  EXPECT_TRUE(c.check(int_query({"x", "y", "z", "w"}, "z = x / 2 && w = y", "2 * z <= x")).is_valid());
}

TEST(Validity, ThenBranchOfProd) {
  Checker c = solver_checker();
  auto q = int_query({"x", "y", "v"}, "x >= 0 && y >= 0 && v = x && x = 0", "v = x * y && x = 0");
  EXPECT_TRUE(c.check(q).is_valid());
  EXPECT_EQ(c.stats().solver_calls, 1);
}

TEST(Validity, ContradictionIsInvalidWithWitness) {
  Checker c = solver_checker();
  Verdict v = c.check(int_query({"x"}, "true", "x = x + 1"));
  ASSERT_EQ(v.kind, Verdict::Kind::Invalid);
  ASSERT_TRUE(v.model.count("x"));
  EXPECT_EQ(v.model.at("x").kind, LVal::Kind::Int);
}

TEST(Validity, CounterModelsFalsifyTheImplication) {
  Checker c = solver_checker();
  auto q = int_query({"x", "y"}, "0 <= x && x < y", "2 * x < y");
  Verdict v = c.check(q);
  ASSERT_EQ(v.kind, Verdict::Kind::Invalid);
  auto imp = eval_logic(*q.theory, lx::implies(q.hypothesis, q.conclusion), v.model);
  ASSERT_TRUE(imp.has_value());
  EXPECT_EQ(*imp, LVal::boolean(false));
}

TEST(Validity, MeasureAxiomsAreInstantiated) {
  Checker c = solver_checker();
  ValidityQuery q;
  q.theory = list_theory();
  q.vars = {{"xs", Sort::of_data("List")}, {"h", Sort::integer()}, {"t", Sort::of_data("List")}};
  q.hypothesis = parse_logic("xs = Cons h t");
  q.conclusion = parse_logic("len xs = 1 + len t && sum xs = h + sum t && 0 < len xs");
  EXPECT_TRUE(c.check(q).is_valid());
  q.conclusion = parse_logic("len t = 0");
  EXPECT_EQ(c.check(q).kind, Verdict::Kind::Invalid);
}

TEST(Validity, ConcreteRefutationAgreesWithSolver) {
  Checker concrete = solver_checker(true);
  auto q = int_query({"x", "y", "z"}, "x >= 0 && z = x / 2", "z < x");
  Verdict v = concrete.check(q);
  ASSERT_EQ(v.kind, Verdict::Kind::Invalid);
  EXPECT_EQ(concrete.stats().concrete_refuted, 1);
  EXPECT_EQ(concrete.stats().solver_calls, 0);
  EXPECT_EQ(*eval_logic(*q.theory, q.conclusion, v.model), LVal::boolean(false));
  Checker plain = solver_checker(false);
  EXPECT_EQ(plain.check(q).kind, Verdict::Kind::Invalid);
}

TEST(Validity, CacheServesRepeatedQueries) {
  Checker c = solver_checker();
  auto q = int_query({"x"}, "x > 3", "x > 2");
  EXPECT_TRUE(c.check(q).is_valid());
  EXPECT_TRUE(c.check(q).is_valid());
  EXPECT_EQ(c.stats().queries, 2);
  EXPECT_EQ(c.stats().solver_calls, 1);
  EXPECT_EQ(c.stats().cache_hits, 1);
}

TEST(Validity, UnknownIsNeverValid) {
  auto fixed = std::make_shared<FixedVerdict>(SolverReply::Status::Unknown);
  CheckerOptions o;
  o.concrete_refutation = false;
  Checker c(fixed, o);
  Verdict v = c.check(int_query({"x"}, "x > 3", "x > 2"));
  EXPECT_EQ(v.kind, Verdict::Kind::Unknown);
  EXPECT_EQ(fixed->calls(), 1);
  EXPECT_FALSE(check_poly_bound(c, int_query({"x", "v"}, "x >= 0 && v = x", "true"), {lx::var("x")},
                                lx::var("v"), parse_logic("x + 1"))
                   .is_valid());
}

TEST(Validity, MissingSolverBinaryIsAnError) {
  CheckerOptions o;
  o.concrete_refutation = false;
  Checker c(std::make_shared<Z3Process>(std::vector<std::string>{"/nonexistent/solver-binary"}), o);
  EXPECT_THROW(c.check(int_query({"x"}, "x > 3", "x > 2")), SolverError);
}

TEST(Validity, MalformedReplyIsAnError) {
  CheckerOptions o;
  o.concrete_refutation = false;
  // `cat` echoes the query back, which is not a status token.
  Checker c(std::make_shared<Z3Process>(std::vector<std::string>{"cat"}), o);
  EXPECT_THROW(c.check(int_query({"x"}, "x > 3", "x > 2")), SolverError);
}

TEST(Validity, SolverTimeoutIsUnknown) {
  CheckerOptions o;
  o.concrete_refutation = false;
  o.timeout_ms = 1;
  // `sleep` never answers; the deadline expires and the process is restarted.
  auto backend = std::make_shared<Z3Process>(std::vector<std::string>{"sleep", "30"});
  SolverReply r = backend->solve("(check-sat)\n", {}, 1);
  EXPECT_EQ(r.status, SolverReply::Status::Unknown);
}

TEST(EmitQuery, GoldenHalvedArgument) {
  std::string text = emit_query(int_query({"x", "y", "z", "w"}, "z = x / 2 && w = y", "z = x / 2"));
  const std::string path = RECSYNTH_GOLDEN_DIR "/prod_recapp.query";
  if (std::getenv("RECSYNTH_UPDATE_GOLDEN")) {
    std::ofstream(path) << text;
  }
  EXPECT_EQ(text, slurp(path));
}

TEST(EmitQuery, NoAxiomsGivesHeaderAndOneAssertion) {
  std::string text = emit_query(int_query({"x"}, "x > 3", "x > 2"));
  EXPECT_EQ(text,
            "; recsynth validity query\n"
            "(declare-const v_x Int)\n"
            "(assert (and (< 3 v_x) (not (< 2 v_x))))\n"
            "(check-sat)\n");
}

TEST(EmitQuery, Deterministic) {
  auto a = int_query({"x", "y"}, "x >= 0 && y = ceil(x / 2)", "y <= x");
  auto b = int_query({"x", "y"}, "x >= 0 && y = ceil(x / 2)", "y <= x");
  EXPECT_EQ(emit_query(a), emit_query(b));
  ValidityQuery l;
  l.theory = list_theory();
  l.vars = {{"xs", Sort::of_data("List")}, {"h", Sort::integer()}, {"t", Sort::of_data("List")}};
  l.hypothesis = parse_logic("xs = Cons h t");
  l.conclusion = parse_logic("len xs = 1 + len t");
  EXPECT_EQ(emit_query(l), emit_query(l));
  EXPECT_NE(emit_query(l).find("(assert (= (f_len (C_Cons v_h v_t)) (+ 1 (f_len v_t))))"), std::string::npos);
  EXPECT_NE(emit_query(l).find("(assert (<= 0 (f_len v_xs)))"), std::string::npos);
}

TEST(EmitQuery, UndeclaredVariableIsRejected) {
  EXPECT_THROW(emit_query(int_query({"x"}, "x > y", "true")), std::invalid_argument);
}

TEST(LogicEval, SmtIntegerSemantics) {
  auto th = empty_theory();
  auto ev = [&](const std::string& s) { return eval_logic(*th, parse_logic(s), {})->i; };
  EXPECT_EQ(ev("(-7) / 2"), -4);
  EXPECT_EQ(ev("(-7) mod 2"), 1);
  EXPECT_EQ(ev("7 / (-2)"), -3);
  EXPECT_EQ(ev("7 mod (-2)"), 1);
  EXPECT_EQ(ev("ceil(7 / 2)"), 4);
  EXPECT_EQ(ev("ceil(8 / 2)"), 4);
  EXPECT_FALSE(eval_logic(*th, parse_logic("1 / 0"), {}).has_value());
}

TEST(LogicEval, MeasuresUnfoldAxioms) {
  auto th = list_theory();
  LModel m{{"xs", LVal::data("Cons", {LVal::integer(4), LVal::data("Cons", {LVal::integer(5), LVal::data("Nil", {})})})}};
  EXPECT_EQ(eval_logic(*th, parse_logic("len xs"), m)->i, 2);
  EXPECT_EQ(eval_logic(*th, parse_logic("sum xs"), m)->i, 9);
  EXPECT_EQ(print_lval(m["xs"]), "Cons 4 (Cons 5 Nil)");
  EXPECT_EQ(enumerate_data(*th, "List", 2, {0, 1}, 100).size(), 1u + 2u * 3u);
}

TEST(BigO, Examples) {
  EXPECT_TRUE(check_big_o(BoundExpr::log(), BoundExpr::linear()));
  EXPECT_FALSE(check_big_o(BoundExpr::nlogn(), BoundExpr::linear()));
  EXPECT_TRUE(check_big_o(BoundExpr::constant(), BoundExpr::log()));
  EXPECT_TRUE(check_big_o(BoundExpr::constant(7), BoundExpr::constant(1)));
}

namespace {
std::vector<BoundExpr> bound_grid() {
  std::vector<BoundExpr> out;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) out.push_back(BoundExpr{a, 1, b, 0}.canonical());
  return out;
}
}  // namespace

TEST(BigO, IsAPreorder) {
  auto g = bound_grid();
  for (const auto& x : g) {
    EXPECT_TRUE(check_big_o(x, x));
    for (const auto& y : g)
      for (const auto& z : g)
        if (check_big_o(x, y) && check_big_o(y, z)) EXPECT_TRUE(check_big_o(x, z));
  }
}

TEST(BigO, AgreesWithNumericRatios) {
  auto g = bound_grid();
  for (const auto& x : g)
    for (const auto& y : g) {
      std::vector<double> ratios;
      for (int k = 10; k <= 20; ++k) {
        double u = std::ldexp(1.0, k);
        ratios.push_back(x.eval(u) / y.eval(u));
      }
      if (check_big_o(x, y)) {
        // Bounded: the last ratio does not exceed the first one.
        EXPECT_LE(ratios.back(), ratios.front() * (1 + 1e-9)) << print_bound(x) << " vs " << print_bound(y);
      } else {
        for (size_t i = 1; i < ratios.size(); ++i) EXPECT_GT(ratios[i], ratios[i - 1]);
        EXPECT_GT(ratios.back(), 1.4 * ratios.front());
      }
    }
}

TEST(PolyBound, Examples) {
  Checker c = solver_checker();
  auto base = int_query({"x", "y", "v"}, "x >= 0 && y >= 0 && v >= 0 && (v <= 2 * x + y || v <= x + 2 * y)", "true");
  std::vector<LExpr> sizes{lx::var("x"), lx::var("y")};
  EXPECT_TRUE(check_poly_bound(c, base, sizes, lx::var("v"), parse_logic("3 * x + 3 * y")).is_valid());
  EXPECT_FALSE(check_poly_bound(c, base, sizes, lx::var("v"), parse_logic("2 * x + y + 1")).is_valid());
  auto id = int_query({"x", "v"}, "x >= 0 && v = x", "true");
  EXPECT_TRUE(check_poly_bound(c, id, {lx::var("x")}, magnitude(*id.theory, lx::var("v"), Sort::integer()),
                               parse_logic("x + 1"))
                  .is_valid());
}

namespace {

struct QueryGen {
  std::mt19937 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  LExpr var() { return lx::var(std::string(1, "xyz"[pick(3)])); }
  LExpr arith(int d) {
    if (d == 0 || pick(3) == 0) return pick(3) == 0 ? lx::num(pick(7) - 1) : var();
    switch (pick(6)) {
      case 0: return lx::add(arith(d - 1), arith(d - 1));
      case 1: return lx::sub(arith(d - 1), arith(d - 1));
      case 2: return lx::mul(lx::num(pick(3) + 1), arith(d - 1));
      case 3: return lx::div(arith(d - 1), lx::num(pick(2) + 2));
      case 4: return lx::mod(arith(d - 1), lx::num(pick(2) + 2));
      default: return lx::cdiv(arith(d - 1), lx::num(2));
    }
  }
  LExpr atom() {
    switch (pick(3)) {
      case 0: return lx::eq(arith(2), arith(2));
      case 1: return lx::le(arith(2), arith(2));
      default: return lx::lt(arith(2), arith(2));
    }
  }
  LExpr formula(int d) {
    if (d == 0) return atom();
    switch (pick(4)) {
      case 0: return lx::conj(formula(d - 1), formula(d - 1));
      case 1: return lx::disj(formula(d - 1), formula(d - 1));
      case 2: return lx::negate(formula(d - 1));
      default: return atom();
    }
  }
};

}  // namespace

TEST(Validity, AgreesWithBruteForceOnSmallDomains) {
  QueryGen g{std::mt19937(7)};
  Checker c = solver_checker(false);
  auto th = empty_theory();
  int valid = 0, invalid = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<LExpr> hyp;
    for (const char* v : {"x", "y", "z"}) {
      hyp.push_back(lx::le(lx::num(0), lx::var(v)));
      hyp.push_back(lx::le(lx::var(v), lx::num(6)));
    }
    hyp.push_back(g.formula(1));
    ValidityQuery q{th, {{"x", Sort::integer()}, {"y", Sort::integer()}, {"z", Sort::integer()}}, lx::conj_all(hyp),
                    g.formula(2)};
    bool brute_valid = true;
    for (int x = 0; x <= 6 && brute_valid; ++x)
      for (int y = 0; y <= 6 && brute_valid; ++y)
        for (int z = 0; z <= 6 && brute_valid; ++z) {
          LModel m{{"x", LVal::integer(x)}, {"y", LVal::integer(y)}, {"z", LVal::integer(z)}};
          auto r = eval_logic(*th, lx::implies(q.hypothesis, q.conclusion), m);
          ASSERT_TRUE(r.has_value());
          brute_valid = r->i == 1;
        }
    Verdict v = c.check(q);
    ASSERT_NE(v.kind, Verdict::Kind::Unknown) << print_logic(q.conclusion);
    EXPECT_EQ(v.is_valid(), brute_valid) << print_logic(q.hypothesis) << " ==> " << print_logic(q.conclusion);
    if (v.kind == Verdict::Kind::Invalid) {
      auto r = eval_logic(*th, lx::implies(q.hypothesis, q.conclusion), v.model);
      ASSERT_TRUE(r.has_value());
      EXPECT_EQ(r->i, 0);
    }
    (brute_valid ? valid : invalid)++;
  }
  EXPECT_GT(valid, 10);
  EXPECT_GT(invalid, 10);
}
