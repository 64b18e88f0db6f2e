#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "recsynth/parser.hpp"

using namespace recsynth;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError::Kind parse_error_kind(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error";
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST(ParseProblem, ProdHasFiveAuxiliaries) {
  SynthesisProblem p = parse_problem(slurp(RECSYNTH_CORPUS_DIR "/prod.problem"));
  EXPECT_EQ(p.goal_name, "prod");
  EXPECT_EQ(p.auxiliaries.size(), 5u);
  EXPECT_EQ(p.goal.ann.bound, BoundExpr::log());
  ASSERT_EQ(p.goal.type.params.size(), 2u);
  EXPECT_EQ(print_logic(p.goal.type.result.refinement), "v = x * y");
  EXPECT_EQ(print_logic(p.sizes.at("prod").body), "x");
}

TEST(ParseProblem, IdentityGoalWithoutAuxiliaries) {
  SynthesisProblem p = parse_problem("size id = \\x. x\ngoal id :: x:{Int | true} -> {Int | v = x}, O(1)\n");
  EXPECT_TRUE(p.auxiliaries.empty());
  EXPECT_TRUE(p.goal.ann.bound.is_constant());
}

TEST(ParseProblem, ReservedSymbolAsVariable) {
  EXPECT_EQ(parse_error_kind("size f = \\u. u\ngoal f :: u:Int -> Int, O(1)\n"), ParseError::Kind::Reserved);
  EXPECT_EQ(parse_error_kind("size f = \\x. x\ngoal f :: x:Int -> {Int | v = u}, O(1)\n"), ParseError::Kind::Reserved);
}

TEST(ParseProblem, ErrorsCarryPosition) {
  try {
    parse_problem("size f = \\x. x\ngoal f :: x:Int -> {Int | v = }, O(1)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.col(), 31);
  }
}

TEST(ParseProblem, UnboundAndDuplicate) {
  EXPECT_EQ(parse_error_kind("size f = \\x. x\ngoal f :: x:Int -> {Int | v = z}, O(1)\n"), ParseError::Kind::Unbound);
  EXPECT_EQ(parse_error_kind("aux g :: x:Int -> Int, O(1)\naux g :: x:Int -> Int, O(1)\nsize f = \\x. x\n"
                             "goal f :: x:Int -> Int, O(1)\n"),
            ParseError::Kind::Duplicate);
  EXPECT_EQ(parse_error_kind("aux g :: x:Int -> Int, O(1) = h x\nsize f = \\x. x\ngoal f :: x:Int -> Int, O(1)\n"),
            ParseError::Kind::Unbound);
}

TEST(ParseProblem, SizeFunctionMayNotUseBool) {
  EXPECT_EQ(parse_error_kind("size f = \\b. if b then 1 else 0\ngoal f :: b:Bool -> Int, O(1)\n"),
            ParseError::Kind::Syntax);
}

TEST(ParseProblem, DataMeasuresAndAxioms) {
  SynthesisProblem p = parse_problem(
      "data List with len = Nil | Cons Int List\n"
      "measure sum :: List -> Int\n"
      "axiom sum Nil = 0\n"
      "axiom sum (Cons h t) = h + sum t\n"
      "size f = \\xs. len xs\n"
      "goal f :: xs:List -> {Int | v = sum xs}, O(u)\n");
  ASSERT_EQ(p.data.size(), 1u);
  EXPECT_EQ(p.data[0].ctors.size(), 2u);
  ASSERT_NE(p.find_measure("len"), nullptr);
  ASSERT_EQ(p.axioms.size(), 2u);
  ASSERT_EQ(p.axioms[1].vars.size(), 2u);
  EXPECT_EQ(p.axioms[1].vars[0].first, "h");
  EXPECT_TRUE(p.axioms[1].vars[0].second.is_int());
  EXPECT_EQ(p.axioms[1].vars[1].second, Sort::of_data("List"));
  // Printing and reparsing yields the same problem text.
  EXPECT_EQ(print_problem(parse_problem(print_problem(p))), print_problem(p));
}

TEST(ParseBound, Forms) {
  EXPECT_EQ(parse_bound("1"), BoundExpr::constant());
  EXPECT_EQ(parse_bound("log u"), BoundExpr::log());
  EXPECT_EQ(parse_bound("u log u"), BoundExpr::nlogn());
  EXPECT_EQ(parse_bound("u^2"), BoundExpr::poly(2));
  BoundExpr b = parse_bound("u^3/2 log^2 u");
  EXPECT_EQ(b.a_num, 3);
  EXPECT_EQ(b.a_den, 2);
  EXPECT_EQ(b.b, 2);
  for (const char* s : {"1", "log u", "u", "u log u", "u^2", "u^3/2 log^2 u"})
    EXPECT_EQ(print_bound(parse_bound(s)), s);
}

TEST(Substitute, Examples) {
  EXPECT_TRUE(term_equal(substitute(parse_term("plus x y"), "x", tm::num(5)), parse_term("plus 5 y")));
  Term shadow = parse_term("fix f. \\x. x");
  EXPECT_TRUE(term_equal(substitute(shadow, "x", tm::num(5)), shadow));
  Term body = parse_term("if x == 0 then x else plus y (prod (dec x) y)");
  EXPECT_TRUE(term_equal(substitute(body, "x", tm::num(3)),
                         parse_term("if 3 == 0 then 3 else plus y (prod (dec 3) y)")));
}

TEST(Substitute, NeverCaptures) {
  // Replacing y by x under a binder of x must rename the binder.
  Term t = parse_term("fix f. \\x. plus x y");
  Term r = substitute(t, "y", tm::var("x"));
  EXPECT_TRUE(free_term_vars(r).count("x"));
  EXPECT_TRUE(alpha_equal(r, parse_term("fix f. \\x1. plus x1 x")));
  Term m = parse_term("match xs with | Nil -> y | Cons h t -> plus h y");
  Term mr = substitute(m, "y", tm::var("h"));
  EXPECT_TRUE(free_term_vars(mr).count("h"));
}

TEST(SubstLogic, Examples) {
  EXPECT_EQ(print_logic(subst_logic(parse_logic("v = x * y"), "v", lx::var("z"))), "z = x * y");
  LExpr half = parse_logic("u / 2");
  LExpr r = subst_logic(half, "u", lx::app("size", {lx::var("x"), lx::var("y")}));
  EXPECT_EQ(print_logic(r), "size x y / 2");
  EXPECT_TRUE(is_true(subst_logic(lx::tru(), "x", lx::num(3))));
}

TEST(PrettyPrint, Examples) {
  EXPECT_EQ(pretty_print(tm::var("x")), "x");
  Term prod = parse_program(slurp(RECSYNTH_CORPUS_DIR "/prod_log.impl"));
  EXPECT_EQ(print_program(prod),
            "prod = \\x y. if x == 0 then x else if even x then double (prod (div2 x) y) "
            "else plus y (double (prod (div2 x) y))");
  EXPECT_EQ(pretty_print(parse_term("a - (b - c)")), "a - (b - c)");
  EXPECT_EQ(pretty_print(parse_term("f (-3) x")), "f (-3) x");
  EXPECT_EQ(pretty_print(parse_term("a >= b")), "b <= a");
}

namespace {

struct TermGen {
  std::mt19937 rng;
  const std::vector<std::string> vars{"x", "y", "z", "acc", "n"};
  const std::vector<std::string> funs{"f", "g", "plus", "dec"};
  const std::vector<std::string> ops{"||", "&&", "==", "<=", "<", "+", "-", "*", "/", "%"};

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  std::string var() { return vars[pick(static_cast<int>(vars.size()))]; }

  Term gen(int depth) {
    int k = depth <= 0 ? pick(4) : pick(12);
    switch (k) {
      case 0: return tm::var(var());
      case 1: return tm::num(pick(21) - 10);
      case 2: return tm::boolean(pick(2) == 1);
      case 3: return pick(2) ? tm::app("Nil", {}) : tm::var(var());
      case 4: return tm::app(ops[pick(static_cast<int>(ops.size()))], {gen(depth - 1), gen(depth - 1)});
      case 5: {
        std::vector<Term> args;
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) args.push_back(gen(depth - 1));
        return tm::app(funs[pick(static_cast<int>(funs.size()))], std::move(args));
      }
      case 6: return tm::app("Cons", {gen(depth - 1), gen(depth - 1)});
      case 7: return tm::ite(gen(depth - 1), gen(depth - 1), gen(depth - 1));
      case 8:
        return tm::match(gen(depth - 1), {{"Nil", {}, gen(depth - 1)}, {"Cons", {var(), var()}, gen(depth - 1)}});
      case 9: {
        std::vector<std::string> ps{var()};
        if (pick(2)) ps.push_back(var());
        return tm::fix(funs[pick(2)], ps, gen(depth - 1));
      }
      case 10: return tm::tick(pick(4), gen(depth - 1));
      default: return tm::app("-", {gen(depth - 1), tm::num(-(1 + pick(5)))});
    }
  }
};

}  // namespace

TEST(PrettyPrint, RoundTripRandomTerms) {
  TermGen g{std::mt19937(12345)};
  for (int i = 0; i < 1000; ++i) {
    Term t = g.gen(5);
    std::string s = pretty_print(t);
    Term back = parse_term(s);
    ASSERT_TRUE(term_equal(t, back)) << s << "\n  reprinted: " << pretty_print(back);
  }
}

TEST(ParseLogic, RoundTripsThroughPrinter) {
  for (const char* s : {"v = x * y", "len v = len xs + 1", "if x <= 0 then v = 0 else v = x - 1",
                        "mem k (BNode l x r) = mem k l", "ceil(u / 2) <= v", "!(v = 0) ==> x mod 2 = 1",
                        "v = (x mod 2 = 0)", "u - 1 - l"}) {
    LExpr e = parse_logic(s);
    EXPECT_TRUE(lequal(parse_logic(print_logic(e)), e)) << s << " -> " << print_logic(e);
  }
}
