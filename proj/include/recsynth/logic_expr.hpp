#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace recsynth {

// Reserved logical symbols: the refined value and the top-level problem size.
inline constexpr const char* kNu = "v";
inline constexpr const char* kMu = "u";

struct Sort {
  enum class Kind { Int, Bool, Data };
  Kind kind = Kind::Int;
  std::string data;  // data type name when kind == Data

  static Sort integer() { return {Kind::Int, {}}; }
  static Sort boolean() { return {Kind::Bool, {}}; }
  static Sort of_data(std::string n) { return {Kind::Data, std::move(n)}; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_data() const { return kind == Kind::Data; }
  std::string name() const;
  bool operator==(const Sort& o) const { return kind == o.kind && data == o.data; }
  bool operator!=(const Sort& o) const { return !(*this == o); }
  bool operator<(const Sort& o) const {
    return kind != o.kind ? kind < o.kind : data < o.data;
  }
};

enum class LOp {
  Var, Int, Bool,
  App,  // measure, constructor or other uninterpreted function
  Add, Sub, Mul,
  Div,      // floor division
  CeilDiv,  // ceiling division
  Mod, Neg,
  Eq, Le, Lt,
  And, Or, Not, Implies,
  Ite
};

struct LNode;
using LExpr = std::shared_ptr<const LNode>;

struct LNode {
  LOp op;
  std::string name;   // Var / App
  int64_t value = 0;  // Int literal, or 0/1 for Bool
  std::vector<LExpr> kids;
};

namespace lx {
LExpr var(const std::string& n);
LExpr num(int64_t v);
LExpr boolean(bool b);
LExpr tru();
LExpr fls();
LExpr app(const std::string& f, std::vector<LExpr> args);
LExpr add(LExpr a, LExpr b);
LExpr sub(LExpr a, LExpr b);
LExpr mul(LExpr a, LExpr b);
LExpr div(LExpr a, LExpr b);
LExpr cdiv(LExpr a, LExpr b);
LExpr mod(LExpr a, LExpr b);
LExpr neg(LExpr a);
LExpr eq(LExpr a, LExpr b);
LExpr le(LExpr a, LExpr b);
LExpr lt(LExpr a, LExpr b);
LExpr ge(LExpr a, LExpr b);
LExpr gt(LExpr a, LExpr b);
LExpr conj(LExpr a, LExpr b);
LExpr disj(LExpr a, LExpr b);
LExpr negate(LExpr a);
LExpr implies(LExpr a, LExpr b);
LExpr ite(LExpr c, LExpr a, LExpr b);
// Conjunction of a list; true when empty. Literal `true` conjuncts are dropped.
LExpr conj_all(const std::vector<LExpr>& xs);
}  // namespace lx

bool is_true(const LExpr& e);
bool is_false(const LExpr& e);

// Structural equality and a total order for use as map keys.
bool lequal(const LExpr& a, const LExpr& b);
int lcompare(const LExpr& a, const LExpr& b);
struct LExprLess {
  bool operator()(const LExpr& a, const LExpr& b) const { return lcompare(a, b) < 0; }
};

std::set<std::string> free_vars(const LExpr& e);
bool mentions(const LExpr& e, const std::string& var);
void collect_apps(const LExpr& e, std::vector<LExpr>& out);

// [e/x]phi. Logical expressions have no binders, so this is plain replacement.
LExpr subst_logic(const LExpr& phi, const std::string& x, const LExpr& e);
LExpr subst_logic_all(const LExpr& phi, const std::map<std::string, LExpr>& m);

// Flattens nested conjunctions into a list of conjuncts.
void conjuncts(const LExpr& e, std::vector<LExpr>& out);

std::string print_logic(const LExpr& e);

}  // namespace recsynth
