#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace recsynth {

enum class TKind { Var, Int, Bool, App, If, Match, Fix, Tick };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct MatchCase {
  std::string ctor;
  std::vector<std::string> vars;
  Term body;
};

// App heads are names. Operator heads ("+", "==", ...) denote primitives;
// capitalized heads denote constructors.
struct TermNode {
  TKind kind;
  std::string name;                 // Var name, App head, Fix function name
  int64_t value = 0;                // Int literal, Bool literal, Tick cost
  std::vector<Term> kids;           // App args; If cond/then/else; Match scrutinee; Fix/Tick body
  std::vector<std::string> params;  // Fix parameters
  std::vector<MatchCase> cases;     // Match
};

namespace tm {
Term var(const std::string& n);
Term num(int64_t v);
Term boolean(bool b);
Term app(const std::string& head, std::vector<Term> args);
Term ite(Term c, Term t, Term e);
Term match(Term scrut, std::vector<MatchCase> cases);
Term fix(const std::string& f, std::vector<std::string> params, Term body);
Term tick(int64_t cost, Term body);
}  // namespace tm

bool is_operator_name(const std::string& s);
bool is_ctor_name(const std::string& s);
// Var, Int, Bool and App nodes whose arguments are all E-terms.
bool is_eterm(const Term& t);

bool term_equal(const Term& a, const Term& b);
// Equality up to renaming of Fix and Match binders.
bool alpha_equal(const Term& a, const Term& b);
int term_size(const Term& t);
int term_depth(const Term& t);

std::set<std::string> free_term_vars(const Term& t);
// Capture-avoiding [s/x]t. Application heads are function names and are not substituted.
Term substitute(const Term& t, const std::string& x, const Term& s);

// Number of applications whose head is `f`.
int count_calls(const Term& t, const std::string& f);

}  // namespace recsynth
