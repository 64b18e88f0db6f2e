#pragma once

#include <stdexcept>
#include <string>

#include "recsynth/problem.hpp"

namespace recsynth {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Unbound, Duplicate, Reserved };
  ParseError(Kind k, int line, int col, const std::string& msg);
  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  Kind kind_;
  int line_;
  int col_;
};

SynthesisProblem parse_problem(const std::string& text);
Term parse_term(const std::string& text);
LExpr parse_logic(const std::string& text);
BoundExpr parse_bound(const std::string& text);  // contents of O(...)

// A program file holds one definition "name = \x y. body" (or "name = fix name. \x y. body").
Term parse_program(const std::string& text);

// Resolves a parsed program against a problem: checks that every free name and
// application head is bound. Throws ParseError(Unbound) otherwise.
void check_program_scope(const SynthesisProblem& p, const Term& program);

std::string pretty_print(const Term& t);
// Definition form accepted by parse_program.
std::string print_program(const Term& fix);
std::string print_problem(const SynthesisProblem& p);

}  // namespace recsynth
