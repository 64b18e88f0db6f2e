#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/term.hpp"
#include "recsynth/types.hpp"

namespace recsynth {

struct CtorDecl {
  std::string name;
  std::vector<BaseType> fields;
};

struct DataDecl {
  std::string name;
  std::vector<CtorDecl> ctors;
  std::string measure;  // intrinsic measure, Int-valued
};

struct MeasureDecl {
  std::string name;
  std::vector<BaseType> args;
  BaseType result;
};

// Universally quantified formula over `vars`.
struct Axiom {
  std::vector<std::pair<std::string, Sort>> vars;
  LExpr body;
};

struct SizeFunction {
  std::vector<std::string> params;
  LExpr body;

  LExpr apply(const std::vector<LExpr>& args) const;
};

struct AuxDecl {
  std::string name;
  AnnotatedType type;
  std::optional<Term> impl;  // body over the type's parameter names
};

struct SynthesisProblem {
  std::string goal_name;
  AnnotatedType goal;
  std::vector<AuxDecl> auxiliaries;
  std::vector<DataDecl> data;
  std::vector<MeasureDecl> measures;  // includes intrinsic measures
  std::vector<Axiom> axioms;
  std::map<std::string, SizeFunction> sizes;

  const DataDecl* find_data(const std::string& n) const;
  const MeasureDecl* find_measure(const std::string& n) const;
  const AuxDecl* find_aux(const std::string& n) const;
  // Constructor and its data type.
  std::pair<const DataDecl*, const CtorDecl*> find_ctor(const std::string& n) const;
};

using ProblemRef = std::shared_ptr<const SynthesisProblem>;

struct Binding {
  std::string name;
  AnnotatedType type;
};

// Typing context: variable and function bindings, path conditions, recFun/args.
struct Environment {
  ProblemRef problem;
  std::vector<Binding> bindings;
  std::vector<LExpr> path;
  std::optional<std::string> rec_fun;
  std::vector<std::string> args;
  std::map<std::string, SizeFunction> sizes;
  // Intermediate logical variables introduced by typing, with their sorts.
  std::map<std::string, Sort> ghosts;

  static Environment from_problem(ProblemRef p);
  const Binding* lookup(const std::string& n) const;
  Environment with_binding(const std::string& n, AnnotatedType t) const;
  Environment with_path(LExpr phi) const;
  Environment with_ghosts(const std::map<std::string, Sort>& g) const;
  // Sets recFun and args; throws if already set.
  Environment with_rec(const std::string& f, std::vector<std::string> args) const;
  // Top-level size expression: size_f applied to args.
  LExpr top_size() const;
};

}  // namespace recsynth
