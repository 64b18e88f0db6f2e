#pragma once

#include <string>
#include <utility>
#include <vector>

#include "recsynth/bound.hpp"
#include "recsynth/logic_expr.hpp"

namespace recsynth {

// Int, Bool, or a declared data type (its constructors live in the problem's DataDecl).
struct BaseType {
  Sort sort;
  static BaseType integer() { return {Sort::integer()}; }
  static BaseType boolean() { return {Sort::boolean()}; }
  static BaseType data(std::string n) { return {Sort::of_data(std::move(n))}; }
  bool operator==(const BaseType& o) const { return sort == o.sort; }
  bool operator!=(const BaseType& o) const { return !(*this == o); }
};

struct ScalarType {
  BaseType base;
  LExpr refinement;  // over v and scope variables
};

// A scalar type, or a first-order arrow x1:S1 -> ... -> xn:Sn -> S.
struct RType {
  std::vector<std::pair<std::string, ScalarType>> params;
  ScalarType result;

  bool is_arrow() const { return !params.empty(); }
  static RType scalar(ScalarType s) { return {{}, std::move(s)}; }
};

struct RecCost {
  int count = 0;
  LExpr size;  // over u; may mention one correlation variable
};

struct Annotation {
  std::vector<RecCost> costs;
  BoundExpr bound;

  int total_count() const;
};

struct AnnotatedType {
  RType type;
  Annotation ann;
};

std::string print_scalar(const ScalarType& s);
std::string print_rtype(const RType& t);
std::string print_annotation(const Annotation& a);
std::string print_annotated(const AnnotatedType& g);

bool annotation_equal(const Annotation& a, const Annotation& b);

}  // namespace recsynth
