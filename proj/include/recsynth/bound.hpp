#pragma once

#include <cstdint>
#include <string>

namespace recsynth {

// u^a * log^b u + c with a = a_num / a_den.
struct BoundExpr {
  int64_t a_num = 0;
  int64_t a_den = 1;
  int b = 0;
  int64_t c = 0;

  static BoundExpr constant(int64_t c = 1) { return {0, 1, 0, c}; }
  static BoundExpr log() { return {0, 1, 1, 0}; }
  static BoundExpr linear() { return {1, 1, 0, 0}; }
  static BoundExpr nlogn() { return {1, 1, 1, 0}; }
  static BoundExpr poly(int64_t k) { return {k, 1, 0, 0}; }

  bool is_constant() const { return a_num == 0 && b == 0; }
  double exponent() const { return static_cast<double>(a_num) / static_cast<double>(a_den); }
  // Reduces the exponent fraction and drops c when it cannot matter.
  BoundExpr canonical() const;
  // Same complexity class (c ignored unless the class is constant).
  bool same_class(const BoundExpr& o) const;
  // Numeric value with log base 2; log of values below 2 is taken as 1.
  double eval(double u) const;
  // Exponent multiplied by k, as when the argument grows polynomially.
  BoundExpr scaled(int64_t k) const;

  bool operator==(const BoundExpr& o) const;
  bool operator!=(const BoundExpr& o) const { return !(*this == o); }
};

// Text inside O(...): "1", "log u", "u", "u log u", "u^2", "u^3/2 log^2 u", "u + 3".
std::string print_bound(const BoundExpr& b);
std::string print_bound_o(const BoundExpr& b);  // "O(...)"

}  // namespace recsynth
