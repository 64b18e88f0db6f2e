#include "recsynth/bound.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace recsynth {

BoundExpr BoundExpr::canonical() const {
  BoundExpr r = *this;
  if (r.a_den < 0) {
    r.a_den = -r.a_den;
    r.a_num = -r.a_num;
  }
  int64_t g = std::gcd(r.a_num, r.a_den);
  if (g > 1) {
    r.a_num /= g;
    r.a_den /= g;
  }
  if (r.a_num == 0) r.a_den = 1;
  if (r.is_constant()) r.c = 1;
  return r;
}

bool BoundExpr::operator==(const BoundExpr& o) const {
  BoundExpr x = canonical(), y = o.canonical();
  return x.a_num == y.a_num && x.a_den == y.a_den && x.b == y.b && x.c == y.c;
}

bool BoundExpr::same_class(const BoundExpr& o) const {
  BoundExpr x = canonical(), y = o.canonical();
  return x.a_num == y.a_num && x.a_den == y.a_den && x.b == y.b;
}

double BoundExpr::eval(double u) const {
  double lg = u >= 2 ? std::log2(u) : 1.0;
  double v = std::pow(u, exponent()) * std::pow(lg, b) + static_cast<double>(c);
  if (is_constant()) v = static_cast<double>(c == 0 ? 1 : c);
  return v;
}

BoundExpr BoundExpr::scaled(int64_t k) const {
  BoundExpr r = *this;
  r.a_num *= k;
  return r.canonical();
}

std::string print_bound(const BoundExpr& in) {
  BoundExpr b = in.canonical();
  if (b.is_constant()) return "1";
  std::ostringstream os;
  bool any = false;
  if (b.a_num != 0) {
    os << 'u';
    if (!(b.a_num == 1 && b.a_den == 1)) {
      os << '^' << b.a_num;
      if (b.a_den != 1) os << '/' << b.a_den;
    }
    any = true;
  }
  if (b.b > 0) {
    if (any) os << ' ';
    os << "log";
    if (b.b > 1) os << '^' << b.b;
    os << " u";
  }
  if (b.c > 0) os << " + " << b.c;
  return os.str();
}

std::string print_bound_o(const BoundExpr& b) { return "O(" + print_bound(b) + ")"; }

}  // namespace recsynth
