#include <algorithm>
#include <functional>
#include <stdexcept>

#include "recsynth/typesys.hpp"

namespace recsynth {

std::string pattern_name(PatternId id) {
  switch (id) {
    case PatternId::MasterLog: return "Master-log";
    case PatternId::MasterNLogN: return "Master-nlogn";
    case PatternId::AkraBazzi: return "AkraBazzi-split";
    case PatternId::CFiniteLinear: return "CFinite-linear";
    case PatternId::CFiniteQuadratic: return "CFinite-quadratic";
    case PatternId::TreeCorrelated: return "Tree-correlated";
    case PatternId::NonRecursive: return "NonRecursive";
  }
  return "?";
}

namespace {

LExpr mu() { return lx::var(kMu); }

Pattern make(PatternId id, int d, BoundExpr bound, std::vector<RecCost> costs, BoundExpr body_bound) {
  return Pattern{id, d, bound, Annotation{std::move(costs), body_bound}};
}

// Recursive rows of the pattern table, in table order.
std::vector<Pattern> recursive_rows(const PatternRange& r) {
  std::vector<Pattern> out;
  for (int d = r.div_min; d <= r.div_max; ++d)
    out.push_back(make(PatternId::MasterLog, d, BoundExpr::log(), {{1, lx::div(mu(), lx::num(d))}},
                       BoundExpr::constant()));
  for (int d = r.div_min; d <= r.div_max; ++d)
    out.push_back(make(PatternId::MasterNLogN, d, BoundExpr::nlogn(), {{d, lx::div(mu(), lx::num(d))}},
                       BoundExpr::linear()));
  out.push_back(make(PatternId::AkraBazzi, 2, BoundExpr::nlogn(),
                     {{1, lx::cdiv(mu(), lx::num(2))}, {1, lx::div(mu(), lx::num(2))}}, BoundExpr::linear()));
  for (int d = r.sub_min; d <= r.sub_max; ++d)
    out.push_back(make(PatternId::CFiniteLinear, d, BoundExpr::linear(), {{1, lx::sub(mu(), lx::num(d))}},
                       BoundExpr::constant()));
  for (int d = r.sub_min; d <= r.sub_max; ++d)
    out.push_back(make(PatternId::CFiniteQuadratic, d, BoundExpr::poly(2), {{1, lx::sub(mu(), lx::num(d))}},
                       BoundExpr::linear()));
  out.push_back(make(PatternId::TreeCorrelated, 1, BoundExpr::linear(),
                     {{1, lx::var(kCorr)}, {1, lx::sub(lx::sub(mu(), lx::num(1)), lx::var(kCorr))}},
                     BoundExpr::constant()));
  return out;
}

std::vector<Pattern> rows_for(const BoundExpr& psi, const PatternRange& r) {
  std::vector<Pattern> out;
  BoundExpr c = psi.canonical();
  for (auto& p : recursive_rows(r))
    if (p.bound.canonical().same_class(c)) out.push_back(std::move(p));
  std::stable_sort(out.begin(), out.end(),
                   [](const Pattern& a, const Pattern& b) { return a.body.total_count() < b.body.total_count(); });
  return out;
}

}  // namespace

std::vector<Pattern> match_patterns(const BoundExpr& psi, const PatternRange& range) {
  std::vector<Pattern> out = rows_for(psi, range);
  out.push_back(make(PatternId::NonRecursive, 0, psi.canonical(), {}, psi.canonical()));
  return out;
}

std::vector<Pattern> candidate_patterns(const BoundExpr& psi, const PatternRange& range) {
  std::vector<Pattern> out = match_patterns(psi, range);
  BoundExpr c = psi.canonical();
  for (const BoundExpr& cls : {BoundExpr::log(), BoundExpr::linear(), BoundExpr::nlogn(), BoundExpr::poly(2)}) {
    if (cls.same_class(c) || !check_big_o(cls, c)) continue;
    for (auto& p : rows_for(cls, range)) out.push_back(std::move(p));
  }
  return out;
}

Annotation update_cost(const Annotation& a, const std::vector<RecCost>& used) {
  Annotation out = a;
  for (const auto& u : used) {
    if (u.count < 0) throw std::invalid_argument("negative cost usage");
    if (u.count == 0) continue;
    bool done = false;
    for (auto& c : out.costs) {
      if (c.count >= u.count && lequal(c.size, u.size)) {
        c.count -= u.count;
        done = true;
        break;
      }
    }
    if (!done) throw std::invalid_argument("cost usage exceeds the annotation: [" + std::to_string(u.count) + ", " +
                                           print_logic(u.size) + "]");
  }
  return out;
}

std::vector<std::vector<Annotation>> share(const Annotation& a, int ways) {
  if (ways < 1) throw std::invalid_argument("share needs at least one part");
  const size_t n = a.costs.size();
  // counts[j][i]: count of entry i in part j.
  std::vector<std::vector<int>> counts(ways, std::vector<int>(n, 0));
  std::vector<std::vector<Annotation>> out;
  std::function<void(size_t, int, int)> go = [&](size_t i, int j, int left) {
    if (i == n) {
      std::vector<Annotation> parts(ways, a);
      for (int p = 0; p < ways; ++p)
        for (size_t k = 0; k < n; ++k) parts[p].costs[k].count = counts[p][k];
      out.push_back(std::move(parts));
      return;
    }
    if (j == ways) {
      go(i + 1, 0, i + 1 < n ? a.costs[i + 1].count : 0);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[j][i] = c;
      go(i, j + 1, left - c);
    }
    counts[j][i] = 0;
  };
  go(0, 0, n ? a.costs[0].count : 0);
  auto total = [](const std::vector<Annotation>& parts) {
    int t = 0;
    for (const auto& p : parts) t += p.total_count();
    return t;
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    int fx = x[0].total_count(), fy = y[0].total_count();
    if (fx != fy) return fx < fy;
    return total(x) > total(y);
  });
  return out;
}

std::vector<std::vector<Annotation>> exact_shares(const Annotation& a, int ways) {
  std::vector<std::vector<Annotation>> out;
  for (auto& parts : share(a, ways)) {
    bool exact = true;
    for (size_t i = 0; i < a.costs.size() && exact; ++i) {
      int s = 0;
      for (const auto& p : parts) s += p.costs[i].count;
      exact = s == a.costs[i].count;
    }
    if (exact) out.push_back(std::move(parts));
  }
  return out;
}

}  // namespace recsynth
