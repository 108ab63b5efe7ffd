#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "ratfunc.hpp"

namespace plq {

/// Generator monomial with signed exponents, one per generator position.
struct LaurentMonomial {
  std::vector<int> exps;
  unsigned positive_degree = 0;
  unsigned negative_degree = 0;

  bool is_one() const { return positive_degree == 0 && negative_degree == 0; }

  RatFunc to_ratfunc(const VarTablePtr& vars) const {
    Monomial up, down;
    const auto& gens = vars->generators();
    for (std::size_t k = 0; k < exps.size(); ++k) {
      if (exps[k] > 0) up.set(gens[k], exps[k]);
      if (exps[k] < 0) down.set(gens[k], -exps[k]);
    }
    return RatFunc(Poly::monomial(vars, up), Poly::monomial(vars, down));
  }
};

/// Higher positive degree first, then lexicographically larger signed
/// exponent vectors.
inline bool laurent_before(const LaurentMonomial& a, const LaurentMonomial& b) {
  if (a.positive_degree != b.positive_degree) return a.positive_degree > b.positive_degree;
  return a.exps > b.exps;
}

/// Every generator monomial with positive total degree <= max_degree and
/// total negative degree <= inverse_degree, negative exponents only at the
/// `invertible` positions. Sorted by laurent_before.
inline std::vector<LaurentMonomial> laurent_monomials(std::size_t r, const std::set<std::size_t>& invertible,
                                                      unsigned max_degree, unsigned inverse_degree,
                                                      bool include_constant) {
  std::vector<LaurentMonomial> out;
  LaurentMonomial cur;
  cur.exps.assign(r, 0);
  // Recursive fill, position by position.
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == r) {
      if (include_constant || !cur.is_one()) out.push_back(cur);
      return;
    }
    int lo = invertible.count(pos) ? -int(inverse_degree - cur.negative_degree) : 0;
    int hi = int(max_degree - cur.positive_degree);
    for (int e = lo; e <= hi; ++e) {
      cur.exps[pos] = e;
      if (e > 0) cur.positive_degree += e;
      if (e < 0) cur.negative_degree += -e;
      self(self, pos + 1);
      if (e > 0) cur.positive_degree -= e;
      if (e < 0) cur.negative_degree -= -e;
    }
    cur.exps[pos] = 0;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), laurent_before);
  return out;
}

}  // namespace plq
