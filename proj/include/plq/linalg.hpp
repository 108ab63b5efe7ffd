#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "logexpr.hpp"

namespace plq {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Exact rank over Q by Gaussian elimination.
inline std::size_t rank(RationalMatrix m) {
  std::size_t r = 0;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
  }
  return r;
}

/// Sparse vector of polynomial entries keyed by column.
using SparseRow = std::map<std::size_t, Poly>;
/// Sparse vector of rational-function entries keyed by column.
using SparseRatRow = std::map<std::size_t, RatFunc>;

namespace detail {

inline void drop_zeros(SparseRow& r) {
  for (auto it = r.begin(); it != r.end();) {
    if (it->second.is_zero())
      it = r.erase(it);
    else
      ++it;
  }
}

inline SparseRow combine_rows(const SparseRow& a, const Rational& ca, const Poly* pa, const SparseRow& b,
                              const Poly& fb) {
  // (pa ? pa*a : ca*a) - fb*b
  SparseRow out;
  for (const auto& [c, v] : a) out.emplace(c, pa ? *pa * v : v.scaled(ca));
  for (const auto& [c, v] : b) {
    Poly t = fb * v;
    auto it = out.find(c);
    if (it == out.end())
      out.emplace(c, -t);
    else
      it->second -= t;
  }
  drop_zeros(out);
  return out;
}

}  // namespace detail

/// Divides a row by its content: rational content, common monomial factor,
/// univariate gcd when every entry lives in the same single variable, and a
/// shared factor equal to one of the entries. Sign is fixed so that the first
/// entry has a positive leading coefficient.
inline void make_primitive(SparseRow& r) {
  detail::drop_zeros(r);
  if (r.empty()) return;
  Integer g = 0, l = 1;
  for (const auto& [c, p] : r) {
    for (const auto& t : p.terms()) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
    }
  }
  Rational content(g, l);
  content.canonicalize();
  if (content != 1) {
    Rational inv = 1 / content;
    for (auto& [c, p] : r) p = p.scaled(inv);
  }
  Monomial m = r.begin()->second.monomial_content();
  for (const auto& [c, p] : r) m = gcd(m, p.monomial_content());
  if (!m.is_one())
    for (auto& [c, p] : r) p = p.divided_by_monomial(m);

  std::optional<std::size_t> var;
  bool univariate = true;
  for (const auto& [c, p] : r) {
    if (p.is_constant()) {
      univariate = false;  // a nonzero constant entry forces trivial content
      break;
    }
    auto x = detail::sole_variable(p);
    if (!x || (var && *var != *x)) {
      univariate = false;
      break;
    }
    var = x;
  }
  if (univariate && var) {
    Poly gg = r.begin()->second;
    for (const auto& [c, p] : r) {
      gg = univariate_gcd(gg, p, *var);
      if (gg.is_constant()) break;
    }
    if (!gg.is_constant())
      for (auto& [c, p] : r) p = *divide_exact(p, gg);
  } else if (!univariate) {
    const Poly* smallest = nullptr;
    for (const auto& [c, p] : r)
      if (!p.is_constant() && !p.is_monomial() && (!smallest || p.size() < smallest->size())) smallest = &p;
    bool has_constant = false;
    for (const auto& [c, p] : r) has_constant = has_constant || p.is_constant();
    if (smallest && !has_constant) {
      Poly f = *smallest;
      std::vector<Poly> quotients;
      bool ok = true;
      for (const auto& [c, p] : r) {
        auto q = divide_exact(p, f);
        if (!q) {
          ok = false;
          break;
        }
        quotients.push_back(std::move(*q));
      }
      if (ok) {
        std::size_t k = 0;
        for (auto& [c, p] : r) p = std::move(quotients[k++]);
      }
    }
  }
  if (r.begin()->second.leading().coef < 0)
    for (auto& [c, p] : r) p = -p;
}

/// Multiplies a row of rational functions by a common multiple of its
/// denominators, giving polynomial entries (not yet made primitive).
inline SparseRow clear_denominators(const SparseRatRow& r) {
  SparseRow out;
  if (r.empty()) return out;
  Poly l = Poly::constant(r.begin()->second.vars(), 1);
  for (const auto& [c, f] : r) l = detail::denominator_lcm(l, f.den());
  for (const auto& [c, f] : r) {
    if (f.is_zero()) continue;
    out.emplace(c, f.num() * *divide_exact(l, f.den()));
  }
  return out;
}

/// Row space kept in reduced row echelon form with unnormalized (polynomial)
/// pivots. Rows are combined fraction-free and made primitive after every
/// update.
class RowSpace {
 public:
  std::size_t rank() const { return rows_.size(); }
  const std::vector<SparseRow>& rows() const { return rows_; }

  /// Pivot column -> row index.
  const std::map<std::size_t, std::size_t>& pivots() const { return pivot_row_; }

  /// Remainder of v modulo the stored rows (empty iff v is in the span).
  SparseRow reduce(SparseRow v) const {
    detail::drop_zeros(v);
    for (const auto& [col, ri] : pivot_row_) {
      if (v.empty()) break;
      auto it = v.find(col);
      if (it == v.end()) continue;
      v = eliminate(v, rows_[ri], col);
    }
    return v;
  }

  /// Adds v to the span; returns the (primitive) new row, or nullopt if v was
  /// already in the span.
  std::optional<SparseRow> insert(const SparseRow& v) {
    SparseRow r = reduce(v);
    if (r.empty()) return std::nullopt;
    make_primitive(r);
    const std::size_t col = r.begin()->first;
    for (auto& row : rows_)
      if (row.count(col)) {
        row = eliminate(row, r, col);
        make_primitive(row);
      }
    pivot_row_[col] = rows_.size();
    rows_.push_back(r);
    return r;
  }

 private:
  // Removes column `col` from v using pivot row `p`.
  static SparseRow eliminate(const SparseRow& v, const SparseRow& p, std::size_t col) {
    const Poly& a = v.at(col);
    const Poly& piv = p.at(col);
    SparseRow out;
    if (auto q = divide_exact(a, piv)) {
      out = detail::combine_rows(v, 1, nullptr, p, *q);
    } else {
      out = detail::combine_rows(v, 1, &piv, p, a);
    }
    out.erase(col);
    make_primitive(out);
    return out;
  }

  std::vector<SparseRow> rows_;
  std::map<std::size_t, std::size_t> pivot_row_;
};

/// Right nullspace of the matrix given by `rows` restricted to `columns`.
/// Each basis vector has a single free column set, the others determined by
/// the reduced echelon form; vectors are returned with polynomial entries,
/// made primitive.
inline std::vector<SparseRow> nullspace(const std::vector<SparseRow>& rows, const std::vector<std::size_t>& columns,
                                        const VarTablePtr& vars) {
  std::set<std::size_t> allowed(columns.begin(), columns.end());
  RowSpace rs;
  for (const auto& row : rows) {
    SparseRow r;
    for (const auto& [c, p] : row)
      if (allowed.count(c)) r.emplace(c, p);
    if (!r.empty()) rs.insert(r);
  }
  std::vector<SparseRow> basis;
  for (std::size_t f : columns) {
    if (rs.pivots().count(f)) continue;
    SparseRatRow v;
    v.emplace(f, RatFunc::constant(vars, 1));
    for (const auto& [col, ri] : rs.pivots()) {
      const SparseRow& row = rs.rows()[ri];
      auto it = row.find(f);
      if (it == row.end()) continue;
      v.emplace(col, -RatFunc(it->second, row.at(col)));
    }
    SparseRow out = clear_denominators(v);
    make_primitive(out);
    basis.push_back(std::move(out));
  }
  return basis;
}

inline std::vector<SparseRow> nullspace(const std::vector<SparseRow>& rows, std::size_t ncols,
                                        const VarTablePtr& vars) {
  std::vector<std::size_t> cols(ncols);
  for (std::size_t c = 0; c < ncols; ++c) cols[c] = c;
  return nullspace(rows, cols, vars);
}

/// Particular solution of A x = b (b stored in column `ncols`), free
/// variables set to zero; nullopt when inconsistent.
inline std::optional<std::vector<RatFunc>> solve_linear(const std::vector<SparseRow>& augmented, std::size_t ncols,
                                                        const VarTablePtr& vars) {
  RowSpace rs;
  for (const auto& r : augmented) rs.insert(r);
  if (rs.pivots().count(ncols)) return std::nullopt;
  std::vector<RatFunc> x(ncols, RatFunc(Poly(vars)));
  for (const auto& [col, ri] : rs.pivots()) {
    const SparseRow& row = rs.rows()[ri];
    auto it = row.find(ncols);
    if (it == row.end()) continue;
    x[col] = RatFunc(it->second, row.at(col));
  }
  return x;
}

/// Splits p by its monomials in the `key` variables; each key maps to the
/// coefficient polynomial in the remaining variables.
inline std::map<Monomial, Poly, GrlexGreater> collect(const Poly& p, const std::vector<bool>& key) {
  std::map<Monomial, std::vector<Poly::Term>, GrlexGreater> parts;
  for (const auto& t : p.terms()) {
    Monomial k, rest = t.mono;
    for (std::size_t v = 0; v < key.size(); ++v)
      if (key[v] && t.mono[v]) {
        k.set(v, t.mono[v]);
        rest.set(v, 0);
      }
    parts[k].push_back({rest, t.coef});
  }
  std::map<Monomial, Poly, GrlexGreater> out;
  for (auto& [k, terms] : parts) out.emplace(k, Poly::from_terms(p.vars(), std::move(terms)));
  return out;
}

/// Dense matrix of rational functions.
using RatMatrix = std::vector<std::vector<RatFunc>>;

/// Exact rank over the rational-function field in all variables.
inline std::size_t symbolic_rank(const RatMatrix& m) {
  RowSpace rs;
  for (const auto& row : m) {
    SparseRatRow r;
    for (std::size_t c = 0; c < row.size(); ++c)
      if (!row[c].is_zero()) r.emplace(c, row[c]);
    if (!r.empty()) rs.insert(clear_denominators(r));
  }
  return rs.rank();
}

}  // namespace plq
