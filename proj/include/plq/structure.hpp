#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eval.hpp"
#include "linalg.hpp"

namespace plq {

/// Skew table f_ij = {u_i, u_j} over the generators of a VarTable. Indices
/// are generator positions (0..r-1), not variable indices. Only i<j is
/// stored; the other half is implied.
class BracketTable {
 public:
  BracketTable() = default;
  explicit BracketTable(VarTablePtr vars) : vars_(std::move(vars)) {
    r_ = vars_->generators().size();
    upper_.assign(r_ * (r_ > 0 ? r_ - 1 : 0) / 2, RatFunc(Poly(vars_)));
  }

  std::size_t size() const { return r_; }
  const VarTablePtr& vars() const { return vars_; }

  /// Variable index of the generator at position i.
  std::size_t generator(std::size_t i) const { return vars_->generators().at(i); }

  void set(std::size_t i, std::size_t j, RatFunc f) {
    if (i == j) throw Error("a generator's bracket with itself is zero");
    if (i >= r_ || j >= r_) throw Error("bracket index out of range");
    for (std::size_t v = 0; v < vars_->size(); ++v) {
      VarKind k = vars_->kind(v);
      if ((k == VarKind::canonical_q || k == VarKind::canonical_p || k == VarKind::algebraic) && f.uses(v))
        throw Error("bracket entry uses canonical variable '" + vars_->name(v) + "'");
    }
    if (i > j) {
      std::swap(i, j);
      f = -f;
    }
    upper_[slot(i, j)] = std::move(f);
  }

  RatFunc entry(std::size_t i, std::size_t j) const {
    if (i == j) return RatFunc(Poly(vars_));
    if (i < j) return upper_[slot(i, j)];
    return -upper_[slot(j, i)];
  }

  /// {g, u_j} for a function g of the generators: sum_i dg/du_i f_ij.
  RatFunc bracket_with(const LogExpr& g, std::size_t j) const {
    RatFunc acc = RatFunc::zero(vars_);
    for (std::size_t i = 0; i < r_; ++i) {
      if (i == j || !g.uses(generator(i))) continue;
      const RatFunc f = entry(i, j);
      if (f.is_zero()) continue;
      acc += differentiate(g, generator(i)) * f;
    }
    return acc;
  }

  /// Applies the same substitution (typically parameters) to every entry.
  BracketTable substituted(const Bindings& b) const {
    BracketTable t(vars_);
    for (std::size_t k = 0; k < upper_.size(); ++k) t.upper_[k] = substitute(upper_[k], b);
    return t;
  }

 private:
  std::size_t slot(std::size_t i, std::size_t j) const { return i * (2 * r_ - i - 1) / 2 + (j - i - 1); }

  VarTablePtr vars_;
  std::size_t r_ = 0;
  std::vector<RatFunc> upper_;
};

struct JacobiTriple {
  std::size_t i, j, k;
  RatFunc cyclic_sum;
  bool pass;
};

struct JacobiReport {
  std::vector<JacobiTriple> triples;
  bool pass = true;
  std::vector<const JacobiTriple*> failures() const {
    std::vector<const JacobiTriple*> out;
    for (const auto& t : triples)
      if (!t.pass) out.push_back(&t);
    return out;
  }
};

/// {u_i,{u_j,u_k}} + {u_j,{u_k,u_i}} + {u_k,{u_i,u_j}} for every triple.
inline JacobiReport jacobi_check(const BracketTable& t) {
  JacobiReport rep;
  const std::size_t r = t.size();
  // {u_a, g} = sum_m dg/du_m f_am
  auto outer = [&](std::size_t a, const RatFunc& g) {
    RatFunc acc = RatFunc::zero(t.vars());
    for (std::size_t m = 0; m < r; ++m) {
      if (m == a || !g.uses(t.generator(m))) continue;
      acc += differentiate(g, t.generator(m)) * t.entry(a, m);
    }
    return acc;
  };
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      for (std::size_t k = j + 1; k < r; ++k) {
        RatFunc s = outer(i, t.entry(j, k)) + outer(j, t.entry(k, i)) + outer(k, t.entry(i, j));
        bool ok = s.is_zero();
        rep.pass = rep.pass && ok;
        rep.triples.push_back({i, j, k, std::move(s), ok});
      }
  return rep;
}

/// Full r x r skew matrix [f_ij].
inline RatMatrix structure_matrix(const BracketTable& t) {
  RatMatrix m(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) m[i].push_back(t.entry(i, j));
  return m;
}

namespace detail {

inline RatFunc pfaffian_of(const RatMatrix& a, std::vector<std::size_t> idx, const VarTablePtr& vars) {
  if (idx.empty()) return RatFunc::constant(vars, 1);
  const std::size_t first = idx[0];
  RatFunc acc = RatFunc::zero(vars);
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const RatFunc& e = a[first][idx[k]];
    if (e.is_zero()) continue;
    std::vector<std::size_t> rest;
    for (std::size_t m = 1; m < idx.size(); ++m)
      if (m != k) rest.push_back(idx[m]);
    RatFunc term = e * pfaffian_of(a, rest, vars);
    if (k % 2 == 1)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

}  // namespace detail

/// Pfaffian of an even-dimensional skew matrix by expansion along the first row.
inline RatFunc pfaffian(const RatMatrix& a, const VarTablePtr& vars) {
  if (a.size() % 2) throw Error("Pfaffian of an odd-dimensional matrix");
  std::vector<std::size_t> idx(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) idx[k] = k;
  return detail::pfaffian_of(a, idx, vars);
}

/// Determinant by elimination over the rational-function field.
inline RatFunc determinant(RatMatrix a, const VarTablePtr& vars) {
  const std::size_t n = a.size();
  RatFunc det = RatFunc::constant(vars, 1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c].is_zero()) ++piv;
    if (piv == n) return RatFunc(Poly(vars));
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    RatFunc inv = a[c][c].inverse();
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c].is_zero()) continue;
      RatFunc f = a[i][c] * inv;
      for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
    }
  }
  return det;
}

struct RankReport {
  std::size_t rank = 0;          ///< generic rank p (symbolic, authoritative)
  std::size_t sampled_rank = 0;  ///< maximum rank over the sample points
  std::size_t corank = 0;
  std::uint64_t seed = 0;
  RationalPoint witness;  ///< a point where the rank p is attained
  /// Pfaffian for even r; zero for odd r, where the determinant vanishes
  /// identically.
  RatFunc degeneracy;
  bool odd_dimension = false;
};

constexpr std::uint64_t default_seed = 20240611;

namespace detail {

inline std::optional<RationalMatrix> evaluate_matrix(const RatMatrix& m, const RationalPoint& x) {
  RationalMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) {
      auto v = evaluate(e, x);
      if (!v) return std::nullopt;
      out[i].push_back(*v);
    }
  return out;
}

}  // namespace detail

/// Generic rank of the structure matrix: exact ranks at 16 random rational
/// points (the fast path), confirmed by elimination over the rational-function
/// field. The witness is a sample point attaining the symbolic rank.
inline RankReport generic_rank(const BracketTable& t, std::uint64_t seed = default_seed, std::size_t samples = 16) {
  RankReport rep;
  rep.seed = seed;
  RatMatrix m = structure_matrix(t);
  rep.rank = symbolic_rank(m);
  rep.corank = t.size() - rep.rank;
  std::mt19937_64 rng(seed);
  std::size_t drawn = 0, attempts = 0;
  while ((drawn < samples || rep.sampled_rank < rep.rank) && attempts < 16 * samples) {
    ++attempts;
    RationalPoint x = random_point(*t.vars(), rng);
    auto v = detail::evaluate_matrix(m, x);
    if (!v) continue;
    ++drawn;
    std::size_t r = rank(*v);
    if (r > rep.sampled_rank || rep.witness.empty()) {
      rep.sampled_rank = std::max(rep.sampled_rank, r);
      if (r == rep.sampled_rank) rep.witness = x;
    }
  }
  rep.odd_dimension = t.size() % 2 == 1;
  rep.degeneracy = rep.odd_dimension ? RatFunc(Poly(t.vars())) : pfaffian(m, t.vars());
  return rep;
}

/// Positions of generators whose whole row of the structure matrix is zero.
inline std::vector<std::size_t> detect_central(const BracketTable& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool central = true;
    for (std::size_t j = 0; j < t.size() && central; ++j) central = t.entry(i, j).is_zero();
    if (central) out.push_back(i);
  }
  return out;
}

/// True iff the degeneracy polynomial vanishes identically once the parameter
/// substitution is applied. Odd r is always degenerate.
inline bool verify_parameter_constraint(const BracketTable& t, const Bindings& constraint) {
  if (constraint.empty()) throw Error("constraint eliminates no parameter");
  for (const auto& [v, f] : constraint)
    if (t.vars()->kind(v) != VarKind::parameter)
      throw Error("constraint target '" + t.vars()->name(v) + "' is not a parameter");
  if (t.size() % 2) return true;
  BracketTable s = t.substituted(constraint);
  return pfaffian(structure_matrix(s), t.vars()).is_zero();
}

}  // namespace plq
