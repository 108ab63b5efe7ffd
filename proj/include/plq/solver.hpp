#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "monomials.hpp"
#include "structure.hpp"

namespace plq {

struct AnsatzSpec {
  unsigned max_degree = 2;
  unsigned inverse_degree = 0;
  bool allow_log = false;
  std::set<std::size_t> invertible;  ///< generator positions
};

/// One basis function of the ansatz: a Laurent monomial or log(u_k).
struct AnsatzColumn {
  LaurentMonomial mono;
  std::optional<std::size_t> log_of;  ///< generator position
  unsigned degree = 1;                ///< filtration degree, at least 1
  LogExpr expr;
};

inline std::vector<AnsatzColumn> ansatz_basis(const BracketTable& t, const AnsatzSpec& spec) {
  if (spec.max_degree < 1) throw Error("max_degree must be at least 1");
  std::vector<AnsatzColumn> cols;
  const auto& vt = t.vars();
  for (auto& m : laurent_monomials(t.size(), spec.invertible, spec.max_degree, spec.inverse_degree, false)) {
    AnsatzColumn c;
    c.degree = std::max(1u, m.positive_degree);
    c.expr = LogExpr(m.to_ratfunc(vt));
    c.mono = std::move(m);
    cols.push_back(std::move(c));
  }
  if (spec.allow_log)
    for (std::size_t k : spec.invertible) {
      AnsatzColumn c;
      c.mono.exps.assign(t.size(), 0);
      c.log_of = k;
      c.expr = LogExpr::log_of(vt, t.generator(k));
      cols.push_back(std::move(c));
    }
  if (cols.empty()) throw Error("ansatz basis is empty");
  return cols;
}

/// Coefficient system of sum_i dF/du_i f_ij = 0 (j = 1..r) for
/// F = sum_m c_m column_m. Rows are (equation, generator monomial) pairs;
/// entries are polynomials in the parameters.
struct LinearSystem {
  std::vector<AnsatzColumn> columns;
  std::vector<SparseRow> rows;
  std::vector<std::pair<std::size_t, Monomial>> row_labels;
};

inline LinearSystem assemble_system(const BracketTable& t, const AnsatzSpec& spec) {
  LinearSystem sys;
  sys.columns = ansatz_basis(t, spec);
  const auto& vt = t.vars();
  std::vector<bool> key(vt->size(), false);
  for (std::size_t g : vt->generators()) key[g] = true;
  for (std::size_t j = 0; j < t.size(); ++j) {
    std::vector<RatFunc> e;
    e.reserve(sys.columns.size());
    Poly l = Poly::constant(vt, 1);
    for (const auto& c : sys.columns) {
      e.push_back(t.bracket_with(c.expr, j));
      l = detail::denominator_lcm(l, e.back().den());
    }
    std::map<Monomial, SparseRow, GrlexGreater> rows;
    for (std::size_t c = 0; c < e.size(); ++c) {
      if (e[c].is_zero()) continue;
      Poly p = e[c].num() * *divide_exact(l, e[c].den());
      for (auto& [mono, coef] : collect(p, key)) rows[mono].emplace(c, std::move(coef));
    }
    for (auto& [mono, row] : rows) {
      sys.row_labels.emplace_back(j, mono);
      sys.rows.push_back(std::move(row));
    }
  }
  return sys;
}

struct InvariantCheck {
  bool ok = true;
  std::vector<RatFunc> residuals;  ///< {F, u_j}
};

inline InvariantCheck verify_invariant(const LogExpr& f, const BracketTable& t) {
  InvariantCheck out;
  for (std::size_t j = 0; j < t.size(); ++j) {
    out.residuals.push_back(t.bracket_with(f, j));
    out.ok = out.ok && out.residuals.back().is_zero();
  }
  return out;
}

/// Exact rank of the Jacobian [dC_k/du_i], maximized over the witness and
/// `fresh` random points. Points where some derivative is undefined are
/// skipped.
inline std::size_t independence_rank(const std::vector<LogExpr>& fs, const BracketTable& t,
                                     const RationalPoint& witness = {}, std::uint64_t seed = default_seed,
                                     std::size_t fresh = 8) {
  if (fs.empty()) return 0;
  std::vector<std::vector<RatFunc>> jac;
  for (const auto& f : fs) {
    jac.emplace_back();
    for (std::size_t i = 0; i < t.size(); ++i) jac.back().push_back(differentiate(f, t.generator(i)));
  }
  auto rank_at = [&](const RationalPoint& x) -> std::optional<std::size_t> {
    RationalMatrix m;
    for (const auto& row : jac) {
      m.emplace_back();
      for (const auto& d : row) {
        auto v = evaluate(d, x);
        if (!v) return std::nullopt;
        m.back().push_back(*v);
      }
    }
    return rank(m);
  };
  std::size_t best = 0;
  if (!witness.empty())
    if (auto r = rank_at(witness)) best = *r;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t got = 0, tries = 0; got < fresh && tries < 16 * fresh; ++tries) {
    auto r = rank_at(random_point(*t.vars(), rng));
    if (!r) continue;
    ++got;
    best = std::max(best, *r);
  }
  return best;
}

struct CasimirSolution {
  LogExpr expr;
  bool verified = false;
  bool central = false;  ///< a central generator; any function of it is a Casimir
  unsigned degree = 1;
};

struct CasimirBasis {
  std::vector<CasimirSolution> solutions;
  std::vector<std::size_t> central;  ///< generator positions
  std::size_t corank_expected = 0;
  std::size_t functional_independence_rank = 0;
  bool jacobi_ok = true;
  AnsatzSpec ansatz;

  std::vector<LogExpr> expressions() const {
    std::vector<LogExpr> out;
    for (const auto& s : solutions) out.push_back(s.expr);
    return out;
  }
};

namespace detail {

/// Coefficient vector of e over the ansatz columns, or nullopt if e leaves
/// the ansatz space.
inline std::optional<SparseRow> to_columns(const LogExpr& e, const std::vector<AnsatzColumn>& cols,
                                           const BracketTable& t) {
  const auto& vt = t.vars();
  std::map<std::vector<int>, std::size_t> index;
  std::map<std::size_t, std::size_t> log_index;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].log_of)
      log_index[*cols[c].log_of] = c;
    else
      index[cols[c].mono.exps] = c;
  }
  SparseRatRow out;
  auto add = [&](std::size_t c, const RatFunc& f) {
    auto it = out.find(c);
    if (it == out.end())
      out.emplace(c, f);
    else
      it->second += f;
  };
  const RatFunc& r = e.rational_part();
  if (!r.is_zero()) {
    if (!r.den().is_monomial()) return std::nullopt;
    const auto& d = r.den().leading();
    Monomial dparam;
    for (std::size_t p : vt->parameters()) dparam.set(p, d.mono[p]);
    for (const auto& term : r.num().terms()) {
      std::vector<int> exps(t.size());
      Monomial param;
      for (std::size_t k = 0; k < t.size(); ++k) {
        std::size_t g = t.generator(k);
        exps[k] = int(term.mono[g]) - int(d.mono[g]);
      }
      for (std::size_t p : vt->parameters()) param.set(p, term.mono[p]);
      bool constant = true;
      for (int x : exps) constant = constant && x == 0;
      if (constant) return std::nullopt;  // constants are not in the ansatz
      auto it = index.find(exps);
      if (it == index.end()) return std::nullopt;
      add(it->second, RatFunc(Poly::monomial(vt, param, term.coef), Poly::monomial(vt, dparam, d.coef)));
    }
  }
  for (const auto& l : e.log_terms()) {
    std::size_t pos = vt->generator_position(l.arg);
    auto it = log_index.find(pos);
    if (it == log_index.end()) return std::nullopt;
    for (std::size_t g : vt->generators())
      if (l.coef.uses(g)) return std::nullopt;
    add(it->second, l.coef);
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  if (out.empty()) return std::nullopt;
  return clear_denominators(out);
}

inline LogExpr from_columns(const SparseRow& v, const std::vector<AnsatzColumn>& cols, const VarTablePtr& vars) {
  LogExpr e{RatFunc::zero(vars)};
  for (const auto& [c, p] : v) e += cols[c].expr.times(RatFunc(p));
  return e;
}

/// Primitive, with the canonically first coefficient scaled to 1 (to a
/// leading numeric coefficient 1 when it depends on parameters).
inline void normalize_solution(SparseRow& v) {
  make_primitive(v);
  if (v.empty()) return;
  const Poly& lead = v.begin()->second;
  Rational s = 1 / lead.leading().coef;
  for (auto& [c, p] : v) p = p.scaled(s);
}

}  // namespace detail

/// Casimir basis within the ansatz. Solutions are found degree by degree;
/// a candidate is kept only if it is not in the span of products of the
/// solutions already accepted (restricted to the ansatz).
inline CasimirBasis solve_casimirs(const BracketTable& t, const AnsatzSpec& spec,
                                   std::optional<std::size_t> corank = std::nullopt,
                                   const RationalPoint& witness = {}, std::uint64_t seed = default_seed) {
  CasimirBasis basis;
  basis.ansatz = spec;
  basis.jacobi_ok = jacobi_check(t).pass;
  basis.central = detect_central(t);
  basis.corank_expected = corank ? *corank : generic_rank(t, seed).corank;
  const auto& vt = t.vars();
  LinearSystem sys = assemble_system(t, spec);
  const auto& cols = sys.columns;

  std::vector<SparseRow> accepted;  // coefficient vectors
  std::vector<unsigned> accepted_degree;
  for (unsigned d = 1; d <= spec.max_degree; ++d) {
    std::vector<std::size_t> allowed;
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c].degree <= d) allowed.push_back(c);
    if (allowed.empty()) continue;

    // Span of the accepted solutions and their products within the ansatz.
    RowSpace seed_space;
    std::vector<LogExpr> sols;
    for (std::size_t k = 0; k < accepted.size(); ++k) {
      seed_space.insert(accepted[k]);
      sols.push_back(detail::from_columns(accepted[k], cols, vt));
    }
    // Products of size >= 2, built as nondecreasing index sequences.
    struct Prod {
      LogExpr e;
      std::size_t last;
      unsigned degree;
    };
    std::vector<Prod> frontier;
    for (std::size_t k = 0; k < sols.size(); ++k)
      if (!sols[k].has_logs()) frontier.push_back({sols[k], k, accepted_degree[k]});
    while (!frontier.empty()) {
      std::vector<Prod> next;
      for (const auto& p : frontier)
        for (std::size_t k = p.last; k < sols.size(); ++k) {
          if (sols[k].has_logs() || p.degree + accepted_degree[k] > spec.max_degree) continue;
          Prod q{p.e * sols[k], k, p.degree + accepted_degree[k]};
          if (auto v = detail::to_columns(q.e, cols, t)) seed_space.insert(*v);
          next.push_back(std::move(q));
        }
      frontier = std::move(next);
    }

    for (auto& v : nullspace(sys.rows, allowed, vt)) {
      auto r = seed_space.insert(v);
      if (!r) continue;
      SparseRow sol = *r;
      detail::normalize_solution(sol);
      unsigned deg = 1;
      for (const auto& [c, p] : sol) deg = std::max(deg, cols[c].degree);
      accepted.push_back(sol);
      accepted_degree.push_back(deg);
    }
  }

  for (std::size_t k = 0; k < accepted.size(); ++k) {
    CasimirSolution s;
    s.expr = detail::from_columns(accepted[k], cols, vt);
    s.degree = accepted_degree[k];
    s.verified = verify_invariant(s.expr, t).ok;
    for (std::size_t c : basis.central)
      if (s.expr == LogExpr(RatFunc::variable(vt, t.generator(c)))) s.central = true;
    basis.solutions.push_back(std::move(s));
  }
  basis.functional_independence_rank = independence_rank(basis.expressions(), t, witness, seed);
  return basis;
}

/// Whether f (a Casimir candidate) lies in the span of the basis within the
/// given ansatz, decided by an exact linear solve. With `products`, products
/// of basis elements that fit the ansatz join the span.
inline bool in_span(const LogExpr& f, const std::vector<LogExpr>& basis, const BracketTable& t,
                    const AnsatzSpec& spec, bool products = false) {
  auto cols = ansatz_basis(t, spec);
  auto target = detail::to_columns(f, cols, t);
  if (!target) return false;
  std::vector<SparseRow> vecs;
  std::vector<LogExpr> elems;
  for (const auto& b : basis) {
    auto v = detail::to_columns(b, cols, t);
    if (!v) return false;
    vecs.push_back(std::move(*v));
    elems.push_back(b);
  }
  if (products) {
    std::vector<std::pair<LogExpr, std::size_t>> frontier;
    for (std::size_t k = 0; k < elems.size(); ++k)
      if (!elems[k].has_logs()) frontier.emplace_back(elems[k], k);
    while (!frontier.empty()) {
      std::vector<std::pair<LogExpr, std::size_t>> next;
      for (const auto& [e, last] : frontier)
        for (std::size_t k = last; k < elems.size(); ++k) {
          if (elems[k].has_logs()) continue;
          LogExpr q = e * elems[k];
          if (auto v = detail::to_columns(q, cols, t)) {
            vecs.push_back(std::move(*v));
            next.emplace_back(std::move(q), k);
          }
        }
      frontier = std::move(next);
    }
  }
  // Transposed system: one row per ansatz column, basis vectors as unknowns.
  std::map<std::size_t, SparseRow> rows;
  for (std::size_t k = 0; k < vecs.size(); ++k)
    for (const auto& [c, p] : vecs[k]) rows[c].emplace(k, p);
  for (const auto& [c, p] : *target) rows[c].emplace(vecs.size(), p);
  std::vector<SparseRow> sys;
  for (auto& [c, r] : rows) sys.push_back(std::move(r));
  return solve_linear(sys, vecs.size(), t.vars()).has_value();
}

}  // namespace plq
