#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "monomials.hpp"
#include "structure.hpp"

namespace plq {

/// Generator -> expression in canonical variables (parameters and rho
/// allowed). Indexed by generator position.
class CanonicalRealization {
 public:
  CanonicalRealization() = default;
  CanonicalRealization(VarTablePtr vars, std::vector<RatFunc> exprs) : vars_(std::move(vars)), exprs_(std::move(exprs)) {
    if (exprs_.size() != vars_->generators().size())
      throw Error("realization must give one expression per generator");
    for (std::size_t k = 0; k < exprs_.size(); ++k)
      for (std::size_t g : vars_->generators())
        if (exprs_[k].uses(g))
          throw Error("realization of '" + vars_->name(vars_->generators()[k]) + "' uses generator '" +
                      vars_->name(g) + "'");
  }

  const VarTablePtr& vars() const { return vars_; }
  std::size_t size() const { return exprs_.size(); }
  const RatFunc& operator[](std::size_t i) const { return exprs_.at(i); }

  Bindings bindings() const {
    Bindings b;
    for (std::size_t k = 0; k < exprs_.size(); ++k) b.emplace(vars_->generators()[k], exprs_[k]);
    return b;
  }

 private:
  VarTablePtr vars_;
  std::vector<RatFunc> exprs_;
};

/// {f,g} = sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k).
inline RatFunc canonical_bracket(const RatFunc& f, const RatFunc& g) {
  const auto& vt = f.vars() ? f.vars() : g.vars();
  RatFunc acc = RatFunc::zero(vt);
  if (!vt) return acc;
  for (std::size_t k = 0; k < vt->qs().size(); ++k) {
    std::size_t q = vt->qs()[k], p = vt->ps()[k];
    acc += differentiate(f, q) * differentiate(g, p) - differentiate(f, p) * differentiate(g, q);
  }
  return acc;
}

inline LogExpr canonical_bracket(const LogExpr& f, const LogExpr& g) {
  if (f.has_logs() || g.has_logs()) throw Error("canonical bracket of an expression with log terms");
  return canonical_bracket(f.rational_part(), g.rational_part());
}

class NotExpressible : public Error {
 public:
  using Error::Error;
};

/// Finds g(u) with g(u(q,p)) = target, searching generator monomials of
/// degree <= max_degree divided by monomials of degree <= inverse_degree in
/// the invertible generators. Coefficients may depend on parameters.
inline RatFunc express_in_generators(const LogExpr& target, const CanonicalRealization& real, unsigned max_degree,
                                     unsigned inverse_degree, const std::set<std::size_t>& invertible = {}) {
  if (max_degree < 1) throw Error("max_degree must be at least 1");
  if (target.has_logs()) throw NotExpressible("target has log terms");
  const auto& vt = real.vars();
  const auto cols = laurent_monomials(real.size(), invertible, max_degree, inverse_degree, true);
  const Bindings b = real.bindings();

  std::vector<RatFunc> realized;
  realized.reserve(cols.size());
  for (const auto& m : cols) realized.push_back(substitute(m.to_ratfunc(vt), b));
  const RatFunc& t = target.rational_part();

  Poly l = t.den();
  for (const auto& f : realized) l = detail::denominator_lcm(l, f.den());

  std::vector<bool> key(vt->size(), true);
  for (std::size_t p : vt->parameters()) key[p] = false;

  std::map<Monomial, SparseRow, GrlexGreater> rows;
  auto add = [&](const Poly& num, const Poly& den, std::size_t col) {
    Poly scaled = num * *divide_exact(l, den);
    for (auto& [mono, coef] : collect(scaled, key)) rows[mono].emplace(col, coef);
  };
  for (std::size_t c = 0; c < cols.size(); ++c) add(realized[c].num(), realized[c].den(), c);
  add(t.num(), t.den(), cols.size());

  std::vector<SparseRow> sys;
  for (auto& [mono, row] : rows) sys.push_back(std::move(row));
  auto x = solve_linear(sys, cols.size(), vt);
  auto fail = [&] {
    return NotExpressible("not expressible through generator monomials of degree <= " + std::to_string(max_degree) +
                          " with inverse degree <= " + std::to_string(inverse_degree));
  };
  if (!x) throw fail();
  RatFunc g = RatFunc::zero(vt);
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (!(*x)[c].is_zero()) g += (*x)[c] * cols[c].to_ratfunc(vt);
  if (!(substitute(g, b) - t).is_zero()) throw fail();
  return g;
}

struct ClosurePair {
  std::size_t i, j;
  bool pass;
  RatFunc bracket;   ///< canonical bracket of the realizations
  RatFunc expected;  ///< table entry with the realization substituted
  RatFunc residual;  ///< bracket - expected
  bool screened_out = false;  ///< rejected by the numeric screen
};

struct ClosureReport {
  std::vector<ClosurePair> pairs;
  bool pass = true;
};

/// Checks {u_i(q,p), u_j(q,p)} = f_ij(u(q,p)) for every i<j. Each pair is
/// first screened numerically at rational points with rational rho.
inline ClosureReport verify_closure(const CanonicalRealization& real, const BracketTable& table,
                                    std::uint64_t seed = default_seed) {
  if (real.size() != table.size()) throw Error("realization and table have different generator counts");
  const auto& vt = real.vars();
  const std::size_t r = real.size(), n = vt->qs().size();
  const Bindings b = real.bindings();

  std::vector<std::vector<RatFunc>> dq(r), dp(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      dq[i].push_back(differentiate(real[i], vt->qs()[k]));
      dp[i].push_back(differentiate(real[i], vt->ps()[k]));
    }

  // Screening points: gradients, realization values and the point with the
  // generators set to their realized values.
  struct Sample {
    std::vector<std::vector<Rational>> gq, gp;
    RationalPoint at_generators;
  };
  std::vector<Sample> samples;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 20 && samples.size() < 3; ++attempt) {
    RationalPoint x = random_point(*vt, rng);
    Sample s;
    s.at_generators = x;
    bool ok = true;
    s.gq.resize(r);
    s.gp.resize(r);
    for (std::size_t i = 0; i < r && ok; ++i) {
      auto u = evaluate(real[i], x);
      ok = bool(u);
      if (ok) s.at_generators[vt->generators()[i]] = *u;
      for (std::size_t k = 0; k < n && ok; ++k) {
        auto a = evaluate(dq[i][k], x), c = evaluate(dp[i][k], x);
        ok = a && c;
        if (ok) {
          s.gq[i].push_back(*a);
          s.gp[i].push_back(*c);
        }
      }
    }
    if (ok) samples.push_back(std::move(s));
  }

  ClosureReport rep;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      ClosurePair pr{i, j, false, RatFunc(Poly(vt)), RatFunc(Poly(vt)), RatFunc(Poly(vt))};
      const RatFunc f = table.entry(i, j);
      for (const auto& s : samples) {
        Rational num = 0;
        for (std::size_t k = 0; k < n; ++k) num += s.gq[i][k] * s.gp[j][k] - s.gp[i][k] * s.gq[j][k];
        auto expect = evaluate(f, s.at_generators);
        if (expect && *expect != num) {
          pr.screened_out = true;
          break;
        }
      }
      for (std::size_t k = 0; k < n; ++k) pr.bracket += dq[i][k] * dp[j][k] - dp[i][k] * dq[j][k];
      pr.expected = substitute(f, b);
      pr.residual = pr.bracket - pr.expected;
      pr.pass = pr.residual.is_zero();
      if (pr.pass && pr.screened_out) throw Error("numeric screen contradicts the exact closure check");
      rep.pass = rep.pass && pr.pass;
      rep.pairs.push_back(std::move(pr));
    }
  return rep;
}

}  // namespace plq
