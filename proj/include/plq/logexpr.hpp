#pragma once

#include <algorithm>
#include <map>
#include <unordered_map>
#include <vector>

#include "ratfunc.hpp"

namespace plq {

/// coefficient * log(arg), arg a generator variable.
struct LogTerm {
  std::size_t arg;
  RatFunc coef;
};

/// A rational function plus a linear combination of formal logarithms of
/// generator variables. Log terms only ever occur linearly.
class LogExpr {
 public:
  LogExpr() = default;
  LogExpr(RatFunc r) : rational_(std::move(r)) {}  // NOLINT(implicit)

  LogExpr(RatFunc r, std::vector<LogTerm> logs) : rational_(std::move(r)), logs_(std::move(logs)) { tidy(); }

  static LogExpr log_of(const VarTablePtr& vars, std::size_t generator) {
    if (!vars->is_generator(generator))
      throw Error("log applied to non-generator '" + vars->name(generator) + "'");
    return LogExpr(RatFunc(Poly(vars)), {LogTerm{generator, RatFunc::constant(vars, 1)}});
  }

  const RatFunc& rational_part() const { return rational_; }
  const std::vector<LogTerm>& log_terms() const { return logs_; }
  bool has_logs() const { return !logs_.empty(); }
  const VarTablePtr& vars() const { return rational_.vars(); }

  bool is_zero() const { return rational_.is_zero() && logs_.empty(); }

  bool uses(std::size_t var) const {
    if (rational_.uses(var)) return true;
    for (const auto& l : logs_)
      if (l.arg == var || l.coef.uses(var)) return true;
    return false;
  }

  friend bool operator==(const LogExpr& a, const LogExpr& b) {
    if (a.rational_ != b.rational_ || a.logs_.size() != b.logs_.size()) return false;
    for (std::size_t i = 0; i < a.logs_.size(); ++i)
      if (a.logs_[i].arg != b.logs_[i].arg || a.logs_[i].coef != b.logs_[i].coef) return false;
    return true;
  }

  LogExpr operator-() const {
    LogExpr r = *this;
    r.rational_ = -r.rational_;
    for (auto& l : r.logs_) l.coef = -l.coef;
    return r;
  }

  friend LogExpr operator+(const LogExpr& a, const LogExpr& b) { return combine(a, b, false); }
  friend LogExpr operator-(const LogExpr& a, const LogExpr& b) { return combine(a, b, true); }

  friend LogExpr operator*(const LogExpr& a, const LogExpr& b) {
    if (a.has_logs() && b.has_logs()) throw Error("unsupported product of two expressions with log terms");
    if (a.has_logs()) return a.times(b.rational_);
    return b.times(a.rational_);
  }

  friend LogExpr operator/(const LogExpr& a, const LogExpr& b) {
    if (b.has_logs()) throw Error("division by an expression with log terms");
    if (b.rational_.is_zero()) throw DivisionByZero();
    return a.times(b.rational_.inverse());
  }

  LogExpr& operator+=(const LogExpr& b) { return *this = *this + b; }
  LogExpr& operator-=(const LogExpr& b) { return *this = *this - b; }

  LogExpr times(const RatFunc& f) const {
    LogExpr r;
    r.rational_ = rational_ * f;
    for (const auto& l : logs_) r.logs_.push_back({l.arg, l.coef * f});
    r.tidy();
    return r;
  }

 private:
  static LogExpr combine(const LogExpr& a, const LogExpr& b, bool subtract) {
    LogExpr r;
    r.rational_ = subtract ? a.rational_ - b.rational_ : a.rational_ + b.rational_;
    r.logs_ = a.logs_;
    for (const auto& l : b.logs_) r.logs_.push_back({l.arg, subtract ? -l.coef : l.coef});
    r.tidy();
    return r;
  }

  void tidy() {
    std::sort(logs_.begin(), logs_.end(), [](const LogTerm& x, const LogTerm& y) { return x.arg < y.arg; });
    std::vector<LogTerm> out;
    for (auto& l : logs_) {
      if (!out.empty() && out.back().arg == l.arg)
        out.back().coef += l.coef;
      else
        out.push_back(std::move(l));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const LogTerm& l) { return l.coef.is_zero(); }),
              out.end());
    logs_ = std::move(out);
  }

  RatFunc rational_;
  std::vector<LogTerm> logs_;
};

inline bool is_zero(const LogExpr& e) { return e.is_zero(); }
inline bool is_zero(const RatFunc& e) { return e.is_zero(); }

/// q1^2 + ... + qn^2, the square of the algebraic element.
inline Poly radius_squared(const VarTablePtr& vars) {
  Poly s(vars);
  for (std::size_t q : vars->qs()) s += Poly::variable(vars, q, 2);
  return s;
}

/// Partial derivative of a polynomial. For a canonical q variable and a
/// polynomial involving rho, the chain rule d(rho)/dq_k = q_k / rho applies.
inline RatFunc differentiate(const Poly& p, std::size_t var) {
  const auto& vt = p.vars();
  if (!vt) return RatFunc();
  if (vt->rho() && var == *vt->rho()) throw Error("cannot differentiate with respect to the algebraic element");
  RatFunc d(p.raw_derivative(var));
  if (vt->kind(var) == VarKind::canonical_q && p.has_algebraic()) {
    Poly b = p.split_algebraic().second;
    Poly num = b * Poly::variable(vt, var) * Poly::variable(vt, *vt->rho());
    d += RatFunc(num, radius_squared(vt));
  }
  return d;
}

inline RatFunc differentiate(const RatFunc& f, std::size_t var) {
  if (f.is_polynomial()) return differentiate(f.num(), var).scaled(1 / f.den().constant_value());
  RatFunc dn = differentiate(f.num(), var);
  Poly dd = f.den().raw_derivative(var);  // den is free of rho
  if (dd.is_zero()) return dn * RatFunc(Poly::constant(f.vars(), 1), f.den());
  RatFunc top = dn * RatFunc(f.den()) - RatFunc(f.num() * dd);
  return top * RatFunc(Poly::constant(f.vars(), 1), f.den() * f.den());
}

/// Partial derivative of an expression with log terms; always rational since
/// d/du log(u) = 1/u. Log coefficients must not depend on `var`.
inline RatFunc differentiate(const LogExpr& e, std::size_t var) {
  RatFunc d = differentiate(e.rational_part(), var);
  for (const auto& l : e.log_terms()) {
    if (l.coef.uses(var))
      throw Error("log coefficient depends on the differentiation variable");
    if (l.arg == var) d += l.coef * RatFunc(Poly::constant(e.vars(), 1), Poly::variable(e.vars(), var));
  }
  return d;
}

using Bindings = std::map<std::size_t, RatFunc>;

namespace detail {

inline bool all_polynomial(const Bindings& b) {
  for (const auto& [v, f] : b)
    if (!f.is_polynomial()) return false;
  return true;
}

}  // namespace detail

/// Simultaneous substitution var -> expression into a polynomial.
inline RatFunc substitute(const Poly& p, const Bindings& bindings) {
  const auto& vt = p.vars();
  if (!vt || bindings.empty()) return RatFunc(p);
  const bool poly_only = detail::all_polynomial(bindings);
  // Cache of powers per bound variable.
  std::unordered_map<std::size_t, std::vector<RatFunc>> powers;
  auto power = [&](std::size_t v, unsigned e) -> const RatFunc& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(RatFunc::constant(vt, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * bindings.at(v));
    return cache[e];
  };
  if (poly_only) {
    Poly acc(vt);
    std::vector<Poly::Term> free_terms;
    for (const auto& t : p.terms()) {
      Monomial rest = t.mono;
      Poly factor = Poly::constant(vt, t.coef);
      for (const auto& [v, f] : bindings) {
        if (!t.mono[v]) continue;
        rest.set(v, 0);
        factor = factor * power(v, t.mono[v]).num();
      }
      acc += factor.times_monomial(rest);
    }
    return RatFunc(acc);
  }
  RatFunc acc{Poly(vt)};
  for (const auto& t : p.terms()) {
    Monomial rest = t.mono;
    RatFunc factor = RatFunc::constant(vt, t.coef);
    for (const auto& [v, f] : bindings) {
      if (!t.mono[v]) continue;
      rest.set(v, 0);
      factor = factor * power(v, t.mono[v]);
    }
    acc += factor * RatFunc(Poly::monomial(vt, rest));
  }
  return acc;
}

inline RatFunc substitute(const RatFunc& f, const Bindings& bindings) {
  RatFunc n = substitute(f.num(), bindings);
  RatFunc d = substitute(f.den(), bindings);
  if (d.is_zero()) throw DivisionByZero("substitution makes a denominator vanish");
  return n / d;
}

inline LogExpr substitute(const LogExpr& e, const Bindings& bindings) {
  RatFunc r = substitute(e.rational_part(), bindings);
  std::vector<LogTerm> logs;
  for (const auto& l : e.log_terms()) {
    std::size_t arg = l.arg;
    if (auto it = bindings.find(arg); it != bindings.end()) {
      const RatFunc& target = it->second;
      const auto& vt = e.vars();
      bool renamed = false;
      if (target.is_polynomial() && target.num().is_monomial() && target.num().leading().coef == 1 &&
          target.num().leading().mono.degree == 1) {
        for (std::size_t v = 0; v < vt->size(); ++v)
          if (target.num().leading().mono[v] == 1 && vt->is_generator(v)) {
            arg = v;
            renamed = true;
          }
      }
      if (!renamed)
        throw Error("substitution turns the argument of log(" + vt->name(l.arg) + ") into a non-generator");
    }
    logs.push_back({arg, substitute(l.coef, bindings)});
  }
  return LogExpr(std::move(r), std::move(logs));
}

}  // namespace plq
