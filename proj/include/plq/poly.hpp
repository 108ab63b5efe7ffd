#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "vars.hpp"

namespace plq {

using Rational = mpq_class;
using Integer = mpz_class;

/// Exponent vector over a VarTable, with cached total degree.
struct Monomial {
  std::array<std::uint16_t, VarTable::max_vars> exp{};
  std::uint32_t degree = 0;

  std::uint16_t operator[](std::size_t i) const { return exp[i]; }

  void set(std::size_t i, std::uint32_t e) {
    if (e > 0xFFFF) throw Error("exponent overflow");
    degree = degree - exp[i] + e;
    exp[i] = static_cast<std::uint16_t>(e);
  }

  bool is_one() const { return degree == 0; }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i) {
      std::uint32_t e = std::uint32_t(a.exp[i]) + b.exp[i];
      if (e > 0xFFFF) throw Error("exponent overflow");
      m.exp[i] = static_cast<std::uint16_t>(e);
    }
    m.degree = a.degree + b.degree;
    return m;
  }

  bool divides(const Monomial& b) const {
    if (degree > b.degree) return false;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i)
      if (exp[i] > b.exp[i]) return false;
    return true;
  }

  /// b / a, assuming a divides b.
  friend Monomial quotient(const Monomial& b, const Monomial& a) {
    Monomial m;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i) m.exp[i] = b.exp[i] - a.exp[i];
    m.degree = b.degree - a.degree;
    return m;
  }

  friend Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i) {
      m.exp[i] = std::min(a.exp[i], b.exp[i]);
      m.degree += m.exp[i];
    }
    return m;
  }

  friend Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i) {
      m.exp[i] = std::max(a.exp[i], b.exp[i]);
      m.degree += m.exp[i];
    }
    return m;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exp == b.exp; }
};

/// Graded lexicographic order: higher total degree first, ties broken by the
/// first variable (in declaration order) with a larger exponent.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree != b.degree) return a.degree > b.degree;
    for (std::size_t i = 0; i < VarTable::max_vars; ++i)
      if (a.exp[i] != b.exp[i]) return a.exp[i] > b.exp[i];
    return false;
  }
};

inline Monomial unit_monomial(std::size_t var, std::uint32_t e = 1) {
  Monomial m;
  m.set(var, e);
  return m;
}

/// Sparse multivariate polynomial over Q. Terms are kept strictly decreasing
/// in graded-lex order with no zero coefficients. When the table declares an
/// algebraic element rho, every term carries rho to the power 0 or 1.
class Poly {
 public:
  struct Term {
    Monomial mono;
    Rational coef;
  };

  Poly() = default;
  explicit Poly(VarTablePtr vars) : vars_(std::move(vars)) {}

  static Poly constant(VarTablePtr vars, const Rational& c) {
    Poly p(std::move(vars));
    if (c != 0) p.terms_.push_back({Monomial{}, c});
    return p;
  }

  static Poly variable(VarTablePtr vars, std::size_t idx, std::uint32_t e = 1) {
    Poly p(std::move(vars));
    p.terms_.push_back({unit_monomial(idx, e), Rational(1)});
    p.reduce_algebraic();
    return p;
  }

  static Poly monomial(VarTablePtr vars, const Monomial& m, const Rational& c = 1) {
    Poly p(std::move(vars));
    if (c != 0) p.terms_.push_back({m, c});
    p.reduce_algebraic();
    return p;
  }

  /// Builds from arbitrary (unsorted, possibly repeated) terms.
  static Poly from_terms(VarTablePtr vars, std::vector<Term> terms) {
    Poly p(std::move(vars));
    p.terms_ = std::move(terms);
    p.canonicalize();
    p.reduce_algebraic();
    return p;
  }

  const VarTablePtr& vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  bool is_monomial() const { return terms_.size() == 1; }

  Rational constant_value() const {
    if (!is_constant()) throw Error("polynomial is not constant");
    return terms_.empty() ? Rational(0) : terms_[0].coef;
  }

  const Term& leading() const {
    if (terms_.empty()) throw Error("leading term of zero polynomial");
    return terms_.front();
  }

  std::uint32_t total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree; }

  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto& t : terms_) d = std::max<std::uint32_t>(d, t.mono[var]);
    return d;
  }

  bool uses(std::size_t var) const {
    for (const auto& t : terms_)
      if (t.mono[var]) return true;
    return false;
  }

  std::vector<std::size_t> used_vars() const {
    std::vector<std::size_t> out;
    if (!vars_) return out;
    for (std::size_t v = 0; v < vars_->size(); ++v)
      if (uses(v)) out.push_back(v);
    return out;
  }

  /// Common monomial factor of all terms (the empty monomial for zero).
  Monomial monomial_content() const {
    if (terms_.empty()) return {};
    Monomial g = terms_[0].mono;
    for (const auto& t : terms_) g = gcd(g, t.mono);
    return g;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coef != b.terms_[i].coef) return false;
    return true;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
  friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    const VarTablePtr& vt = pick_vars(a, b);
    Poly r(vt);
    if (a.is_zero() || b.is_zero()) return r;
    if (a.is_constant()) return b.scaled(a.terms_[0].coef);
    if (b.is_constant()) return a.scaled(b.terms_[0].coef);
    std::map<Monomial, Rational, GrlexGreater> acc;
    const auto rho = vt ? vt->rho() : std::nullopt;
    Rational tmp;
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        Monomial m = x.mono * y.mono;
        tmp = x.coef * y.coef;
        if (rho && m[*rho] >= 2) {
          // rho^2 -> q1^2 + ... + qn^2
          m.set(*rho, m[*rho] - 2);
          for (std::size_t q : vt->qs()) {
            Monomial mq = m * unit_monomial(q, 2);
            acc[mq] += tmp;
          }
        } else {
          acc[m] += tmp;
        }
      }
    }
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.terms_.push_back({m, std::move(c)});
    return r;
  }

  Poly& operator+=(const Poly& b) { return *this = *this + b; }
  Poly& operator-=(const Poly& b) { return *this = *this - b; }
  Poly& operator*=(const Poly& b) { return *this = *this * b; }

  Poly scaled(const Rational& c) const {
    Poly r(vars_);
    if (c == 0) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.coef *= c;
    return r;
  }

  /// Multiplies by a monomial free of the algebraic element.
  Poly times_monomial(const Monomial& m) const {
    Poly r = *this;
    for (auto& t : r.terms_) t.mono = t.mono * m;
    r.reduce_algebraic();
    return r;
  }

  /// Divides every term by m, which must divide every term.
  Poly divided_by_monomial(const Monomial& m) const {
    Poly r = *this;
    for (auto& t : r.terms_) {
      if (!m.divides(t.mono)) throw Error("monomial does not divide polynomial");
      t.mono = quotient(t.mono, m);
    }
    return r;
  }

  Poly pow(unsigned e) const {
    Poly result = constant(vars_, 1);
    Poly base = *this;
    while (e) {
      if (e & 1u) result = result * base;
      e >>= 1u;
      if (e) base = base * base;
    }
    return result;
  }

  /// Partial derivative treating every variable (rho included) as independent.
  Poly raw_derivative(std::size_t var) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      auto e = t.mono[var];
      if (!e) continue;
      Term d{t.mono, t.coef * e};
      d.mono.set(var, e - 1);
      out.push_back(std::move(d));
    }
    // Monomial order is preserved by lowering a single exponent only up to
    // ties, so re-sort.
    return from_terms(vars_, std::move(out));
  }

  /// Splits P = A + B*rho with A, B free of rho. Without rho, B is zero.
  std::pair<Poly, Poly> split_algebraic() const {
    Poly a(vars_), b(vars_);
    auto rho = vars_ ? vars_->rho() : std::nullopt;
    if (!rho) return {*this, b};
    std::vector<Term> ta, tb;
    for (const auto& t : terms_) {
      if (t.mono[*rho]) {
        Term u = t;
        u.mono.set(*rho, 0);
        tb.push_back(std::move(u));
      } else {
        ta.push_back(t);
      }
    }
    return {from_terms(vars_, std::move(ta)), from_terms(vars_, std::move(tb))};
  }

  bool has_algebraic() const {
    auto rho = vars_ ? vars_->rho() : std::nullopt;
    return rho && uses(*rho);
  }

  /// Exact quotient a / b when b divides a in the polynomial ring (b must be
  /// free of the algebraic element); nullopt otherwise.
  friend std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw DivisionByZero();
    const VarTablePtr& vt = pick_vars(a, b);
    if (b.is_constant()) return a.scaled(1 / b.terms_[0].coef);
    if (a.is_zero()) return Poly(vt);
    const Term& lb = b.leading();
    if (a.total_degree() < lb.mono.degree) return std::nullopt;
    std::vector<Term> q;
    Poly rem = a;
    while (!rem.is_zero()) {
      const Term& lr = rem.leading();
      if (!lb.mono.divides(lr.mono)) return std::nullopt;
      Term t{quotient(lr.mono, lb.mono), lr.coef / lb.coef};
      Poly step(vt);
      step.terms_.reserve(b.terms_.size());
      for (const auto& bt : b.terms_) step.terms_.push_back({bt.mono * t.mono, bt.coef * t.coef});
      rem = rem - step;
      q.push_back(std::move(t));
    }
    Poly out(vt);
    out.terms_ = std::move(q);  // produced in decreasing order
    return out;
  }

  /// Rational content: positive c such that P / c has coprime integer
  /// coefficients.
  Rational rational_content() const {
    if (terms_.empty()) return 1;
    Integer g = 0, l = 1;
    for (const auto& t : terms_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den_mpz_t());
    }
    Rational c(g, l);
    c.canonicalize();
    return c;
  }

 private:
  static const VarTablePtr& pick_vars(const Poly& a, const Poly& b) {
    if (a.vars_ && b.vars_ && a.vars_ != b.vars_) throw Error("polynomials over different variable tables");
    return a.vars_ ? a.vars_ : b.vars_;
  }

  static Poly merge(const Poly& a, const Poly& b, bool subtract) {
    Poly r(pick_vars(a, b));
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    GrlexGreater gt;
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && gt(a.terms_[i].mono, b.terms_[j].mono))) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || gt(b.terms_[j].mono, a.terms_[i].mono)) {
        r.terms_.push_back(b.terms_[j]);
        if (subtract) r.terms_.back().coef = -r.terms_.back().coef;
        ++j;
      } else {
        Rational c = a.terms_[i].coef;
        if (subtract)
          c -= b.terms_[j].coef;
        else
          c += b.terms_[j].coef;
        if (c != 0) r.terms_.push_back({a.terms_[i].mono, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return GrlexGreater{}(x.mono, y.mono); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().mono == t.mono)
        out.back().coef += t.coef;
      else
        out.push_back(std::move(t));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0; }), out.end());
    terms_ = std::move(out);
  }

  void reduce_algebraic() {
    auto rho = vars_ ? vars_->rho() : std::nullopt;
    if (!rho) return;
    bool needed = false;
    for (const auto& t : terms_)
      if (t.mono[*rho] >= 2) needed = true;
    if (!needed) return;
    std::vector<Term> out;
    std::vector<Term> work = std::move(terms_);
    while (!work.empty()) {
      Term t = std::move(work.back());
      work.pop_back();
      if (t.mono[*rho] < 2) {
        out.push_back(std::move(t));
        continue;
      }
      t.mono.set(*rho, t.mono[*rho] - 2);
      for (std::size_t q : vars_->qs()) work.push_back({t.mono * unit_monomial(q, 2), t.coef});
    }
    terms_ = std::move(out);
    canonicalize();
  }

  VarTablePtr vars_;
  std::vector<Term> terms_;
};

namespace univariate {

/// Dense univariate polynomial, index = power.
using UPoly = std::vector<Rational>;

inline void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline UPoly remainder(UPoly a, const UPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t k = 0; k <= db; ++k) a[shift + k] -= f * b[k];
    a.pop_back();
    trim(a);
  }
  return a;
}

inline UPoly monic(UPoly p) {
  trim(p);
  if (p.empty()) return p;
  Rational l = p.back();
  for (auto& c : p) c /= l;
  return p;
}

inline UPoly gcd(UPoly a, UPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    UPoly r = remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(std::move(a));
}

inline UPoly to_dense(const Poly& p, std::size_t var) {
  UPoly out(p.degree_in(var) + 1);
  for (const auto& t : p.terms()) out[t.mono[var]] += t.coef;
  trim(out);
  return out;
}

inline Poly from_dense(const UPoly& u, const VarTablePtr& vars, std::size_t var) {
  std::vector<Poly::Term> terms;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] != 0) terms.push_back({unit_monomial(var, static_cast<std::uint32_t>(k)), u[k]});
  return Poly::from_terms(vars, std::move(terms));
}

}  // namespace univariate

/// Greatest common divisor of polynomials that involve at most the single
/// variable `var`. Returns a monic result (1 when coprime).
inline Poly univariate_gcd(const Poly& a, const Poly& b, std::size_t var) {
  auto g = univariate::gcd(univariate::to_dense(a, var), univariate::to_dense(b, var));
  if (g.empty()) return Poly::constant(a.vars(), 1);
  return univariate::from_dense(g, a.vars(), var);
}

}  // namespace plq
