#pragma once

#include <map>
#include <optional>
#include <utility>

#include "poly.hpp"

namespace plq {

namespace detail {

struct SplitDen {
  Monomial mono;
  Poly rest;
};

inline SplitDen split_monomial_content(const Poly& d) {
  Monomial m = d.monomial_content();
  if (m.is_one()) return {m, d};
  return {m, d.divided_by_monomial(m)};
}

/// Single variable x such that p involves only x (nullopt if p is constant
/// or multivariate).
inline std::optional<std::size_t> sole_variable(const Poly& p) {
  std::optional<std::size_t> found;
  if (!p.vars()) return std::nullopt;
  Monomial all;
  for (const auto& t : p.terms()) all = lcm(all, t.mono);
  for (std::size_t v = 0; v < p.vars()->size(); ++v) {
    if (!all[v]) continue;
    if (found) return std::nullopt;
    found = v;
  }
  return found;
}

/// gcd(u, p) where u is univariate in x and p is arbitrary: the gcd of u with
/// every coefficient of p viewed as a polynomial in the remaining variables.
inline Poly univariate_content_gcd(const Poly& u, const Poly& p, std::size_t x) {
  using univariate::UPoly;
  UPoly g = univariate::to_dense(u, x);
  std::map<Monomial, UPoly, GrlexGreater> groups;
  for (const auto& t : p.terms()) {
    Monomial rest = t.mono;
    rest.set(x, 0);
    auto& c = groups[rest];
    if (c.size() <= t.mono[x]) c.resize(t.mono[x] + 1);
    c[t.mono[x]] += t.coef;
  }
  for (auto& [m, c] : groups) {
    g = univariate::gcd(g, c);
    if (g.size() <= 1) break;
  }
  if (g.empty()) return Poly::constant(u.vars(), 1);
  return univariate::from_dense(g, u.vars(), x);
}

/// A common multiple of two normalized denominators, as small as cheaply
/// achievable without a general multivariate gcd.
inline Poly denominator_lcm(const Poly& d1, const Poly& d2) {
  if (d1 == d2) return d1;
  if (d1.is_constant()) return d2;
  if (d2.is_constant()) return d1;
  auto [m1, r1] = split_monomial_content(d1);
  auto [m2, r2] = split_monomial_content(d2);
  Monomial m = lcm(m1, m2);
  Poly r(d1.vars());
  if (r1 == r2 || r2.is_constant()) {
    r = r1;
  } else if (r1.is_constant()) {
    r = r2;
  } else if (auto q = divide_exact(r1, r2)) {
    r = r1;
  } else if (auto q2 = divide_exact(r2, r1)) {
    r = r2;
  } else {
    auto x1 = sole_variable(r1), x2 = sole_variable(r2);
    if (x1 && x2 && *x1 == *x2) {
      Poly g = univariate_gcd(r1, r2, *x1);
      r = *divide_exact(r1 * r2, g);
    } else {
      r = r1 * r2;
    }
  }
  return r.times_monomial(m);
}

}  // namespace detail

/// Quotient of polynomials num/den in canonical form: den is nonzero, free
/// of the algebraic element, and has leading coefficient 1; common monomial
/// factors are cancelled, and den is removed whenever it divides num exactly.
/// Equality of values is decided by is_zero of the difference, which is
/// exact whether or not the fraction is fully reduced.
class RatFunc {
 public:
  RatFunc() : den_(Poly::constant(nullptr, 1)) {}
  explicit RatFunc(Poly num) : num_(std::move(num)), den_(Poly::constant(num_.vars(), 1)) {}
  RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RatFunc zero(const VarTablePtr& vars) { return RatFunc(Poly(vars)); }
  static RatFunc constant(const VarTablePtr& vars, const Rational& c) { return RatFunc(Poly::constant(vars, c)); }
  static RatFunc variable(const VarTablePtr& vars, std::size_t idx) { return RatFunc(Poly::variable(vars, idx)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const VarTablePtr& vars() const { return num_.vars(); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  bool uses(std::size_t var) const { return num_.uses(var) || den_.uses(var); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) { return combine(a, b, false); }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return combine(a, b, true); }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return RatFunc(Poly(a.vars() ? a.vars() : b.vars()));
    if (a.is_polynomial() && b.is_polynomial()) {
      Rational s = 1 / (a.den_.constant_value() * b.den_.constant_value());
      return RatFunc((a.num_ * b.num_).scaled(s));
    }
    // Cross-cancel before multiplying to keep the operands small.
    Poly an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
    cancel_pair(an, bd);
    cancel_pair(bn, ad);
    return RatFunc(an * bn, ad * bd);
  }

  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw DivisionByZero();
    return a * b.inverse();
  }

  RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
  RatFunc& operator-=(const RatFunc& b) { return *this = *this - b; }
  RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }
  RatFunc& operator/=(const RatFunc& b) { return *this = *this / b; }

  RatFunc inverse() const {
    if (is_zero()) throw DivisionByZero();
    return RatFunc(den_, num_);
  }

  RatFunc scaled(const Rational& c) const {
    if (c == 0) return RatFunc(Poly(vars()));
    RatFunc r = *this;
    r.num_ = r.num_.scaled(c);
    return r;
  }

  RatFunc pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    auto ue = static_cast<unsigned>(e);
    if (is_polynomial()) return RatFunc(num_.pow(ue));
    return RatFunc(num_.pow(ue), den_.pow(ue));
  }

 private:
  static void cancel_pair(Poly& n, Poly& d) {
    if (d.is_constant() || n.is_zero()) return;
    Monomial g = gcd(n.monomial_content(), d.monomial_content());
    if (!g.is_one()) {
      n = n.divided_by_monomial(g);
      d = d.divided_by_monomial(g);
    }
    if (d.is_constant()) return;
    if (auto q = divide_exact(n, d)) {
      n = std::move(*q);
      d = Poly::constant(d.vars(), 1);
    }
  }

  static RatFunc combine(const RatFunc& a, const RatFunc& b, bool subtract) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return subtract ? -b : b;
    if (a.den_ == b.den_) {
      RatFunc r;
      r.num_ = subtract ? a.num_ - b.num_ : a.num_ + b.num_;
      r.den_ = a.den_;
      r.normalize();
      return r;
    }
    if (a.is_polynomial() && b.is_polynomial()) {
      Poly x = a.num_.scaled(1 / a.den_.constant_value());
      Poly y = b.num_.scaled(1 / b.den_.constant_value());
      return RatFunc(subtract ? x - y : x + y);
    }
    Poly l = detail::denominator_lcm(a.den_, b.den_);
    Poly ca = *divide_exact(l, a.den_);
    Poly cb = *divide_exact(l, b.den_);
    Poly n = subtract ? a.num_ * ca - b.num_ * cb : a.num_ * ca + b.num_ * cb;
    return RatFunc(std::move(n), std::move(l));
  }

  void normalize() {
    if (den_.is_zero()) throw DivisionByZero();
    if (num_.vars() && den_.vars() && num_.vars() != den_.vars())
      throw Error("rational function over mixed variable tables");
    if (!num_.vars()) num_ = Poly(den_.vars());
    if (num_.is_zero()) {
      den_ = Poly::constant(num_.vars(), 1);
      return;
    }
    if (den_.has_algebraic()) {
      // Rationalize: multiply through by the conjugate A - B*rho.
      auto [a, b] = den_.split_algebraic();
      Poly rho = Poly::variable(den_.vars(), *den_.vars()->rho());
      Poly conj = a - b * rho;
      num_ = num_ * conj;
      den_ = den_ * conj;
      if (den_.is_zero()) throw DivisionByZero();
    }
    if (!den_.is_constant()) {
      Monomial g = gcd(num_.monomial_content(), den_.monomial_content());
      if (!g.is_one()) {
        num_ = num_.divided_by_monomial(g);
        den_ = den_.divided_by_monomial(g);
      }
    }
    if (!den_.is_constant()) {
      if (auto q = divide_exact(num_, den_)) {
        num_ = std::move(*q);
        den_ = Poly::constant(num_.vars(), 1);
      }
    }
    if (!den_.is_constant()) {
      std::optional<Poly> g;
      if (auto x = detail::sole_variable(den_))
        g = detail::univariate_content_gcd(den_, num_, *x);
      else if (auto y = detail::sole_variable(num_))
        g = detail::univariate_content_gcd(num_, den_, *y);
      if (g && !g->is_constant()) {
        num_ = *divide_exact(num_, *g);
        den_ = *divide_exact(den_, *g);
      }
    }
    Rational lc = den_.leading().coef;
    if (lc != 1) {
      Rational inv = 1 / lc;
      num_ = num_.scaled(inv);
      den_ = den_.scaled(inv);
    }
  }

  Poly num_, den_;
};

inline RatFunc operator*(const Rational& c, const RatFunc& f) { return f.scaled(c); }

}  // namespace plq
