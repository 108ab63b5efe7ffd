#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "logexpr.hpp"

namespace plq {

/// A full rational assignment of every variable in a table (rho included and
/// expected to be consistent with the q values).
using RationalPoint = std::vector<Rational>;

inline Rational evaluate(const Poly& p, const RationalPoint& x) {
  Rational acc = 0, term;
  for (const auto& t : p.terms()) {
    term = t.coef;
    for (std::size_t v = 0; v < x.size(); ++v) {
      for (unsigned k = 0; k < t.mono[v]; ++k) term *= x[v];
    }
    acc += term;
  }
  return acc;
}

/// Value of f at x, or nullopt when the denominator vanishes there.
inline std::optional<Rational> evaluate(const RatFunc& f, const RationalPoint& x) {
  Rational d = evaluate(f.den(), x);
  if (d == 0) return std::nullopt;
  return evaluate(f.num(), x) / d;
}

/// Random rational in +-{1..9} / {1..7}.
template <class Rng>
Rational random_sample_rational(Rng& rng) {
  std::uniform_int_distribution<int> num(1, 9), den(1, 7), sign(0, 1);
  Rational r(num(rng) * (sign(rng) ? 1 : -1), den(rng));
  r.canonicalize();
  return r;
}

/// Random point with every non-canonical variable drawn by
/// random_sample_rational and rational q on a sphere of rational radius rho,
/// so that rho^2 = sum q^2 holds exactly.
template <class Rng>
RationalPoint random_point(const VarTable& vt, Rng& rng) {
  RationalPoint x(vt.size());
  for (std::size_t v = 0; v < vt.size(); ++v) x[v] = random_sample_rational(rng);
  const auto& qs = vt.qs();
  if (!qs.empty() && vt.rho()) {
    // Inverse stereographic projection of a random rational point of Q^(n-1).
    std::vector<Rational> y(qs.size() - 1);
    Rational norm2 = 0;
    for (auto& c : y) {
      c = random_sample_rational(rng);
      norm2 += c * c;
    }
    Rational radius = abs(random_sample_rational(rng));
    Rational denom = norm2 + 1;
    for (std::size_t k = 0; k + 1 < qs.size(); ++k) x[qs[k]] = radius * 2 * y[k] / denom;
    x[qs.back()] = radius * (norm2 - 1) / denom;
    x[*vt.rho()] = radius;
  }
  return x;
}

/// Polynomial compiled for fast binary64 evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& p) {
    for (const auto& t : p.terms()) {
      Term c;
      c.coef = t.coef.get_d();
      for (std::size_t v = 0; v < VarTable::max_vars; ++v)
        if (t.mono[v]) c.factors.emplace_back(v, t.mono[v]);
      terms_.push_back(std::move(c));
    }
  }

  double operator()(const std::vector<double>& x) const {
    double acc = 0;
    for (const auto& t : terms_) {
      double v = t.coef;
      for (auto [var, e] : t.factors) {
        double b = x[var];
        for (unsigned k = 0; k < e; ++k) v *= b;
      }
      acc += v;
    }
    return acc;
  }

 private:
  struct Term {
    double coef = 0;
    std::vector<std::pair<std::size_t, unsigned>> factors;
  };
  std::vector<Term> terms_;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

/// Binary64 evaluator for a LogExpr. Denominators of magnitude below
/// `pole_tolerance` are reported as poles.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const LogExpr& e) : num_(e.rational_part().num()), den_(e.rational_part().den()) {
    for (const auto& l : e.log_terms())
      logs_.push_back({l.arg, CompiledPoly(l.coef.num()), CompiledPoly(l.coef.den())});
  }

  double operator()(const std::vector<double>& x, double pole_tolerance = 1e-12) const {
    double d = den_(x);
    if (std::abs(d) < pole_tolerance) throw PoleError("denominator vanishes");
    double v = num_(x) / d;
    for (const auto& l : logs_) {
      double cd = l.den(x);
      if (std::abs(cd) < pole_tolerance) throw PoleError("denominator vanishes");
      if (x[l.arg] <= 0) throw PoleError("log of a non-positive value");
      v += l.num(x) / cd * std::log(x[l.arg]);
    }
    return v;
  }

 private:
  struct Log {
    std::size_t arg;
    CompiledPoly num, den;
  };
  CompiledPoly num_, den_;
  std::vector<Log> logs_;
};

}  // namespace plq
