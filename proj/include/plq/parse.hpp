#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>

#include "logexpr.hpp"

namespace plq {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : Error("parse error at position " + std::to_string(pos) + ": " + what), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, VarTablePtr vars) : text_(text), vars_(std::move(vars)) {}

  LogExpr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    LogExpr e = expr();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  struct Atom {
    LogExpr value;
    std::optional<std::size_t> bare_var;  // set when the atom is a plain identifier
    bool is_number = false;
  };

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  bool peek_digit_after_slash() {
    std::size_t p = pos_;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    if (p >= text_.size() || text_[p] != '/') return false;
    ++p;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    return p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]));
  }

  Integer integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer", pos_);
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  LogExpr expr() {
    LogExpr acc = term();
    while (true) {
      if (accept('+'))
        acc = acc + term();
      else if (accept('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  LogExpr term() {
    LogExpr acc = factor();
    while (true) {
      if (accept('*')) {
        std::size_t at = pos_;
        LogExpr rhs = factor();
        try {
          acc = acc * rhs;
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          throw ParseError(e.what(), at);
        }
      } else if (accept('/')) {
        std::size_t at = pos_;
        LogExpr rhs = factor();
        try {
          acc = acc / rhs;
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          throw ParseError(e.what(), at);
        }
      } else {
        return acc;
      }
    }
  }

  LogExpr factor() {
    std::size_t at_start = pos_;
    Atom a = atom();
    if (!accept('^')) return std::move(a.value);
    skip_ws();
    std::size_t at = pos_;
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("non-integer exponent", pos_);
    Integer n = integer();
    if (peek('.')) throw ParseError("non-integer exponent", pos_);
    if (!n.fits_sint_p() || n > 10000) throw ParseError("exponent too large", at);
    int e = static_cast<int>(n.get_si());
    if (a.value.has_logs()) {
      if (e != 1 || negative) throw ParseError("log terms may only occur linearly", at);
      return std::move(a.value);
    }
    if (negative) {
      if (!a.bare_var || !vars_->is_generator(*a.bare_var))
        throw ParseError("negative exponents are only permitted on generator variables", at_start);
      e = -e;
    }
    return LogExpr(a.value.rational_part().pow(e));
  }

  Atom atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      LogExpr e = expr();
      expect(')');
      return {std::move(e), std::nullopt};
    }
    if (c == '-') {
      ++pos_;
      return {-factor(), std::nullopt};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num = integer();
      if (peek('.')) throw ParseError("decimal numbers are not supported; use a rational a/b", pos_);
      Rational value(num);
      if (peek_digit_after_slash()) {
        expect('/');
        std::size_t at = pos_;
        Integer den = integer();
        if (den == 0) throw ParseError("division by zero", at);
        value = Rational(num, den);
        value.canonicalize();
      }
      Atom out{LogExpr(RatFunc::constant(vars_, value)), std::nullopt};
      out.is_number = true;
      return out;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (name == "log" && peek('(')) {
        expect('(');
        skip_ws();
        std::size_t at = pos_;
        std::size_t s = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          ++pos_;
        std::string arg(text_.substr(s, pos_ - s));
        if (arg.empty()) throw ParseError("log expects a generator name", at);
        auto idx = vars_->find(arg);
        if (!idx) throw ParseError("unknown identifier '" + arg + "'", at);
        if (!vars_->is_generator(*idx)) throw ParseError("log applied to non-generator '" + arg + "'", at);
        expect(')');
        return {LogExpr::log_of(vars_, *idx), std::nullopt};
      }
      auto idx = vars_->find(name);
      if (!idx) throw ParseError("unknown identifier '" + name + "'", start);
      return {LogExpr(RatFunc::variable(vars_, *idx)), *idx};
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  VarTablePtr vars_;
  std::size_t pos_ = 0;
};

inline std::string rational_string(const Rational& r) { return r.get_str(); }

/// Prints one term c * mono / den_mono. Negative exponents of generators are
/// written as v^-k; other denominator variables as trailing /v^k.
inline void print_term(std::ostream& os, const VarTable& vt, const Rational& coef, const Monomial& mono,
                       const Monomial* den, bool first) {
  Rational mag = abs(coef);
  if (coef < 0)
    os << (first ? "-" : " - ");
  else if (!first)
    os << " + ";
  std::vector<std::string> factors, divisors;
  // Parameters first, so "a*u1" rather than "u1*a".
  std::vector<std::size_t> order = vt.parameters();
  for (std::size_t v = 0; v < vt.size(); ++v)
    if (vt.kind(v) != VarKind::parameter) order.push_back(v);
  for (std::size_t v : order) {
    int e = int(mono[v]) - (den ? int((*den)[v]) : 0);
    if (e == 0) continue;
    const std::string& n = vt.name(v);
    if (e > 0) {
      factors.push_back(e == 1 ? n : n + "^" + std::to_string(e));
    } else if (vt.is_generator(v)) {
      factors.push_back(n + "^" + std::to_string(e));
    } else {
      divisors.push_back(e == -1 ? n : n + "^" + std::to_string(-e));
    }
  }
  bool wrote = false;
  if (mag != 1 || factors.empty()) {
    os << rational_string(mag);
    wrote = true;
  }
  for (const auto& f : factors) {
    if (wrote) os << "*";
    os << f;
    wrote = true;
  }
  for (const auto& d : divisors) os << "/" << d;
}

}  // namespace detail

/// Parses an expression under the grammar
///   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
///   factor := atom ('^' signed_integer)? ;
///   atom := rational | identifier | '(' expr ')' | '-' factor | 'log' '(' identifier ')'
inline LogExpr parse(std::string_view text, const VarTablePtr& vars) { return detail::Parser(text, vars).run(); }

inline RatFunc parse_rational(std::string_view text, const VarTablePtr& vars) {
  LogExpr e = parse(text, vars);
  if (e.has_logs()) throw Error("log terms are not allowed here: '" + std::string(text) + "'");
  return e.rational_part();
}

inline std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.terms()) {
    detail::print_term(os, *p.vars(), t.coef, t.mono, nullptr, first);
    first = false;
  }
  return os.str();
}

inline std::string to_string(const RatFunc& f) {
  if (f.is_polynomial()) return to_string(f.num());
  const Poly& d = f.den();
  if (d.is_monomial()) {
    std::ostringstream os;
    bool first = true;
    const Rational dc = d.leading().coef;
    for (const auto& t : f.num().terms()) {
      detail::print_term(os, *f.vars(), t.coef / dc, t.mono, &d.leading().mono, first);
      first = false;
    }
    return os.str();
  }
  return "(" + to_string(f.num()) + ")/(" + to_string(d) + ")";
}

inline std::string to_string(const LogExpr& e) {
  std::ostringstream os;
  bool first = true;
  if (!e.rational_part().is_zero() || !e.has_logs()) {
    os << to_string(e.rational_part());
    first = false;
  }
  for (const auto& l : e.log_terms()) {
    const std::string arg = "log(" + e.vars()->name(l.arg) + ")";
    const RatFunc& c = l.coef;
    if (c.is_polynomial() && c.num().is_monomial()) {
      const auto& t = c.num().leading();
      std::ostringstream term;
      detail::print_term(term, *e.vars(), t.coef, t.mono, nullptr, first);
      std::string s = term.str();
      // "1*log" and "-1*log" collapse to "log" / "-log".
      if (t.mono.is_one() && abs(t.coef) == 1) s.pop_back();
      else s += "*";
      os << s << arg;
    } else {
      os << (first ? "" : " + ") << "(" << to_string(c) << ")*" << arg;
    }
    first = false;
  }
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << to_string(p); }
inline std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << to_string(f); }
inline std::ostream& operator<<(std::ostream& os, const LogExpr& e) { return os << to_string(e); }

}  // namespace plq
