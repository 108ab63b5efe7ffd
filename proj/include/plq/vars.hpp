#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace plq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero") {}
  using Error::Error;
};

enum class VarKind { generator, canonical_q, canonical_p, parameter, algebraic };

inline const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::generator: return "generator";
    case VarKind::canonical_q: return "canonical-q";
    case VarKind::canonical_p: return "canonical-p";
    case VarKind::parameter: return "parameter";
    case VarKind::algebraic: return "algebraic";
  }
  return "?";
}

struct Variable {
  std::string name;
  VarKind kind;
};

/// Ordered, immutable list of named variables shared by every expression of
/// one problem. The declaration order fixes the graded-lex term order.
///
/// Canonical q and p variables are paired by position: the k-th declared q is
/// conjugate to the k-th declared p. The optional algebraic element rho
/// satisfies rho^2 = sum of the squared q variables.
class VarTable {
 public:
  static constexpr std::size_t max_vars = 32;

  VarTable() = default;

  std::size_t add(std::string name, VarKind kind) {
    if (name.empty()) throw Error("empty variable name");
    if (index_.count(name)) throw Error("duplicate variable name '" + name + "'");
    if (vars_.size() >= max_vars)
      throw Error("too many variables (limit " + std::to_string(max_vars) + ")");
    if (kind == VarKind::algebraic && rho_)
      throw Error("at most one algebraic variable is supported");
    std::size_t idx = vars_.size();
    vars_.push_back({name, kind});
    index_.emplace(std::move(name), idx);
    switch (kind) {
      case VarKind::generator: generators_.push_back(idx); break;
      case VarKind::canonical_q: qs_.push_back(idx); break;
      case VarKind::canonical_p: ps_.push_back(idx); break;
      case VarKind::parameter: params_.push_back(idx); break;
      case VarKind::algebraic: rho_ = idx; break;
    }
    return idx;
  }

  /// Checks the structural invariants that can only be judged once the table
  /// is complete.
  void validate() const {
    if (qs_.size() != ps_.size())
      throw Error("canonical q and p variables must come in pairs");
    if (rho_ && qs_.size() < 2)
      throw Error("the algebraic element needs at least two canonical pairs");
  }

  std::size_t size() const { return vars_.size(); }
  const Variable& operator[](std::size_t i) const { return vars_.at(i); }
  const std::string& name(std::size_t i) const { return vars_.at(i).name; }
  VarKind kind(std::size_t i) const { return vars_.at(i).kind; }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t at(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error("unknown variable '" + name + "'");
    return *i;
  }

  const std::vector<std::size_t>& generators() const { return generators_; }
  const std::vector<std::size_t>& qs() const { return qs_; }
  const std::vector<std::size_t>& ps() const { return ps_; }
  const std::vector<std::size_t>& parameters() const { return params_; }
  std::optional<std::size_t> rho() const { return rho_; }

  bool is_generator(std::size_t i) const { return kind(i) == VarKind::generator; }

  /// Position of a generator variable in the generator list.
  std::size_t generator_position(std::size_t var) const {
    for (std::size_t k = 0; k < generators_.size(); ++k)
      if (generators_[k] == var) return k;
    throw Error("'" + name(var) + "' is not a generator");
  }

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> generators_, qs_, ps_, params_;
  std::optional<std::size_t> rho_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

/// Convenience builder: generators, then n canonical pairs q1..qn, p1..pn,
/// then parameters, then (optionally) the algebraic element.
inline VarTablePtr make_vars(const std::vector<std::string>& generators, std::size_t canonical_pairs = 0,
                             const std::vector<std::string>& parameters = {},
                             std::optional<std::string> algebraic = std::nullopt) {
  auto t = std::make_shared<VarTable>();
  for (const auto& g : generators) t->add(g, VarKind::generator);
  for (std::size_t k = 1; k <= canonical_pairs; ++k) t->add("q" + std::to_string(k), VarKind::canonical_q);
  for (std::size_t k = 1; k <= canonical_pairs; ++k) t->add("p" + std::to_string(k), VarKind::canonical_p);
  for (const auto& p : parameters) t->add(p, VarKind::parameter);
  if (algebraic) t->add(*algebraic, VarKind::algebraic);
  t->validate();
  return t;
}

}  // namespace plq
