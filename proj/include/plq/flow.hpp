#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "canonical.hpp"
#include "eval.hpp"
#include "problem.hpp"

namespace plq {

/// Fixed-step RK4 run. `initial` assigns every variable of the table
/// (generators or canonical variables, plus parameters); entries that do not
/// evolve stay fixed.
struct FlowConfig {
  LogExpr observable;
  std::vector<double> initial;
  double h = 1e-3;
  std::size_t steps = 1000;
  std::vector<LogExpr> monitors;
  std::size_t record_every = 1;  ///< 0 keeps only the endpoints
};

struct DriftReport {
  std::vector<double> initial;    ///< monitor values at t = 0
  std::vector<double> final;      ///< monitor values at the end
  std::vector<double> max_drift;  ///< max_t |monitor(t) - monitor(0)|
};

struct FlowResult {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  ///< full variable vectors
  DriftReport drift;
};

class FlowError : public Error {
 public:
  FlowError(const std::string& what, std::size_t step) : Error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

constexpr double pole_tolerance = 1e-12;

namespace detail {

struct OdeSystem {
  std::vector<std::size_t> evolving;  ///< variable indices
  std::vector<CompiledExpr> rhs;      ///< one per evolving variable
  std::optional<std::size_t> rho;     ///< kept equal to |q|
  std::vector<std::size_t> qs;

  void sync(std::vector<double>& x) const {
    if (!rho) return;
    double s = 0;
    for (std::size_t q : qs) s += x[q] * x[q];
    x[*rho] = std::sqrt(s);
  }
};

inline FlowResult integrate(const OdeSystem& sys, const std::vector<CompiledExpr>& monitors, const FlowConfig& cfg) {
  if (!(cfg.h > 0)) throw Error("step size must be positive");
  if (cfg.steps < 1) throw Error("at least one step is required");
  FlowResult out;
  std::vector<double> x = cfg.initial;
  sys.sync(x);
  const std::size_t n = sys.evolving.size();
  auto deriv = [&](const std::vector<double>& at, std::vector<double>& k, std::size_t step) {
    try {
      for (std::size_t i = 0; i < n; ++i) k[i] = sys.rhs[i](at, pole_tolerance);
    } catch (const PoleError& e) {
      throw FlowError(e.what(), step);
    }
  };
  auto measure = [&](const std::vector<double>& at, std::size_t step) {
    std::vector<double> v;
    try {
      for (const auto& m : monitors) v.push_back(m(at, pole_tolerance));
    } catch (const PoleError& e) {
      throw FlowError(e.what(), step);
    }
    return v;
  };
  out.drift.initial = measure(x, 0);
  out.drift.max_drift.assign(monitors.size(), 0.0);
  out.times.push_back(0);
  out.states.push_back(x);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp;
  auto shifted = [&](const std::vector<double>& k, double c) {
    tmp = x;
    for (std::size_t i = 0; i < n; ++i) tmp[sys.evolving[i]] += c * k[i];
    sys.sync(tmp);
    return tmp;
  };
  const double h = cfg.h;
  for (std::size_t s = 1; s <= cfg.steps; ++s) {
    deriv(x, k1, s);
    deriv(shifted(k1, h / 2), k2, s);
    deriv(shifted(k2, h / 2), k3, s);
    deriv(shifted(k3, h), k4, s);
    for (std::size_t i = 0; i < n; ++i) x[sys.evolving[i]] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    sys.sync(x);
    auto v = measure(x, s);
    for (std::size_t m = 0; m < v.size(); ++m)
      out.drift.max_drift[m] = std::max(out.drift.max_drift[m], std::abs(v[m] - out.drift.initial[m]));
    if (s == cfg.steps) out.drift.final = v;
    if ((cfg.record_every && s % cfg.record_every == 0) || s == cfg.steps) {
      out.times.push_back(double(s) * h);
      out.states.push_back(x);
    }
  }
  return out;
}

}  // namespace detail

/// du_i/dt = {u_i, G} = sum_j f_ij dG/du_j.
inline FlowResult abstract_flow(const BracketTable& t, const FlowConfig& cfg) {
  if (cfg.initial.size() != t.vars()->size()) throw Error("initial state must assign every variable");
  detail::OdeSystem sys;
  std::vector<RatFunc> grad;
  for (std::size_t j = 0; j < t.size(); ++j) grad.push_back(differentiate(cfg.observable, t.generator(j)));
  for (std::size_t i = 0; i < t.size(); ++i) {
    RatFunc rhs = RatFunc::zero(t.vars());
    for (std::size_t j = 0; j < t.size(); ++j)
      if (!grad[j].is_zero()) rhs += t.entry(i, j) * grad[j];
    sys.evolving.push_back(t.generator(i));
    sys.rhs.emplace_back(LogExpr(rhs));
  }
  std::vector<CompiledExpr> mon;
  for (const auto& m : cfg.monitors) mon.emplace_back(m);
  return detail::integrate(sys, mon, cfg);
}

/// Hamilton's equations for H(u(q,p)); monitors may use generators, which
/// are replaced by their realizations.
inline FlowResult canonical_flow(const CanonicalRealization& real, const LogExpr& hamiltonian, const FlowConfig& cfg) {
  const auto& vt = real.vars();
  if (cfg.initial.size() != vt->size()) throw Error("initial state must assign every variable");
  const Bindings b = real.bindings();
  LogExpr h = substitute(hamiltonian, b);
  if (h.has_logs()) throw Error("hamiltonian with log terms is not supported in phase space");
  detail::OdeSystem sys;
  sys.rho = vt->rho();
  sys.qs = vt->qs();
  for (std::size_t k = 0; k < vt->qs().size(); ++k) {
    sys.evolving.push_back(vt->qs()[k]);
    sys.rhs.emplace_back(LogExpr(differentiate(h, vt->ps()[k])));
  }
  for (std::size_t k = 0; k < vt->ps().size(); ++k) {
    sys.evolving.push_back(vt->ps()[k]);
    sys.rhs.emplace_back(LogExpr(-differentiate(h, vt->qs()[k])));
  }
  std::vector<CompiledExpr> mon;
  for (const auto& m : cfg.monitors) mon.emplace_back(substitute(m, b));
  return detail::integrate(sys, mon, cfg);
}

/// Generator values u_i(q,p) along a canonical trajectory state.
inline std::vector<double> realized_generators(const CanonicalRealization& real, const std::vector<double>& state) {
  std::vector<double> out;
  for (std::size_t i = 0; i < real.size(); ++i) out.push_back(CompiledExpr(LogExpr(real[i]))(state));
  return out;
}

/// A flow block of a problem file resolved against its variables. The flow
/// is canonical when the initial state assigns canonical variables.
struct PreparedFlow {
  FlowConfig config;
  bool canonical = false;
  std::vector<std::string> uninitialized;  ///< variables left at 0
};

inline PreparedFlow prepare_flow(const ProblemFile& pf, const FlowOptions& fo) {
  const VarTablePtr& vt = pf.vars;
  PreparedFlow out;
  FlowConfig& cfg = out.config;
  cfg.observable = substitute(parse(fo.observable, vt), pf.constraints);
  cfg.h = fo.dt;
  cfg.steps = fo.steps;
  cfg.initial.assign(vt->size(), 0.0);
  std::vector<bool> set(vt->size(), false);
  for (const auto& [n, v] : fo.init) {
    auto idx = vt->find(n);
    if (!idx) throw Error("unknown variable '" + n + "' in flow initial state");
    VarKind k = vt->kind(*idx);
    if (k == VarKind::algebraic) throw Error("'" + n + "' is determined by the canonical coordinates");
    cfg.initial[*idx] = v;
    set[*idx] = true;
    out.canonical = out.canonical || k == VarKind::canonical_q || k == VarKind::canonical_p;
  }
  if (out.canonical && !pf.realization) throw Error("canonical initial state but the problem has no realization");
  for (std::size_t v = 0; v < vt->size(); ++v) {
    VarKind k = vt->kind(v);
    if (k == VarKind::generator && set[v] && out.canonical)
      throw Error("initial state mixes generators and canonical variables");
    bool needed = k == VarKind::parameter
                      ? pf.constraints.count(v) == 0
                      : (out.canonical ? (k == VarKind::canonical_q || k == VarKind::canonical_p)
                                       : k == VarKind::generator);
    if (needed && !set[v]) out.uninitialized.push_back(vt->name(v));
  }
  for (const auto& m : fo.monitors) cfg.monitors.push_back(substitute(parse(m, vt), pf.constraints));
  return out;
}

inline FlowResult run_flow(const ProblemFile& pf, const PreparedFlow& f) {
  return f.canonical ? canonical_flow(*pf.realization, f.config.observable, f.config)
                     : abstract_flow(pf.constrained_table(), f.config);
}

}  // namespace plq
