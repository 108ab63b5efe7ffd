#pragma once

#include <string>
#include <utility>
#include <vector>

#include "problem.hpp"

namespace plq {

namespace corpus_text {

inline const char* const sphere = R"json({
  "name": "sphere",
  "description": "Free particle on the sphere |q| = R in three dimensions. phi is the primary constraint, V the secondary one. The Casimir (phi + R^2) H - V^2/2 realizes to L^2/2. Along the flow of V, H(t) = H(0) exp(-2t) and phi + R^2 = (phi(0) + R^2) exp(2t); with time rescaled by 2 these are the exponentials exp(-t), exp(t).",
  "variables": {"canonical_pairs": 3, "parameters": ["R"]},
  "generators": [
    {"name": "H", "realization": "(p1^2 + p2^2 + p3^2)/2"},
    {"name": "phi", "realization": "q1^2 + q2^2 + q3^2 - R^2"},
    {"name": "V", "realization": "q1*p1 + q2*p2 + q3*p3"}
  ],
  "brackets": [
    {"i": "H", "j": "phi", "expression": "-2*V"},
    {"i": "H", "j": "V", "expression": "-2*H"},
    {"i": "phi", "j": "V", "expression": "2*phi + 2*R^2"}
  ],
  "solver": {"max_degree": 2},
  "flow": {
    "observable": "phi*H + R^2*H - V^2/2",
    "init": {"q1": 1, "q2": 0, "q3": 0, "p1": 0, "p2": 1, "p3": 0, "R": 1},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["phi + R^2", "V", "phi*H + R^2*H - V^2/2"]
  }
})json";

inline const char* const sklyanin = R"json({
  "name": "sklyanin",
  "description": "Quadratic Sklyanin algebra. The structure matrix is degenerate exactly when a1*b1 - a2*b2 + a3*b3 = 0; the constraint below imposes that by eliminating a3. Casimirs: a3*u1^2 - b2*u2^2 + b1*u3^2 and a1*u1^2 - b3*u3^2 + b2*u4^2.",
  "variables": {"parameters": ["a1", "a2", "a3", "b1", "b2", "b3"]},
  "generators": [{"name": "u1"}, {"name": "u2"}, {"name": "u3"}, {"name": "u4"}],
  "brackets": [
    {"i": "u2", "j": "u1", "expression": "b1*u3*u4"},
    {"i": "u3", "j": "u1", "expression": "b2*u2*u4"},
    {"i": "u4", "j": "u1", "expression": "b3*u2*u3"},
    {"i": "u3", "j": "u2", "expression": "a3*u1*u4"},
    {"i": "u4", "j": "u2", "expression": "a2*u1*u3"},
    {"i": "u4", "j": "u3", "expression": "a1*u1*u2"}
  ],
  "constraints": {"a3": "(a2*b2 - a1*b1)/b3"},
  "solver": {"max_degree": 2},
  "flow": {
    "observable": "u1*u2 + u3^2/2",
    "init": {"u1": 0.5, "u2": 0.3, "u3": -0.2, "u4": 0.4, "a1": 1, "a2": 1, "a3": -2, "b1": 1, "b2": -1, "b3": 1},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["a3*u1^2 - b2*u2^2 + b1*u3^2", "a1*u1^2 - b3*u3^2 + b2*u4^2"]
  }
})json";

inline const char* const spinchain = R"json({
  "name": "spinchain",
  "description": "Quadratic algebra of the kinematical symmetry of a spin chain. u4 is central; the other Casimir is u1/u2 - u3/2, which is linear in u3.",
  "variables": {"parameters": ["a"], "invertible": ["u2"]},
  "generators": [{"name": "u1"}, {"name": "u2"}, {"name": "u3"}, {"name": "u4"}],
  "brackets": [
    {"i": "u1", "j": "u2", "expression": "-a/2*u2^2"},
    {"i": "u1", "j": "u3", "expression": "a*u1"},
    {"i": "u2", "j": "u3", "expression": "a*u2"}
  ],
  "solver": {"max_degree": 2, "inverse_degree": 1},
  "flow": {
    "observable": "u1 + u3*u4",
    "init": {"u1": 0.7, "u2": -0.5, "u3": 0.2, "u4": 0.3, "a": 1},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["u1/u2 - u3/2", "u4"]
  }
})json";

inline const char* const galilei = R"json({
  "name": "galilei",
  "description": "Poisson-Lie structure on the two-dimensional Galilei algebra: the spin-chain algebra with {u1,u3} perturbed to a*u1 + b*u2. u4 stays central. The Casimir a*u1/u2 - b*log(u2) - (a/2)*u3 needs u2 > 0.",
  "variables": {"parameters": ["a", "b"], "invertible": ["u2"]},
  "generators": [{"name": "u1"}, {"name": "u2"}, {"name": "u3"}, {"name": "u4"}],
  "brackets": [
    {"i": "u1", "j": "u2", "expression": "-a/2*u2^2"},
    {"i": "u1", "j": "u3", "expression": "a*u1 + b*u2"},
    {"i": "u2", "j": "u3", "expression": "a*u2"}
  ],
  "solver": {"max_degree": 2, "inverse_degree": 1, "allow_log": true},
  "flow": {
    "observable": "u1",
    "init": {"u1": 0.4, "u2": 1, "u3": 0.1, "u4": 0.2, "a": -1, "b": 0.5},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["a*u1/u2 - b*log(u2) - (a/2)*u3", "u4"]
  }
})json";

inline const char* const nappi_witten = R"json({
  "name": "nappi-witten",
  "description": "Nappi-Witten algebra, a central extension of the two-dimensional Euclidean algebra. T is central; P1^2 + P2^2 + 2*J*T is the other Casimir, and a*(P1^2 + P2^2 + 2*J*T) + b*T^2 is the general invariant bilinear form.",
  "generators": [{"name": "P1"}, {"name": "P2"}, {"name": "J"}, {"name": "T"}],
  "brackets": [
    {"i": "J", "j": "P1", "expression": "P2"},
    {"i": "J", "j": "P2", "expression": "-P1"},
    {"i": "P1", "j": "P2", "expression": "T"}
  ],
  "solver": {"max_degree": 2},
  "flow": {
    "observable": "J + P1*P2",
    "init": {"P1": 0.3, "P2": -0.4, "J": 0.5, "T": 0.2},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["P1^2 + P2^2 + 2*J*T", "T"]
  }
})json";

inline const char* const hydrogen = R"json({
  "name": "hydrogen",
  "description": "Kepler problem: energy H, angular momentum L = q x p and Laplace-Runge-Lenz vector M = (p x L)/m - kappa*q/rho with rho = |q|. H is central; with it, L.M and H*L^2 - (m/2)*M^2 span the Casimirs. Classically M^2 = (2H/m)*L^2 + kappa^2. The quantum spectrum is not computed here.",
  "variables": {"canonical_pairs": 3, "parameters": ["m", "kappa"], "algebraic": "rho"},
  "generators": [
    {"name": "H", "realization": "(p1^2 + p2^2 + p3^2)/(2*m) - kappa/rho"},
    {"name": "L1", "realization": "q2*p3 - q3*p2"},
    {"name": "L2", "realization": "q3*p1 - q1*p3"},
    {"name": "L3", "realization": "q1*p2 - q2*p1"},
    {"name": "M1", "realization": "(p2*(q1*p2 - q2*p1) - p3*(q3*p1 - q1*p3))/m - kappa*q1/rho"},
    {"name": "M2", "realization": "(p3*(q2*p3 - q3*p2) - p1*(q1*p2 - q2*p1))/m - kappa*q2/rho"},
    {"name": "M3", "realization": "(p1*(q3*p1 - q1*p3) - p2*(q2*p3 - q3*p2))/m - kappa*q3/rho"}
  ],
  "brackets": [
    {"i": "L1", "j": "L2", "expression": "L3"},
    {"i": "L2", "j": "L3", "expression": "L1"},
    {"i": "L3", "j": "L1", "expression": "L2"},
    {"i": "L1", "j": "M2", "expression": "M3"},
    {"i": "L1", "j": "M3", "expression": "-M2"},
    {"i": "L2", "j": "M3", "expression": "M1"},
    {"i": "L2", "j": "M1", "expression": "-M3"},
    {"i": "L3", "j": "M1", "expression": "M2"},
    {"i": "L3", "j": "M2", "expression": "-M1"},
    {"i": "M1", "j": "M2", "expression": "-2/m*H*L3"},
    {"i": "M2", "j": "M3", "expression": "-2/m*H*L1"},
    {"i": "M3", "j": "M1", "expression": "-2/m*H*L2"}
  ],
  "solver": {"max_degree": 3},
  "flow": {
    "observable": "L1*M2 + H*L3 + M1^2/2",
    "init": {"H": -0.5, "L1": 0.3, "L2": 0.2, "L3": 0.9, "M1": 0.1, "M2": -0.2, "M3": 0.4, "m": 1, "kappa": 1},
    "dt": 0.001,
    "steps": 10000,
    "monitors": ["H", "L1*M1 + L2*M2 + L3*M3", "H*(L1^2 + L2^2 + L3^2) - m/2*(M1^2 + M2^2 + M3^2)"]
  }
})json";

}  // namespace corpus_text

/// Names and problem-file texts of the built-in examples.
inline const std::vector<std::pair<std::string, const char*>>& corpus_entries() {
  static const std::vector<std::pair<std::string, const char*>> entries = {
      {"sphere", corpus_text::sphere},       {"sklyanin", corpus_text::sklyanin},
      {"spinchain", corpus_text::spinchain}, {"galilei", corpus_text::galilei},
      {"nappi-witten", corpus_text::nappi_witten}, {"hydrogen", corpus_text::hydrogen},
  };
  return entries;
}

inline const char* corpus_source(const std::string& name) {
  for (const auto& [n, text] : corpus_entries())
    if (n == name) return text;
  std::string list;
  for (const auto& [n, text] : corpus_entries()) list += (list.empty() ? "" : ", ") + n;
  throw Error("unknown example '" + name + "' (available: " + list + ")");
}

inline ProblemFile corpus(const std::string& name) { return problem_from_text(corpus_source(name)); }

}  // namespace plq
