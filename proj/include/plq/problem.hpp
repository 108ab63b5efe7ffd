#pragma once

// Problem files: one algebra per JSON document.
//
// {
//   "name": "sphere",
//   "description": "...",
//   "variables": {"canonical_pairs": 3, "parameters": ["R"], "invertible": [], "algebraic": "rho"},
//   "generators": [{"name": "H", "realization": "(p1^2+p2^2+p3^2)/2"}, ...],
//   "brackets": [{"i": "H", "j": "phi", "expression": "-2*V"}, ...],
//   "constraints": {"a3": "(a2*b2-a1*b1)/b3"},
//   "solver": {"max_degree": 2, "inverse_degree": 0, "allow_log": false},
//   "flow": {"observable": "V", "init": {"H": 1, ...}, "dt": 0.001, "steps": 1000, "monitors": ["..."]}
// }
//
// Brackets missing from the list are zero. A pair may be given in either
// orientation ({u2,u1} = b1*u3*u4 is stored as {u1,u2} = -b1*u3*u4), but
// only once.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "canonical.hpp"
#include "parse.hpp"

namespace plq {

using Json = nlohmann::ordered_json;

class ProblemError : public Error {
 public:
  using Error::Error;
};

struct SolverOptions {
  unsigned max_degree = 2;
  unsigned inverse_degree = 0;
  bool allow_log = false;
};

struct FlowOptions {
  std::string observable;
  std::vector<std::pair<std::string, double>> init;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::vector<std::string> monitors;
};

struct ProblemFile {
  std::string name;
  std::string description;
  VarTablePtr vars;
  std::set<std::size_t> invertible;  ///< generator positions
  std::optional<CanonicalRealization> realization;
  BracketTable table;
  Bindings constraints;  ///< parameter -> expression in parameters
  SolverOptions solver;
  std::optional<FlowOptions> flow;

  BracketTable constrained_table() const { return constraints.empty() ? table : table.substituted(constraints); }
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& field, const std::string& what) {
  throw ProblemError("field '" + field + "': " + what);
}

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "/" + key, "missing");
  return *it;
}

inline std::string get_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

inline unsigned get_unsigned(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) schema_error(path, "expected a non-negative integer");
  return v.get<unsigned>();
}

inline void allow_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) schema_error(path + "/" + it.key(), "unknown field");
  }
}

inline LogExpr parse_field(const std::string& text, const VarTablePtr& vars, const std::string& path) {
  try {
    return parse(text, vars);
  } catch (const ParseError& e) {
    schema_error(path, e.what());
  }
}

}  // namespace detail

inline ProblemFile problem_from_json(const Json& doc) {
  using namespace detail;
  if (!doc.is_object()) schema_error("", "expected an object");
  allow_keys(doc, {"name", "description", "variables", "generators", "brackets", "constraints", "solver", "flow"}, "");
  ProblemFile pf;
  pf.name = get_string(require(doc, "name", ""), "/name");
  if (doc.contains("description")) pf.description = get_string(doc["description"], "/description");

  std::size_t pairs = 0;
  std::vector<std::string> params, invertible;
  std::optional<std::string> algebraic;
  if (doc.contains("variables")) {
    const Json& v = doc["variables"];
    if (!v.is_object()) schema_error("/variables", "expected an object");
    allow_keys(v, {"canonical_pairs", "parameters", "invertible", "algebraic"}, "/variables");
    if (v.contains("canonical_pairs")) pairs = get_unsigned(v["canonical_pairs"], "/variables/canonical_pairs");
    for (const char* key : {"parameters", "invertible"}) {
      if (!v.contains(key)) continue;
      const std::string path = std::string("/variables/") + key;
      if (!v[key].is_array()) schema_error(path, "expected an array of names");
      auto& dst = std::string(key) == "parameters" ? params : invertible;
      for (std::size_t k = 0; k < v[key].size(); ++k)
        dst.push_back(get_string(v[key][k], path + "/" + std::to_string(k)));
    }
    if (v.contains("algebraic") && !v["algebraic"].is_null())
      algebraic = get_string(v["algebraic"], "/variables/algebraic");
  }

  const Json& gens = require(doc, "generators", "");
  if (!gens.is_array() || gens.empty()) schema_error("/generators", "expected a non-empty array");
  std::vector<std::string> names;
  std::vector<std::optional<std::string>> real_text;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const std::string path = "/generators/" + std::to_string(k);
    if (!gens[k].is_object()) schema_error(path, "expected an object");
    allow_keys(gens[k], {"name", "realization"}, path);
    names.push_back(get_string(require(gens[k], "name", path), path + "/name"));
    if (gens[k].contains("realization"))
      real_text.push_back(get_string(gens[k]["realization"], path + "/realization"));
    else
      real_text.push_back(std::nullopt);
  }
  std::size_t realized = 0;
  for (const auto& t : real_text) realized += t.has_value();
  if (realized != 0 && realized != names.size())
    schema_error("/generators", "either every generator has a realization or none does");
  if (realized == 0 && (pairs || algebraic))
    schema_error("/variables", "canonical variables declared without realizations");

  auto vt = std::make_shared<VarTable>();
  try {
    for (const auto& n : names) vt->add(n, VarKind::generator);
    for (std::size_t k = 1; k <= pairs; ++k) vt->add("q" + std::to_string(k), VarKind::canonical_q);
    for (std::size_t k = 1; k <= pairs; ++k) vt->add("p" + std::to_string(k), VarKind::canonical_p);
    for (const auto& p : params) vt->add(p, VarKind::parameter);
    if (algebraic) vt->add(*algebraic, VarKind::algebraic);
    vt->validate();
  } catch (const ProblemError&) {
    throw;
  } catch (const Error& e) {
    schema_error("/variables", e.what());
  }
  if (vt->find("log")) schema_error("/generators", "'log' is reserved");
  pf.vars = vt;

  for (const auto& n : invertible) {
    auto v = vt->find(n);
    if (!v || !vt->is_generator(*v)) schema_error("/variables/invertible", "'" + n + "' is not a generator");
    pf.invertible.insert(vt->generator_position(*v));
  }

  if (realized) {
    std::vector<RatFunc> exprs;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const std::string path = "/generators/" + std::to_string(k) + "/realization";
      LogExpr e = parse_field(*real_text[k], vt, path);
      if (e.has_logs()) schema_error(path, "log terms are not allowed in a realization");
      for (std::size_t g : vt->generators())
        if (e.uses(g)) schema_error(path, "uses generator '" + vt->name(g) + "'");
      exprs.push_back(e.rational_part());
    }
    pf.realization = CanonicalRealization(vt, std::move(exprs));
  }

  pf.table = BracketTable(vt);
  if (doc.contains("brackets")) {
    const Json& br = doc["brackets"];
    if (!br.is_array()) schema_error("/brackets", "expected an array");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < br.size(); ++k) {
      const std::string path = "/brackets/" + std::to_string(k);
      if (!br[k].is_object()) schema_error(path, "expected an object");
      allow_keys(br[k], {"i", "j", "expression"}, path);
      std::size_t pos[2];
      for (int s = 0; s < 2; ++s) {
        const char* key = s ? "j" : "i";
        std::string n = get_string(require(br[k], key, path), path + "/" + key);
        auto v = vt->find(n);
        if (!v || !vt->is_generator(*v)) schema_error(path + "/" + key, "unknown generator '" + n + "'");
        pos[s] = vt->generator_position(*v);
      }
      if (pos[0] == pos[1]) schema_error(path, "bracket of a generator with itself");
      auto key = std::minmax(pos[0], pos[1]);
      if (!seen.insert(key).second)
        schema_error(path, "duplicate bracket {" + names[key.first] + ", " + names[key.second] + "}");
      LogExpr e = parse_field(get_string(require(br[k], "expression", path), path + "/expression"), vt,
                              path + "/expression");
      if (e.has_logs()) schema_error(path + "/expression", "log terms are not allowed in a bracket");
      try {
        pf.table.set(pos[0], pos[1], e.rational_part());
      } catch (const Error& err) {
        schema_error(path + "/expression", err.what());
      }
    }
  }

  if (doc.contains("constraints")) {
    const Json& c = doc["constraints"];
    if (!c.is_object()) schema_error("/constraints", "expected an object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      const std::string path = "/constraints/" + it.key();
      auto v = vt->find(it.key());
      if (!v || vt->kind(*v) != VarKind::parameter) schema_error(path, "not a parameter");
      LogExpr e = parse_field(get_string(it.value(), path), vt, path);
      for (std::size_t u = 0; u < vt->size(); ++u)
        if (e.uses(u) && vt->kind(u) != VarKind::parameter) schema_error(path, "may only use parameters");
      if (e.uses(*v)) schema_error(path, "refers to the parameter it replaces");
      pf.constraints.emplace(*v, e.rational_part());
    }
  }

  if (doc.contains("solver")) {
    const Json& s = doc["solver"];
    if (!s.is_object()) schema_error("/solver", "expected an object");
    allow_keys(s, {"max_degree", "inverse_degree", "allow_log"}, "/solver");
    if (s.contains("max_degree")) pf.solver.max_degree = get_unsigned(s["max_degree"], "/solver/max_degree");
    if (pf.solver.max_degree < 1) schema_error("/solver/max_degree", "must be at least 1");
    if (s.contains("inverse_degree"))
      pf.solver.inverse_degree = get_unsigned(s["inverse_degree"], "/solver/inverse_degree");
    if (s.contains("allow_log")) {
      if (!s["allow_log"].is_boolean()) schema_error("/solver/allow_log", "expected a boolean");
      pf.solver.allow_log = s["allow_log"].get<bool>();
    }
  }

  if (doc.contains("flow")) {
    const Json& f = doc["flow"];
    if (!f.is_object()) schema_error("/flow", "expected an object");
    allow_keys(f, {"observable", "init", "dt", "steps", "monitors"}, "/flow");
    FlowOptions fo;
    fo.observable = get_string(require(f, "observable", "/flow"), "/flow/observable");
    parse_field(fo.observable, vt, "/flow/observable");
    const Json& init = require(f, "init", "/flow");
    if (!init.is_object()) schema_error("/flow/init", "expected an object of numbers");
    for (auto it = init.begin(); it != init.end(); ++it) {
      if (!it.value().is_number()) schema_error("/flow/init/" + it.key(), "expected a number");
      if (!vt->find(it.key())) schema_error("/flow/init/" + it.key(), "unknown variable");
      fo.init.emplace_back(it.key(), it.value().get<double>());
    }
    if (f.contains("dt")) {
      if (!f["dt"].is_number() || f["dt"].get<double>() <= 0) schema_error("/flow/dt", "expected a positive number");
      fo.dt = f["dt"].get<double>();
    }
    if (f.contains("steps")) {
      fo.steps = get_unsigned(f["steps"], "/flow/steps");
      if (fo.steps < 1) schema_error("/flow/steps", "must be at least 1");
    }
    if (f.contains("monitors")) {
      if (!f["monitors"].is_array()) schema_error("/flow/monitors", "expected an array");
      for (std::size_t k = 0; k < f["monitors"].size(); ++k) {
        const std::string path = "/flow/monitors/" + std::to_string(k);
        fo.monitors.push_back(get_string(f["monitors"][k], path));
        parse_field(fo.monitors.back(), vt, path);
      }
    }
    pf.flow = std::move(fo);
  }
  return pf;
}

/// Parses problem text; syntax errors report line and column.
inline ProblemFile problem_from_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ProblemError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                       e.what());
  }
  return problem_from_json(doc);
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return problem_from_text(ss.str());
  } catch (const ProblemError& e) {
    throw ProblemError(path + ": " + e.what());
  }
}

}  // namespace plq
