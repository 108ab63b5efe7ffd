#pragma once

// Command-line front end shared by the plq tool and the acceptance tests.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corpus.hpp"
#include "flow.hpp"
#include "solver.hpp"

namespace plq::cli {

enum ExitCode { ok = 0, verification_failed = 1, usage_error = 2 };

constexpr unsigned escalation_ceiling = 4;

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline std::string gen_name(const BracketTable& t, std::size_t pos) { return t.vars()->name(t.generator(pos)); }

inline Json point_json(const VarTable& vt, const RationalPoint& x) {
  Json j = Json::object();
  for (std::size_t v = 0; v < x.size(); ++v) {
    VarKind k = vt.kind(v);
    if (k == VarKind::generator || k == VarKind::parameter) j[vt.name(v)] = x[v].get_str();
  }
  return j;
}

inline void write_json(const std::string& path, const Json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw Error("cannot write '" + path + "'");
    f << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

struct Loaded {
  ProblemFile pf;
  Json report = Json::object();
};

/// Problem from a path, or from the corpus when the path is "corpus:NAME".
inline ProblemFile load(const std::string& path, const std::vector<std::string>& extra_constants = {}) {
  std::string text;
  if (path.rfind("corpus:", 0) == 0) {
    text = corpus_source(path.substr(7));
  } else {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    if (extra_constants.empty()) return problem_from_text(text);
    Json doc = Json::parse(text);
    for (const auto& c : extra_constants) doc["variables"]["parameters"].push_back(c);
    return problem_from_json(doc);
  } catch (const nlohmann::json::parse_error&) {
    return problem_from_text(text);  // rethrows with line information
  } catch (const ProblemError& e) {
    throw ProblemError(path + ": " + e.what());
  }
}

inline Json closure_json(const ClosureReport& c, const BracketTable& t) {
  Json j;
  j["pass"] = c.pass;
  j["pairs"] = Json::array();
  for (const auto& p : c.pairs) {
    Json e;
    e["i"] = gen_name(t, p.i);
    e["j"] = gen_name(t, p.j);
    e["pass"] = p.pass;
    e["bracket"] = to_string(p.bracket);
    if (!p.pass) e["residual"] = to_string(p.residual);
    j["pairs"].push_back(e);
  }
  return j;
}

inline Json jacobi_json(const JacobiReport& r, const BracketTable& t) {
  Json j;
  j["pass"] = r.pass;
  j["triples"] = r.triples.size();
  j["failures"] = Json::array();
  for (const auto* f : r.failures())
    j["failures"].push_back(
        {{"triple", {gen_name(t, f->i), gen_name(t, f->j), gen_name(t, f->k)}}, {"cyclic_sum", to_string(f->cyclic_sum)}});
  return j;
}

inline Json rank_json(const RankReport& r, const BracketTable& t) {
  Json j;
  j["generators"] = t.size();
  j["rank"] = r.rank;
  j["sampled_rank"] = r.sampled_rank;
  j["corank"] = r.corank;
  j["seed"] = r.seed;
  j["witness"] = point_json(*t.vars(), r.witness);
  if (r.odd_dimension) {
    j["determinant"] = "0";
    j["determinant_reason"] = "odd dimension";
  } else {
    j["pfaffian"] = to_string(r.degeneracy);
  }
  return j;
}

inline Json central_json(const std::vector<std::size_t>& c, const BracketTable& t) {
  Json j = Json::array();
  for (auto k : c) j.push_back(gen_name(t, k));
  return j;
}

inline void print_closure(std::ostream& out, const ClosureReport& c, const BracketTable& t) {
  std::size_t passed = 0;
  for (const auto& p : c.pairs) passed += p.pass;
  out << "closure: " << passed << "/" << c.pairs.size() << " pairs pass\n";
  for (const auto& p : c.pairs)
    if (!p.pass)
      out << "  FAIL {" << gen_name(t, p.i) << ", " << gen_name(t, p.j) << "}: residual " << to_string(p.residual)
          << "\n";
}

inline void print_jacobi(std::ostream& out, const JacobiReport& r, const BracketTable& t) {
  out << "jacobi: " << (r.triples.size() - r.failures().size()) << "/" << r.triples.size() << " triples pass\n";
  for (const auto* f : r.failures())
    out << "  FAIL (" << gen_name(t, f->i) << ", " << gen_name(t, f->j) << ", " << gen_name(t, f->k)
        << "): " << to_string(f->cyclic_sum) << "\n";
}

inline void print_rank(std::ostream& out, const RankReport& r, const BracketTable& t) {
  out << "rank: " << r.rank << " of " << t.size() << " (sampled " << r.sampled_rank << ", seed " << r.seed
      << "), corank " << r.corank << "\n";
  if (r.odd_dimension)
    out << "determinant: identically 0 (odd dimension " << t.size() << ")\n";
  else
    out << "pfaffian: " << to_string(r.degeneracy) << "\n";
}

inline AnsatzSpec ansatz_of(const ProblemFile& pf) {
  return AnsatzSpec{pf.solver.max_degree, pf.solver.inverse_degree, pf.solver.allow_log, pf.invertible};
}

/// Solves with degree escalation up to the ceiling unless the degree is pinned.
inline CasimirBasis solve_escalating(const BracketTable& t, AnsatzSpec spec, bool pinned, const RankReport& rank,
                                     Json& log) {
  log = Json::array();
  while (true) {
    auto t0 = Clock::now();
    CasimirBasis b = solve_casimirs(t, spec, rank.corank, rank.witness, rank.seed);
    log.push_back({{"max_degree", spec.max_degree},
                   {"solutions", b.solutions.size()},
                   {"independence_rank", b.functional_independence_rank},
                   {"ms", ms_since(t0)}});
    if (pinned || b.functional_independence_rank >= rank.corank || spec.max_degree >= escalation_ceiling) return b;
    ++spec.max_degree;
  }
}

inline Json basis_json(const CasimirBasis& b, const BracketTable& t) {
  Json j;
  j["max_degree"] = b.ansatz.max_degree;
  j["inverse_degree"] = b.ansatz.inverse_degree;
  j["allow_log"] = b.ansatz.allow_log;
  j["corank"] = b.corank_expected;
  j["independence_rank"] = b.functional_independence_rank;
  j["complete"] = b.functional_independence_rank == b.corank_expected;
  j["casimirs"] = Json::array();
  for (const auto& s : b.solutions)
    j["casimirs"].push_back({{"expression", to_string(s.expr)}, {"verified", s.verified}, {"central", s.central}});
  j["central"] = central_json(b.central, t);
  return j;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

struct Options {
  std::string file;
  std::uint64_t seed = default_seed;
  std::string json_path;
  std::optional<unsigned> max_degree, inverse_degree;
  bool allow_log = false;
  std::string invariant;
  std::string constants;
  std::string observable, init;
  std::optional<double> dt;
  std::optional<std::size_t> steps;
  std::vector<std::string> monitors;
  std::string example, emit;
};

/// Runs one command; `report` receives the JSON report.
inline int run_command(const std::string& cmd, const Options& o, std::ostream& out, Json& report) {
  using namespace detail;
  report = Json::object();
  report["command"] = cmd;
  report["seed"] = o.seed;
  Json timings = Json::object();
  int code = ok;

  if (cmd == "examples") {
    if (o.example.empty()) {
      if (!o.emit.empty()) {
        std::filesystem::create_directories(o.emit);
        for (const auto& [n, text] : corpus_entries()) {
          std::ofstream f(std::filesystem::path(o.emit) / (n + ".plq"));
          f << text << "\n";
        }
        out << "wrote " << corpus_entries().size() << " problem files to " << o.emit << "\n";
      } else {
        for (const auto& [n, text] : corpus_entries()) out << n << "\n";
      }
      report["examples"] = Json::array();
      for (const auto& [n, text] : corpus_entries()) report["examples"].push_back(n);
      return ok;
    }
    const char* text = corpus_source(o.example);
    if (!o.emit.empty()) {
      std::ofstream f(o.emit);
      if (!f) throw Error("cannot write '" + o.emit + "'");
      f << text << "\n";
      out << "wrote " << o.example << " to " << o.emit << "\n";
    } else {
      out << text << "\n";
    }
    report["example"] = o.example;
    return ok;
  }

  auto t0 = Clock::now();
  ProblemFile pf = load(o.file, split_list(o.constants));
  timings["load_ms"] = ms_since(t0);
  report["problem"] = pf.name;
  const VarTablePtr& vt = pf.vars;
  const BracketTable table = pf.constrained_table();
  if (!pf.constraints.empty()) {
    Json c = Json::object();
    for (const auto& [v, f] : pf.constraints) c[vt->name(v)] = to_string(f);
    report["constraints"] = c;
  }
  out << "problem: " << pf.name << " (" << table.size() << " generators)\n";

  auto do_closure = [&] {
    if (!pf.realization) return true;
    auto t1 = Clock::now();
    ClosureReport c = verify_closure(*pf.realization, table, o.seed);
    timings["closure_ms"] = ms_since(t1);
    report["closure"] = closure_json(c, table);
    print_closure(out, c, table);
    return c.pass;
  };
  auto do_jacobi = [&] {
    auto t1 = Clock::now();
    JacobiReport j = jacobi_check(table);
    timings["jacobi_ms"] = ms_since(t1);
    report["jacobi"] = jacobi_json(j, table);
    print_jacobi(out, j, table);
    return j.pass;
  };

  if (cmd == "verify") {
    bool pass = do_closure();
    pass = do_jacobi() && pass;
    code = pass ? ok : verification_failed;
    out << (pass ? "verified\n" : "verification FAILED\n");
  } else if (cmd == "rank") {
    auto t1 = Clock::now();
    RankReport r = generic_rank(pf.table, o.seed);
    timings["rank_ms"] = ms_since(t1);
    report["rank"] = rank_json(r, pf.table);
    print_rank(out, r, pf.table);
    auto central = detect_central(pf.table);
    report["central"] = central_json(central, pf.table);
    for (auto k : central) out << "central: " << gen_name(pf.table, k) << " (any function of it is a Casimir)\n";
    if (!pf.constraints.empty()) {
      bool degenerate = verify_parameter_constraint(pf.table, pf.constraints);
      RankReport rc = generic_rank(table, o.seed);
      report["constrained"] = {{"degenerate", degenerate}, {"rank", rc.rank}, {"corank", rc.corank}};
      out << "under constraints: " << (degenerate ? "degenerate" : "NOT degenerate") << ", rank " << rc.rank
          << ", corank " << rc.corank << "\n";
    }
  } else if (cmd == "solve") {
    bool pass = do_closure();
    pass = do_jacobi() && pass;
    auto t1 = Clock::now();
    RankReport r = generic_rank(table, o.seed);
    timings["rank_ms"] = ms_since(t1);
    report["rank"] = rank_json(r, table);
    print_rank(out, r, table);
    AnsatzSpec spec = ansatz_of(pf);
    if (o.max_degree) spec.max_degree = *o.max_degree;
    if (o.inverse_degree) spec.inverse_degree = *o.inverse_degree;
    if (o.allow_log) spec.allow_log = true;
    if (spec.max_degree < 1) throw Error("--max-degree must be at least 1");
    t1 = Clock::now();
    Json log;
    CasimirBasis b = solve_escalating(table, spec, o.max_degree.has_value(), r, log);
    timings["solve_ms"] = ms_since(t1);
    report["escalation"] = log;
    report["casimirs"] = basis_json(b, table);
    for (const auto& step : log)
      out << "ansatz degree " << step["max_degree"].get<unsigned>() << ": " << step["solutions"].get<std::size_t>()
          << " solutions, independence rank " << step["independence_rank"].get<std::size_t>() << "\n";
    for (const auto& s : b.solutions) {
      out << "casimir: " << to_string(s.expr) << (s.central ? "  (central generator)" : "")
          << (s.verified ? "" : "  NOT VERIFIED") << "\n";
      pass = pass && s.verified;
    }
    out << "independence rank " << b.functional_independence_rank << ", corank " << b.corank_expected
        << (b.functional_independence_rank == b.corank_expected ? "" : "  (solution space not fully found)") << "\n";
    code = pass ? ok : verification_failed;
  } else if (cmd == "check") {
    if (o.invariant.empty()) throw Error("--invariant is required");
    LogExpr f = substitute(parse(o.invariant, vt), pf.constraints);
    InvariantCheck ic = verify_invariant(f, table);
    report["invariant"] = to_string(f);
    report["verified"] = ic.ok;
    Json res = Json::object();
    for (std::size_t j = 0; j < table.size(); ++j)
      if (!ic.residuals[j].is_zero()) res[gen_name(table, j)] = to_string(ic.residuals[j]);
    report["residuals"] = res;
    out << "invariant: " << to_string(f) << "\n";
    out << (ic.ok ? "verified: true\n" : "verified: false\n");
    for (std::size_t j = 0; j < table.size(); ++j)
      if (!ic.residuals[j].is_zero())
        out << "  {F, " << gen_name(table, j) << "} = " << to_string(ic.residuals[j]) << "\n";
    if (ic.ok) {
      RankReport r = generic_rank(table, o.seed);
      Json log;
      CasimirBasis b = solve_escalating(table, ansatz_of(pf), false, r, log);
      bool member = in_span(f, b.expressions(), table, b.ansatz, true);
      report["in_solution_span"] = member;
      out << "in span of computed Casimirs (with products): " << (member ? "yes" : "no") << "\n";
    }
    code = ic.ok ? ok : verification_failed;
  } else if (cmd == "flow") {
    if (!pf.flow && o.observable.empty()) throw Error("--observable is required (the problem has no flow block)");
    FlowOptions fo = pf.flow.value_or(FlowOptions{});
    if (!o.observable.empty()) fo.observable = o.observable;
    if (!o.init.empty()) {
      fo.init.clear();
      for (const auto& item : split_list(o.init)) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("--init expects name=value pairs, got '" + item + "'");
        std::size_t used = 0;
        std::string val = item.substr(eq + 1);
        double d = 0;
        try {
          d = std::stod(val, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != val.size() || val.empty()) throw Error("bad number in --init: '" + item + "'");
        fo.init.emplace_back(item.substr(0, eq), d);
      }
    }
    if (o.dt) fo.dt = *o.dt;
    if (o.steps) fo.steps = *o.steps;
    if (!o.monitors.empty()) fo.monitors = o.monitors;
    if (!(fo.dt > 0)) throw Error("--dt must be positive");
    if (fo.steps < 1) throw Error("--steps must be at least 1");

    PreparedFlow prep = prepare_flow(pf, fo);
    FlowConfig& cfg = prep.config;
    const bool canonical = prep.canonical;
    cfg.record_every = 0;
    cfg.monitors.push_back(cfg.observable);
    for (const auto& n : prep.uninitialized) out << "note: " << n << " not initialized, using 0\n";
    auto t1 = Clock::now();
    FlowResult fr;
    try {
      fr = run_flow(pf, prep);
    } catch (const FlowError& e) {
      report["flow"] = {{"error", e.what()}, {"step", e.step()}};
      out << "flow aborted: " << e.what() << "\n";
      return verification_failed;
    }
    timings["flow_ms"] = ms_since(t1);
    Json fj;
    fj["kind"] = canonical ? "canonical" : "abstract";
    fj["dt"] = cfg.h;
    fj["steps"] = cfg.steps;
    fj["monitors"] = Json::array();
    out << (canonical ? "canonical" : "abstract") << " flow of " << to_string(cfg.observable) << ", " << cfg.steps
        << " RK4 steps of " << cfg.h << "\n";
    for (std::size_t m = 0; m < cfg.monitors.size(); ++m) {
      std::string name = m + 1 == cfg.monitors.size() ? "observable" : to_string(cfg.monitors[m]);
      fj["monitors"].push_back({{"expression", to_string(cfg.monitors[m])},
                                {"initial", fr.drift.initial[m]},
                                {"final", fr.drift.final[m]},
                                {"max_drift", fr.drift.max_drift[m]}});
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", fr.drift.max_drift[m]);
      out << "  drift " << buf << "  " << name << "\n";
    }
    Json fin = Json::object();
    for (std::size_t v = 0; v < vt->size(); ++v) {
      VarKind k = vt->kind(v);
      if (canonical ? (k == VarKind::canonical_q || k == VarKind::canonical_p) : k == VarKind::generator)
        fin[vt->name(v)] = fr.states.back()[v];
    }
    fj["final_state"] = fin;
    report["flow"] = fj;
  } else {
    throw Error("unknown command '" + cmd + "'");
  }
  report["timings"] = timings;
  return code;
}

/// Parses arguments and runs; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Poisson-Lie structures and their Casimir invariants", "plq"};
  app.require_subcommand(1);
  Options o;
  auto file_cmd = [&](const char* name, const char* help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("file", o.file, "problem file (or corpus:NAME)")->required();
    c->add_option("--seed", o.seed, "random seed for rank sampling");
    c->add_option("--json", o.json_path, "write the full report as JSON");
    return c;
  };
  file_cmd("verify", "check closure of the realization and the Jacobi identity");
  file_cmd("rank", "generic rank, corank and Pfaffian of the structure matrix");
  CLI::App* solve = file_cmd("solve", "compute a basis of Casimir invariants");
  solve->add_option("--max-degree", o.max_degree, "pin the ansatz degree (no escalation)");
  solve->add_option("--inverse-degree", o.inverse_degree, "maximum negative degree on invertible generators");
  solve->add_flag("--allow-log", o.allow_log, "add log terms of invertible generators");
  CLI::App* check = file_cmd("check", "verify that an expression is a Casimir");
  check->add_option("--invariant", o.invariant, "expression in the generators")->required();
  check->add_option("--constants", o.constants, "extra symbolic constants, comma separated");
  CLI::App* flow = file_cmd("flow", "integrate the flow of an observable with RK4");
  flow->add_option("--observable", o.observable, "flow generator");
  flow->add_option("--init", o.init, "initial values, e.g. \"u1=1,u2=0.5\"");
  flow->add_option("--dt", o.dt, "step size");
  flow->add_option("--steps", o.steps, "number of steps");
  flow->add_option("--monitor", o.monitors, "expression to monitor (repeatable)");
  CLI::App* ex = app.add_subcommand("examples", "list or print the built-in examples");
  ex->add_option("name", o.example, "example name");
  ex->add_option("--emit", o.emit, "write to this file (or directory when no name is given)");
  ex->add_option("--json", o.json_path, "write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "plq: " << e.what() << "\n";
    return usage_error;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  Json report;
  int code;
  try {
    code = run_command(cmd, o, out, report);
  } catch (const ParseError& e) {
    err << "plq: " << e.what() << "\n";
    return usage_error;
  } catch (const ProblemError& e) {
    err << "plq: " << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    err << "plq: " << e.what() << "\n";
    return usage_error;
  }
  report["exit_code"] = code;
  if (!o.json_path.empty()) detail::write_json(o.json_path, report);
  return code;
}

}  // namespace plq::cli
