// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "plq/cli.hpp"
#include "random_expr.hpp"
#include "tables.hpp"

using namespace plq;
namespace fs = std::filesystem;

namespace {

const std::string corpus_dir = PLQ_CORPUS_DIR;

struct Outcome {
  int code;
  std::string out;
  Json report;
  double seconds;
};

Outcome plq_run(std::vector<std::string> args) {
  static int counter = 0;
  fs::path json = fs::temp_directory_path() / ("plq_acceptance_" + std::to_string(counter++) + ".json");
  fs::remove(json);
  args.insert(args.begin(), "plq");
  args.push_back("--json");
  args.push_back(json.string());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto t0 = std::chrono::steady_clock::now();
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json report;
  if (fs::exists(json)) {
    std::ifstream in(json);
    report = Json::parse(in);
  }
  return {code, out.str() + err.str(), report, s};
}

std::string file(const std::string& name) { return corpus_dir + "/" + name + ".plq"; }

// Collects the failed conditions of one criterion.
struct Checks {
  std::vector<std::string> failed;
  std::vector<std::string> notes;
  void operator()(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::vector<std::string> casimirs(const Outcome& o) {
  std::vector<std::string> out;
  if (!o.report.contains("casimirs")) return out;
  for (const auto& c : o.report["casimirs"]["casimirs"]) out.push_back(c["expression"].get<std::string>());
  return out;
}

bool same(const ProblemFile& pf, const std::string& a, const std::string& b) {
  return parse(a, pf.vars) == parse(b, pf.vars);
}

bool contains_exact(const ProblemFile& pf, const Outcome& o, const std::string& expr) {
  for (const auto& c : casimirs(o))
    if (same(pf, c, expr)) return true;
  return false;
}

bool flagged_central(const Outcome& o, const std::string& name) {
  for (const auto& c : o.report["casimirs"]["casimirs"])
    if (c["expression"] == name && c["central"].get<bool>()) return true;
  return false;
}

char buf[256];
std::string fmt(const char* f, double a, double b = 0) {
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

void criterion1(Checks& c) {
  ProblemFile pf = load_problem(file("sphere"));
  Outcome o = plq_run({"solve", file("sphere")});
  c(o.code == 0, "exit code 0");
  c(o.report["rank"]["corank"] == 1, "corank 1");
  auto cs = casimirs(o);
  c(cs.size() == 1, "one-dimensional Casimir space");
  c(cs.size() == 1 && same(pf, cs[0], "(phi + R^2)*H - V^2/2"), "normalized element equals (phi+R^2)H - V^2/2");
  c(o.report["rank"]["determinant"] == "0" && o.report["rank"]["determinant_reason"] == "odd dimension",
    "determinant reported identically zero citing odd dimension");
  c(o.seconds < 1.0, "runtime < 1 s");
  c.note(fmt("%.3f s", o.seconds));
}

void criterion2(Checks& c) {
  ProblemFile pf = load_problem(file("sklyanin"));
  auto t0 = std::chrono::steady_clock::now();
  Outcome rk = plq_run({"rank", file("sklyanin")});
  c(rk.code == 0, "rank exit code 0");
  RatFunc p = parse_rational(rk.report["rank"]["pfaffian"].get<std::string>(), pf.vars);
  RatFunc oracle = pf.table.entry(0, 1) * pf.table.entry(2, 3) - pf.table.entry(0, 2) * pf.table.entry(1, 3) +
                   pf.table.entry(0, 3) * pf.table.entry(1, 2);
  RatFunc factored = parse_rational("(a1*b1 - a2*b2 + a3*b3)*u1*u2*u3*u4", pf.vars);
  c(is_zero(p - oracle), "Pfaffian equals the hand expansion f12 f34 - f13 f24 + f14 f23");
  c(is_zero(p - factored) || is_zero(p + factored), "Pfaffian = +-(a1b1 - a2b2 + a3b3) u1u2u3u4");
  c(rk.report["rank"]["rank"] == 4, "generic rank 4 with free parameters");
  c(rk.report["constrained"]["degenerate"] == true, "constraint makes the Pfaffian vanish");
  Outcome sv = plq_run({"solve", file("sklyanin"), "--max-degree", "2"});
  c(sv.code == 0, "solve exit code 0");
  c(casimirs(sv).size() == 2, "degree-2 solve returns a 2-dimensional space");
  for (const char* cas : {"a3*u1^2 - b2*u2^2 + b1*u3^2", "a1*u1^2 - b3*u3^2 + b2*u4^2"}) {
    Outcome ck = plq_run({"check", file("sklyanin"), "--invariant", cas});
    c(ck.code == 0 && ck.report["verified"] == true, std::string("check verifies ") + cas);
    c(ck.report.value("in_solution_span", false), std::string(cas) + " lies in the computed span");
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c(s < 5.0, "runtime < 5 s");
  c.note(fmt("%.3f s", s));
}

void criterion3(Checks& c) {
  ProblemFile pf = load_problem(file("spinchain"));
  Outcome o = plq_run({"solve", file("spinchain"), "--inverse-degree", "1"});
  c(o.code == 0, "exit code 0");
  c(contains_exact(pf, o, "u1*u2^-1 - u3/2"), "returns u1 u2^-1 - u3/2");
  c(flagged_central(o, "u4"), "u4 reported as a free central solution");
  c(casimirs(o).size() == 2, "no other solutions");
  c(!verify_invariant(parse("u1*u2^-1 - u3^2/2", pf.vars), pf.table).ok, "the u3^2/2 variant fails verify_invariant");
  Outcome ck = plq_run({"check", file("spinchain"), "--invariant", "u1*u2^-1 - u3^2/2"});
  c(ck.code == 1 && ck.report["verified"] == false, "plq check rejects the u3^2/2 variant");
}

void criterion4(Checks& c) {
  ProblemFile pf = load_problem(file("galilei"));
  Outcome o = plq_run({"solve", file("galilei"), "--allow-log"});
  c(o.code == 0, "exit code 0");
  c(contains_exact(pf, o, "a*u1*u2^-1 - b*log(u2) - (a/2)*u3"), "returns a u1 u2^-1 - b log u2 - (a/2) u3");
}

void criterion5(Checks& c) {
  ProblemFile pf = load_problem(file("nappi-witten"));
  Outcome o = plq_run({"solve", file("nappi-witten")});
  c(o.code == 0, "exit code 0");
  c(contains_exact(pf, o, "P1^2 + P2^2 + 2*J*T"), "returns P1^2 + P2^2 + 2JT");
  c(flagged_central(o, "T"), "T reported as central");
  Outcome ck =
      plq_run({"check", file("nappi-witten"), "--invariant", "a*(P1^2 + P2^2 + 2*J*T) + b*T^2", "--constants", "a,b"});
  c(ck.code == 0 && ck.report["verified"] == true, "a C1 + b T^2 verified");
}

void criterion6(Checks& c) {
  ProblemFile pf = load_problem(file("hydrogen"));
  auto t0 = std::chrono::steady_clock::now();
  Outcome o = plq_run({"solve", file("hydrogen")});
  c(o.code == 0, "exit code 0");
  std::size_t passed = 0;
  for (const auto& p : o.report["closure"]["pairs"]) passed += p["pass"].get<bool>();
  c(o.report["closure"]["pass"] == true && passed == 21, "closure of all 21 pairs");
  c(o.report["rank"]["corank"] == 3, "corank 3");
  c(o.report["casimirs"]["max_degree"].get<unsigned>() <= 3, "solver degree <= 3");
  std::vector<LogExpr> basis;
  for (const auto& s : casimirs(o)) basis.push_back(parse(s, pf.vars));
  AnsatzSpec spec{3, 0, false, {}};
  for (const char* e : {"H", "L1*M1 + L2*M2 + L3*M3", "H*(L1^2 + L2^2 + L3^2) - (m/2)*(M1^2 + M2^2 + M3^2)"})
    c(in_span(parse(e, pf.vars), basis, pf.table, spec), std::string("span contains ") + e);
  Outcome ck = plq_run({"check", file("hydrogen"), "--invariant", "2*H*(L1^2 + L2^2 + L3^2) - m*(M1^2 + M2^2 + M3^2)"});
  c(ck.code == 0 && ck.report["verified"] == true, "check confirms C2 in cleared-denominator form");
  LogExpr kepler = parse("M1^2 + M2^2 + M3^2 - (2*H/m)*(L1^2 + L2^2 + L3^2) - kappa^2", pf.vars);
  c(is_zero(substitute(kepler, pf.realization->bindings())), "M^2 - (2H/m) L^2 - kappa^2 is zero under the realization");
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c(s < 60.0, "runtime < 60 s");
  c.note(fmt("%.3f s", s));
}

void criterion7(Checks& c) {
  std::mt19937_64 rng(2024);
  auto vt = make_vars({}, 2, {"c"});
  std::vector<std::size_t> all{0, 1, 2, 3, 4};
  bool anti = true, jac = true, leib = true;
  for (int k = 0; k < 200; ++k) {
    RatFunc f(gen::random_poly(vt, all, 3, 5, rng)), g(gen::random_poly(vt, all, 3, 5, rng)),
        h(gen::random_poly(vt, all, 3, 5, rng));
    anti = anti && is_zero(canonical_bracket(f, g) + canonical_bracket(g, f));
    jac = jac && is_zero(canonical_bracket(f, canonical_bracket(g, h)) + canonical_bracket(g, canonical_bracket(h, f)) +
                         canonical_bracket(h, canonical_bracket(f, g)));
    leib = leib && is_zero(canonical_bracket(f, g * h) - canonical_bracket(f, g) * h - g * canonical_bracket(f, h));
  }
  c(anti, "antisymmetry on 200 random expressions");
  c(jac, "Jacobi on 200 random expressions");
  c(leib, "Leibniz on 200 random expressions");

  BracketTable so3 = gen::so3();
  CasimirBasis b = solve_casimirs(so3, AnsatzSpec{});
  c(b.solutions.size() == 1 && b.solutions[0].expr == parse("u1^2 + u2^2 + u3^2", so3.vars()),
    "so(3) Casimir u1^2 + u2^2 + u3^2");

  auto nv = make_vars({"x"});
  bool null_ok = true, size_ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    RationalMatrix m(5, std::vector<Rational>(8));
    for (auto& r : m)
      for (auto& e : r) e = rng() % 4 ? gen::small_rational(rng) : Rational(0);
    if (rep % 4 == 0) m[4] = m[1];
    std::vector<SparseRow> rows;
    for (const auto& r : m) {
      SparseRow s;
      for (std::size_t k = 0; k < 8; ++k)
        if (r[k] != 0) s.emplace(k, Poly::constant(nv, r[k]));
      rows.push_back(s);
    }
    auto ns = nullspace(rows, 8, nv);
    for (const auto& v : ns)
      for (const auto& r : m) {
        Rational dot = 0;
        for (const auto& [k, p] : v) dot += r[k] * p.constant_value();
        null_ok = null_ok && dot == 0;
      }
    // Independent elimination order: columns right to left on the transpose.
    RationalMatrix t(8, std::vector<Rational>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 0; k < 8; ++k) t[7 - k][4 - i] = m[i][k];
    size_ok = size_ok && ns.size() == 8 - rank(t);
  }
  c(null_ok, "M v = 0 exactly for every nullspace vector of random 5x8 matrices");
  c(size_ok, "nullspace size = 8 - rank from an independent elimination");
}

void criterion8(Checks& c) {
  double worst = 0, worst_obs = 0, worst_ratio = 1e300;
  for (const auto& [name, text] : corpus_entries()) {
    Outcome sv = plq_run({"solve", file(name)});
    std::vector<std::string> args = {"flow", file(name)};
    for (const auto& e : casimirs(sv)) {
      args.push_back("--monitor");
      args.push_back(e);
    }
    auto with = [&](std::vector<std::string> extra) {
      std::vector<std::string> a = args;
      a.insert(a.end(), extra.begin(), extra.end());
      return plq_run(a);
    };
    Outcome f = with({"--dt", "0.001", "--steps", "10000"});
    c(f.code == 0, name + ": flow runs");
    const auto& mons = f.report["flow"]["monitors"];
    for (std::size_t m = 0; m + 1 < mons.size(); ++m) {
      double d = mons[m]["max_drift"].get<double>();
      worst = std::max(worst, d);
      c(d < 1e-8, name + ": Casimir drift < 1e-8 (" + mons[m]["expression"].get<std::string>() + ")");
    }
    worst_obs = std::max(worst_obs, mons.back()["max_drift"].get<double>());

    // Convergence order, measured where truncation error dominates rounding:
    // fixed horizon t = 10 at h = 0.1 and h = 0.05.
    Outcome coarse = with({"--dt", "0.1", "--steps", "100"}), fine = with({"--dt", "0.05", "--steps", "200"});
    const auto& cm = coarse.report["flow"]["monitors"];
    const auto& fm = fine.report["flow"]["monitors"];
    for (std::size_t m = 0; m < cm.size(); ++m) {
      double a = cm[m]["max_drift"].get<double>(), b = fm[m]["max_drift"].get<double>();
      if (a < 1e-12) continue;
      worst_ratio = std::min(worst_ratio, a / b);
      c(a / b >= 8.0, name + ": halving h reduces drift >= 8x (" + cm[m]["expression"].get<std::string>() + ")");
    }
  }
  Outcome sp = plq_run({"flow", file("sphere"), "--observable", "(phi + R^2)*H - V^2/2", "--monitor", "phi + R^2",
                        "--monitor", "V", "--dt", "0.001", "--steps", "10000"});
  c(sp.code == 0 && sp.report["flow"]["kind"] == "canonical", "sphere runs Hamilton's equations");
  c(sp.report["flow"]["monitors"][0]["max_drift"].get<double>() < 1e-10, "U drift < 1e-10 under the H-flow");
  c(sp.report["flow"]["monitors"][1]["max_drift"].get<double>() < 1e-10, "V drift < 1e-10 under the H-flow");
  c.note(fmt("max Casimir drift %.2e, max observable drift %.2e", worst, worst_obs));
  c.note(fmt("min halving ratio %.1f", worst_ratio));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Checks&)>>> criteria = {
      {"sphere Casimir and odd-dimension determinant", criterion1},
      {"Sklyanin Pfaffian, constrained solve and span membership", criterion2},
      {"spin chain Casimir, central u4, u3^2/2 variant rejected", criterion3},
      {"Galilei log Casimir", criterion4},
      {"Nappi-Witten Casimirs and invariant bilinear form", criterion5},
      {"hydrogen closure, corank and Casimir span", criterion6},
      {"property suites", criterion7},
      {"flow cross-checks", criterion8},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Checks c;
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.failed.push_back(std::string("exception: ") + e.what());
    }
    bool pass = c.failed.empty();
    failures += !pass;
    std::cout << "criterion " << k + 1 << ": " << (pass ? "PASS" : "FAIL") << "  " << criteria[k].first;
    for (const auto& n : c.notes) std::cout << " [" << n << "]";
    std::cout << "\n";
    for (const auto& f : c.failed) std::cout << "    failed: " << f << "\n";
  }
  return failures ? 1 : 0;
}
