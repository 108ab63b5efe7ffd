#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plq/cli.hpp"

using namespace plq;
namespace fs = std::filesystem;

namespace {

const std::string corpus_dir = PLQ_CORPUS_DIR;
const std::string fixture_dir = PLQ_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out, err;
  Json report;
};

Outcome run(std::vector<std::string> args) {
  static int counter = 0;
  fs::path json = fs::temp_directory_path() / ("plq_cli_test_" + std::to_string(counter++) + ".json");
  fs::remove(json);
  args.insert(args.begin(), "plq");
  bool wants_json = !args.empty() && args[1] != "examples";
  if (wants_json) {
    args.push_back("--json");
    args.push_back(json.string());
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome r{cli::run(static_cast<int>(argv.size()), argv.data(), out, err), out.str(), err.str(), Json()};
  if (wants_json && fs::exists(json)) {
    std::ifstream in(json);
    r.report = Json::parse(in);
  }
  return r;
}

std::string corpus_file(const std::string& name) { return corpus_dir + "/" + name + ".plq"; }

std::string problem_error(const std::string& text) {
  try {
    problem_from_text(text);
  } catch (const ProblemError& e) {
    return e.what();
  }
  return "";
}

const char* minimal = R"({
  "name": "t",
  "generators": [{"name": "u1"}, {"name": "u2"}],
  "brackets": [BRACKETS]
})";

std::string with_brackets(const std::string& b) {
  std::string s = minimal;
  s.replace(s.find("BRACKETS"), 8, b);
  return s;
}

}  // namespace

TEST(LoadProblem, CorpusFilesMatchBuiltins) {
  for (const auto& [name, text] : corpus_entries()) {
    ProblemFile a = load_problem(corpus_file(name)), b = corpus(name);
    EXPECT_EQ(a.name, name);
    EXPECT_EQ(a.table.size(), b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i)
      for (std::size_t j = 0; j < a.table.size(); ++j)
        EXPECT_EQ(to_string(a.table.entry(i, j)), to_string(b.table.entry(i, j))) << name;
  }
}

TEST(LoadProblem, Sphere) {
  ProblemFile pf = load_problem(corpus_file("sphere"));
  EXPECT_EQ(pf.table.size(), 3u);
  EXPECT_EQ(pf.vars->parameters().size(), 1u);
  EXPECT_EQ(pf.vars->name(pf.vars->parameters()[0]), "R");
  EXPECT_EQ(pf.vars->qs().size(), 3u);
  ASSERT_TRUE(pf.realization);
}

TEST(LoadProblem, RealizationsWhereExpected) {
  EXPECT_TRUE(corpus("sphere").realization);
  EXPECT_TRUE(corpus("hydrogen").realization);
  EXPECT_TRUE(corpus("hydrogen").vars->rho());
  for (const char* n : {"sklyanin", "spinchain", "galilei", "nappi-witten"}) EXPECT_FALSE(corpus(n).realization) << n;
  EXPECT_EQ(corpus("nappi-witten").table.size(), 4u);
  EXPECT_EQ(corpus("hydrogen").table.size(), 7u);
}

TEST(LoadProblem, UnknownGenerator) {
  std::string e = problem_error(with_brackets(R"({"i": "u1", "j": "u9", "expression": "u1"})"));
  EXPECT_NE(e.find("u9"), std::string::npos) << e;
  EXPECT_NE(e.find("/brackets/0/j"), std::string::npos) << e;
}

TEST(LoadProblem, DuplicateBracket) {
  std::string e = problem_error(with_brackets(
      R"({"i": "u1", "j": "u2", "expression": "u1"}, {"i": "u2", "j": "u1", "expression": "-u1"})"));
  EXPECT_NE(e.find("duplicate bracket"), std::string::npos) << e;
}

TEST(LoadProblem, ReversedOrientationIsNegated) {
  ProblemFile pf = problem_from_text(with_brackets(R"({"i": "u2", "j": "u1", "expression": "u1"})"));
  EXPECT_EQ(to_string(pf.table.entry(0, 1)), "-u1");
}

TEST(LoadProblem, MixedRealizations) {
  std::string e = problem_error(R"({
    "name": "t", "variables": {"canonical_pairs": 1},
    "generators": [{"name": "u1", "realization": "q1"}, {"name": "u2"}],
    "brackets": []
  })");
  EXPECT_NE(e.find("every generator"), std::string::npos) << e;
}

TEST(LoadProblem, OtherSchemaErrors) {
  EXPECT_NE(problem_error(R"({"name": "t", "generators": [{"name": "u1"}], "bogus": 1})").find("bogus"),
            std::string::npos);
  EXPECT_NE(problem_error(with_brackets(R"({"i": "u1", "j": "u2", "expression": "u1 +"})")).find("/brackets/0/expression"),
            std::string::npos);
  EXPECT_NE(problem_error(with_brackets(R"({"i": "u1", "j": "u1", "expression": "u1"})")).find("itself"),
            std::string::npos);
  EXPECT_NE(problem_error(R"({"name": "t", "generators": [{"name": "u1"}], "brackets": [],
                              "constraints": {"u1": "2"}})")
                .find("not a parameter"),
            std::string::npos);
  EXPECT_NE(problem_error("{\n  \"name\": \"t\",\n  \"generators\": [\n").find("line"), std::string::npos);
  EXPECT_THROW(load_problem("/nonexistent/file.plq"), ProblemError);
}

TEST(Corpus, UnknownNameListsAvailable) {
  try {
    corpus("kepler");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nappi-witten"), std::string::npos);
  }
}

TEST(Commands, SolveSphere) {
  Outcome r = run({"solve", corpus_file("sphere")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["rank"]["corank"], 1);
  EXPECT_EQ(r.report["rank"]["determinant_reason"], "odd dimension");
  ASSERT_EQ(r.report["casimirs"]["casimirs"].size(), 1u);
  EXPECT_EQ(r.report["casimirs"]["casimirs"][0]["expression"], "R^2*H + H*phi - 1/2*V^2");
  EXPECT_EQ(r.report["seed"], default_seed);
  EXPECT_TRUE(r.report["timings"].contains("solve_ms"));
  EXPECT_NE(r.out.find("odd dimension"), std::string::npos);
}

TEST(Commands, CheckHydrogen) {
  Outcome r = run({"check", corpus_file("hydrogen"), "--invariant", "L1*M1+L2*M2+L3*M3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["verified"], true);
  EXPECT_EQ(r.report["in_solution_span"], true);
  Outcome bad = run({"check", corpus_file("hydrogen"), "--invariant", "L1^2+L2^2+L3^2"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.report["verified"], false);
  EXPECT_EQ(bad.report["residuals"].size(), 3u);
}

TEST(Commands, CheckWithExtraConstants) {
  Outcome r = run({"check", corpus_file("nappi-witten"), "--invariant", "a*(P1^2+P2^2+2*J*T) + b*T^2", "--constants",
               "a,b"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["verified"], true);
  Outcome missing = run({"check", corpus_file("nappi-witten"), "--invariant", "a*T"});
  EXPECT_EQ(missing.code, 2);
}

TEST(Commands, RankSklyanin) {
  Outcome r = run({"rank", corpus_file("sklyanin")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["rank"]["rank"], 4);
  EXPECT_EQ(r.report["constrained"]["degenerate"], true);
  EXPECT_EQ(r.report["constrained"]["corank"], 2);
  ProblemFile pf = corpus("sklyanin");
  RatFunc p = parse_rational(r.report["rank"]["pfaffian"].get<std::string>(), pf.vars);
  RatFunc expected = parse_rational("(a1*b1 - a2*b2 + a3*b3)*u1*u2*u3*u4", pf.vars);
  EXPECT_TRUE(is_zero(p - expected) || is_zero(p + expected));
}

TEST(Commands, SeedIsEchoed) {
  Outcome r = run({"rank", corpus_file("hydrogen"), "--seed", "99"});
  EXPECT_EQ(r.report["seed"], 99);
  EXPECT_EQ(r.report["rank"]["seed"], 99);
}

TEST(Commands, ReportExpressionsReparseAndVerify) {
  for (const auto& [name, text] : corpus_entries()) {
    Outcome r = run({"solve", corpus_file(name)});
    ASSERT_EQ(r.code, 0) << name << r.err;
    ProblemFile pf = corpus(name);
    for (const auto& c : r.report["casimirs"]["casimirs"]) {
      EXPECT_TRUE(c["verified"].get<bool>());
      LogExpr e = parse(c["expression"].get<std::string>(), pf.vars);
      EXPECT_TRUE(verify_invariant(e, pf.constrained_table()).ok) << name;
    }
    EXPECT_EQ(r.report["casimirs"]["complete"], true) << name;
  }
}

TEST(Commands, CorruptedFixturesExitOne) {
  Outcome a = run({"verify", fixture_dir + "/so3-corrupted.plq"});
  EXPECT_EQ(a.code, 1);
  EXPECT_FALSE(a.report["jacobi"]["failures"].empty());
  Outcome b = run({"verify", fixture_dir + "/sphere-corrupted.plq"});
  EXPECT_EQ(b.code, 1);
  EXPECT_EQ(b.report["closure"]["pass"], false);
  std::size_t failed = 0;
  for (const auto& p : b.report["closure"]["pairs"]) failed += !p["pass"].get<bool>();
  EXPECT_EQ(failed, 1u);
  Outcome c = run({"solve", fixture_dir + "/so3-corrupted.plq"});
  EXPECT_EQ(c.code, 1);
}

TEST(Commands, Escalation) {
  Outcome r = run({"solve", fixture_dir + "/hydrogen-default-degree.plq"});
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.report["escalation"].size(), 2u);
  EXPECT_EQ(r.report["escalation"][0]["max_degree"], 2);
  EXPECT_EQ(r.report["escalation"][1]["max_degree"], 3);
  EXPECT_EQ(r.report["casimirs"]["independence_rank"], 3);
  Outcome pinned = run({"solve", fixture_dir + "/hydrogen-default-degree.plq", "--max-degree", "2"});
  EXPECT_EQ(pinned.report["escalation"].size(), 1u);
  EXPECT_EQ(pinned.report["casimirs"]["complete"], false);
  EXPECT_NE(pinned.out.find("not fully found"), std::string::npos);
}

TEST(Commands, SolveOverrides) {
  Outcome r = run({"solve", corpus_file("galilei"), "--max-degree", "2"});
  EXPECT_EQ(r.report["casimirs"]["casimirs"].size(), 2u);
  Outcome nolog = run({"solve", corpus_file("spinchain"), "--inverse-degree", "0", "--max-degree", "2"});
  EXPECT_EQ(nolog.report["casimirs"]["casimirs"].size(), 1u);
}

TEST(Commands, Flow) {
  Outcome r = run({"flow", corpus_file("sphere")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report["flow"]["kind"], "canonical");
  for (const auto& m : r.report["flow"]["monitors"]) EXPECT_LT(m["max_drift"].get<double>(), 1e-10);
  Outcome a = run({"flow", corpus_file("sphere"), "--observable", "V", "--init", "H=1,phi=0,V=0,R=1", "--dt", "0.001",
               "--steps", "1000", "--monitor", "H"});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.report["flow"]["kind"], "abstract");
  EXPECT_NEAR(a.report["flow"]["monitors"][0]["final"].get<double>(), std::exp(-2.0), 1e-9);
  Outcome pole = run({"flow", corpus_file("spinchain"), "--observable", "u3/u2", "--init", "u1=1,u2=0,a=1"});
  EXPECT_EQ(pole.code, 1);
  EXPECT_TRUE(pole.report["flow"].contains("step"));
}

TEST(Commands, UsageErrors) {
  EXPECT_EQ(run({"solve"}).code, 2);
  EXPECT_EQ(run({"frobnicate", corpus_file("sphere")}).code, 2);
  EXPECT_EQ(run({"solve", "/nonexistent.plq"}).code, 2);
  EXPECT_EQ(run({"check", corpus_file("sphere"), "--invariant", "H +"}).code, 2);
  EXPECT_EQ(run({"flow", corpus_file("sphere"), "--init", "q1=x"}).code, 2);
  EXPECT_EQ(run({"flow", corpus_file("sphere"), "--dt", "-1"}).code, 2);
  EXPECT_EQ(run({"examples", "kepler"}).code, 2);
}

TEST(Commands, ExamplesEmit) {
  fs::path dir = fs::temp_directory_path() / "plq_cli_emit";
  fs::remove_all(dir);
  EXPECT_EQ(run({"examples", "--emit", dir.string()}).code, 0);
  for (const auto& [name, text] : corpus_entries()) EXPECT_TRUE(fs::exists(dir / (name + ".plq"))) << name;
  fs::path one = dir / "nw.plq";
  EXPECT_EQ(run({"examples", "nappi-witten", "--emit", one.string()}).code, 0);
  EXPECT_EQ(load_problem(one.string()).name, "nappi-witten");
  Outcome list = run({"examples"});
  EXPECT_NE(list.out.find("hydrogen"), std::string::npos);
}
