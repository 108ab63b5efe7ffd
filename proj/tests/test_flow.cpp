#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plq/corpus.hpp"
#include "plq/flow.hpp"
#include "random_expr.hpp"

using namespace plq;

namespace {

std::vector<double> state(const VarTablePtr& vt, std::initializer_list<std::pair<const char*, double>> init) {
  std::vector<double> x(vt->size(), 0.0);
  for (const auto& [n, v] : init) x.at(*vt->find(n)) = v;
  return x;
}

double value(const ProblemFile& pf, const std::vector<double>& x, const char* name) { return x.at(*pf.vars->find(name)); }

}  // namespace

TEST(AbstractFlow, SphereCharacteristicsOfV) {
  // Under the flow of V: H' = -2H and (phi + R^2)' = 2(phi + R^2).
  ProblemFile pf = corpus("sphere");
  FlowConfig cfg;
  cfg.observable = parse("V", pf.vars);
  cfg.initial = state(pf.vars, {{"H", 1}, {"phi", 0}, {"V", 0}, {"R", 1}});
  cfg.h = 1e-3;
  cfg.steps = 1000;
  FlowResult r = abstract_flow(pf.table, cfg);
  const auto& x = r.states.back();
  EXPECT_NEAR(r.times.back(), 1.0, 1e-12);
  EXPECT_NEAR(value(pf, x, "H"), std::exp(-2.0), 1e-9);
  EXPECT_NEAR(value(pf, x, "phi") + 1, std::exp(2.0), 1e-9);
  EXPECT_NEAR(value(pf, x, "V"), 0, 1e-12);
}

TEST(AbstractFlow, FlowOfCasimirConservesIt) {
  ProblemFile pf = corpus("sphere");
  FlowConfig cfg;
  cfg.observable = parse("(phi + R^2)*H - V^2/2", pf.vars);
  cfg.monitors = {cfg.observable};
  cfg.initial = state(pf.vars, {{"H", 0.3}, {"phi", 0.2}, {"V", -0.4}, {"R", 1}});
  cfg.steps = 10000;
  FlowResult r = abstract_flow(pf.table, cfg);
  EXPECT_LT(r.drift.max_drift[0], 1e-10);
}

TEST(AbstractFlow, HydrogenCasimirsUnderRandomQuadratic) {
  ProblemFile pf = corpus("hydrogen");
  std::vector<std::size_t> gens = pf.vars->generators();
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 3; ++rep) {
    FlowConfig cfg;
    Poly g = gen::random_poly(pf.vars, gens, 2, 6, rng);
    cfg.observable = LogExpr(RatFunc(g));
    for (const char* m : {"H", "L1*M1 + L2*M2 + L3*M3", "H*(L1^2 + L2^2 + L3^2) - m/2*(M1^2 + M2^2 + M3^2)"})
      cfg.monitors.push_back(parse(m, pf.vars));
    cfg.initial = state(pf.vars, {{"H", -0.5}, {"L1", 0.3}, {"L2", 0.2}, {"L3", 0.9}, {"M1", 0.1}, {"M2", -0.2},
                                  {"M3", 0.4}, {"m", 1}, {"kappa", 1}});
    cfg.steps = 2000;
    cfg.record_every = 0;
    FlowResult r = abstract_flow(pf.table, cfg);
    for (double d : r.drift.max_drift) EXPECT_LT(d, 1e-8) << to_string(g);
  }
}

TEST(CanonicalFlow, SphereConsistencyCheck) {
  ProblemFile pf = corpus("sphere");
  FlowConfig cfg;
  cfg.observable = parse("(phi + R^2)*H - V^2/2", pf.vars);
  cfg.monitors = {parse("phi + R^2", pf.vars), parse("V", pf.vars),
                  parse("(q2*p3 - q3*p2)^2 + (q3*p1 - q1*p3)^2 + (q1*p2 - q2*p1)^2", pf.vars),
                  parse("2*((phi + R^2)*H - V^2/2)", pf.vars)};
  cfg.initial = state(pf.vars, {{"q1", 1}, {"p2", 1}, {"R", 1}});
  cfg.steps = 10000;
  FlowResult r = canonical_flow(*pf.realization, cfg.observable, cfg);
  EXPECT_LT(r.drift.max_drift[0], 1e-10);
  EXPECT_LT(r.drift.max_drift[1], 1e-10);
  EXPECT_NEAR(r.drift.initial[2], 1.0, 1e-15);
  EXPECT_LT(r.drift.max_drift[2], 1e-10);
  EXPECT_NEAR(r.drift.final[2], r.drift.final[3], 1e-10);
}

TEST(CanonicalFlow, FreeMotionLeavesTheSphere) {
  ProblemFile pf = corpus("sphere");
  FlowConfig cfg;
  cfg.observable = parse("H", pf.vars);
  cfg.monitors = {parse("phi", pf.vars)};
  cfg.initial = state(pf.vars, {{"q1", 1}, {"p2", 1}, {"R", 1}});
  cfg.steps = 1000;
  FlowResult r = canonical_flow(*pf.realization, cfg.observable, cfg);
  // q(t) = (1, t, 0), so phi(t) = t^2.
  EXPECT_NEAR(r.drift.final[0], 1.0, 1e-10);
  EXPECT_GT(r.drift.max_drift[0], 0.99);
}

TEST(CanonicalFlow, GeneratorTrajectoryMatchesAbstractFlow) {
  ProblemFile pf = corpus("sphere");
  const auto& vt = pf.vars;
  LogExpr g = parse("(phi + R^2)*H - V^2/2 + V", vt);
  FlowConfig c;
  c.observable = g;
  c.initial = state(vt, {{"q1", 0.6}, {"q2", 0.8}, {"p1", 0.1}, {"p2", -0.3}, {"p3", 0.5}, {"R", 1}});
  c.steps = 1000;
  FlowResult rc = canonical_flow(*pf.realization, g, c);
  std::vector<double> u0 = realized_generators(*pf.realization, c.initial);
  FlowConfig a = c;
  a.initial.assign(vt->size(), 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) a.initial[pf.table.generator(i)] = u0[i];
  a.initial[*vt->find("R")] = 1;
  FlowResult ra = abstract_flow(pf.table, a);
  std::vector<double> u1 = realized_generators(*pf.realization, rc.states.back());
  for (std::size_t i = 0; i < u1.size(); ++i) EXPECT_NEAR(u1[i], ra.states.back()[pf.table.generator(i)], 1e-8);
}

TEST(CorpusFlows, DriftBelowTolerance) {
  for (const auto& [name, text] : corpus_entries()) {
    ProblemFile pf = corpus(name);
    ASSERT_TRUE(pf.flow) << name;
    PreparedFlow f = prepare_flow(pf, *pf.flow);
    EXPECT_TRUE(f.uninitialized.empty()) << name;
    f.config.monitors.push_back(f.config.observable);
    f.config.record_every = 0;
    EXPECT_EQ(f.config.steps, 10000u);
    EXPECT_EQ(f.config.h, 1e-3);
    FlowResult r = run_flow(pf, f);
    for (std::size_t m = 0; m + 1 < r.drift.max_drift.size(); ++m) EXPECT_LT(r.drift.max_drift[m], 1e-8) << name;
    EXPECT_LT(r.drift.max_drift.back(), 1e-10) << name;
  }
}

TEST(CorpusFlows, HalvingStepReducesDrift) {
  // Coarse steps over a fixed horizon, where truncation error dominates.
  for (const auto& [name, text] : corpus_entries()) {
    ProblemFile pf = corpus(name);
    auto drift = [&](double h) {
      FlowOptions fo = *pf.flow;
      fo.dt = h;
      fo.steps = static_cast<std::size_t>(std::lround(10.0 / h));
      PreparedFlow f = prepare_flow(pf, fo);
      f.config.record_every = 0;
      return run_flow(pf, f).drift.max_drift;
    };
    auto coarse = drift(0.1), fine = drift(0.05);
    for (std::size_t m = 0; m < coarse.size(); ++m) {
      if (coarse[m] < 1e-12) continue;  // conserved to rounding already
      EXPECT_GE(coarse[m] / fine[m], 8.0) << name << " monitor " << m;
    }
  }
}

TEST(FlowErrors, PoleAbortsWithStep) {
  ProblemFile pf = corpus("spinchain");
  FlowConfig cfg;
  // du1/dt = {u1, u3/u2} = a*u1/u2 has a pole at u2 = 0.
  cfg.observable = parse("u3/u2", pf.vars);
  cfg.initial = state(pf.vars, {{"u1", 1}, {"u2", 0}, {"a", 1}});
  try {
    abstract_flow(pf.table, cfg);
    FAIL() << "expected a pole";
  } catch (const FlowError& e) {
    EXPECT_EQ(e.step(), 1u);
  }
  cfg.monitors = {parse("1/u2", pf.vars)};
  try {
    abstract_flow(pf.table, cfg);
    FAIL() << "expected a pole";
  } catch (const FlowError& e) {
    EXPECT_EQ(e.step(), 0u);
  }
}

TEST(FlowErrors, BadConfig) {
  ProblemFile pf = corpus("spinchain");
  FlowConfig cfg;
  cfg.observable = parse("u1", pf.vars);
  cfg.initial = state(pf.vars, {{"u2", 1}});
  cfg.h = 0;
  EXPECT_THROW(abstract_flow(pf.table, cfg), Error);
  cfg.h = 1e-3;
  cfg.steps = 0;
  EXPECT_THROW(abstract_flow(pf.table, cfg), Error);
  cfg.steps = 1;
  cfg.initial.pop_back();
  EXPECT_THROW(abstract_flow(pf.table, cfg), Error);
}

TEST(FlowErrors, PrepareRejectsMixedState) {
  ProblemFile pf = corpus("sphere");
  FlowOptions fo = *pf.flow;
  fo.init.emplace_back("H", 1.0);
  EXPECT_THROW(prepare_flow(pf, fo), Error);
  fo = *pf.flow;
  fo.init.emplace_back("zz", 1.0);
  EXPECT_THROW(prepare_flow(pf, fo), Error);
  ProblemFile nw = corpus("nappi-witten");
  fo = *nw.flow;
  fo.init.emplace_back("q1", 1.0);
  EXPECT_THROW(prepare_flow(nw, fo), Error);
}
