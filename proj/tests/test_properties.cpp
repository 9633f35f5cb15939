#include "support.hpp"

#include "tvsimplex/oracle.hpp"

#include <gtest/gtest.h>

using namespace tvsimplex;

namespace {

const std::vector<tvs_test::SuiteCase> &suite() {
  static const auto cases = tvs_test::small_suite(2, 31);
  return cases;
}

Instance scaled(const Instance &inst, double cost, double weight) {
  Instance out = inst;
  for (auto &v : out.c)
    v *= cost;
  for (auto &v : out.d_fwd)
    v *= cost;
  for (auto &v : out.d_bwd)
    v *= cost;
  for (auto &v : out.h)
    v *= weight;
  out.delta *= weight;
  return out;
}

} // namespace

TEST(Property, ObjectiveNeverIncreasesAndInvariantsHold) {
  for (const auto &sc : suite()) {
    double last = std::numeric_limits<double>::infinity();
    SolveOptions opt;
    opt.visit = [&](const ForestBasis &f, std::size_t iter) {
      const auto bad = f.check_invariants();
      ASSERT_FALSE(bad) << sc.name << " pivot " << iter << ": "
                        << to_string(bad->kind);
      const double obj = evaluate_objective(sc.inst, f.x());
      EXPECT_LE(obj, last + 1e-12) << sc.name << " pivot " << iter;
      last = obj;
    };
    const SolveResult res = solve(sc.inst, opt);
    EXPECT_EQ(res.status, SolveStatus::Optimal) << sc.name;
  }
}

// Dyadic data keeps every aggregate sum exact, so incremental updates must
// equal a from-scratch recomputation bit for bit.
TEST(Property, IncrementalAggregatesAreExact) {
  for (const auto &sc : suite()) {
    SolveOptions opt;
    opt.refresh_every = 0;
    opt.visit = [&](const ForestBasis &f, std::size_t iter) {
      ForestBasis fresh = f;
      fresh.refresh_self_terms();
      fresh.refresh_aggregates();
      for (VertexId v = 0; v < static_cast<VertexId>(f.num_vertices()); ++v) {
        ASSERT_EQ(f.y(v), fresh.y(v)) << sc.name << " pivot " << iter;
        ASSERT_EQ(f.z(v), fresh.z(v)) << sc.name << " pivot " << iter;
        ASSERT_EQ(f.g(v), fresh.g(v)) << sc.name << " pivot " << iter;
      }
    };
    solve(sc.inst, opt);
  }
}

TEST(Property, OptimumMatchesEnumeration) {
  for (const auto &sc : suite()) {
    const SolveResult res = solve(sc.inst);
    const auto best = enumerate_optimal(sc.inst);
    EXPECT_NEAR(res.solution.objective, best.best_objective, 1e-9) << sc.name;
  }
}

TEST(Property, ScalingCostsOrWeightsKeepsTheSolution) {
  for (const auto &sc : suite()) {
    const SolveResult base = solve(sc.inst);
    const Instance costs = scaled(sc.inst, 2.0, 1.0);
    const Instance weights = scaled(sc.inst, 1.0, 2.0);
    const SolveResult rc = solve(costs);
    const SolveResult rw = solve(weights);
    EXPECT_EQ(rc.stats.pivots, base.stats.pivots) << sc.name;
    EXPECT_EQ(rw.stats.pivots, base.stats.pivots) << sc.name;
    EXPECT_EQ(rc.solution.x, base.solution.x) << sc.name;
    EXPECT_EQ(rw.solution.x, base.solution.x) << sc.name;
    EXPECT_EQ(rc.solution.objective, 2.0 * base.solution.objective) << sc.name;
    EXPECT_EQ(rw.solution.s, 2.0 * base.solution.s) << sc.name;
  }
}

// Basic solutions take at most one value strictly inside (0, 1), on one
// connected vertex set; with the slack basic every vertex is at a bound.
TEST(Property, BasicSolutionsHaveOneFractionalComponent) {
  for (const auto &sc : suite()) {
    SolveOptions opt;
    opt.visit = [&](const ForestBasis &f, std::size_t iter) {
      const auto comps = tvs_test::fractional_components(sc.inst, f.x());
      ASSERT_LE(comps, 1u) << sc.name << " pivot " << iter;
      if (f.slack_basic()) {
        ASSERT_EQ(comps, 0u) << sc.name << " pivot " << iter;
        return;
      }
      const double value = f.x(f.basic_root());
      for (double xv : f.x()) {
        if (xv > 1e-12 && xv < 1.0 - 1e-12) {
          ASSERT_EQ(xv, value) << sc.name;
        }
      }
    };
    solve(sc.inst, opt);
  }
}

TEST(Property, BlandTerminatesQuickly) {
  for (const auto &sc : suite()) {
    SolveOptions opt;
    opt.pricing = PricingRule::Bland;
    const SolveResult res = solve(sc.inst, opt);
    const auto size = sc.inst.num_vertices() + sc.inst.num_edges();
    ASSERT_EQ(res.status, SolveStatus::Optimal) << sc.name;
    EXPECT_LE(res.stats.pivots, 10 * size * size) << sc.name;
    EXPECT_EQ(res.stats.bland_pivots, res.stats.pivots);
  }
}

TEST(Property, CertificatesVerifyIndependently) {
  for (const auto &sc : suite()) {
    const SolveResult res = solve(sc.inst);
    ASSERT_TRUE(res.certificate) << sc.name;
    const auto bad =
        verify_solution(sc.inst, res.solution, 1e-9, &*res.certificate);
    EXPECT_FALSE(bad) << sc.name << ": " << bad->message;
  }
}

TEST(Property, AsymmetricEdgeCosts) {
  tvs_test::Draw rng(77);
  for (int k = 0; k < 60; ++k) {
    Instance inst = suite()[static_cast<std::size_t>(k) % suite().size()].inst;
    for (std::size_t e = 0; e < inst.num_edges(); ++e) {
      inst.d_fwd[e] = rng.dyadic(-0.5, 2.0);
      inst.d_bwd[e] = rng.dyadic(0.5, 2.0);
    }
    validate(inst);
    const SolveResult res = solve(inst);
    ASSERT_EQ(res.status, SolveStatus::Optimal);
    EXPECT_NEAR(res.solution.objective, enumerate_optimal(inst).best_objective,
                1e-9)
        << k;
    ASSERT_TRUE(res.certificate);
    EXPECT_FALSE(verify_solution(inst, res.solution, 1e-9, &*res.certificate));
  }
}
