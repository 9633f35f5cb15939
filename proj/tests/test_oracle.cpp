#include "support.hpp"

#include "tvsimplex/oracle.hpp"

#include <gtest/gtest.h>

using namespace tvsimplex;

TEST(Enumeration, TwoVertexPath) {
  const auto loose = enumerate_optimal(tvs_test::fix_p2(1.5));
  EXPECT_EQ(loose.n_candidates, 6u);
  EXPECT_DOUBLE_EQ(loose.best_objective, -2.0);
  EXPECT_EQ(loose.best_x, (std::vector<double>{1.0, 0.0}));

  const auto tight = enumerate_optimal(tvs_test::fix_p2(0.6));
  EXPECT_NEAR(tight.best_objective, -1.2, 1e-15);
  EXPECT_NEAR(tight.best_x[0], 0.6, 1e-15);
}

TEST(Enumeration, FractionalSetMustBeConnected) {
  // Two isolated vertices with equal ratio: the optimum splits the budget,
  // but the oracle reaches the same value through a single fractional vertex.
  const Instance inst =
      from_tv(Graph(2, {}), {-1.0, -1.0}, {1.0, 1.0}, 1.0, 0.5);
  const auto r = enumerate_optimal(inst);
  EXPECT_DOUBLE_EQ(r.best_objective, -0.5);
  // 1 binary point, {0} and {1} with the other at 0; {0,1} is disconnected.
  EXPECT_EQ(r.n_candidates, 3u);
}

TEST(Enumeration, RefusesLargeGraphs) {
  const Instance inst = generate_random(4, 1.0, 1);
  try {
    enumerate_optimal(inst);
    FAIL();
  } catch (const OracleError &e) {
    EXPECT_EQ(e.kind(), OracleError::Kind::TooLarge);
    EXPECT_EQ(e.size(), 16u);
  }
}

TEST(BasisCount, SmallGraphs) {
  const Graph k3(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<double> zero3(3, 0.0);
  EXPECT_EQ(count_bases_det(k3, zero3), 50);
  EXPECT_EQ(enumerate_aligned_bases(k3, zero3), 50);

  const Graph p2(2, {{0, 1}});
  const std::vector<double> level{0.0, 0.0}, split{1.0, 0.0};
  EXPECT_EQ(count_bases_det(p2, level), 4);
  EXPECT_EQ(enumerate_aligned_bases(p2, level), 4);
  EXPECT_EQ(count_bases_det(p2, split), 1);
  EXPECT_EQ(enumerate_aligned_bases(p2, split), 1);

  // Edges between different levels do not enter the count.
  const std::vector<double> mixed{0.5, 0.5, 1.0};
  const Graph p3(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(count_bases_det(p3, mixed), 4);
  EXPECT_EQ(enumerate_aligned_bases(p3, mixed), 4);
}

TEST(BasisCount, DeterminantMatchesEnumerationOnFourVertices) {
  // Every simple graph on 4 labelled vertices, all at one level.
  const std::vector<EdgeEnds> all{{0, 1}, {0, 2}, {0, 3},
                                  {1, 2}, {1, 3}, {2, 3}};
  const std::vector<double> x(4, 0.0);
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<EdgeEnds> edges;
    for (unsigned i = 0; i < 6; ++i)
      if (mask >> i & 1u)
        edges.push_back(all[i]);
    const Graph g(4, edges);
    EXPECT_EQ(count_bases_det(g, x), enumerate_aligned_bases(g, x))
        << "mask " << mask;
  }
}

TEST(BasisCount, CapIsEnforced) {
  const Graph g = build_grid(4);
  const std::vector<double> x(16, 0.0);
  EXPECT_THROW(enumerate_aligned_bases(g, x), OracleError);
  EXPECT_EQ(count_bases_det(g, x) > 0, true);
}

TEST(FeasibleBases, DegeneratePointExceedsTwiceTheDeterminant) {
  // x = (0,0) with a zero budget: the slack sits at its bound too, so bases
  // that use neither edge part nor the slack also represent the point.
  const Instance inst = tvs_test::fix_p2(0.0);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_EQ(count_bases_det(inst.graph, x), 4);
  EXPECT_EQ(count_feasible_bases(inst, x, 0.0), 9);
}

TEST(FeasibleBases, BinaryPointWithSlackMatchesDeterminant) {
  const Instance inst = tvs_test::fix_p2(1.5);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_EQ(count_bases_det(inst.graph, x), 4);
  EXPECT_EQ(count_feasible_bases(inst, x, 1.5), 4);
  const std::vector<double> split{1.0, 0.0};
  EXPECT_EQ(count_feasible_bases(inst, split, 0.5), 1);
}

TEST(FeasibleBases, BoundsNeedBinaryPointAndPositiveSlack) {
  // Tight budget at a binary point: x0 or x1 may replace the slack.
  const Instance tight = tvs_test::fix_p2(1.0);
  const std::vector<double> split{1.0, 0.0};
  EXPECT_EQ(count_bases_det(tight.graph, split), 1);
  EXPECT_EQ(count_feasible_bases(tight, split, 0.0), 3);
  // Fractional vertices are forced into every basis.
  const Instance frac = tvs_test::fix_p2(1.5);
  const std::vector<double> mid{0.75, 0.75};
  EXPECT_EQ(count_bases_det(frac.graph, mid), 4);
  EXPECT_EQ(count_feasible_bases(frac, mid, 0.0), 1);
}

TEST(FiniteDifference, PathCandidates) {
  const Instance inst = tvs_test::p3();
  const ForestBasis f = tvs_test::p3_single_tree(inst, 0.0, 3.0);
  PivotCandidate down{CandidateKind::TreeEdge, 1, 0, Move::Down, 0.0};
  PivotCandidate up{CandidateKind::TreeEdge, 1, 0, Move::Up, 0.0};
  EXPECT_NEAR(fd_reduced_cost(f, down), -4.0, 1e-8);
  EXPECT_NEAR(fd_reduced_cost(f, up), 6.0, 1e-8);
}

TEST(Verify, AcceptsSolverOutput) {
  for (const auto &sc : tvs_test::small_suite(1, 5)) {
    const SolveResult res = solve(sc.inst);
    ASSERT_TRUE(res.certificate) << sc.name;
    const auto bad =
        verify_solution(sc.inst, res.solution, 1e-9, &*res.certificate);
    EXPECT_FALSE(bad) << sc.name << ": " << bad->message;
  }
}

TEST(Verify, NamesEachFailure) {
  const Instance inst = tvs_test::fix_p2(0.6);
  const SolveResult res = solve(inst);
  ASSERT_TRUE(res.certificate);
  const auto kind = [&](DenseSolution sol, const Certificate *cert) {
    const auto bad = verify_solution(inst, sol, 1e-9, cert);
    EXPECT_TRUE(bad);
    return bad ? bad->kind : SolutionViolation::Kind::OracleMismatch;
  };
  using K = SolutionViolation::Kind;
  DenseSolution sol = res.solution;

  EXPECT_EQ(kind({{0.5}, 0.1, -1.0}, nullptr), K::LengthMismatch);
  EXPECT_EQ(kind({{1.2, -0.6}, 0.0, 0.0}, nullptr), K::OutOfBounds);
  EXPECT_EQ(kind({{0.6, 0.1}, -0.1, -1.3}, nullptr), K::NegativeSlack);
  EXPECT_EQ(kind({{0.5, 0.0}, 0.0, -1.0}, nullptr), K::BudgetMismatch);
  DenseSolution wrong_obj = sol;
  wrong_obj.objective += 0.5;
  EXPECT_EQ(kind(wrong_obj, nullptr), K::ObjectiveMismatch);

  Certificate tampered = *res.certificate;
  tampered.entries.front().value += 1.0;
  EXPECT_EQ(kind(sol, &tampered), K::CertificateMismatch);
  Certificate short_cert = *res.certificate;
  short_cert.entries.pop_back();
  EXPECT_EQ(kind(sol, &short_cert), K::CertificateMismatch);
  Certificate bad_struct = *res.certificate;
  bad_struct.basis.states[0] = EdgeState::Tree;
  EXPECT_EQ(kind(sol, &bad_struct), K::CertificateMismatch);

  // A feasible but suboptimal point under the optimal basis structure: the
  // rebuilt basis has an improving direction.
  const Instance loose = tvs_test::fix_p2(1.5);
  const SolveResult lr = solve(loose);
  ASSERT_TRUE(lr.certificate);
  Certificate flipped = *lr.certificate;
  flipped.basis.marks[0] = RootMark::Lower;
  const DenseSolution low{{0.0, 0.0}, 1.5, 0.0};
  const auto v = verify_solution(loose, low, 1e-9, &flipped);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, K::CertificateViolated);
}
