#include "support.hpp"

#include "tvsimplex/instance.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tvsimplex;

// Reference values from tests/oracles/normal_stream.py, an independent
// MT19937-64 and Box-Muller implementation.
TEST(NormalStream, MatchesReferenceSeed1) {
  const double expected[] = {1.312851528985562,  1.5159465040060625,
                             1.2506039211781217, 0.1661713810523922,
                             1.2285219999610564, -0.7650179338846097};
  NormalStream s(1);
  for (double e : expected)
    EXPECT_DOUBLE_EQ(s.next(), e);
}

TEST(NormalStream, MatchesReferenceSeed7) {
  const double expected[] = {0.7130298338875809,  -0.23514359878547864,
                             1.6105563141402484,  -1.300077624014328,
                             1.8610639876437929,  0.6712550598763332};
  NormalStream s(7);
  for (double e : expected)
    EXPECT_DOUBLE_EQ(s.next(), e);
}

TEST(NormalStream, EngineIsTheStandardOne) {
  std::mt19937_64 eng;
  eng.discard(9999);
  EXPECT_EQ(eng(), 9981545732273789042ull);
}

TEST(Generator, CostsAreShiftedNormals) {
  const Instance inst = generate_random(3, 2.0, 1, 0.05);
  ASSERT_EQ(inst.num_vertices(), 9u);
  ASSERT_EQ(inst.num_edges(), 12u);
  NormalStream s(1);
  for (std::size_t v = 0; v < 9; ++v)
    EXPECT_EQ(inst.c[v], s.next() - 0.05);
  EXPECT_DOUBLE_EQ(inst.c[0], 1.312851528985562 - 0.05);
  for (double h : inst.h)
    EXPECT_EQ(h, 1.0);
  for (std::size_t e = 0; e < 12; ++e) {
    EXPECT_EQ(inst.d_fwd[e], 2.0);
    EXPECT_EQ(inst.d_bwd[e], 2.0);
  }
  EXPECT_EQ(inst.delta, 9.0);
  ASSERT_TRUE(inst.generator);
  EXPECT_EQ(inst.generator->grid, 3u);
  EXPECT_EQ(inst.generator->seed, 1u);
}

TEST(Generator, SameSeedSameInstance) {
  const Instance a = generate_random(8, 1.0, 42);
  const Instance b = generate_random(8, 1.0, 42);
  const Instance c = generate_random(8, 1.0, 43);
  EXPECT_EQ(a.c, b.c);
  EXPECT_NE(a.c, c.c);
}

TEST(Instance, ValidateReportsKinds) {
  const auto kind_of = [](auto &&make) {
    try {
      make();
    } catch (const InstanceError &e) {
      return e.kind();
    }
    ADD_FAILURE() << "no InstanceError";
    return InstanceError::Kind::LengthMismatch;
  };
  using K = InstanceError::Kind;
  EXPECT_EQ(kind_of([] {
              from_tv(Graph(2, {{0, 1}}), {1.0}, {1.0, 1.0}, 1.0, 1.0);
            }),
            K::LengthMismatch);
  EXPECT_EQ(kind_of([] {
              from_tv(Graph(2, {{0, 1}}), {1.0, 1.0}, {1.0, 0.0}, 1.0, 1.0);
            }),
            K::NonPositiveWeight);
  EXPECT_EQ(kind_of([] {
              from_tv(Graph(2, {{0, 1}}), {1.0, 1.0}, {1.0, 1.0}, -1.0, 1.0);
            }),
            K::NegativeAlpha);
  EXPECT_EQ(kind_of([] {
              from_tv(Graph(2, {{0, 1}}), {1.0, 1.0}, {1.0, 1.0}, 1.0, -0.5);
            }),
            K::NegativeBudget);
  EXPECT_EQ(kind_of([] {
              Instance inst = tvs_test::fix_p2(1.0);
              inst.d_fwd[0] = -2.0;
              validate(inst);
            }),
            K::NegativeEdgeCostSum);
  // Asymmetric costs with a nonnegative sum are fine.
  Instance inst = tvs_test::fix_p2(1.0);
  inst.d_fwd[0] = -0.5;
  EXPECT_NO_THROW(validate(inst));
}

TEST(Instance, ObjectiveAndBudget) {
  const Instance inst = tvs_test::fix_p2(1.5);
  const std::vector<double> a{1.0, 0.0}, b{0.5, 0.5}, c{0.0, 1.0};
  EXPECT_DOUBLE_EQ(evaluate_objective(inst, a), -3.0 + 1.0);
  EXPECT_DOUBLE_EQ(evaluate_objective(inst, b), -0.5);
  EXPECT_DOUBLE_EQ(evaluate_objective(inst, c), 2.0 + 1.0);
  EXPECT_DOUBLE_EQ(budget_used(inst, b), 1.0);

  Instance asym = inst;
  asym.d_fwd[0] = 3.0;
  asym.d_bwd[0] = 0.25;
  EXPECT_DOUBLE_EQ(evaluate_objective(asym, a), -3.0 + 3.0);
  EXPECT_DOUBLE_EQ(evaluate_objective(asym, c), 2.0 + 0.25);

  const std::vector<double> bad{1.5, 0.0};
  EXPECT_THROW(evaluate_objective(inst, bad), InstanceError);
  const std::vector<double> short_x{0.0};
  EXPECT_THROW(evaluate_objective(inst, short_x), InstanceError);
}

TEST(ExportLp, GoldenTextForTwoVertexPath) {
  const std::string expected = "\\ budget-constrained TV linear program\n"
                               "\\ vertices 2 edges 1\n"
                               "Minimize\n"
                               " obj: - 3 x0 + 2 x1 + 1 ap0 + 1 am0 + 0 s\n"
                               "Subject To\n"
                               " e0: x0 - x1 - ap0 + am0 = 0\n"
                               " budget: 1 x0 + 1 x1 + s = 1.5\n"
                               "Bounds\n"
                               " 0 <= x0 <= 1\n"
                               " 0 <= x1 <= 1\n"
                               "End\n";
  EXPECT_EQ(export_lp(tvs_test::fix_p2(1.5)), expected);
}

TEST(ExportLp, NumbersRoundTrip) {
  Instance inst = tvs_test::fix_p2(0.1);
  inst.c[0] = 1.0 / 3.0;
  const std::string text = export_lp(inst);
  EXPECT_NE(text.find("0.33333333333333331 x0"), std::string::npos);
  EXPECT_NE(text.find("= 0.10000000000000001"), std::string::npos);
}
