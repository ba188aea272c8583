#include "riskplan/confidence.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "riskplan/error.hpp"

namespace riskplan {
namespace {

const CostTable kTwoClass({{"cheap", 1, {}, false}, {"dear", 140, {}, false}});

SoftmaxStack single_pixel(const std::vector<std::vector<float>>& rows) {
  SoftmaxStack s(int(rows.size()), 1, 1, int(rows[0].size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    std::copy(rows[t].begin(), rows[t].end(), s.row(int(t), 0, 0).begin());
  return s;
}

SoftmaxStack random_stack(std::mt19937_64& rng, int T, int H, int W, int C) {
  std::uniform_real_distribution<double> logit(-4.0, 4.0);
  SoftmaxStack s(T, H, W, C);
  for (int t = 0; t < T; ++t)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        std::vector<double> z(static_cast<std::size_t>(C));
        for (auto& v : z) v = std::exp(logit(rng));
        const double sum = std::accumulate(z.begin(), z.end(), 0.0);
        for (int c = 0; c < C; ++c) s.row(t, y, x)[c] = float(z[std::size_t(c)] / sum);
      }
  return s;
}

TEST(EstimateConfidenceTest, TwoPassHandExample) {
  const ConfidenceMaps m = estimate_confidence(single_pixel({{0.9f, 0.1f}, {0.5f, 0.5f}}), kTwoClass);
  EXPECT_NEAR(m.mean_row(0, 0)[0], 0.7, 1e-7);
  EXPECT_NEAR(m.mean_row(0, 0)[1], 0.3, 1e-7);
  EXPECT_EQ(m.prediction(0, 0), ClassId{0});
  EXPECT_EQ(m.base_cost(0, 0), 1.0);
  EXPECT_NEAR(m.uncertainty(0, 0), 19.9404, 1e-4);
}

TEST(EstimateConfidenceTest, IdenticalPassesGiveExactZero) {
  std::mt19937_64 rng(1);
  const SoftmaxStack one = random_stack(rng, 1, 4, 5, 12);
  SoftmaxStack rep(6, 4, 5, 12);
  for (int t = 0; t < 6; ++t) std::copy(one.pass(0).begin(), one.pass(0).end(), rep.pass(t).begin());
  const ConfidenceMaps m = estimate_confidence(rep, builtin_aeroscapes_table());
  for (double u : m.uncertainty.data()) EXPECT_EQ(u, 0.0);
}

TEST(EstimateConfidenceTest, SinglePassHasZeroUncertainty) {
  const ConfidenceMaps m = estimate_confidence(single_pixel({{0.2f, 0.8f}}), kTwoClass);
  EXPECT_EQ(m.uncertainty(0, 0), 0.0);
  EXPECT_EQ(m.prediction(0, 0), ClassId{1});
}

TEST(EstimateConfidenceTest, TieGoesToLowestIndex) {
  EXPECT_EQ(estimate_confidence(single_pixel({{0.5f, 0.5f}}), kTwoClass).prediction(0, 0), ClassId{0});
  EXPECT_EQ(estimate_confidence(single_pixel({{0.9f, 0.1f}, {0.1f, 0.9f}}), kTwoClass).prediction(0, 0),
            ClassId{0});
  const std::vector<double> v{0.2, 0.4, 0.4};
  EXPECT_EQ(argmax_lowest(v), 1);
}

TEST(EstimateConfidenceTest, MatchesDefinitionOracle) {
  std::mt19937_64 rng(2);
  const CostTable table = builtin_aeroscapes_table();
  std::vector<double> costs;
  for (const auto& e : table.entries()) costs.push_back(e.cost);
  for (int trial = 0; trial < 50; ++trial) {
    const SoftmaxStack s = random_stack(rng, 2 + trial % 9, 3, 4, 12);
    const ConfidenceMaps m = estimate_confidence(s, table);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) {
        std::vector<std::vector<double>> probs(std::size_t(s.passes()), std::vector<double>(12));
        for (int t = 0; t < s.passes(); ++t)
          for (int c = 0; c < 12; ++c) probs[std::size_t(t)][std::size_t(c)] = s.row(t, y, x)[c];
        const auto ref = oracle::confidence_by_definition(probs, costs);
        EXPECT_EQ(m.prediction(y, x).index, ref.prediction);
        EXPECT_EQ(m.base_cost(y, x), ref.base_cost);
        EXPECT_NEAR(m.uncertainty(y, x), ref.uncertainty, 1e-9 * ref.uncertainty);
      }
  }
}

TEST(EstimateConfidenceTest, InvariantUnderPassPermutation) {
  std::mt19937_64 rng(3);
  const SoftmaxStack s = random_stack(rng, 5, 4, 4, 12);
  const int order[] = {3, 0, 4, 2, 1};
  const CostTable table = builtin_aeroscapes_table();
  const ConfidenceMaps a = estimate_confidence(s, table), b = estimate_confidence(s.select_passes(order), table);
  EXPECT_EQ(a.uncertainty, b.uncertainty);
  EXPECT_EQ(a.mean_softmax, b.mean_softmax);
  EXPECT_EQ(a.prediction, b.prediction);
}

TEST(EstimateConfidenceTest, DoublingCostsDoublesUncertainty) {
  std::mt19937_64 rng(4);
  const SoftmaxStack s = random_stack(rng, 4, 3, 3, 12);
  const CostTable table = builtin_aeroscapes_table();
  const ConfidenceMaps a = estimate_confidence(s, table), b = estimate_confidence(s, table.scaled(2.0));
  for (std::size_t i = 0; i < a.uncertainty.data().size(); ++i)
    EXPECT_EQ(b.uncertainty.data()[i], 2.0 * a.uncertainty.data()[i]);
}

TEST(EstimateConfidenceTest, OutputInvariants) {
  std::mt19937_64 rng(5);
  const SoftmaxStack s = random_stack(rng, 5, 6, 6, 12);
  const CostTable table = builtin_aeroscapes_table();
  const ConfidenceMaps m = estimate_confidence(s, table);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) {
      EXPECT_GE(m.uncertainty(y, x), 0.0);
      EXPECT_EQ(m.base_cost(y, x), cost_of(table, m.prediction(y, x)));
      const auto row = m.mean_row(y, x);
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-5);
    }
}

TEST(EstimateConfidenceTest, ClassCountMismatchIsDimensionError) {
  EXPECT_THROW(estimate_confidence(single_pixel({{0.5f, 0.5f}}), builtin_aeroscapes_table()), DimensionError);
}

TEST(DeterministicBaselineTest, UsesPassZeroOnly) {
  const ConfidenceMaps m = deterministic_baseline(single_pixel({{0.2f, 0.8f}, {0.9f, 0.1f}}), kTwoClass);
  EXPECT_EQ(m.prediction(0, 0), ClassId{1});
  EXPECT_EQ(m.base_cost(0, 0), 140.0);
  EXPECT_EQ(m.uncertainty(0, 0), 0.0);
}

TEST(DeterministicBaselineTest, DisagreesWithMeanWhenPassZeroIsOutlier) {
  const SoftmaxStack s = single_pixel({{0.2f, 0.8f}, {0.9f, 0.1f}, {0.9f, 0.1f}});
  EXPECT_NE(deterministic_baseline(s, kTwoClass).prediction, estimate_confidence(s, kTwoClass).prediction);
}

TEST(DeterministicBaselineTest, EqualsEstimateForSinglePass) {
  std::mt19937_64 rng(6);
  const SoftmaxStack s = random_stack(rng, 1, 5, 5, 12);
  const CostTable table = builtin_aeroscapes_table();
  const ConfidenceMaps a = deterministic_baseline(s, table), b = estimate_confidence(s, table);
  EXPECT_EQ(a.prediction, b.prediction);
  EXPECT_EQ(a.base_cost, b.base_cost);
  EXPECT_EQ(a.uncertainty, b.uncertainty);
  EXPECT_EQ(a.mean_softmax, b.mean_softmax);
}

}  // namespace
}  // namespace riskplan
