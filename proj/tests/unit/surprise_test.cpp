#include "riskplan/surprise.hpp"

#include <gtest/gtest.h>

#include "riskplan/error.hpp"
#include "riskplan/scene.hpp"

namespace riskplan {
namespace {

TEST(SurpriseFactorTest, SymmetricAboutActual) {
  EXPECT_EQ(surprise_factor(50, 100), 0.5);
  EXPECT_EQ(surprise_factor(150, 100), 0.5);
  EXPECT_EQ(surprise_factor(100, 100), 0.0);
}

TEST(SurpriseFactorTest, AlternativeModes) {
  EXPECT_EQ(surprise_factor(50, 100, SurpriseMode::signed_difference), 0.5);
  EXPECT_EQ(surprise_factor(150, 100, SurpriseMode::signed_difference), -0.5);
  EXPECT_EQ(surprise_factor(50, 100, SurpriseMode::by_expected), 1.0);
}

TEST(SurpriseFactorTest, ZeroDenominator) {
  EXPECT_EQ(surprise_factor(0, 0), 0.0);
  EXPECT_THROW(surprise_factor(5, 0), MetricError);
  EXPECT_THROW(surprise_factor(0, 5, SurpriseMode::by_expected), MetricError);
}

TEST(EvaluateSurpriseTest, HandExample) {
  const CostTable table = builtin_aeroscapes_table();
  LabelMap truth(1, 3, 12, table.find("Road"));
  truth(0, 2) = table.find("Person");
  const ScalarMap predicted(1, 3, 1.0);
  const PlannedPath path{{{0, 0}, {0, 1}, {0, 2}}, 2.0};
  const SurpriseReport r = evaluate_surprise(path, predicted, ground_truth_cost_map(truth, table));
  EXPECT_EQ(r.expected_cost, 2.0);
  EXPECT_EQ(r.actual_cost, 141.0);
  EXPECT_NEAR(r.surprise_factor, 0.98582, 1e-5);
}

TEST(EvaluateSurpriseTest, PerfectPredictionHasZeroSurprise) {
  const CostTable table = builtin_aeroscapes_table();
  LabelMap truth(2, 2, 12, table.find("Vegetation"));
  truth(1, 1) = table.find("Car");
  const RiskCostMap gt = ground_truth_cost_map(truth, table);
  const SurpriseReport r = evaluate_surprise(PlannedPath{{{0, 0}, {1, 1}}, 90.0}, gt.costs, gt);
  EXPECT_EQ(r.surprise_factor, 0.0);
}

TEST(VariantTest, NamesRoundTrip) {
  for (Variant v : {Variant::ground_truth, Variant::deterministic, Variant::dropout, Variant::bootstrap})
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("ensemble"), ParseError);
}

SoftmaxStack agreeing_stack(const LabelMap& truth, int T) {
  // Every pass favours the true class, with pass-dependent confidence.
  const int C = truth.num_classes;
  SoftmaxStack s(T, truth.height(), truth.width(), C);
  for (int t = 0; t < T; ++t)
    for (int y = 0; y < truth.height(); ++y)
      for (int x = 0; x < truth.width(); ++x) {
        const float top = 0.5f + 0.1f * float(t % 3);
        auto row = s.row(t, y, x);
        for (int c = 0; c < C; ++c) row[c] = (1.0f - top) / float(C - 1);
        row[truth(y, x).index] = top;
      }
  return s;
}

TEST(RunScenarioTest, GroundTruthHasZeroSurprise) {
  const CostTable table = builtin_aeroscapes_table();
  const Scene scene = generate_scene({12, 12, 12, 0.4, 3}, 12);
  const SoftmaxStack stack = agreeing_stack(scene.truth, 3);
  for (int gx = 1; gx < 12; gx += 3) {
    const SurpriseReport r =
        run_scenario(stack, scene.truth, table, RiskConfig{8.0}, Variant::ground_truth, {0, 0}, {11, gx});
    EXPECT_EQ(r.surprise_factor, 0.0);
  }
}

TEST(RunScenarioTest, RiskNeutralDropoutMatchesDeterministicWhenArgmaxAgrees) {
  const CostTable table = builtin_aeroscapes_table();
  const Scene scene = generate_scene({12, 12, 12, 0.4, 4}, 12);
  const SoftmaxStack stack = agreeing_stack(scene.truth, 4);
  const SurpriseReport a =
      run_scenario(stack, scene.truth, table, RiskConfig{0.0}, Variant::deterministic, {0, 0}, {11, 11});
  const SurpriseReport b = run_scenario(stack, scene.truth, table, RiskConfig{0.0}, Variant::dropout, {0, 0}, {11, 11});
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.expected_cost, b.expected_cost);
  EXPECT_EQ(a.actual_cost, b.actual_cost);
  EXPECT_EQ(a.surprise_factor, b.surprise_factor);
}

TEST(RunScenarioTest, DeterministicVariantIgnoresLambda) {
  const CostTable table = builtin_aeroscapes_table();
  const Scene scene = generate_scene({12, 12, 12, 0.4, 5}, 12);
  const SoftmaxStack stack = agreeing_stack(scene.truth, 4);
  const SurpriseReport a =
      run_scenario(stack, scene.truth, table, RiskConfig{0.0}, Variant::deterministic, {0, 0}, {11, 11});
  const SurpriseReport b =
      run_scenario(stack, scene.truth, table, RiskConfig{32.0}, Variant::deterministic, {0, 0}, {11, 11});
  EXPECT_EQ(a.path, b.path);
}

TEST(RunScenarioTest, ExpectedCostOptionallyIncludesRiskTerm) {
  const CostTable table = builtin_aeroscapes_table();
  const LabelMap truth(1, 3, 12, table.find("Road"));
  ConfidenceMaps maps;
  maps.classes = 12;
  maps.prediction = truth;
  maps.base_cost = ScalarMap(1, 3, 1.0);
  maps.uncertainty = ScalarMap(1, 3, 0.5);
  const RiskCostMap gt = ground_truth_cost_map(truth, table);
  const SurpriseReport base = run_scenario(maps, gt, table, RiskConfig{8.0}, Variant::dropout, {0, 0}, {0, 2});
  const SurpriseReport risk = run_scenario(maps, gt, table, RiskConfig{8.0}, Variant::dropout, {0, 0}, {0, 2}, {},
                                           SurpriseOptions{.expected_includes_risk = true});
  EXPECT_EQ(base.expected_cost, 2.0);
  EXPECT_EQ(base.surprise_factor, 0.0);
  EXPECT_EQ(risk.expected_cost, 10.0);
  EXPECT_EQ(risk.surprise_factor, 4.0);
}

}  // namespace
}  // namespace riskplan
