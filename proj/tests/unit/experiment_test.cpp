#include "riskplan/experiment.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "riskplan/error.hpp"
#include "riskplan/sampling.hpp"

namespace riskplan {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.scenes = 2;
  c.pairs_per_scene = 3;
  c.height = 16;
  c.width = 16;
  c.train_scenes = 2;
  c.training.epochs = 3;
  c.training.hidden_units = 8;
  c.lambda_values = {0, 8};
  c.pass_counts = {2, 3};
  c.bootstrap_counts = {2, 3};
  c.fixed_samples = 3;
  c.seed = 11;
  c.output_dir = std::filesystem::temp_directory_path() / "riskplan_experiment_test";
  return c;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

TEST(StartGoalTest, TwoPixelMapGivesOnlyPair) {
  const CostTable table = builtin_aeroscapes_table();
  const LabelMap truth(2, 1, 12, table.find("Road"));
  Rng rng(1);
  const auto [s, g] = sample_start_goal(truth, table, rng);
  EXPECT_NE(s, g);
  EXPECT_EQ(s.x, 0);
  EXPECT_EQ(g.x, 0);
  EXPECT_EQ(s.y + g.y, 1);
}

TEST(StartGoalTest, AllImpassableIsRejected) {
  const CostTable table({{"road", 1, {}, false}, {"wall", 1, {}, true}});
  const LabelMap truth(4, 4, 2, ClassId{1});
  Rng rng(1);
  EXPECT_THROW(sample_start_goal(truth, table, rng), SceneRejected);
}

TEST(StartGoalTest, SeededAndSeparated) {
  const CostTable table = builtin_aeroscapes_table();
  const Scene scene = generate_scene({32, 32, 12, 0.3, 5}, 12);
  Rng a(9), b(9);
  for (int i = 0; i < 20; ++i) {
    const auto pa = sample_start_goal(scene.truth, table, a);
    EXPECT_EQ(pa, sample_start_goal(scene.truth, table, b));
    EXPECT_GE(chebyshev(pa.first, pa.second), 8);
  }
}

TEST(ExperimentConfigTest, Validation) {
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  ExperimentConfig c;
  c.scenes = 0;
  EXPECT_THROW(c.validate(), DimensionError);
  c = {};
  c.lambda_values.clear();
  EXPECT_THROW(c.validate(), DimensionError);
  c = {};
  c.pass_counts = {0};
  EXPECT_THROW(c.validate(), DimensionError);
  c = {};
  c.lambda_values = {-1};
  EXPECT_THROW(c.validate(), DimensionError);
}

TEST(ExperimentConfigTest, ThreadsFromEnvironment) {
  setenv("RISKPLAN_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(7), 3);
  setenv("RISKPLAN_THREADS", "many", 1);
  EXPECT_EQ(threads_from_env(7), 7);
  unsetenv("RISKPLAN_THREADS");
  EXPECT_EQ(threads_from_env(7), 7);
}

TEST(ParallelForTest, VisitsEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](int i) { hits[std::size_t(i)]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](int i) {
                              if (i == 6) throw NumericError("boom");
                            }),
               NumericError);
}

class SweepTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    models_ = new TrainedModels(train_models(small_config(), builtin_aeroscapes_table()));
  }
  static void TearDownTestSuite() {
    delete models_;
    models_ = nullptr;
  }
  static TrainedModels* models_;
};
TrainedModels* SweepTest::models_ = nullptr;

TEST_F(SweepTest, LambdaSweepRowLayout) {
  const ExperimentConfig c = small_config();
  const SweepResult r = run_lambda_sweep(c, builtin_aeroscapes_table(), *models_);
  ASSERT_EQ(r.rows.size(), std::size_t(c.scenes * c.pairs_per_scene * (2 + 2 * c.lambda_values.size())));
  ASSERT_EQ(r.paths.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const ExperimentRow& row = r.rows[i];
    EXPECT_GE(row.surprise, 0.0);
    EXPECT_GE(row.plan_ms, 0.0);
    EXPECT_GE(row.sample_ms, 0.0);
    if (row.variant == Variant::ground_truth) EXPECT_EQ(row.surprise, 0.0);
    EXPECT_EQ(r.paths[i].waypoints.front(), row.start);
    EXPECT_EQ(r.paths[i].waypoints.back(), row.goal);
  }
}

TEST_F(SweepTest, RiskNeutralRowsMatchIndependentReplay) {
  ExperimentConfig c = small_config();
  c.lambda_values = {0};
  const CostTable table = builtin_aeroscapes_table();
  const SweepResult r = run_lambda_sweep(c, table, *models_);
  int checked = 0;
  for (const ExperimentRow& row : r.rows) {
    if (row.variant != Variant::dropout) continue;
    const Scene scene = generate_scene(eval_scene_spec(c, table, row.scene_id), table.size());
    const SoftmaxStack stack = sample_dropout_stack(models_->dropout_model, scene, c.fixed_samples,
                                                    derive_seed(c.seed, {3, std::uint64_t(row.scene_id),
                                                                         std::uint64_t(c.fixed_samples)}));
    const SurpriseReport replay =
        run_scenario(stack, scene.truth, table, RiskConfig{0.0}, Variant::dropout, row.start, row.goal);
    EXPECT_EQ(row.surprise, replay.surprise_factor);
    EXPECT_EQ(row.expected_cost, replay.expected_cost);
    ++checked;
  }
  EXPECT_EQ(checked, c.scenes * c.pairs_per_scene);
}

TEST_F(SweepTest, CsvSurpriseRecomputesFromColumns) {
  const ExperimentConfig c = small_config();
  const std::string csv = format_csv(run_lambda_sweep(c, builtin_aeroscapes_table(), *models_).rows);
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header());
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    ASSERT_EQ(cells.size(), 13u);
    const double e = std::stod(cells[8]), a = std::stod(cells[9]), s = std::stod(cells[10]);
    EXPECT_NEAR(s, std::abs(e - a) / a, 2e-6) << line;
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(SweepTest, SampleSweepCoversCounts) {
  ExperimentConfig c = small_config();
  c.reload_checkpoints = true;
  const SweepResult r = run_sample_sweep(c, builtin_aeroscapes_table(), *models_);
  std::set<std::pair<Variant, int>> seen;
  for (const auto& row : r.rows) {
    seen.insert({row.variant, row.samples});
    EXPECT_EQ(row.lambda, c.sweep_lambda);
  }
  EXPECT_EQ(seen, (std::set<std::pair<Variant, int>>{
                      {Variant::dropout, 2}, {Variant::dropout, 3}, {Variant::bootstrap, 2}, {Variant::bootstrap, 3}}));
  std::filesystem::remove_all(c.output_dir);
}

TEST(SummaryTest, GroupsAndReduction) {
  auto row = [](Variant v, double lambda, double surprise, double actual) {
    ExperimentRow r;
    r.variant = v;
    r.lambda = lambda;
    r.samples = 5;
    r.surprise = surprise;
    r.actual_cost = actual;
    return r;
  };
  const std::vector<ExperimentRow> rows{row(Variant::dropout, 0, 0.2, 100), row(Variant::dropout, 0, 0.4, 100),
                                        row(Variant::dropout, 8, 0.1, 80), row(Variant::dropout, 8, 0.3, 80)};
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].trials, 2);
  EXPECT_NEAR(s[0].mean_surprise, 0.3, 1e-15);
  EXPECT_NEAR(s[0].sem_surprise, 0.1, 1e-15);
  EXPECT_EQ(s[0].actual_cost_reduction_pct, 0.0);
  EXPECT_NEAR(s[1].actual_cost_reduction_pct, 20.0, 1e-12);
  const std::string csv = format_summary_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), summary_csv_header());
}

}  // namespace
}  // namespace riskplan
