#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "riskplan/classifier.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/rng.hpp"
#include "riskplan/scene.hpp"
#include "riskplan/surprise.hpp"
#include "riskplan/taxonomy.hpp"

namespace riskplan {

struct ExperimentConfig {
  int scenes = 20;
  int pairs_per_scene = 10;
  int height = 48;
  int width = 48;
  /// 0 uses every class of the cost table.
  int num_classes = 0;
  double clutter = 0.3;
  double color_noise = 0.1;

  std::vector<double> lambda_values{0, 1, 2, 4, 8, 16, 32};
  std::vector<int> pass_counts{2, 5, 10};
  std::vector<int> bootstrap_counts{2, 5, 10};
  /// Lambda used by the sample-count sweep.
  double sweep_lambda = 8.0;
  /// T and K used by the lambda sweep.
  int fixed_samples = 5;

  int train_scenes = 24;
  TrainOptions training{.hidden_units = 64};

  /// Sample-count sweep reads bootstrap members from checkpoint files for
  /// every pass instead of keeping them in memory.
  bool reload_checkpoints = false;

  SurpriseOptions surprise{};

  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  /// Worker threads for independent scenes; 0 or 1 runs serially.
  int threads = 0;

  /// Throws DimensionError on counts < 1 or empty lists.
  void validate() const;
};

/// Honors RISKPLAN_THREADS (0 = serial); falls back to `fallback`.
int threads_from_env(int fallback);

struct ExperimentRow {
  int scene_id = 0;
  Variant variant = Variant::ground_truth;
  double lambda = 0.0;
  int samples = 0;
  PixelCoord start;
  PixelCoord goal;
  double expected_cost = 0.0;
  double actual_cost = 0.0;
  double surprise = 0.0;
  double plan_ms = 0.0;
  double sample_ms = 0.0;
};

/// Uniform draws over passable pixels with start != goal and Chebyshev
/// separation >= max(H, W) / 4; after 1000 failed draws the separation
/// requirement is dropped. Throws SceneRejected with fewer than two
/// passable pixels.
std::pair<PixelCoord, PixelCoord> sample_start_goal(const LabelMap& truth, const CostTable& table, Rng& rng);

/// Trained dropout network and bootstrap ensemble shared by the sweeps.
struct TrainedModels {
  TinyClassifier dropout_model;
  std::vector<TinyClassifier> ensemble;
  double dropout_train_accuracy = 0.0;
};

SceneSpec eval_scene_spec(const ExperimentConfig& config, const CostTable& table, int scene_id);
SceneSpec train_scene_spec(const ExperimentConfig& config, const CostTable& table, int index);

/// Trains the dropout model and max(bootstrap_counts, fixed_samples) ensemble members.
TrainedModels train_models(const ExperimentConfig& config, const CostTable& table);

struct SweepResult {
  std::vector<ExperimentRow> rows;
  /// paths[i] is the path behind rows[i].
  std::vector<PlannedPath> paths;
};

/// Per scene and pair: ground truth, deterministic, then dropout and
/// bootstrap (T = K = fixed_samples) at every lambda.
SweepResult run_lambda_sweep(const ExperimentConfig& config, const CostTable& table, const TrainedModels& models);

/// Per scene and pair: dropout at every pass count and bootstrap at every
/// ensemble size, lambda = sweep_lambda. Runs serially so that timings are
/// comparable. With reload_checkpoints the ensemble is written under
/// output_dir and re-read per pass.
SweepResult run_sample_sweep(const ExperimentConfig& config, const CostTable& table, const TrainedModels& models);

struct SummaryRow {
  Variant variant = Variant::ground_truth;
  double lambda = 0.0;
  int samples = 0;
  int trials = 0;
  double mean_surprise = 0.0;
  double sem_surprise = 0.0;
  double mean_expected_cost = 0.0;
  double mean_actual_cost = 0.0;
  /// Percent reduction of mean actual cost against the same variant and
  /// sample count at lambda = 0 (0 when there is no such group).
  double actual_cost_reduction_pct = 0.0;
  double mean_plan_ms = 0.0;
  double mean_sample_ms = 0.0;
};

/// Groups rows by (variant, lambda, samples) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);

std::string csv_header();
std::string format_csv_row(const ExperimentRow& row);
std::string format_csv(const std::vector<ExperimentRow>& rows);
std::string summary_csv_header();
std::string format_summary_csv(const std::vector<SummaryRow>& rows);

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the
/// first failure by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace riskplan
