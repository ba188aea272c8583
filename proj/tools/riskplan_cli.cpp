// Command-line driver for the risk-aware planning experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "riskplan/confidence.hpp"
#include "riskplan/error.hpp"
#include "riskplan/experiment.hpp"
#include "riskplan/render.hpp"
#include "riskplan/riskmap.hpp"
#include "riskplan/sampling.hpp"
#include "riskplan/surprise.hpp"

namespace fs = std::filesystem;
using namespace riskplan;

namespace {

struct CommonOptions {
  std::uint64_t seed = 1;
  fs::path out = "out";
  std::string table_path;
  std::vector<double> lambdas;
  std::vector<int> passes;
  std::vector<int> bootstraps;
  int scenes = 20;
  int pairs = 10;
  std::string size = "48x48";
  bool serial = false;
  double clutter = ExperimentConfig{}.clutter;
  double noise = ExperimentConfig{}.color_noise;
  int hidden = ExperimentConfig{}.training.hidden_units;
  int epochs = ExperimentConfig{}.training.epochs;
  double learning_rate = ExperimentConfig{}.training.learning_rate;
  double dropout_rate = ExperimentConfig{}.training.dropout_rate;
  int train_scenes = ExperimentConfig{}.train_scenes;
  SurpriseMode surprise_mode = SurpriseMode::symmetric;
  bool expected_includes_risk = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--table", o.table_path, "Cost table CSV (default: built-in Aeroscapes table)");
  cmd->add_option("--lambda", o.lambdas, "Risk weight(s), comma separated")->delimiter(',');
  cmd->add_option("--passes", o.passes, "Dropout pass count(s), comma separated")->delimiter(',');
  cmd->add_option("--bootstraps", o.bootstraps, "Bootstrap ensemble size(s), comma separated")->delimiter(',');
  cmd->add_option("--scenes", o.scenes, "Number of evaluation scenes");
  cmd->add_option("--pairs", o.pairs, "Start/goal pairs per scene");
  cmd->add_option("--size", o.size, "Scene size HxW");
  cmd->add_flag("--serial", o.serial, "Disable parallelism");
  cmd->add_option("--clutter", o.clutter, "Scene clutter in [0,1]");
  cmd->add_option("--noise", o.noise, "Per-channel scene color noise");
  cmd->add_option("--hidden", o.hidden, "Classifier hidden units");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--learning-rate", o.learning_rate, "SGD learning rate");
  cmd->add_option("--dropout-rate", o.dropout_rate, "Dropout rate for the dropout classifier");
  cmd->add_option("--train-scenes", o.train_scenes, "Number of training scenes");
  const std::map<std::string, SurpriseMode> modes{{"symmetric", SurpriseMode::symmetric},
                                                  {"signed", SurpriseMode::signed_difference},
                                                  {"by-expected", SurpriseMode::by_expected}};
  cmd->add_option("--surprise-mode", o.surprise_mode, "symmetric (default) | signed | by-expected")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_flag("--expected-includes-risk", o.expected_includes_risk,
                "Expected cost sums L + lambda * V instead of L");
}

CostTable load_table(const CommonOptions& o) {
  return o.table_path.empty() ? builtin_aeroscapes_table() : load_cost_table(o.table_path);
}

std::pair<int, int> parse_size(const std::string& s) {
  auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw CLI::ValidationError("--size", "expected HxW");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

PixelCoord parse_coord(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("coordinate", "expected y,x");
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

ExperimentConfig make_config(const CommonOptions& o) {
  ExperimentConfig c;
  c.seed = o.seed;
  c.output_dir = o.out;
  c.scenes = o.scenes;
  c.pairs_per_scene = o.pairs;
  std::tie(c.height, c.width) = parse_size(o.size);
  if (!o.lambdas.empty()) c.lambda_values = o.lambdas;
  if (!o.passes.empty()) c.pass_counts = o.passes;
  if (!o.bootstraps.empty()) c.bootstrap_counts = o.bootstraps;
  c.clutter = o.clutter;
  c.color_noise = o.noise;
  c.train_scenes = o.train_scenes;
  c.training.hidden_units = o.hidden;
  c.training.epochs = o.epochs;
  c.training.learning_rate = o.learning_rate;
  c.training.dropout_rate = o.dropout_rate;
  c.surprise = {o.surprise_mode, o.expected_includes_risk};
  c.threads = o.serial ? 0 : threads_from_env(int(std::thread::hardware_concurrency()));
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error("cannot write " + path.string());
}

void print_summary(const std::vector<SummaryRow>& summary) {
  std::printf("%-14s %8s %7s %6s %10s %9s %12s %9s %10s\n", "variant", "lambda", "samples", "trials", "surprise",
              "sem", "actual_cost", "reduce%", "sample_ms");
  for (const auto& s : summary)
    std::printf("%-14s %8.2f %7d %6d %10.4f %9.4f %12.2f %9.2f %10.3f\n", std::string(variant_name(s.variant)).c_str(),
                s.lambda, s.samples, s.trials, s.mean_surprise, s.sem_surprise, s.mean_actual_cost,
                s.actual_cost_reduction_pct, s.mean_sample_ms);
}

TrainedModels train_or_report(const ExperimentConfig& config, const CostTable& table) {
  std::fprintf(stderr, "training models (%d scenes)...\n", config.train_scenes);
  TrainedModels models = train_models(config, table);
  std::fprintf(stderr, "dropout model training accuracy: %.4f\n", models.dropout_train_accuracy);
  return models;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware path planning from stochastic segmentation samples"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* gen = app.add_subcommand("gen-scenes", "Generate synthetic scenes (truth label maps + Dirichlet stacks)");
  double concentration = 20.0;
  gen->add_option("--concentration", concentration, "Dirichlet concentration for the synthetic stacks");
  add_common(gen, o);

  auto* train = app.add_subcommand("train", "Train the dropout classifier and bootstrap ensemble");
  add_common(train, o);

  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "Surprise versus lambda at T = K = 5");
  add_common(sweep_lambda, o);

  auto* sweep_samples = app.add_subcommand("sweep-samples", "Surprise and runtime versus T and K at lambda = 8");
  bool reload = false;
  sweep_samples->add_flag("--reload-checkpoints", reload, "Read bootstrap members from disk for every pass");
  add_common(sweep_samples, o);

  auto* plan_one = app.add_subcommand("plan-one", "Plan and evaluate one start/goal query");
  std::string truth_path, stack_path, variant_str = "dropout", start_str, goal_str;
  plan_one->add_option("--truth", truth_path, "Ground-truth label map (LBL1)");
  plan_one->add_option("--stack", stack_path, "Softmax stack (SMX1)");
  plan_one->add_option("--variant", variant_str, "ground_truth | deterministic | dropout | bootstrap");
  plan_one->add_option("--start", start_str, "Start y,x");
  plan_one->add_option("--goal", goal_str, "Goal y,x");
  add_common(plan_one, o);

  auto* render = app.add_subcommand("render", "Render label/uncertainty maps and a path overlay as PPM");
  std::string labels_path, unc_path, path_path;
  render->add_option("--labels", labels_path, "Label map (LBL1)");
  render->add_option("--uncertainty", unc_path, "Scalar map (SCL1)");
  render->add_option("--path", path_path, "Path file (PTH1)");
  add_common(render, o);

  CLI11_PARSE(app, argc, argv);

  try {
    const CostTable table = load_table(o);
    ExperimentConfig config = make_config(o);
    fs::create_directories(o.out);

    if (gen->parsed()) {
      SamplerConfig sampler;
      sampler.mode = SamplerMode::synthetic;
      sampler.passes = o.passes.empty() ? 5 : o.passes.front();
      sampler.concentration = concentration;
      for (int s = 0; s < config.scenes; ++s) {
        const Scene scene = generate_scene(eval_scene_spec(config, table, s), table.size());
        sampler.seed = derive_seed(config.seed, {100, std::uint64_t(s)});
        char stem[32];
        std::snprintf(stem, sizeof stem, "scene_%03d", s);
        write_label_map(scene.truth, o.out / (std::string(stem) + ".lbl"));
        write_softmax_stack(sample_synthetic_stack(scene, sampler), o.out / (std::string(stem) + ".smx"));
      }
      std::printf("wrote %d scenes to %s\n", config.scenes, o.out.string().c_str());
    } else if (train->parsed()) {
      const TrainedModels models = train_or_report(config, table);
      save_classifier(models.dropout_model, o.out / "model.tny");
      save_ensemble(models.ensemble, o.out / "ensemble.tny");
      std::printf("wrote model.tny and %zu ensemble members to %s\n", models.ensemble.size(), o.out.string().c_str());
    } else if (sweep_lambda->parsed()) {
      if (!o.passes.empty()) config.fixed_samples = o.passes.front();
      const TrainedModels models = train_or_report(config, table);
      const SweepResult result = run_lambda_sweep(config, table, models);
      const auto summary = summarize(result.rows);
      write_text(o.out / "lambda_trials.csv", format_csv(result.rows));
      write_text(o.out / "lambda_summary.csv", format_summary_csv(summary));
      print_summary(summary);
    } else if (sweep_samples->parsed()) {
      config.reload_checkpoints = reload;
      if (!o.lambdas.empty()) config.sweep_lambda = o.lambdas.front();
      const TrainedModels models = train_or_report(config, table);
      const SweepResult result = run_sample_sweep(config, table, models);
      const auto summary = summarize(result.rows);
      write_text(o.out / "samples_trials.csv", format_csv(result.rows));
      write_text(o.out / "samples_summary.csv", format_summary_csv(summary));
      print_summary(summary);
    } else if (plan_one->parsed()) {
      LabelMap truth;
      SoftmaxStack stack;
      if (!truth_path.empty() && !stack_path.empty()) {
        truth = read_label_map(truth_path);
        stack = read_softmax_stack(stack_path);
      } else {
        const Scene scene = generate_scene(eval_scene_spec(config, table, 0), table.size());
        SamplerConfig sampler;
        sampler.mode = SamplerMode::synthetic;
        sampler.passes = o.passes.empty() ? 5 : o.passes.front();
        sampler.seed = derive_seed(config.seed, {100, 0});
        truth = scene.truth;
        stack = sample_synthetic_stack(scene, sampler);
      }
      Rng rng = make_rng(config.seed, {200});
      auto [start, goal] = sample_start_goal(truth, table, rng);
      if (!start_str.empty()) start = parse_coord(start_str);
      if (!goal_str.empty()) goal = parse_coord(goal_str);
      const Variant variant = parse_variant(variant_str);
      const RiskConfig risk{o.lambdas.empty() ? 8.0 : o.lambdas.front()};
      const SurpriseReport r = run_scenario(stack, truth, table, risk, variant, start, goal, config.surprise);

      const ConfidenceMaps maps = variant == Variant::deterministic ? deterministic_baseline(stack, table)
                                                                     : estimate_confidence(stack, table);
      const RiskCostMap cost_map = variant == Variant::ground_truth
                                       ? ground_truth_cost_map(truth, table)
                                       : build_risk_cost_map(maps, table, RiskConfig{variant == Variant::deterministic ? 0.0 : risk.lambda},
                                                             {std::string(variant_name(variant)), stack.passes(), config.seed});
      write_path(r.path, o.out / "path.pth");
      write_risk_cost_map(cost_map, o.out / "cost");
      write_label_map(maps.prediction, o.out / "prediction.lbl");
      write_scalar_map(maps.uncertainty, o.out / "uncertainty.scl");
      Image img = render_labels(truth, table);
      overlay_path(img, r.path);
      write_ppm(img, o.out / "truth_path.ppm");

      std::printf("variant=%s lambda=%g start=(%d,%d) goal=(%d,%d) waypoints=%zu\n", variant_str.c_str(),
                  variant == Variant::dropout || variant == Variant::bootstrap ? risk.lambda : 0.0, start.y, start.x,
                  goal.y, goal.x, r.path.waypoints.size());
      std::printf("expected_cost=%.6f actual_cost=%.6f surprise=%.6f\n", r.expected_cost, r.actual_cost,
                  r.surprise_factor);
    } else if (render->parsed()) {
      if (labels_path.empty() && unc_path.empty()) throw Error("render needs --labels and/or --uncertainty");
      std::optional<PlannedPath> path;
      if (!path_path.empty()) path = read_path(path_path);
      if (!labels_path.empty()) {
        Image img = render_labels(read_label_map(labels_path), table);
        if (path) overlay_path(img, *path);
        write_ppm(img, o.out / "labels.ppm");
      }
      if (!unc_path.empty()) {
        Image img = render_ramp(read_scalar_map(unc_path));
        if (path) overlay_path(img, *path);
        write_ppm(img, o.out / "uncertainty.ppm");
      }
      std::printf("wrote PPM images to %s\n", o.out.string().c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
