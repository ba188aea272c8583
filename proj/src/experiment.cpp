#include "riskplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "riskplan/confidence.hpp"
#include "riskplan/error.hpp"
#include "riskplan/sampling.hpp"
#include "text_util.hpp"

namespace riskplan {

namespace {

// Stream keys for derive_seed.
enum : std::uint64_t {
  kTrainSceneStream = 0,
  kEvalSceneStream = 1,
  kPairStream = 2,
  kDropoutStream = 3,
  kModelStream = 4,
  kEnsembleStream = 5,
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (scenes < 1 || pairs_per_scene < 1 || train_scenes < 1 || fixed_samples < 1)
    throw DimensionError("experiment counts must be >= 1");
  if (height < 2 || width < 2) throw DimensionError("scene size must be at least 2x2");
  if (lambda_values.empty() || pass_counts.empty() || bootstrap_counts.empty())
    throw DimensionError("lambda, pass and bootstrap lists must be non-empty");
  for (double l : lambda_values)
    if (!(l >= 0.0) || !std::isfinite(l)) throw DimensionError("lambda values must be finite and >= 0");
  for (int t : pass_counts)
    if (t < 1) throw DimensionError("pass counts must be >= 1");
  for (int k : bootstrap_counts)
    if (k < 1) throw DimensionError("bootstrap counts must be >= 1");
  if (!(sweep_lambda >= 0.0)) throw DimensionError("sweep lambda must be >= 0");
}

int threads_from_env(int fallback) {
  if (const char* env = std::getenv("RISKPLAN_THREADS")) {
    if (auto v = detail::parse_int<int>(env); v && *v >= 0) return *v;
  }
  return fallback;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < std::min(threads, n); ++w)
      pool.emplace_back([&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::pair<PixelCoord, PixelCoord> sample_start_goal(const LabelMap& truth, const CostTable& table, Rng& rng) {
  std::vector<PixelCoord> free_cells;
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x)
      if (!table.is_impassable(truth(y, x))) free_cells.push_back({y, x});
  if (free_cells.size() < 2) throw SceneRejected("scene has fewer than two passable pixels");

  std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
  const double min_sep = std::max(truth.height(), truth.width()) / 4.0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    PixelCoord a = free_cells[pick(rng)], b = free_cells[pick(rng)];
    if (!(a == b) && chebyshev(a, b) >= min_sep) return {a, b};
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    PixelCoord a = free_cells[pick(rng)], b = free_cells[pick(rng)];
    if (!(a == b)) return {a, b};
  }
  return {free_cells[0], free_cells[1]};
}

SceneSpec eval_scene_spec(const ExperimentConfig& config, const CostTable& table, int scene_id) {
  SceneSpec spec;
  spec.height = config.height;
  spec.width = config.width;
  spec.num_classes = config.num_classes > 0 ? config.num_classes : int(table.size());
  spec.clutter = config.clutter;
  spec.color_noise = config.color_noise;
  spec.seed = derive_seed(config.seed, {kEvalSceneStream, std::uint64_t(scene_id)});
  return spec;
}

SceneSpec train_scene_spec(const ExperimentConfig& config, const CostTable& table, int index) {
  SceneSpec spec = eval_scene_spec(config, table, 0);
  spec.seed = derive_seed(config.seed, {kTrainSceneStream, std::uint64_t(index)});
  return spec;
}

TrainedModels train_models(const ExperimentConfig& config, const CostTable& table) {
  config.validate();
  std::vector<Scene> scenes;
  for (int i = 0; i < config.train_scenes; ++i)
    scenes.push_back(generate_scene(train_scene_spec(config, table, i), table.size()));

  TrainedModels models;
  TrainOptions dropout_opt = config.training;
  dropout_opt.seed = derive_seed(config.seed, {kModelStream});
  const PixelDataset data = make_dataset(scenes);
  models.dropout_model = train_classifier(data, dropout_opt);
  models.dropout_train_accuracy = accuracy(models.dropout_model, data);

  int members = config.fixed_samples;
  for (int k : config.bootstrap_counts) members = std::max(members, k);
  TrainOptions ens_opt = config.training;
  ens_opt.seed = derive_seed(config.seed, {kEnsembleStream});
  models.ensemble = train_bootstrap_ensemble(scenes, members, ens_opt, config.threads);
  return models;
}

namespace {

struct SceneContext {
  Scene scene;
  RiskCostMap truth_map;
  std::vector<std::pair<PixelCoord, PixelCoord>> pairs;
};

SceneContext prepare_scene(const ExperimentConfig& config, const CostTable& table, int scene_id) {
  SceneContext ctx;
  ctx.scene = generate_scene(eval_scene_spec(config, table, scene_id), table.size());
  ctx.truth_map = ground_truth_cost_map(ctx.scene.truth, table);
  Rng rng = make_rng(config.seed, {kPairStream, std::uint64_t(scene_id)});
  for (int p = 0; p < config.pairs_per_scene; ++p) ctx.pairs.push_back(sample_start_goal(ctx.scene.truth, table, rng));
  return ctx;
}

void add_trial(SweepResult& out, const SceneContext& ctx, int scene_id, const ConfidenceMaps& maps,
               const CostTable& table, Variant variant, double lambda, int samples, double sample_ms,
               std::size_t pair, const SurpriseOptions& surprise) {
  const auto [start, goal] = ctx.pairs[pair];
  const auto t0 = Clock::now();
  SurpriseReport r = run_scenario(maps, ctx.truth_map, table, RiskConfig{lambda}, variant, start, goal,
                                  Provenance{"", samples, 0}, surprise);
  const double plan_ms = elapsed_ms(t0);
  ExperimentRow row;
  row.scene_id = scene_id;
  row.variant = variant;
  row.lambda = variant == Variant::dropout || variant == Variant::bootstrap ? lambda : 0.0;
  row.samples = samples;
  row.start = start;
  row.goal = goal;
  row.expected_cost = r.expected_cost;
  row.actual_cost = r.actual_cost;
  row.surprise = r.surprise_factor;
  row.plan_ms = plan_ms;
  row.sample_ms = sample_ms;
  out.rows.push_back(row);
  out.paths.push_back(std::move(r.path));
}

SweepResult concat(std::vector<SweepResult>& parts) {
  SweepResult all;
  for (auto& p : parts) {
    all.rows.insert(all.rows.end(), p.rows.begin(), p.rows.end());
    std::move(p.paths.begin(), p.paths.end(), std::back_inserter(all.paths));
  }
  return all;
}

}  // namespace

SweepResult run_lambda_sweep(const ExperimentConfig& config, const CostTable& table, const TrainedModels& models) {
  config.validate();
  const int K = config.fixed_samples;
  if (int(models.ensemble.size()) < K) throw DimensionError("ensemble smaller than fixed_samples");
  const std::span<const TinyClassifier> members(models.ensemble.data(), std::size_t(K));

  std::vector<SweepResult> parts(config.scenes);
  parallel_for(config.scenes, config.threads, [&](int s) {
    const SceneContext ctx = prepare_scene(config, table, s);

    auto t0 = Clock::now();
    const SoftmaxStack det_stack = deterministic_stack(models.dropout_model, ctx.scene);
    const double det_ms = elapsed_ms(t0);
    const ConfidenceMaps det_maps = deterministic_baseline(det_stack, table);

    t0 = Clock::now();
    const SoftmaxStack drop_stack = sample_dropout_stack(
        models.dropout_model, ctx.scene, K, derive_seed(config.seed, {kDropoutStream, std::uint64_t(s), std::uint64_t(K)}));
    const double drop_ms = elapsed_ms(t0);
    const ConfidenceMaps drop_maps = estimate_confidence(drop_stack, table);

    t0 = Clock::now();
    const SoftmaxStack boot_stack = sample_bootstrap_stack(members, ctx.scene);
    const double boot_ms = elapsed_ms(t0);
    const ConfidenceMaps boot_maps = estimate_confidence(boot_stack, table);

    SweepResult& out = parts[s];
    for (std::size_t p = 0; p < ctx.pairs.size(); ++p) {
      add_trial(out, ctx, s, det_maps, table, Variant::ground_truth, 0.0, 0, 0.0, p, config.surprise);
      add_trial(out, ctx, s, det_maps, table, Variant::deterministic, 0.0, 1, det_ms, p, config.surprise);
      for (double lambda : config.lambda_values) {
        add_trial(out, ctx, s, drop_maps, table, Variant::dropout, lambda, K, drop_ms, p, config.surprise);
        add_trial(out, ctx, s, boot_maps, table, Variant::bootstrap, lambda, K, boot_ms, p, config.surprise);
      }
    }
  });
  return concat(parts);
}

SweepResult run_sample_sweep(const ExperimentConfig& config, const CostTable& table, const TrainedModels& models) {
  config.validate();
  int max_k = 0;
  for (int k : config.bootstrap_counts) max_k = std::max(max_k, k);
  if (int(models.ensemble.size()) < max_k) throw DimensionError("ensemble smaller than largest bootstrap count");

  std::vector<std::filesystem::path> checkpoints;
  if (config.reload_checkpoints) {
    std::filesystem::create_directories(config.output_dir);
    checkpoints = save_ensemble(std::span(models.ensemble.data(), std::size_t(max_k)), config.output_dir / "ensemble.tny");
  }

  std::vector<SweepResult> parts(config.scenes);
  // Serial: the wall times are the point of this sweep.
  parallel_for(config.scenes, 1, [&](int s) {
    const SceneContext ctx = prepare_scene(config, table, s);
    SweepResult& out = parts[s];

    for (int T : config.pass_counts) {
      const auto t0 = Clock::now();
      const SoftmaxStack stack = sample_dropout_stack(
          models.dropout_model, ctx.scene, T, derive_seed(config.seed, {kDropoutStream, std::uint64_t(s), std::uint64_t(T)}));
      const double ms = elapsed_ms(t0);
      const ConfidenceMaps maps = estimate_confidence(stack, table);
      for (std::size_t p = 0; p < ctx.pairs.size(); ++p)
        add_trial(out, ctx, s, maps, table, Variant::dropout, config.sweep_lambda, T, ms, p, config.surprise);
    }
    for (int K : config.bootstrap_counts) {
      const auto t0 = Clock::now();
      const SoftmaxStack stack =
          config.reload_checkpoints
              ? sample_bootstrap_stack_from_checkpoints(std::span(checkpoints.data(), std::size_t(K)), ctx.scene)
              : sample_bootstrap_stack(std::span(models.ensemble.data(), std::size_t(K)), ctx.scene);
      const double ms = elapsed_ms(t0);
      const ConfidenceMaps maps = estimate_confidence(stack, table);
      for (std::size_t p = 0; p < ctx.pairs.size(); ++p)
        add_trial(out, ctx, s, maps, table, Variant::bootstrap, config.sweep_lambda, K, ms, p, config.surprise);
    }
  });
  return concat(parts);
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
  struct Acc {
    SummaryRow row;
    std::vector<double> surprise;
    double expected = 0, actual = 0, plan = 0, sample = 0;
  };
  std::vector<Acc> groups;
  auto same = [](const SummaryRow& g, const ExperimentRow& r) {
    return g.variant == r.variant && g.lambda == r.lambda && g.samples == r.samples;
  };
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) { return same(a.row, r); });
    if (it == groups.end()) {
      groups.push_back({});
      it = groups.end() - 1;
      it->row.variant = r.variant;
      it->row.lambda = r.lambda;
      it->row.samples = r.samples;
    }
    it->surprise.push_back(r.surprise);
    it->expected += r.expected_cost;
    it->actual += r.actual_cost;
    it->plan += r.plan_ms;
    it->sample += r.sample_ms;
  }

  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    const double n = double(g.surprise.size());
    SummaryRow s = g.row;
    s.trials = int(g.surprise.size());
    double sum = 0;
    for (double v : g.surprise) sum += v;
    s.mean_surprise = sum / n;
    if (g.surprise.size() > 1) {
      double ss = 0;
      for (double v : g.surprise) ss += (v - s.mean_surprise) * (v - s.mean_surprise);
      s.sem_surprise = std::sqrt(ss / (n - 1)) / std::sqrt(n);
    }
    s.mean_expected_cost = g.expected / n;
    s.mean_actual_cost = g.actual / n;
    s.mean_plan_ms = g.plan / n;
    s.mean_sample_ms = g.sample / n;
    out.push_back(s);
  }
  for (auto& s : out) {
    auto base = std::find_if(out.begin(), out.end(), [&](const SummaryRow& b) {
      return b.variant == s.variant && b.samples == s.samples && b.lambda == 0.0;
    });
    if (base != out.end() && base->mean_actual_cost > 0.0)
      s.actual_cost_reduction_pct = 100.0 * (base->mean_actual_cost - s.mean_actual_cost) / base->mean_actual_cost;
  }
  return out;
}

std::string csv_header() {
  return "scene_id,variant,lambda,samples,start_y,start_x,goal_y,goal_x,expected_cost,actual_cost,surprise,plan_ms,"
         "sample_ms";
}

std::string format_csv_row(const ExperimentRow& r) {
  using detail::format_fixed6;
  std::ostringstream out;
  out << r.scene_id << ',' << variant_name(r.variant) << ',' << format_fixed6(r.lambda) << ',' << r.samples << ','
      << r.start.y << ',' << r.start.x << ',' << r.goal.y << ',' << r.goal.x << ',' << format_fixed6(r.expected_cost)
      << ',' << format_fixed6(r.actual_cost) << ',' << format_fixed6(r.surprise) << ',' << format_fixed6(r.plan_ms)
      << ',' << format_fixed6(r.sample_ms);
  return out.str();
}

std::string format_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += format_csv_row(r) + "\n";
  return out;
}

std::string summary_csv_header() {
  return "variant,lambda,samples,trials,mean_surprise,sem_surprise,mean_expected_cost,mean_actual_cost,"
         "actual_cost_reduction_pct,mean_plan_ms,mean_sample_ms";
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  using detail::format_fixed6;
  std::ostringstream out;
  out << summary_csv_header() << '\n';
  for (const auto& s : rows)
    out << variant_name(s.variant) << ',' << format_fixed6(s.lambda) << ',' << s.samples << ',' << s.trials << ','
        << format_fixed6(s.mean_surprise) << ',' << format_fixed6(s.sem_surprise) << ','
        << format_fixed6(s.mean_expected_cost) << ',' << format_fixed6(s.mean_actual_cost) << ','
        << format_fixed6(s.actual_cost_reduction_pct) << ',' << format_fixed6(s.mean_plan_ms) << ','
        << format_fixed6(s.mean_sample_ms) << '\n';
  return out.str();
}

}  // namespace riskplan
