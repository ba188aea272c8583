#include "riskplan/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "riskplan/error.hpp"
#include "riskplan/rng.hpp"

namespace riskplan {

void SamplerConfig::validate() const {
  if (passes < 1) throw DimensionError("passes must be >= 1");
  if (bootstraps < 1) throw DimensionError("bootstraps must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DimensionError("dropout rate must be in [0,1)");
  if (!(concentration > 0.0) || !std::isfinite(concentration))
    throw DimensionError("concentration must be positive and finite");
}

namespace {

void store_row(std::span<const double> probs, std::span<float> dst) {
  for (std::size_t c = 0; c < probs.size(); ++c) dst[c] = static_cast<float>(probs[c]);
}

void check_model(const TinyClassifier& model, const Scene& scene) {
  if (model.inputs() != scene.feature_dim)
    throw DimensionError("model expects " + std::to_string(model.inputs()) + " features, scene has " +
                         std::to_string(scene.feature_dim));
}

void forward_pass(const TinyClassifier& model, const Scene& scene, SoftmaxStack& stack, int t) {
  std::vector<double> probs(model.outputs());
  for (int y = 0; y < scene.height(); ++y)
    for (int x = 0; x < scene.width(); ++x) {
      model.predict(scene.feature(y, x), probs);
      store_row(probs, stack.row(t, y, x));
    }
}

}  // namespace

SoftmaxStack sample_synthetic_stack(const Scene& scene, const SamplerConfig& config) {
  config.validate();
  if (config.mode != SamplerMode::synthetic) throw DimensionError("sampler mode must be synthetic");
  const int C = scene.truth.num_classes;
  if (C < 2) throw DimensionError("synthetic stacks need at least two classes");
  const int H = scene.height(), W = scene.width();
  SoftmaxStack stack(config.passes, H, W, C);

  const double on_true = 0.5 + 0.5 / C;
  const double off_true = 0.5 / C;
  std::vector<double> draw(C);
  for (int t = 0; t < config.passes; ++t) {
    Rng rng = make_rng(config.seed, {std::uint64_t(t)});
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const int truth = scene.truth(y, x).index;
        const double conc =
            config.concentration * (on_class_boundary(scene.truth, y, x) ? kBoundaryConcentrationFactor : 1.0);
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
          std::gamma_distribution<double> gamma(conc * (c == truth ? on_true : off_true), 1.0);
          draw[c] = gamma(rng);
          sum += draw[c];
        }
        if (!(sum > 0.0)) {
          // Every gamma draw underflowed; fall back to the distribution mean.
          for (int c = 0; c < C; ++c) draw[c] = c == truth ? on_true : off_true;
          sum = 1.0;
        }
        for (double& v : draw) v /= sum;
        store_row(draw, stack.row(t, y, x));
      }
  }
  return stack;
}

SoftmaxStack sample_dropout_stack(const TinyClassifier& model, const Scene& scene, int passes,
                                  std::uint64_t seed) {
  if (passes < 1) throw DimensionError("passes must be >= 1");
  check_model(model, scene);
  SoftmaxStack stack(passes, scene.height(), scene.width(), model.outputs());
  const double keep = 1.0 - model.dropout_rate();
  const double scale = 1.0 / keep;
  std::vector<int> active;
  std::vector<double> probs(model.outputs());
  for (int t = 0; t < passes; ++t) {
    Rng rng = make_rng(seed, {std::uint64_t(t)});
    std::bernoulli_distribution keep_unit(keep);
    active.clear();
    for (int h = 0; h < model.hidden(); ++h)
      if (model.dropout_rate() == 0.0 || keep_unit(rng)) active.push_back(h);
    for (int y = 0; y < scene.height(); ++y)
      for (int x = 0; x < scene.width(); ++x) {
        model.predict_masked(scene.feature(y, x), active, scale, probs);
        store_row(probs, stack.row(t, y, x));
      }
  }
  return stack;
}

SoftmaxStack deterministic_stack(const TinyClassifier& model, const Scene& scene) {
  check_model(model, scene);
  SoftmaxStack stack(1, scene.height(), scene.width(), model.outputs());
  forward_pass(model, scene, stack, 0);
  return stack;
}

SoftmaxStack sample_bootstrap_stack(std::span<const TinyClassifier> ensemble, const Scene& scene) {
  if (ensemble.empty()) throw DimensionError("empty ensemble");
  const int C = ensemble.front().outputs();
  for (const auto& m : ensemble) {
    if (m.outputs() != C) throw DimensionError("ensemble members disagree on output dimension");
    check_model(m, scene);
  }
  SoftmaxStack stack(int(ensemble.size()), scene.height(), scene.width(), C);
  for (std::size_t t = 0; t < ensemble.size(); ++t) forward_pass(ensemble[t], scene, stack, int(t));
  return stack;
}

SoftmaxStack sample_bootstrap_stack_from_checkpoints(std::span<const std::filesystem::path> members,
                                                     const Scene& scene) {
  if (members.empty()) throw DimensionError("empty ensemble");
  SoftmaxStack stack;
  for (std::size_t t = 0; t < members.size(); ++t) {
    const TinyClassifier model = load_classifier(members[t]);
    check_model(model, scene);
    if (t == 0) stack = SoftmaxStack(int(members.size()), scene.height(), scene.width(), model.outputs());
    if (model.outputs() != stack.classes()) throw DimensionError("ensemble members disagree on output dimension");
    forward_pass(model, scene, stack, int(t));
  }
  return stack;
}

}  // namespace riskplan
