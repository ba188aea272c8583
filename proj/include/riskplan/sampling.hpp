#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "riskplan/classifier.hpp"
#include "riskplan/scene.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

enum class SamplerMode { dropout, bootstrap, synthetic };

struct SamplerConfig {
  SamplerMode mode = SamplerMode::dropout;
  int passes = 5;
  int bootstraps = 5;
  double dropout_rate = 0.5;
  /// Dirichlet sharpness for the synthetic sampler.
  double concentration = 20.0;
  std::uint64_t seed = 0;

  /// Throws DimensionError unless T >= 1, K >= 1, rate in [0,1), concentration > 0.
  void validate() const;
};

/// Concentration multiplier applied within one pixel of a class boundary.
inline constexpr double kBoundaryConcentrationFactor = 0.1;

/// Per pixel and pass, a Dirichlet draw whose mean puts 1/2 + 1/(2C) on the
/// true class and 1/(2C) on every other class. Pass t uses the RNG stream
/// derive_seed(seed, t).
SoftmaxStack sample_synthetic_stack(const Scene& scene, const SamplerConfig& config);

/// Monte Carlo dropout: T stochastic passes. Pass t draws one Bernoulli
/// keep-mask (p = 1 - rate) over the hidden units from stream
/// derive_seed(seed, t) and runs every pixel through that thinned network,
/// scaling survivors by 1/(1 - rate).
SoftmaxStack sample_dropout_stack(const TinyClassifier& model, const Scene& scene, int passes,
                                  std::uint64_t seed);

/// Single pass of the deterministic network (dropout off).
SoftmaxStack deterministic_stack(const TinyClassifier& model, const Scene& scene);

/// Pass t is ensemble member t's deterministic output.
SoftmaxStack sample_bootstrap_stack(std::span<const TinyClassifier> ensemble, const Scene& scene);

/// As sample_bootstrap_stack, but member t is read from its checkpoint file
/// immediately before its pass.
SoftmaxStack sample_bootstrap_stack_from_checkpoints(std::span<const std::filesystem::path> members,
                                                     const Scene& scene);

}  // namespace riskplan
