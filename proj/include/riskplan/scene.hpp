#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "riskplan/tensorio.hpp"

namespace riskplan {

/// Synthetic stand-in for an aerial image: ground-truth labels plus one
/// feature vector per pixel (three color channels, then normalized y and x).
struct Scene {
  LabelMap truth;
  int feature_dim = 0;
  std::vector<double> features;  // H * W * feature_dim, row-major
  std::uint64_t seed = 0;

  int height() const { return truth.height(); }
  int width() const { return truth.width(); }
  std::span<const double> feature(int y, int x) const {
    return {features.data() + (std::size_t(y) * width() + x) * feature_dim, std::size_t(feature_dim)};
  }
};

struct SceneSpec {
  int height = 48;
  int width = 48;
  int num_classes = 12;
  /// Fraction in [0,1]; 0 gives a single-class map.
  double clutter = 0.3;
  std::uint64_t seed = 0;
  /// Per-channel Gaussian color noise.
  double color_noise = 0.15;
};

inline constexpr int kSceneColorChannels = 3;
inline constexpr int kSceneFeatureDim = kSceneColorChannels + 2;
inline constexpr int kMaxSceneClasses = 27;

/// Mean color of a class; shared by all scenes so a classifier transfers.
std::array<double, kSceneColorChannels> class_mean_color(ClassId id);

/// Deterministic in `spec`. Throws TaxonomyError if num_classes exceeds
/// `taxonomy_size` (or the palette), DimensionError for grids below 2x2.
Scene generate_scene(const SceneSpec& spec, std::size_t taxonomy_size);

/// True if any 8-neighbor of (y, x) carries a different label.
bool on_class_boundary(const LabelMap& map, int y, int x);

}  // namespace riskplan
