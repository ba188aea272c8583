#include "riskplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "riskplan/error.hpp"
#include "riskplan/rng.hpp"

namespace riskplan {

std::array<double, kSceneColorChannels> class_mean_color(ClassId id) {
  if (id.index >= kMaxSceneClasses) throw TaxonomyError("no palette color for class " + std::to_string(id.index));
  // Points of the 3x3x3 lattice {0.15, 0.5, 0.85}^3, visited in a fixed
  // stride so consecutive classes land far apart.
  static constexpr double kLevels[3] = {0.15, 0.5, 0.85};
  int cell = (id.index * 10) % 27;
  return {kLevels[cell % 3], kLevels[(cell / 3) % 3], kLevels[cell / 9]};
}

bool on_class_boundary(const LabelMap& map, int y, int x) {
  const ClassId self = map(y, x);
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      int ny = y + dy, nx = x + dx;
      if ((dy || dx) && map.labels.contains(ny, nx) && map(ny, nx) != self) return true;
    }
  return false;
}

Scene generate_scene(const SceneSpec& spec, std::size_t taxonomy_size) {
  if (spec.height < 2 || spec.width < 2) throw DimensionError("scene must be at least 2x2");
  if (spec.num_classes < 1 || std::size_t(spec.num_classes) > taxonomy_size ||
      spec.num_classes > kMaxSceneClasses)
    throw TaxonomyError("scene class count " + std::to_string(spec.num_classes) +
                        " exceeds taxonomy size " + std::to_string(taxonomy_size));
  if (!(spec.clutter >= 0.0 && spec.clutter <= 1.0)) throw DimensionError("clutter must be in [0,1]");
  if (!(spec.color_noise >= 0.0) || !std::isfinite(spec.color_noise))
    throw DimensionError("color noise must be finite and >= 0");

  const int H = spec.height, W = spec.width, C = spec.num_classes;
  Rng layout_rng = make_rng(spec.seed, {0});
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(layout_rng); };

  const ClassId base{static_cast<std::uint16_t>(uniform_int(0, C - 1))};
  Scene scene;
  scene.seed = spec.seed;
  scene.truth = LabelMap(H, W, C, base);

  if (spec.clutter > 0.0 && C >= 2) {
    const int blobs = std::max(1, int(std::lround(spec.clutter * H * W / 30.0)));
    const int max_radius = std::max(1, std::min(H, W) / 6);
    for (int b = 0; b < blobs; ++b) {
      int cls = uniform_int(0, C - 2);
      if (cls >= base.index) ++cls;
      const int cy = uniform_int(0, H - 1), cx = uniform_int(0, W - 1);
      const int ry = uniform_int(1, max_radius), rx = uniform_int(1, max_radius);
      for (int y = std::max(0, cy - ry); y <= std::min(H - 1, cy + ry); ++y)
        for (int x = std::max(0, cx - rx); x <= std::min(W - 1, cx + rx); ++x) {
          double dy = double(y - cy) / ry, dx = double(x - cx) / rx;
          if (dy * dy + dx * dx <= 1.0) scene.truth(y, x) = ClassId{static_cast<std::uint16_t>(cls)};
        }
    }
    std::set<std::uint16_t> present;
    for (auto id : scene.truth.labels.data()) present.insert(id.index);
    // Blobs never use the base class, so a uniform map is all-blob.
    if (present.size() < 2) scene.truth(0, 0) = base;
  }

  // Features: class colors box-blurred over the 3x3 neighborhood (so
  // boundary pixels mix classes), plus Gaussian noise, plus position.
  Rng noise_rng = make_rng(spec.seed, {1});
  std::normal_distribution<double> noise(0.0, 1.0);
  scene.feature_dim = kSceneFeatureDim;
  scene.features.assign(std::size_t(H) * W * kSceneFeatureDim, 0.0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      std::array<double, kSceneColorChannels> mean{};
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!scene.truth.labels.contains(y + dy, x + dx)) continue;
          auto c = class_mean_color(scene.truth(y + dy, x + dx));
          for (int k = 0; k < kSceneColorChannels; ++k) mean[k] += c[k];
          ++n;
        }
      double* f = scene.features.data() + (std::size_t(y) * W + x) * kSceneFeatureDim;
      for (int k = 0; k < kSceneColorChannels; ++k) f[k] = mean[k] / n + spec.color_noise * noise(noise_rng);
      f[3] = double(y) / (H - 1);
      f[4] = double(x) / (W - 1);
    }
  return scene;
}

}  // namespace riskplan
