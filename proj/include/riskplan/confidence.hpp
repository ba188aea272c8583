#pragma once

#include <vector>

#include "riskplan/taxonomy.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

/// Per-pixel outputs of confidence estimation.
struct ConfidenceMaps {
  /// Argmax of the mean softmax (lowest index wins ties).
  LabelMap prediction;
  /// Table cost of the predicted class.
  ScalarMap base_cost;
  /// Mean over classes of the across-pass standard deviation of the
  /// softmax-weighted class cost.
  ScalarMap uncertainty;
  /// Across-pass mean softmax, H * W * C row-major.
  std::vector<double> mean_softmax;
  int classes = 0;

  int height() const { return prediction.height(); }
  int width() const { return prediction.width(); }
  std::span<const double> mean_row(int y, int x) const {
    return {mean_softmax.data() + (std::size_t(y) * width() + x) * classes, std::size_t(classes)};
  }
};

/// Confidence estimation shared by Monte Carlo dropout and bootstrap
/// ensembles; only the origin of the passes differs.
///
/// For each pixel p and class c, with O(p,c,t) the softmax of pass t:
///   mean(p,c)   = mean_t O(p,c,t)
///   pred(p)     = argmax_c mean(p,c)
///   base(p)     = cost(pred(p))
///   sd(p,c)     = sample (n-1) standard deviation over t of cost(c) * O(p,c,t)
///   unc(p)      = mean_c sd(p,c)          (0 when T = 1)
///
/// The per-(p,c) samples are sorted before accumulation, so results are
/// bit-identical under any permutation of the passes, and exactly zero
/// wherever all passes agree.
ConfidenceMaps estimate_confidence(const SoftmaxStack& stack, const CostTable& table);

/// Risk-neutral perception: argmax of pass 0 alone, uncertainty 0.
ConfidenceMaps deterministic_baseline(const SoftmaxStack& stack, const CostTable& table);

/// Argmax with ties resolved to the lowest index.
int argmax_lowest(std::span<const double> values);

}  // namespace riskplan
