#include "riskplan/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "riskplan/error.hpp"

namespace riskplan {

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (int c = 1; c < int(values.size()); ++c)
    if (values[c] > values[best]) best = c;
  return best;
}

namespace {

void check_classes(const SoftmaxStack& stack, const CostTable& table) {
  if (stack.passes() < 1) throw DimensionError("stack has no passes");
  if (std::size_t(stack.classes()) != table.size())
    throw DimensionError("stack has " + std::to_string(stack.classes()) + " classes, cost table has " +
                         std::to_string(table.size()));
}

ConfidenceMaps make_maps(const SoftmaxStack& stack) {
  ConfidenceMaps maps;
  maps.classes = stack.classes();
  maps.prediction = LabelMap(stack.height(), stack.width(), stack.classes());
  maps.base_cost = ScalarMap(stack.height(), stack.width());
  maps.uncertainty = ScalarMap(stack.height(), stack.width());
  maps.mean_softmax.assign(std::size_t(stack.height()) * stack.width() * stack.classes(), 0.0);
  return maps;
}

}  // namespace

ConfidenceMaps estimate_confidence(const SoftmaxStack& stack, const CostTable& table) {
  check_classes(stack, table);
  const int T = stack.passes(), C = stack.classes();
  ConfidenceMaps maps = make_maps(stack);

  std::vector<double> cost(C);
  for (int c = 0; c < C; ++c) cost[c] = cost_of(table, ClassId{std::uint16_t(c)});

  std::vector<double> samples(T);
  for (int y = 0; y < stack.height(); ++y)
    for (int x = 0; x < stack.width(); ++x) {
      double* mean = maps.mean_softmax.data() + (std::size_t(y) * stack.width() + x) * C;
      double sd_sum = 0.0;
      for (int c = 0; c < C; ++c) {
        for (int t = 0; t < T; ++t) samples[t] = stack.row(t, y, x)[c];
        std::sort(samples.begin(), samples.end());

        double sum = 0.0;
        for (double p : samples) sum += p;
        mean[c] = sum / T;

        if (T > 1) {
          // Shifted sums about the smallest sample: exact zero when all agree.
          const double ref = cost[c] * samples[0];
          double s1 = 0.0, s2 = 0.0;
          for (double p : samples) {
            const double d = cost[c] * p - ref;
            s1 += d;
            s2 += d * d;
          }
          const double var = (s2 - s1 * s1 / T) / (T - 1);
          sd_sum += var > 0.0 ? std::sqrt(var) : 0.0;
        }
      }
      const int pred = argmax_lowest({mean, std::size_t(C)});
      maps.prediction(y, x) = ClassId{std::uint16_t(pred)};
      maps.base_cost(y, x) = cost[pred];
      maps.uncertainty(y, x) = sd_sum / C;
    }
  return maps;
}

ConfidenceMaps deterministic_baseline(const SoftmaxStack& stack, const CostTable& table) {
  check_classes(stack, table);
  const int C = stack.classes();
  ConfidenceMaps maps = make_maps(stack);
  for (int y = 0; y < stack.height(); ++y)
    for (int x = 0; x < stack.width(); ++x) {
      double* mean = maps.mean_softmax.data() + (std::size_t(y) * stack.width() + x) * C;
      auto row = stack.row(0, y, x);
      std::copy(row.begin(), row.end(), mean);
      const int pred = argmax_lowest({mean, std::size_t(C)});
      maps.prediction(y, x) = ClassId{std::uint16_t(pred)};
      maps.base_cost(y, x) = cost_of(table, ClassId{std::uint16_t(pred)});
    }
  return maps;
}

}  // namespace riskplan
